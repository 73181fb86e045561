"""Exception hierarchy shared by the pipeline.

Each error carries the CLI exit code it maps to.
"""

from __future__ import annotations


class DivcarError(Exception):
    exit_code = 5


class InputError(DivcarError):
    """Malformed or inconsistent input data (exit code 2)."""

    exit_code = 2


class MalformedLine(InputError):
    def __init__(self, line_no: int, reason: str = "") -> None:
        self.line_no = line_no
        super().__init__(f"malformed record on line {line_no}" + (f": {reason}" if reason else ""))


class DuplicateId(InputError):
    def __init__(self, ident: str) -> None:
        self.ident = ident
        super().__init__(f"duplicate id {ident!r}")


class DanglingApiRef(InputError):
    def __init__(self, app: str, api: str) -> None:
        self.app, self.api = app, api
        super().__init__(f"app {app!r} references unknown api {api!r}")


class EmptyCorpus(InputError):
    pass


class NoEdges(InputError):
    def __init__(self) -> None:
        super().__init__("no app invokes two or more APIs; the correlation graph has no edges")


class VersionMismatch(InputError):
    def __init__(self, found) -> None:
        self.found = found
        super().__init__(f"unsupported graph file version {found!r}")


class CorruptPayload(InputError):
    pass


class InfeasibleSpec(InputError):
    pass


class UnknownKeyword(DivcarError):
    exit_code = 3

    def __init__(self, keywords) -> None:
        self.keywords = sorted(keywords)
        super().__init__(f"unknown keyword(s): {', '.join(self.keywords)}")


class KeywordUncoveredInGraph(DivcarError):
    exit_code = 4

    def __init__(self, keywords) -> None:
        self.keywords = sorted(keywords)
        super().__init__(f"keyword(s) not covered by any vertex: {', '.join(self.keywords)}")


EmptyKeywordCover = KeywordUncoveredInGraph


class MaskWidthExceeded(InputError):
    def __init__(self, r: int, cap: int) -> None:
        self.r = r
        super().__init__(f"query has {r} keywords; the bitmask cap is {cap}")


class ProvenanceCycle(DivcarError):
    """Internal assertion: search provenance did not form a tree."""


class TooLarge(DivcarError):
    def __init__(self, n: int, cap: int) -> None:
        self.n = n
        super().__init__(f"oracle refuses {n} vertices (cap {cap})")


class ExcludedApp(DivcarError):
    pass


class KeywordLost(DivcarError):
    pass
