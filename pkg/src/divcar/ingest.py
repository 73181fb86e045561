"""Reading and writing the APP-API co-usage corpus.

Both files are JSON-lines:

    {"api": "<id>", "tags": ["<kw>", ...]}
    {"app": "<id>", "apis": ["<id>", ...]}

Identifiers and keywords are trimmed and compared exactly (no case folding).
Extra fields are ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DanglingApiRef, DuplicateId, EmptyCorpus, MalformedLine


@dataclass(frozen=True)
class Ecosystem:
    apis: Mapping[str, frozenset[str]]
    apps: Mapping[str, frozenset[str]]

    def __post_init__(self) -> None:
        for app, members in self.apps.items():
            if not members:
                raise MalformedLine(0, f"app {app!r} has no APIs")
            for api in members:
                if api not in self.apis:
                    raise DanglingApiRef(app, api)

    def without_app(self, app_id: str) -> "Ecosystem":
        """Drop one app's co-usage record; its APIs stay in the catalog."""
        return Ecosystem(self.apis, {a: s for a, s in self.apps.items() if a != app_id})


@dataclass(frozen=True)
class QuerySet:
    app: str
    keywords: frozenset[str]
    excluded: bool = field(default=False)


def _ident(value, line_no: int, what: str) -> str:
    if not isinstance(value, str):
        raise MalformedLine(line_no, f"{what} must be a string")
    value = value.strip()
    if not value:
        raise MalformedLine(line_no, f"empty {what}")
    return value


def _records(stream: Iterable[str]):
    for line_no, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, exc.msg) from None
        if not isinstance(obj, dict):
            raise MalformedLine(line_no, "record is not an object")
        yield line_no, obj


def parse_corpus(api_stream: Iterable[str], app_stream: Iterable[str]) -> Ecosystem:
    apis: dict[str, frozenset[str]] = {}
    for line_no, obj in _records(api_stream):
        api = _ident(obj.get("api"), line_no, "api id")
        tags = obj.get("tags", [])
        if not isinstance(tags, list):
            raise MalformedLine(line_no, "tags must be a list")
        if api in apis:
            raise DuplicateId(api)
        apis[api] = frozenset(_ident(t, line_no, "tag") for t in tags)

    apps: dict[str, frozenset[str]] = {}
    for line_no, obj in _records(app_stream):
        app = _ident(obj.get("app"), line_no, "app id")
        members = obj.get("apis")
        if not isinstance(members, list) or not members:
            raise MalformedLine(line_no, "apis must be a nonempty list")
        if app in apps:
            raise DuplicateId(app)
        ids = frozenset(_ident(a, line_no, "api id") for a in members)
        for api in sorted(ids):
            if api not in apis:
                raise DanglingApiRef(app, api)
        apps[app] = ids

    if not apis or not apps:
        raise EmptyCorpus("corpus needs at least one API and one app")
    return Ecosystem(apis, apps)


def load_corpus(api_path, app_path) -> Ecosystem:
    with open(api_path, encoding="utf-8") as fa, open(app_path, encoding="utf-8") as fb:
        return parse_corpus(fa, fb)


def serialize_corpus(eco: Ecosystem) -> tuple[str, str]:
    """Return (api_text, app_text) in canonical sorted order."""
    api_lines = [
        json.dumps({"api": a, "tags": sorted(eco.apis[a])}, ensure_ascii=False)
        for a in sorted(eco.apis)
    ]
    app_lines = [
        json.dumps({"app": m, "apis": sorted(eco.apps[m])}, ensure_ascii=False)
        for m in sorted(eco.apps)
    ]
    return "".join(l + "\n" for l in api_lines), "".join(l + "\n" for l in app_lines)


def derive_query_sets(eco: Ecosystem) -> list[QuerySet]:
    """Union of constituent API tags per app, in sorted app order.

    Apps whose union has exactly two keywords are flagged as excluded from
    evaluation.
    """
    out = []
    for app in sorted(eco.apps):
        kws = frozenset().union(*(eco.apis[a] for a in eco.apps[app]))
        out.append(QuerySet(app, kws, excluded=len(kws) == 2))
    return out
