import io
import sys
import random

import pytest

from divcar.evaluation import SyntheticSpec, generate_corpus
from divcar.graph import CorrelationGraph, build_wacg
from divcar.ingest import parse_corpus


def corpus(apis: dict, apps: dict):
    import json
    api_lines = [json.dumps({"api": a, "tags": t}) + "\n" for a, t in apis.items()]
    app_lines = [json.dumps({"app": m, "apis": s}) + "\n" for m, s in apps.items()]
    return parse_corpus(io.StringIO("".join(api_lines)), io.StringIO("".join(app_lines)))


def graph(tags: dict, edges: list) -> CorrelationGraph:
    """Graph from {name: tags} and [(name, name, count)], names sorted into indices."""
    names = sorted(tags)
    pos = {n: i for i, n in enumerate(names)}
    return CorrelationGraph.from_edges(
        names, [tags[n] for n in names], [(pos[a], pos[b], c) for a, b, c in edges]
    )


@pytest.fixture(scope="session")
def synthetic_eco():
    return generate_corpus(SyntheticSpec())


@pytest.fixture(scope="session")
def synthetic_graph(synthetic_eco):
    return build_wacg(synthetic_eco)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.VERDICTS):
            terminalreporter.write_line(line)
