import io
import json

import pytest
from hypothesis import given, strategies as st

from divcar.errors import DanglingApiRef, DuplicateId, EmptyCorpus, MalformedLine
from divcar.ingest import Ecosystem, derive_query_sets, parse_corpus, serialize_corpus

from conftest import corpus


def test_minimal_corpus():
    eco = corpus({"a1": ["q1"], "a2": ["q2"]}, {"m1": ["a1", "a2"]})
    assert len(eco.apis) == 2 and len(eco.apps) == 1
    assert eco.apps["m1"] == {"a1", "a2"}


def test_dangling_reference():
    with pytest.raises(DanglingApiRef) as exc:
        corpus({"a1": ["q1"]}, {"m1": ["a1", "a9"]})
    assert (exc.value.app, exc.value.api) == ("m1", "a9")


def test_duplicate_ids_rejected():
    with pytest.raises(DuplicateId):
        parse_corpus(
            io.StringIO('{"api":"a1","tags":[]}\n{"api":"a1","tags":["x"]}\n'),
            io.StringIO('{"app":"m","apis":["a1"]}\n'),
        )
    with pytest.raises(DuplicateId):
        parse_corpus(
            io.StringIO('{"api":"a1","tags":[]}\n'),
            io.StringIO('{"app":"m","apis":["a1"]}\n{"app":"m","apis":["a1"]}\n'),
        )


@pytest.mark.parametrize("line", ["not json", "[1,2]", '{"api": ""}', '{"api": 3}', '{"api":"a","tags":"x"}'])
def test_malformed_api_lines(line):
    with pytest.raises(MalformedLine) as exc:
        parse_corpus(io.StringIO('{"api":"ok","tags":[]}\n' + line + "\n"), io.StringIO(""))
    assert exc.value.line_no == 2


def test_empty_corpus():
    with pytest.raises(EmptyCorpus):
        parse_corpus(io.StringIO(""), io.StringIO(""))


def test_trimming_and_extra_fields():
    eco = parse_corpus(
        io.StringIO('{"api":" a1 ","tags":[" Maps "],"version":"2"}\n'),
        io.StringIO('{"app":"m","apis":["a1","a1"],"url":"x"}\n'),
    )
    assert eco.apis == {"a1": frozenset({"Maps"})}
    assert eco.apps["m"] == frozenset({"a1"})


def test_keywords_are_case_sensitive():
    eco = corpus({"a": ["Maps"], "b": ["maps"]}, {"m": ["a", "b"]})
    (qs,) = derive_query_sets(eco)
    assert qs.keywords == {"Maps", "maps"}


def test_derive_query_union():
    eco = corpus({"a1": ["q1", "q2"], "a2": ["q2", "q3"]}, {"m1": ["a1", "a2"]})
    (qs,) = derive_query_sets(eco)
    assert (qs.app, qs.keywords, qs.excluded) == ("m1", {"q1", "q2", "q3"}, False)


def test_two_keyword_apps_flagged():
    eco = corpus({"a1": ["q1"], "a2": ["q2"]}, {"m": ["a1", "a2"]})
    assert derive_query_sets(eco)[0].excluded


def test_single_api_app_keywords():
    eco = corpus({"a3": ["q1", "q4", "q12"]}, {"m": ["a3"]})
    assert derive_query_sets(eco)[0].keywords == {"q1", "q4", "q12"}


ids = st.text(alphabet="abcxyz019_-", min_size=1, max_size=6)


@st.composite
def ecosystems(draw):
    apis = draw(st.dictionaries(ids, st.frozensets(ids, max_size=4), min_size=1, max_size=8))
    names = sorted(apis)
    apps = draw(st.dictionaries(ids, st.frozensets(st.sampled_from(names), min_size=1), min_size=1, max_size=6))
    return Ecosystem(apis, apps)


@given(ecosystems())
def test_round_trip(eco):
    api_text, app_text = serialize_corpus(eco)
    back = parse_corpus(io.StringIO(api_text), io.StringIO(app_text))
    assert dict(back.apis) == dict(eco.apis)
    assert dict(back.apps) == dict(eco.apps)


@given(ecosystems())
def test_query_sets_cover_apps(eco):
    out = derive_query_sets(eco)
    assert len(out) == len(eco.apps)
    for qs in out:
        for k in qs.keywords:
            assert any(k in eco.apis[a] for a in eco.apps[qs.app])


def test_full_scale_shape():
    # structure check at the real crawl's size; the data itself is not shipped
    apis = "".join(json.dumps({"api": f"api{i}", "tags": [f"t{i % 400}"]}) + "\n" for i in range(18478))
    apps = "".join(
        json.dumps({"app": f"app{j}", "apis": [f"api{(j * 7 + k) % 18478}" for k in range(3)]}) + "\n"
        for j in range(6146)
    )
    eco = parse_corpus(io.StringIO(apis), io.StringIO(apps))
    assert (len(eco.apis), len(eco.apps)) == (18478, 6146)
