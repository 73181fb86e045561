"""Diverse, compatibility-optimal web API set recommendation.

Pipeline: co-usage corpus -> correlation graph -> random-walk samples ->
minimum group Steiner tree per sample -> ranked, pairwise-diverse top-K.
"""

from .evaluation import SyntheticSpec, generate_corpus, leave_one_out_eval
from .graph import CorrelationGraph, build_wacg, deserialize, serialize
from .ingest import Ecosystem, derive_query_sets, load_corpus, parse_corpus
from .oracle import oracle_exact
from .pipeline import recommend
from .ranker import RankedResult, RecommendationList, diversity, rank_and_diversify
from .sampler import SampleConfig, Subgraph, coverage_report, sample_subgraphs
from .steiner import MAX_SCORE, Query, SteinerTree, search_min_gst, tree_compatibility

__all__ = [
    "SyntheticSpec", "generate_corpus", "leave_one_out_eval", "load_corpus", "oracle_exact",
    "CorrelationGraph", "Ecosystem", "MAX_SCORE", "Query", "RankedResult", "RecommendationList",
    "SampleConfig", "SteinerTree", "Subgraph", "build_wacg", "coverage_report", "derive_query_sets",
    "deserialize", "diversity", "parse_corpus", "rank_and_diversify", "recommend", "sample_subgraphs",
    "search_min_gst", "serialize", "tree_compatibility",
]
