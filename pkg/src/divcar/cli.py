"""Command-line entry point: ``divcar {gen,build,query,eval,sweep,verify}``.

Machine output (JSON or CSV) goes to stdout or ``--out``; diagnostics go to
stderr.  Exit codes: 0 ok, 2 input error, 3 unknown keyword, 4 infeasible
query, 5 internal error or verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from pathlib import Path

from . import graph as graphmod
from .errors import DivcarError, KeywordUncoveredInGraph, UnknownKeyword
from .evaluation import (
    P_ALL, SweepSpec, SyntheticSpec, generate_corpus, leave_one_out_eval, pick_eval_apps, run_sweep,
)
from .ingest import load_corpus, serialize_corpus
from .oracle import oracle_exact, random_instance
from .pipeline import recommend
from .ranker import DEFAULT_K, DEFAULT_THETA, result_to_json
from .sampler import SampleConfig
from .steiner import Query, search_min_gst, tree_violations

DEFAULT_SEED = 20220101

log = logging.getLogger("divcar")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(P_ALL if x.strip() == "all" else int(x) for x in text.split(",") if x.strip())


def _p_value(text: str) -> int:
    return P_ALL if text == "all" else int(text)


def cmd_gen(args) -> int:
    spec = SyntheticSpec(
        n_apis=args.n_apis, n_apps=args.n_apps, n_keywords=args.n_keywords,
        community_count=args.communities, apis_per_app=(args.min_apis, args.max_apis), seed=args.seed,
    )
    eco = generate_corpus(spec)
    api_text, app_text = serialize_corpus(eco)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "apis.jsonl").write_text(api_text, encoding="utf-8")
    (out / "apps.jsonl").write_text(app_text, encoding="utf-8")
    sys.stdout.write(_dump({"apis": len(eco.apis), "apps": len(eco.apps), "out": str(out)}))
    return 0


def cmd_build(args) -> int:
    eco = load_corpus(args.apis, args.apps)
    g = graphmod.build_wacg(eco)
    Path(args.out).write_bytes(graphmod.serialize(g))
    stats = g.stats()
    stats["component_coverage"] = graphmod.component_coverage(eco, g)
    sys.stdout.write(json.dumps(stats, sort_keys=True) + "\n")
    return 0


def cmd_query(args) -> int:
    g = graphmod.load_graph(args.graph)
    q = Query.of(args.keywords.split(","))
    unknown = [k for k in q.keywords if k not in g.keyword_index]
    if unknown:
        raise UnknownKeyword(unknown)
    cfg = SampleConfig(z=args.z, p=args.p, seed=args.seed)
    rec = recommend(g, q, cfg, args.k, args.theta, jobs=args.jobs)
    if not rec.result.lists:
        # no sample produced a covering tree
        raise KeywordUncoveredInGraph(q.keywords)
    doc = result_to_json(rec.result, q.keywords, z=args.z, p=args.p, seed=args.seed)
    _emit(_dump(doc), args.out)
    log.info("query answered in %.3f s (%d of %d lists)", rec.elapsed, len(rec.result), args.k)
    return 0


def cmd_eval(args) -> int:
    eco = load_corpus(args.apis, args.apps)
    apps = args.app or pick_eval_apps(eco, args.n_eval_apps, args.seed)
    rows = []
    for app in apps:
        try:
            rep = leave_one_out_eval(eco, app, args.k, args.theta, args.z, args.p, args.seed,
                                     ranking=args.ranking, jobs=args.jobs)
            rows.append({"app": app, **rep.as_dict()})
        except DivcarError as exc:
            rows.append({"app": app, "skipped": type(exc).__name__, "reason": str(exc)})
        log.info("evaluated %s", app)
    if not args.timing:
        for row in rows:
            row.pop("wall_time_seconds", None)
    _emit(_dump({"k": args.k, "theta": args.theta, "z": args.z, "p": args.p, "seed": args.seed,
                 "instances": rows}), args.out)
    return 0


def cmd_sweep(args) -> int:
    eco = load_corpus(args.apis, args.apps)
    spec = SweepSpec(
        z_values=args.z, p_values=args.p, r_values=args.r, repetitions=args.reps, seed=args.seed,
        n_eval_apps=args.n_eval_apps, k=args.k, theta=args.theta,
    )
    _emit(run_sweep(eco, spec, jobs=args.jobs, timing=args.timing), args.out)
    return 0


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    mismatches, violations = [], []
    t0 = time.perf_counter()
    for i in range(args.instances):
        g, q = random_instance(rng, n_max=args.max_vertices, r_max=args.max_keywords)
        got, want = search_min_gst(g, q), oracle_exact(g, q)
        if (got is None) != (want is None) or (got and got.total_length != want.total_length):
            mismatches.append(i)
        elif got is not None and tree_violations(got, g, q):
            violations.append(i)
    doc = {
        "instances": args.instances,
        "seed": args.seed,
        "mismatches": mismatches,
        "violations": violations,
    }
    sys.stdout.write(_dump(doc))
    log.info("verified %d instances in %.2f s", args.instances, time.perf_counter() - t0)
    return 5 if mismatches or violations else 0


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--theta", type=float, default=DEFAULT_THETA)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="divcar", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-apis", type=int, default=500)
    p.add_argument("--n-apps", type=int, default=2000)
    p.add_argument("--n-keywords", type=int, default=60)
    p.add_argument("--communities", type=int, default=6)
    p.add_argument("--min-apis", type=int, default=3)
    p.add_argument("--max-apis", type=int, default=5)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="build the correlation graph file")
    p.add_argument("--apis", required=True)
    p.add_argument("--apps", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="recommend diverse API sets for keywords")
    p.add_argument("--graph", required=True)
    p.add_argument("--keywords", required=True, help="comma-separated")
    p.add_argument("--z", type=int, default=100)
    p.add_argument("--p", type=_p_value, default=100)
    _common(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", help="leave-one-app-out evaluation")
    p.add_argument("--apis", required=True)
    p.add_argument("--apps", required=True)
    p.add_argument("--app", action="append", help="app id to hold out (repeatable)")
    p.add_argument("--n-eval-apps", type=int, default=100)
    p.add_argument("--ranking", choices=["compatibility", "accuracy"], default="compatibility")
    p.add_argument("--z", type=int, default=100)
    p.add_argument("--p", type=_p_value, default=100)
    p.add_argument("--no-timing", dest="timing", action="store_false")
    _common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="(z, p, r) parameter sweep to CSV")
    p.add_argument("--apis", required=True)
    p.add_argument("--apps", required=True)
    p.add_argument("--z", type=_int_list, default=(10, 100))
    p.add_argument("--p", type=_int_list, default=(50, 100, 200))
    p.add_argument("--r", type=_int_list, default=(3, 4, 5, 6))
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--n-eval-apps", type=int, default=100)
    p.add_argument("--no-timing", dest="timing", action="store_false",
                   help="leave mean_wall_s blank for byte-reproducible output")
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check the search against the brute-force oracle")
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--max-vertices", type=int, default=10)
    p.add_argument("--max-keywords", type=int, default=3)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except DivcarError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
