"""Command-line front end: check, search, formula, verify, simulate, dot.

Exit codes: 0 when the criterion is satisfied / the verification is clean /
all simulations pass; 1 when the criterion fails, a violation is found, or a
comparison misses its tolerance; 2 for usage and parse errors.  JSON goes to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from scgfd.criterion import EffectQuery, check_front_door, search_front_door_sets
from scgfd.estimand import (
    build_estimand,
    front_door_sets,
    render_estimand,
    shared_covariate_caveat,
)
from scgfd.graph import Scg, ScgError, parse_scg
from scgfd.oracle import find_direction_ambiguity, verify_front_door_claims
from scgfd.simulate import compare, sample_scm
from scgfd.unroll import enumerate_candidates


def _load_graph(path: str) -> Scg:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scg(fh.read())


def _query(args) -> EffectQuery:
    return EffectQuery(
        cause=args.cause,
        effect=args.effect,
        gamma=args.gamma,
        gamma_max=args.gamma_max,
    )


def _mediators(args) -> frozenset[str]:
    if not args.mediators:
        return frozenset()
    return frozenset(tok for tok in args.mediators.split(",") if tok)


def _add_query_flags(p: argparse.ArgumentParser, mediators: bool = True) -> None:
    p.add_argument("--graph", required=True, help="SCG file")
    p.add_argument("--cause", required=True)
    p.add_argument("--effect", required=True)
    p.add_argument("--gamma", type=int, required=True)
    p.add_argument("--gamma-max", type=int, default=1)
    if mediators:
        p.add_argument("--mediators", default="", help="comma-separated series")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="scgfd",
        description="Front-door identification on summary causal graphs",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide the criterion for a mediator set")
    _add_query_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("search", help="find qualifying mediator sets")
    _add_query_flags(p, mediators=False)
    p.add_argument("--max-set-size", type=int, default=2)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("formula", help="emit the do-free estimand")
    _add_query_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("verify", help="brute-force verification of the blocking claims")
    _add_query_flags(p)
    p.add_argument("--window", type=int, default=8)
    p.add_argument("--max-candidates", type=int, default=20000)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("simulate", help="compare the estimand to exact truth")
    _add_query_flags(p)
    p.add_argument("--window", type=int, default=0, help="0 picks the minimum legal window")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--cardinality", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-candidates", type=int, default=20000)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("ambiguity", help="direction-ambiguity witnesses for a pair")
    p.add_argument("--graph", required=True)
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p.add_argument("--gamma-max", type=int, default=1)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("dot", help="DOT export (convenience, no contract)")
    p.add_argument("--graph", required=True)
    return ap


def _cmd_check(args) -> int:
    g = _load_graph(args.graph)
    report = check_front_door(g, _mediators(args), _query(args))
    if args.json:
        print(report.to_json())
    else:
        print(f"satisfied: {report.satisfied}")
        print(
            "conditions: 1={} 2={} 3={}".format(*report.conditions)
            + f" variant={report.variant}"
        )
        if report.degenerate:
            print("degenerate: no activated directed path from cause to effect")
        for name, path in sorted(report.witnesses.items()):
            print(f"witness {name}: {path}")
    return 0 if report.satisfied else 1


def _cmd_search(args) -> int:
    g = _load_graph(args.graph)
    results = search_front_door_sets(g, _query(args), max_size=args.max_set_size)
    if args.json:
        print(
            json.dumps(
                [
                    {"mediators": sorted(s), "variant": r.variant,
                     "degenerate": r.degenerate}
                    for s, r in results
                ],
                sort_keys=True,
            )
        )
    else:
        if not results:
            print("no qualifying mediator set")
        for s, r in results:
            flag = " (degenerate)" if r.degenerate else ""
            print("{" + ", ".join(sorted(s)) + "}" + f" variant={r.variant}{flag}")
    return 0 if results else 1


def _cmd_formula(args) -> int:
    g = _load_graph(args.graph)
    q = _query(args)
    w = _mediators(args)
    report = check_front_door(g, w, q)
    if not report.satisfied:
        print(
            f"criterion not satisfied (conditions {report.conditions}, "
            f"variant {report.variant}); no estimand emitted",
            file=sys.stderr,
        )
        return 1
    sets = front_door_sets(g, w, q, report.variant)
    ast = build_estimand(sets, q)
    flagged = shared_covariate_caveat(g, q, ast)
    if flagged:
        print(
            "warning: covariates {} may respond to the intervention; "
            "the stratified formula is not exact in that case".format(
                ", ".join(map(str, flagged))
            ),
            file=sys.stderr,
        )
    print(render_estimand(ast, format=args.format))
    return 0


def _cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    report = verify_front_door_claims(
        g, _mediators(args), _query(args), L=args.window, cap=args.max_candidates
    )
    if args.json:
        print(report.to_json())
    else:
        print(
            f"candidates checked: {report.candidates_checked}"
            f" truncated: {report.truncated}"
        )
        print(f"violations: {len(report.violations)}")
        for v in report.violations:
            print(f"  {v}")
    return 0 if report.ok else 1


def _cmd_simulate(args) -> int:
    g = _load_graph(args.graph)
    q = _query(args)
    w = _mediators(args)
    report = check_front_door(g, w, q)
    if not report.satisfied:
        print("criterion not satisfied; nothing to simulate", file=sys.stderr)
        return 1
    window = args.window or (2 * (q.gamma + q.gamma_max) + 2)
    sets = front_door_sets(g, w, q, report.variant)
    ast = build_estimand(sets, q)
    enum = enumerate_candidates(g, q.gamma_max, cap=args.max_candidates)
    lines = []
    all_pass = True
    for trial in range(args.trials):
        seed = args.seed + trial
        idx = seed % len(enum.candidates)
        model = sample_scm(enum.candidates[idx], window, args.cardinality, seed)
        cr = compare(ast, model, q, tol=args.tol)
        all_pass &= cr.passed
        lines.append(cr.to_json_dict(seed, idx))
    if args.json:
        print(json.dumps(lines, sort_keys=True))
    else:
        for row in lines:
            print(
                f"seed={row['seed']} candidate={row['candidate_index']}"
                f" max_abs_error={row['max_abs_error']:.3e} pass={row['pass']}"
            )
        print(f"all passed: {all_pass}")
    return 0 if all_pass else 1


def _cmd_ambiguity(args) -> int:
    g = _load_graph(args.graph)
    pair = find_direction_ambiguity(g, args.first, args.second, args.gamma_max)
    if pair is None:
        print("no double arrow between the pair; no ambiguity witnesses")
        return 1
    a, b = args.first, args.second
    payload = []
    for spec, head in zip(pair, (f"{a}->{b}", f"{b}->{a}")):
        payload.append(
            {
                "lag0_parent": head,
                "templates": [
                    f"{t.kind} {t.src}->{t.dst} lag {t.lag}"
                    for t in sorted(spec.templates)
                ],
            }
        )
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for item in payload:
            print(f"candidate with {item['lag0_parent']} at lag 0:")
            for t in item["templates"]:
                print(f"  {t}")
    return 0


def _cmd_dot(args) -> int:
    g = _load_graph(args.graph)
    lines = ["digraph scg {"]
    for v in g.series:
        lines.append(f'  "{v}";')
    for a, b in sorted(g.directed):
        lines.append(f'  "{a}" -> "{b}";')
    for a, b in sorted(g.bidirected):
        lines.append(f'  "{a}" -> "{b}" [dir=both, style=dashed];')
    lines.append("}")
    print("\n".join(lines))
    return 0


_COMMANDS = {
    "check": _cmd_check,
    "search": _cmd_search,
    "formula": _cmd_formula,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "ambiguity": _cmd_ambiguity,
    "dot": _cmd_dot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (ScgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
