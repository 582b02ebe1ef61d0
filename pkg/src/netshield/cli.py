"""Command-line entry point: ``netshield eval|br|oracle|compare|gen|sweep``.

Exit codes: 0 ok, 2 input error, 3 precondition (disconnected or too big),
4 solver/oracle mismatch, 5 internal assertion.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import dp, oracle
from .errors import InputError, MismatchError, NetshieldError, SizeError
from .game import (
    Adversary,
    Strategy,
    all_utilities,
    attack_targets,
    build_network,
    format_fraction,
    region_deltas,
    social_welfare,
    weighted_target_count,
)
from .instance_io import (
    FORMAT_VERSION,
    dumps,
    generate,
    instance_digest,
    parse_instance,
    serialize_instance,
    strategy_to_dict,
)
from .meta import decompose, render


def _read_instance(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parse_instance(data)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_links(text: str) -> frozenset:
    if not text:
        return frozenset()
    try:
        return frozenset(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"--links expects comma-separated ids, got {text!r}") from None


def _parse_price(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad price {text!r}") from None
    if value <= 0:
        raise InputError(f"price must be positive, got {text!r}")
    return value


def _header(command: str, instance) -> dict:
    return {"version": FORMAT_VERSION, "command": command,
            "instance_sha256": instance_digest(instance)}


def eval_report(instance, strategy: Strategy, adversary: Adversary, weighting: str) -> dict:
    network = build_network(instance, strategy)
    utilities = all_utilities(instance, strategy, adversary, weighting)
    weights = weighted_target_count(network, adversary, weighting)
    report = _header("eval", instance)
    report.update({
        "adversary": adversary.value,
        "weighting": weighting,
        "connected": instance.is_connected,
        "strategy": strategy_to_dict(strategy),
        "utilities": [format_fraction(x) for x in utilities],
        "welfare": format_fraction(social_welfare(instance, strategy, adversary, weighting)),
        "no_attack": not weights,
        "targets": [{"region": sorted(r), "weight": weights[r]}
                    for r in attack_targets(network, adversary)],
        "deltas": [{"region": sorted(r), "delta": d} for r, d in region_deltas(network)],
    })
    return report


def br_report(instance, weighting: str, prune: bool = False) -> tuple:
    start = time.perf_counter()
    result = dp.best_response(instance, weighting, prune=prune)
    elapsed = time.perf_counter() - start
    delta0, a_count = result.certificate
    report = _header("br", instance)
    report.update({
        "weighting": weighting,
        "branch": result.immunised_branch,
        "strategy": strategy_to_dict(result.strategy),
        "utility": format_fraction(result.utility),
        "certificate": {"delta0": delta0, "a_count": a_count},
    })
    return report, elapsed


def oracle_report(instance, adversary: Adversary, space, weighting: str) -> tuple:
    start = time.perf_counter()
    strategy, value = oracle.brute_force_best_response(instance, adversary, space, weighting)
    elapsed = time.perf_counter() - start
    report = _header("oracle", instance)
    report.update({
        "adversary": adversary.value,
        "space": oracle.SearchSpace(space).value,
        "weighting": weighting,
        "strategy": strategy_to_dict(strategy),
        "utility": format_fraction(value),
    })
    return report, elapsed


def compare_report(instance, space, weighting: str, timings: bool = False) -> dict:
    solver, t_solver = br_report(instance, weighting)
    ref, t_oracle = oracle_report(instance, Adversary.MAX_DISRUPTION, space, weighting)
    report = _header("compare", instance)
    report.update({
        "solver": {k: solver[k] for k in ("branch", "strategy", "utility", "certificate")},
        "oracle": {k: ref[k] for k in ("space", "strategy", "utility")},
        "match": solver["utility"] == ref["utility"],
    })
    if timings:
        report["timings"] = {"solver_s": round(t_solver, 6), "oracle_s": round(t_oracle, 6)}
    return report


def _sweep_case(args: tuple) -> dict:
    seed, n, p, ip, alpha, beta, space, weighting = args
    instance = generate(seed, n, p, ip, alpha, beta, require_connected=False)
    row = {"seed": seed, "n": n, "edge_prob": p, "immun_prob": ip}
    start = time.perf_counter()
    try:
        if not instance.is_connected:
            oracle.brute_force_best_response(instance, Adversary.MAX_DISRUPTION, space, weighting)
            row["status"] = "skipped"
        else:
            row["status"] = "pass" if compare_report(instance, space, weighting)["match"] else "fail"
    except SizeError:
        row["status"] = "refused"
    row["seconds"] = time.perf_counter() - start
    return row


def _percentile(values: list, q: float) -> float:
    ordered = sorted(values)
    idx = min(len(ordered) - 1, max(0, round(q * (len(ordered) - 1))))
    return ordered[idx]


def sweep(seeds, sizes, edge_probs, immun_probs, alpha, beta, space="full",
          weighting="node", timings=False, workers: int | None = None) -> dict:
    cases = [(s, n, p, ip, alpha, beta, space, weighting)
             for n in sizes for p in edge_probs for ip in immun_probs for s in seeds]
    workers = workers if workers is not None else int(os.environ.get("NETSHIELD_THREADS", "1"))
    workers = max(1, min(workers, os.cpu_count() or 1))
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_case, cases))
    else:
        rows = [_sweep_case(c) for c in cases]

    groups: dict = {}
    for row in rows:
        key = (row["n"], row["edge_prob"], row["immun_prob"])
        g = groups.setdefault(key, {"n": key[0], "edge_prob": key[1], "immun_prob": key[2],
                                    "pass": 0, "fail": 0, "skipped": 0, "refused": 0,
                                    "_t": []})
        g[row["status"]] += 1
        g["_t"].append(row["seconds"])
    table = []
    for key in sorted(groups):
        g = groups[key]
        times = g.pop("_t")
        if timings:
            g["p50_s"] = round(_percentile(times, 0.5), 6)
            g["p95_s"] = round(_percentile(times, 0.95), 6)
        table.append(g)
    totals = {s: sum(g[s] for g in table) for s in ("pass", "fail", "skipped", "refused")}
    return {"version": FORMAT_VERSION, "command": "sweep", "cases": len(rows),
            "totals": totals, "table": table,
            "failures": [{k: r[k] for k in ("seed", "n", "edge_prob", "immun_prob")}
                         for r in rows if r["status"] == "fail"]}


def _range(text: str) -> list:
    lo, sep, hi = text.partition(":")
    try:
        if sep:
            return list(range(int(lo), int(hi)))
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise InputError(f"bad integer list/range {text!r}") from None


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise InputError(f"bad probability list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netshield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, adversary=False, space=False):
        p.add_argument("--instance", required=True)
        p.add_argument("--out")
        p.add_argument("--weighting", choices=("node", "region"), default="node")
        if adversary:
            p.add_argument("--adversary", choices=[a.value for a in Adversary],
                           default=Adversary.MAX_DISRUPTION.value)
        if space:
            p.add_argument("--space", choices=[s.value for s in oracle.SearchSpace],
                           default=oracle.SearchSpace.FULL_RAW.value)

    p = sub.add_parser("eval", help="evaluate a strategy for u")
    common(p, adversary=True)
    p.add_argument("--links", default="", help="comma-separated endpoints bought by u")
    p.add_argument("--immunised", action="store_true")

    p = sub.add_parser("br", help="exact best response (max disruption)")
    common(p)
    p.add_argument("--timings", action="store_true")
    p.add_argument("--prune", action="store_true",
                   help="only try delta0 values some meta-node can reach")
    p.add_argument("--dump-meta", help="write the meta-graph/meta-tree dump here")

    p = sub.add_parser("oracle", help="brute-force best response")
    common(p, adversary=True, space=True)
    p.add_argument("--timings", action="store_true")

    p = sub.add_parser("compare", help="solver vs oracle; exit 4 on mismatch")
    common(p, space=True)
    p.add_argument("--timings", action="store_true")

    p = sub.add_parser("gen", help="seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--edge-prob", type=float, default=0.4)
    p.add_argument("--immun-prob", type=float, default=0.5)
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="1")
    p.add_argument("--allow-disconnected", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="compare over a grid of seeded instances")
    p.add_argument("--seed", default="0:10", help="range lo:hi or comma list")
    p.add_argument("--n", default="5,6,7", help="sizes, range or comma list")
    p.add_argument("--edge-prob", default="0.3,0.6")
    p.add_argument("--immun-prob", default="0.3,0.7")
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="1")
    p.add_argument("--space", choices=[s.value for s in oracle.SearchSpace],
                   default=oracle.SearchSpace.FULL_RAW.value)
    p.add_argument("--weighting", choices=("node", "region"), default="node")
    p.add_argument("--timings", action="store_true")
    p.add_argument("--out")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command
    if cmd == "eval":
        instance = _read_instance(args.instance)
        strategy = Strategy(_parse_links(args.links), args.immunised)
        report = eval_report(instance, strategy, Adversary(args.adversary), args.weighting)
        _emit(dumps(report), args.out)
    elif cmd == "br":
        instance = _read_instance(args.instance)
        report, elapsed = br_report(instance, args.weighting, prune=args.prune)
        if args.timings:
            report["timings"] = {"solver_s": round(elapsed, 6)}
        if args.dump_meta:
            d = decompose(instance)
            Path(args.dump_meta).write_text(render(d.meta, d.tree))
        _emit(dumps(report), args.out)
    elif cmd == "oracle":
        instance = _read_instance(args.instance)
        report, elapsed = oracle_report(instance, Adversary(args.adversary), args.space,
                                        args.weighting)
        if args.timings:
            report["timings"] = {"oracle_s": round(elapsed, 6)}
        _emit(dumps(report), args.out)
    elif cmd == "compare":
        instance = _read_instance(args.instance)
        report = compare_report(instance, args.space, args.weighting, args.timings)
        _emit(dumps(report), args.out)
        if not report["match"]:
            raise MismatchError(
                f"solver {report['solver']['utility']} != oracle {report['oracle']['utility']}"
            )
    elif cmd == "gen":
        instance = generate(args.seed, args.n, args.edge_prob, args.immun_prob,
                            _parse_price(args.alpha), _parse_price(args.beta),
                            require_connected=not args.allow_disconnected)
        _emit(serialize_instance(instance), args.out)
    elif cmd == "sweep":
        report = sweep(_range(args.seed), _range(args.n), _floats(args.edge_prob),
                       _floats(args.immun_prob), _parse_price(args.alpha),
                       _parse_price(args.beta), args.space, args.weighting, args.timings)
        _emit(dumps(report), args.out)
        if report["totals"]["fail"]:
            raise MismatchError(f"{report['totals']['fail']} sweep cases disagree")
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except NetshieldError as exc:
        print(f"netshield: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
