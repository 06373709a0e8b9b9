"""Command-line surface.

Every randomized command takes ``--seed``; without one a fresh seed is
generated and announced on stderr, and either way the seed is embedded in the
output, so any report can be reproduced byte for byte.  Reports go to stdout
(or ``--out``), logs to stderr.  Exit codes: 0 success, 2 verification
failure, 1 usage or internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import analysis, geometry, grid_uso, process
from .errors import InstanceTooLargeError
from .seeding import derive_rng, fresh_seed

EPILOG = """environment overrides:
  PIVOTLAB_STATE_CAP    cap on exact-mode state counts (default 1000000)
  PIVOTLAB_STEP_BUDGET  override the per-run step budget tripwire
"""


def _fmt(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return value


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, sort_keys=True, indent=2) + "\n", out)


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip() != "")


def _parse_range(text: str) -> list[int]:
    """Accept ``2..8`` or ``2,3,5``."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return list(_parse_ints(text))


def _seed_of(args) -> int:
    if args.seed is None:
        seed = fresh_seed()
        print(f"generated seed: {seed}", file=sys.stderr)
        return seed
    return args.seed


def _comb_for(args, seed: int) -> grid_uso.CombOrientation:
    if getattr(args, "identity", False):
        return grid_uso.identity_comb(args.r, args.m)
    return grid_uso.build_comb(args.r, args.m, derive_rng(seed, "comb"))


def _aug_cfg(args) -> grid_uso.AugmentedConfig | None:
    return None if args.delta is None else grid_uso.AugmentedConfig(args.delta)


# ---------------------------------------------------------------------------
# uso commands
# ---------------------------------------------------------------------------


def _cmd_uso_build(args) -> int:
    seed = _seed_of(args)
    comb = _comb_for(args, seed)
    payload = {"seed": seed, "comb": grid_uso.comb_to_dict(comb)}
    _emit_json(payload, args.out)
    return 0


def _cmd_uso_walk(args) -> int:
    seed = _seed_of(args)
    comb = _comb_for(args, seed)
    cfg = _aug_cfg(args)
    start = tuple(_parse_ints(args.start)) if args.start else "uniform"
    if args.format == "jsonl":
        # trace dump: one vertex tuple per line, terminal hops as "inf";
        # consecutive trials are concatenated
        lines = []
        for i in range(args.trials):
            outcome = grid_uso.walk(comb, cfg, start, derive_rng(seed, "walk", i))
            assert outcome.visited is not None
            lines.extend(
                json.dumps("inf" if v is grid_uso.TERMINAL else list(v))
                for v in outcome.visited
            )
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    report = analysis.mc_estimate(
        lambda rng: grid_uso.walk(comb, cfg, start, rng, record=False).steps,
        args.trials,
        seed,
    )
    payload = report.to_dict()
    payload.update({"r": args.r, "m": args.m, "delta": args.delta, "seed": seed})
    _emit_json(payload, args.out)
    return 0


def _cmd_uso_expect(args) -> int:
    seed = _seed_of(args)
    comb = _comb_for(args, seed)
    start = tuple(_parse_ints(args.start)) if args.start else "uniform"
    value = grid_uso.expected_duration_exact(comb, _aug_cfg(args), start)
    payload = {
        "r": args.r,
        "m": args.m,
        "delta": args.delta,
        "identity": bool(args.identity),
        "seed": seed,
        "value": _fmt(value),
        "value_float": _fmt(float(value)),
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_uso_verify(args) -> int:
    seed = _seed_of(args)
    comb = _comb_for(args, seed)
    acyclic = grid_uso.has_topological_order(comb)
    violations = grid_uso.unique_sink_violations(
        grid_uso.grid_spec(comb), grid_uso.grid_out_function(comb)
    )
    payload = {
        "r": args.r,
        "m": args.m,
        "seed": seed,
        "acyclic": acyclic,
        "unique_sinks": not violations,
        "violations": [[list(s) for s in sub] for sub in violations],
    }
    _emit_json(payload, args.out)
    return 0 if acyclic and not violations else 2


# ---------------------------------------------------------------------------
# points / process commands
# ---------------------------------------------------------------------------


def _point_set_for(args) -> geometry.PointSet:
    ps = geometry.gen_point_set(args.r, args.m)
    if getattr(args, "alphas", None):
        ps = ps.augmented(_parse_ints(args.alphas))
    return ps


def _cmd_points_dump(args) -> int:
    ps = _point_set_for(args)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerows(ps.to_csv_rows())
        _emit(buf.getvalue(), args.out)
    else:
        _emit_json(ps.to_json_dict(), args.out)
    return 0


def _process_config(args, ps: geometry.PointSet) -> process.ProcessConfig:
    delta = args.delta or 0
    if ps.is_augmented:
        return process.ProcessConfig(
            ps, process.adversary_start(ps), delta=delta, count_terminal_step=True
        )
    return process.ProcessConfig(
        ps, process.main_start(ps), delta=delta,
        count_terminal_step=delta > 0,
    )


def _cmd_process_run(args) -> int:
    seed = _seed_of(args)
    ps = _point_set_for(args)
    cfg = _process_config(args, ps)
    if args.format == "jsonl":
        trials = args.trials if args.trials is not None else 1
        chunks = []
        for i in range(trials):
            trace = process.run(cfg, derive_rng(seed, "trace", i))
            chunks.append(process.trace_to_jsonl(trace))
        _emit("".join(chunks), args.out)
        return 0
    report = analysis.mc_estimate(
        lambda rng: process.run(cfg, rng).steps(cfg.count_terminal_step),
        args.trials if args.trials is not None else 100_000,
        seed,
    )
    payload = report.to_dict()
    payload.update(
        {
            "r": args.r,
            "m": args.m,
            "delta": cfg.delta,
            "alphas": list(ps.alphas) if ps.alphas else None,
            "count_terminal_step": cfg.count_terminal_step,
            "seed": seed,
        }
    )
    _emit_json(payload, args.out)
    return 0


def _cmd_process_expect(args) -> int:
    ps = _point_set_for(args)
    if args.alpha_sweep:
        value, alphas = process.worst_case_expected_steps(
            args.r,
            args.m,
            args.delta or 0,
            range(args.m + 1, args.m + 1 + args.alpha_sweep),
        )
        payload = {
            "r": args.r,
            "m": args.m,
            "delta": args.delta or 0,
            "alpha_sweep": args.alpha_sweep,
            "worst_alphas": list(alphas),
            "count_terminal_step": True,
            "value": _fmt(value),
            "value_float": _fmt(float(value)),
        }
        _emit_json(payload, args.out)
        return 0
    cfg = _process_config(args, ps)
    value = process.exact_expected_steps(cfg)
    payload = {
        "r": args.r,
        "m": args.m,
        "delta": cfg.delta,
        "alphas": list(ps.alphas) if ps.alphas else None,
        "count_terminal_step": cfg.count_terminal_step,
        "value": _fmt(value),
        "value_float": _fmt(float(value)),
    }
    _emit_json(payload, args.out)
    return 0


# ---------------------------------------------------------------------------
# verification and sweeps
# ---------------------------------------------------------------------------


def _cmd_verify_lemmas(args) -> int:
    report = analysis.verify_lemmas(args.r, args.m, deep_from=tuple(args.deep or ()))
    payload = report.to_dict()
    ok = report.all_passed
    if args.phase_trials:
        seed = _seed_of(args)
        laws = []
        for delta in _parse_ints(args.phase_deltas):
            law = analysis.phase_law_report(
                args.r, args.m, delta, args.phase_trials, seed
            )
            laws.append(law.to_dict())
            ok = ok and law.all_ok()
        payload["phase_laws"] = laws
        payload["seed"] = seed
    payload["ok"] = ok
    _emit_json(payload, args.out)
    return 0 if ok else 2


_BENCH_COLUMNS = [
    "family", "r", "m", "delta", "value", "ci_low", "ci_high",
    "bound", "satisfied", "seed", "trials",
]


def _bench_rows(args, seed: int) -> list[dict]:
    rows = []
    mode = "mc" if args.mc else "exact"
    for family in args.families.split(","):
        family = family.strip()
        if family not in analysis.FAMILIES:
            raise ValueError(f"unknown bound family {family!r}")
        for r in _parse_range(args.r_list):
            for m in _parse_range(args.m_list):
                deltas = _parse_range(args.delta_list)
                if family in ("uso_theorem_eq1", "corollary", "main_theorem"):
                    deltas = [0]
                for delta in deltas:
                    if family == "uso_lemma":
                        target = analysis.UsoTarget(r, m, delta, args.orientations)
                        params = analysis.BoundParams(family, r, m, delta)
                    elif family == "uso_theorem_eq1":
                        target = analysis.UsoTarget(r, m, None, args.orientations)
                        params = analysis.BoundParams(family, r, m)
                    elif family == "corollary":
                        # the m column carries the grid size n for this family
                        if m <= r:
                            continue
                        target = analysis.PaddedUsoTarget(r, m, args.orientations)
                        params = analysis.BoundParams(family, r, n=m)
                    elif family == "augmented_theorem":
                        target = analysis.ProcessTarget(r, m, delta, alpha_sweep=3)
                        params = analysis.BoundParams(family, r, m, delta)
                    else:
                        target = analysis.ProcessTarget(r, m)
                        params = analysis.BoundParams(family, r, m)
                    report = analysis.compare_to_bound(
                        target, params, mode, trials=args.trials, seed=seed
                    )
                    satisfied = (
                        "inconclusive"
                        if report.inconclusive
                        else ("true" if report.satisfied else "false")
                    )
                    rows.append(
                        {
                            "family": family,
                            "r": r,
                            "m": m,
                            "delta": delta,
                            "value": _fmt(report.value),
                            "ci_low": _fmt(report.ci_low),
                            "ci_high": _fmt(report.ci_high),
                            "bound": _fmt(report.bound),
                            "satisfied": satisfied,
                            "seed": seed,
                            "trials": report.trials,
                        }
                    )
    rows.sort(key=lambda row: (row["family"], row["r"], row["m"], row["delta"]))
    return rows


def _cmd_bench_bounds(args) -> int:
    seed = _seed_of(args)
    rows = _bench_rows(args, seed)
    if args.format == "json":
        _emit_json(rows, args.out)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=_BENCH_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row[k] is None else row[k]) for k in _BENCH_COLUMNS})
        _emit(buf.getvalue(), args.out)
    return 2 if any(row["satisfied"] == "false" for row in rows) else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, *, trials: int | None = None) -> None:
    p.add_argument("--r", type=int, required=True, help="dimension")
    p.add_argument("--m", type=int, required=True, help="per-factor size / phases")
    p.add_argument("--seed", type=int, default=None, help="master seed (generated and printed if omitted)")
    p.add_argument("--out", default=None, help="write output to a file instead of stdout")
    if trials is not None:
        p.add_argument("--trials", type=int, default=trials)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pivotlab",
        description="Grid-walk and pivoting-process lower-bound laboratory",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    top = parser.add_subparsers(dest="group", required=True)

    uso = top.add_parser("uso", help="comb orientations of grids").add_subparsers(
        dest="command", required=True
    )
    p = uso.add_parser("build", help="build a comb and print its JSON form")
    _add_common(p)
    p.add_argument("--identity", action="store_true", help="all-identity comb (deterministic)")
    p.set_defaults(handler=_cmd_uso_build)

    p = uso.add_parser("walk", help="sample random walks")
    _add_common(p, trials=100_000)
    p.add_argument("--delta", type=int, default=None, help="escape multiplicity (omit for the plain grid)")
    p.add_argument("--identity", action="store_true")
    p.add_argument("--start", default=None, help='start vertex "c1,c2,..." (default uniform)')
    p.add_argument("--format", choices=("json", "jsonl"), default="json")
    p.set_defaults(handler=_cmd_uso_walk)

    p = uso.add_parser("expect", help="exact expected walk duration")
    _add_common(p)
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--identity", action="store_true")
    p.add_argument("--start", default=None)
    p.set_defaults(handler=_cmd_uso_expect)

    p = uso.add_parser("verify", help="acyclicity and unique-sink checks")
    _add_common(p)
    p.add_argument("--identity", action="store_true")
    p.set_defaults(handler=_cmd_uso_verify)

    points = top.add_parser("points", help="point-set construction").add_subparsers(
        dest="command", required=True
    )
    p = points.add_parser("dump", help="dump the point set")
    _add_common(p)
    p.add_argument("--alphas", default=None, help='adversary values "a1,a2,..."')
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(handler=_cmd_points_dump)

    proc = top.add_parser("process", help="the pivoting process").add_subparsers(
        dest="command", required=True
    )
    p = proc.add_parser("run", help="sample traces")
    _add_common(p)
    p.add_argument("--trials", type=int, default=None,
                   help="default: 1 for jsonl trace dumps, 100000 for json summaries")
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--alphas", default=None)
    p.add_argument("--format", choices=("json", "jsonl"), default="jsonl")
    p.set_defaults(handler=_cmd_process_run)

    p = proc.add_parser("expect", help="exact expected step count")
    _add_common(p)
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--alphas", default=None)
    p.add_argument("--alpha-sweep", type=int, default=None, dest="alpha_sweep",
                   help="adversary sweep width: report the minimum over alpha_i in {m+1..m+W}")
    p.add_argument("--exact", action="store_true", help="exact mode (the default; kept for symmetry)")
    p.set_defaults(handler=_cmd_process_expect)

    verify = top.add_parser("verify", help="verification suites").add_subparsers(
        dest="command", required=True
    )
    p = verify.add_parser("lemmas", help="structural verification suite")
    _add_common(p)
    p.add_argument("--deep", type=int, action="append", default=None,
                   help="also verify the projection from this ambient dimension (repeatable)")
    p.add_argument("--phase-trials", type=int, default=0, dest="phase_trials",
                   help="also run the statistical phase-law checks with this many traces")
    p.add_argument("--phase-deltas", default="0,2", dest="phase_deltas")
    p.set_defaults(handler=_cmd_verify_lemmas)

    bench = top.add_parser("bench", help="bound sweeps").add_subparsers(
        dest="command", required=True
    )
    p = bench.add_parser("bounds", help="sweep measured values against bounds")
    p.add_argument("--families", default=",".join(analysis.FAMILIES))
    p.add_argument("--r-list", default="1,2", dest="r_list")
    p.add_argument("--m-list", default="2..6", dest="m_list",
                   help="m values (grid size n for the corollary family)")
    p.add_argument("--delta-list", default="0", dest="delta_list")
    p.add_argument("--orientations", type=int, default=200)
    p.add_argument("--mc", action="store_true", help="Monte Carlo instead of exact")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(handler=_cmd_bench_bounds)

    return parser


def dispatch(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except InstanceTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: use Monte Carlo mode, or raise PIVOTLAB_STATE_CAP", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(dispatch())


if __name__ == "__main__":  # pragma: no cover
    main()
