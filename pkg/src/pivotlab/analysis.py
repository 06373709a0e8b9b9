"""Bound formulas, Monte Carlo estimation, and the verification suite.

Closed-form lower bounds come in five families (see :data:`FAMILIES`); the
comparison helpers evaluate a construction exactly or by Monte Carlo and
report whether it clears its bound.  Statistical acceptance uses one-sided
3-standard-error margins and pooled chi-square tests at significance 1e-3;
exact comparisons carry no tolerance at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from statistics import fmean
from typing import Callable, Iterable, Sequence

from scipy.stats import chi2 as _chi2

from . import geometry, grid_uso, process
from .errors import DegeneracyError, GeneralPositionError
from .geometry import PointId, PointSet, Side, Transversal
from .process import ProcessConfig
from .seeding import derive_rng

__all__ = [
    "FAMILIES",
    "BoundParams",
    "ExpectationReport",
    "LemmaCheck",
    "LemmaReport",
    "PaddedUsoTarget",
    "PhaseLawReport",
    "ProcessTarget",
    "UsoTarget",
    "bound",
    "compare_to_bound",
    "mc_estimate",
    "phase_law_report",
    "pivot_agreement_violations",
    "verify_lemmas",
]

FAMILIES = (
    "uso_lemma",
    "uso_theorem_eq1",
    "corollary",
    "augmented_theorem",
    "main_theorem",
)

#: z-quantile for the two-sided 99% normal confidence interval
Z99 = 2.5758293035489004

CHI2_SIGNIFICANCE = 1e-3


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundParams:
    """Parameters of one closed-form bound.  ``n`` is only used by the
    ``corollary`` family (grid size); ``delta`` only by the augmented
    families."""

    family: str
    r: int
    m: int | None = None
    delta: int = 0
    n: int | None = None


def bound(params: BoundParams) -> float:
    """Evaluate the chosen lower-bound formula (natural logs throughout)."""
    f, r, m, delta = params.family, params.r, params.m, params.delta
    if f not in FAMILIES:
        raise ValueError(f"unknown bound family {f!r}")
    if r < 0 or delta < 0:
        raise ValueError("need r >= 0 and delta >= 0")
    if f == "corollary":
        if params.n is None or params.n <= params.r or r < 1:
            raise ValueError("corollary bound needs n > r >= 1")
        return math.log(params.n / r) ** r / math.factorial(r) - 1.0
    if m is None or m < 1:
        raise ValueError("bound needs m >= 1")
    if f == "uso_lemma":
        return grid_uso.uso_lemma_bound(r, m, delta)
    if f == "uso_theorem_eq1":
        return grid_uso.uso_theorem_bound(r, m)
    # the two pivoting-process bounds share one formula; the main theorem is
    # the augmented one pinned at delta == 0
    if f == "main_theorem":
        delta = 0
    c2 = r * (r - 1) // 2
    log_gap = math.log(m + c2 + delta) - math.log(1 + c2 + delta)
    return log_gap**r / math.factorial(r) ** 3


# ---------------------------------------------------------------------------
# Monte Carlo estimation
# ---------------------------------------------------------------------------


@dataclass
class ExpectationReport:
    """An expected duration paired (optionally) with a bound and verdict.

    Exact reports carry a rational ``value`` and no confidence interval;
    Monte Carlo reports carry the trial count, standard error, and a normal
    99% interval.  ``satisfied`` means the value clears the bound with its
    full statistical margin; ``inconclusive`` flags straddling intervals.
    """

    value: Fraction | float
    method: str  # "exact" | "monte_carlo"
    trials: int | None = None
    se: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    bound: float | None = None
    satisfied: bool | None = None
    inconclusive: bool = False
    seed: int | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def num(x):
            if isinstance(x, Fraction):
                return f"{x.numerator}/{x.denominator}"
            if isinstance(x, float):
                return float(f"{x:.12g}")
            return x

        out = {
            "value": num(self.value),
            "method": self.method,
            "trials": self.trials,
            "se": num(self.se),
            "ci_low": num(self.ci_low),
            "ci_high": num(self.ci_high),
            "bound": num(self.bound),
            "satisfied": self.satisfied,
            "inconclusive": self.inconclusive,
            "seed": self.seed,
        }
        if self.extras:
            out["extras"] = {k: num(v) for k, v in self.extras.items()}
        return out


def mc_estimate(
    sample: Callable[..., float],
    trials: int,
    seed: int,
) -> ExpectationReport:
    """Estimate an expectation by independent seeded trials.

    ``sample`` receives one derived ``random.Random`` per trial, so the
    estimate is reproducible from ``(sample, trials, seed)`` alone.
    """
    if trials < 2:
        raise ValueError("need at least 2 trials for a standard error")
    values = [float(sample(derive_rng(seed, "trial", i))) for i in range(trials)]
    mean = fmean(values)
    var = sum((v - mean) ** 2 for v in values) / (trials - 1)
    se = math.sqrt(var / trials)
    return ExpectationReport(
        value=mean,
        method="monte_carlo",
        trials=trials,
        se=se,
        ci_low=mean - Z99 * se,
        ci_high=mean + Z99 * se,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# bound comparison targets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UsoTarget:
    """A grid-walk ensemble: ``orientations`` independently sampled combs,
    each solved exactly from a uniform start.  ``delta is None`` walks the
    plain grid; an integer walks the augmented one."""

    r: int
    m: int
    delta: int | None = None
    orientations: int = 200


@dataclass(frozen=True)
class PaddedUsoTarget:
    """Like :class:`UsoTarget` but each comb (built at ``m = n // r``) is
    padded to grid size ``n`` before solving; always walks the plain grid."""

    r: int
    n: int
    orientations: int = 50


@dataclass(frozen=True)
class ProcessTarget:
    """A pivoting process solved exactly (or sampled).  Without ``alphas``
    or a sweep this is the plain process from the maximal-phase start and the
    pivot count; augmented variants count the final escape hop.  An
    ``alpha_sweep`` of width ``w`` reports the adversary's best (minimum)
    value over ``alpha_i in {m+1, ..., m+w}``."""

    r: int
    m: int
    delta: int = 0
    alphas: tuple[int, ...] | None = None
    alpha_sweep: int | None = None

    def build_config(self) -> ProcessConfig:
        base = geometry.gen_point_set(self.r, self.m)
        if self.alphas is None and self.alpha_sweep is None:
            return ProcessConfig(
                base, process.main_start(base), delta=self.delta,
                count_terminal_step=False,
            )
        if self.alphas is not None:
            ps = base.augmented(self.alphas)
            return ProcessConfig(
                ps, process.adversary_start(ps), delta=self.delta,
                count_terminal_step=True,
            )
        raise ValueError("alpha_sweep targets have no single configuration")


def _ensemble_report(
    values: Sequence[Fraction], params: BoundParams, seed: int
) -> ExpectationReport:
    floats = [float(v) for v in values]
    mean = fmean(floats)
    var = sum((v - mean) ** 2 for v in floats) / (len(floats) - 1)
    se = math.sqrt(var / len(floats))
    b = bound(params)
    satisfied = mean - 3 * se >= b
    report = ExpectationReport(
        value=mean,
        method="monte_carlo",
        trials=len(values),
        se=se,
        ci_low=mean - Z99 * se,
        ci_high=mean + Z99 * se,
        bound=b,
        satisfied=satisfied,
        inconclusive=(not satisfied) and (mean + 3 * se >= b),
        seed=seed,
        extras={
            "ensemble": "orientations",
            "max": max(floats),
            "min": min(floats),
            "max_index": max(range(len(floats)), key=floats.__getitem__),
        },
    )
    return report


def compare_to_bound(
    target: UsoTarget | PaddedUsoTarget | ProcessTarget,
    params: BoundParams,
    mode: str = "exact",
    *,
    trials: int = 100_000,
    seed: int = 0,
) -> ExpectationReport:
    """Measure a target and compare it against a bound.

    Exact process values are compared with no tolerance.  Orientation
    ensembles are intrinsically statistical (the bound holds for the
    randomized construction in expectation), so even their "exact" mode
    reports a mean over exactly-solved orientations with a 3-SE verdict,
    alongside the min/max witnesses.
    """
    b = bound(params)
    if isinstance(target, (UsoTarget, PaddedUsoTarget)):
        if isinstance(target, PaddedUsoTarget):
            m = target.n // target.r
            cfg = None
        else:
            m = target.m
            cfg = None if target.delta is None else grid_uso.AugmentedConfig(target.delta)
        if mode == "exact":
            values = []
            for i in range(target.orientations):
                rng = derive_rng(seed, "comb", i)
                comb = grid_uso.build_comb(target.r, m, rng)
                if isinstance(target, PaddedUsoTarget):
                    comb = grid_uso.embed_padded(comb, target.n)
                values.append(grid_uso.expected_duration_exact(comb, cfg, "uniform"))
            return _ensemble_report(values, params, seed)
        if mode == "mc":
            def sample(rng):
                comb = grid_uso.build_comb(target.r, m, rng)
                if isinstance(target, PaddedUsoTarget):
                    comb = grid_uso.embed_padded(comb, target.n)
                return grid_uso.walk(comb, cfg, "uniform", rng, record=False).steps

            report = mc_estimate(sample, trials, seed)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    elif isinstance(target, ProcessTarget):
        if mode == "exact":
            if target.alpha_sweep is not None:
                options = range(target.m + 1, target.m + 1 + target.alpha_sweep)
                value, best = process.worst_case_expected_steps(
                    target.r, target.m, target.delta, options
                )
                return ExpectationReport(
                    value=value,
                    method="exact",
                    bound=b,
                    satisfied=value >= Fraction(b),
                    seed=seed,
                    extras={"worst_alphas": list(best)},
                )
            value = process.exact_expected_steps(target.build_config())
            return ExpectationReport(
                value=value,
                method="exact",
                bound=b,
                satisfied=value >= Fraction(b),
                seed=seed,
            )
        if mode == "mc":
            cfg = target.build_config()

            def sample(rng):
                return process.run(cfg, rng).steps(cfg.count_terminal_step)

            report = mc_estimate(sample, trials, seed)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    else:
        raise TypeError(f"unsupported target {target!r}")

    assert report.se is not None
    report.bound = b
    report.satisfied = report.value - 3 * report.se >= b
    report.inconclusive = (not report.satisfied) and (
        report.value + 3 * report.se >= b
    )
    return report


# ---------------------------------------------------------------------------
# lemma verification suite
# ---------------------------------------------------------------------------


@dataclass
class LemmaCheck:
    lemma: str
    passed: bool
    cases: int
    counterexample: str | None = None

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "passed": self.passed,
            "cases": self.cases,
            "counterexample": self.counterexample,
        }


@dataclass
class LemmaReport:
    r: int
    m: int
    checks: list[LemmaCheck]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "m": self.m,
            "all_passed": self.all_passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _check_colors_and_pierced(ps: PointSet, tag: str) -> list[LemmaCheck]:
    """Subsets of size <= r: pierced iff one point of every color; and every
    transversal meets every axis at a strictly positive value."""
    r = ps.r
    ids = ps.ids()
    colors_bad = pierced_bad = None
    cases = 0
    for size in range(1, r + 1):
        for subset in combinations(ids, size):
            cases += 1
            full_color = sorted(p.color for p in subset) == list(range(1, r + 1))
            pierced = geometry.is_pierced_subset(
                [ps.coords(p) for p in subset], r
            )
            if pierced and not full_color and colors_bad is None:
                colors_bad = f"pierced subset missing a color: {subset}"
            if full_color and not pierced and pierced_bad is None:
                pierced_bad = f"full-color subset not pierced: {subset}"
    axis_cases = 0
    for S in geometry.transversals(ps):
        axis_cases += 1
        try:
            ts = geometry.axis_intersections(ps, S)
        except DegeneracyError as exc:
            if pierced_bad is None:
                pierced_bad = f"axis intersections failed on {S.members}: {exc}"
            continue
        if any(t <= 0 for t in ts) and pierced_bad is None:
            pierced_bad = f"nonpositive axis intersection {ts} on {S.members}"
    return [
        LemmaCheck(f"colors{tag}", colors_bad is None, cases, colors_bad),
        LemmaCheck(
            f"pierced{tag}", pierced_bad is None, cases + axis_cases, pierced_bad
        ),
    ]


def _check_non_degenerate(ps: PointSet, tag: str) -> LemmaCheck:
    r = ps.r
    bad = None
    cases = 0
    for S in geometry.transversals(ps):
        cases += 1
        coords = [ps.coords(p) for p in S.members]
        if geometry.matrix_rank([list(x) + [1] for x in coords]) != r:
            bad = f"affinely dependent transversal {S.members}"
            break
        proper_pierced = None
        for size in range(1, r):
            for sub in combinations(coords, size):
                if geometry.is_pierced_subset(sub, r):
                    proper_pierced = sub
                    break
            if proper_pierced:
                break
        if proper_pierced:
            bad = f"pierced proper subset {proper_pierced} of {S.members}"
            break
        try:
            c = geometry.hyperplane_coefficients(ps, S)
        except DegeneracyError as exc:
            bad = f"degenerate hyperplane on {S.members}: {exc}"
            break
        if sum(c) == 0:
            bad = f"hyperplane of {S.members} parallel to the diagonal"
            break
    return LemmaCheck(f"non_degenerate{tag}", bad is None, cases, bad)


def _check_monotone(ps: PointSet, tag: str) -> LemmaCheck:
    bad = None
    cases = 0
    for S in geometry.transversals(ps):
        ts = geometry.axis_intersections(ps, S)
        for p in geometry.below_set(ps, S, allow_on=ps.is_augmented):
            cases += 1
            after = geometry.pivot(ps, S, p)
            ts_after = geometry.axis_intersections(ps, after)
            if not all(b <= a for a, b in zip(ts, ts_after)):
                bad = f"axis value increased pivoting {p} at {S.members}"
                break
            if not any(b < a for a, b in zip(ts, ts_after)):
                bad = f"no strict decrease pivoting {p} at {S.members}"
                break
        if bad:
            break
    return LemmaCheck(f"monotone{tag}", bad is None, cases, bad)


def _check_layer_trichotomy(ps: PointSet, tag: str) -> LemmaCheck:
    """Per transversal: colors with ``t_i <= t_r`` keep their second-layer
    points strictly above; colors with ``t_i >= t_r + 1`` keep them strictly
    below; the minimizing color keeps everything off the outermost layer
    strictly above and contributes its own axis point as a member."""
    r = ps.r
    if r < 2 or ps.m < 2:
        return LemmaCheck(f"layer_r_minus_1{tag}", True, 0, None)
    bad = None
    cases = 0
    for S in geometry.transversals(ps):
        ts = geometry.axis_intersections(ps, S)
        t_last = ts[-1]
        members = set(S.members)
        for i in range(1, r + 1):
            band = [
                p
                for p in ps.ids()
                if p.color == i and p.layer == r - 1 and p not in members
            ]
            if ts[i - 1] <= t_last:
                cases += 1
                if any(geometry.side_of(ps, S, p) is not Side.ABOVE for p in band):
                    bad = f"(a) fails for color {i} at {S.members}"
                    break
            if ts[i - 1] >= t_last + 1:
                cases += 1
                if any(geometry.side_of(ps, S, p) is not Side.BELOW for p in band):
                    bad = f"(b) fails for color {i} at {S.members}"
                    break
        if bad:
            break
        i_min = min(range(1, r + 1), key=lambda i: ts[i - 1])
        cases += 1
        inner = [
            p
            for p in ps.ids()
            if p.color == i_min and p.layer < r and p not in members
        ]
        if any(geometry.side_of(ps, S, p) is not Side.ABOVE for p in inner):
            bad = f"(c) fails: inner point of color {i_min} not above {S.members}"
            break
        member = S.member(i_min)
        if member.layer != r:
            bad = f"(c) fails: minimizing member {member} off the outer layer"
            break
        if ps.coords(member) != tuple(
            ts[i_min - 1] if t == i_min else 0 for t in range(1, r + 1)
        ):
            bad = f"(c) fails: member {member} is not the axis point at t_min"
            break
    return LemmaCheck(f"layer_r_minus_1{tag}", bad is None, cases, bad)


def _guarded(name: str, fn: Callable[[], LemmaCheck | list[LemmaCheck]]) -> list[LemmaCheck]:
    """Failures are report content: a check that raises on a broken set is
    recorded as a failed check, never propagated."""
    try:
        result = fn()
        return result if isinstance(result, list) else [result]
    except (DegeneracyError, GeneralPositionError, ValueError) as exc:
        return [LemmaCheck(name, False, 0, f"raised: {exc}")]


def _geometry_checks(ps: PointSet, tag: str = "") -> list[LemmaCheck]:
    checks = _guarded(f"colors{tag}", lambda: _check_colors_and_pierced(ps, tag))
    checks += _guarded(f"non_degenerate{tag}", lambda: _check_non_degenerate(ps, tag))
    checks += _guarded(f"monotone{tag}", lambda: _check_monotone(ps, tag))
    checks += _guarded(
        f"layer_r_minus_1{tag}", lambda: _check_layer_trichotomy(ps, tag)
    )
    return checks


def verify_lemmas(
    r: int,
    m: int,
    *,
    point_set: PointSet | None = None,
    deep_from: Sequence[int] = (),
    include_pivot_agreement: bool = True,
) -> LemmaReport:
    """Run the structural verification suite on the ``(r, m)`` family (or a
    supplied point set), optionally also on its deep projections from higher
    ambient dimensions.  All failures are report content, never exceptions.
    """
    ps = point_set if point_set is not None else geometry.gen_point_set(r, m)
    checks = _geometry_checks(ps)
    if include_pivot_agreement:

        def check_agreement() -> LemmaCheck:
            violations, cases = pivot_agreement_violations(ps)
            return LemmaCheck(
                "pivot_agreement",
                not violations,
                cases,
                violations[0] if violations else None,
            )

        checks += _guarded("pivot_agreement", check_agreement)
    for R in deep_from:
        try:
            deep = geometry.project_deep(R, m, r)
        except ValueError as exc:
            checks.append(LemmaCheck(f"deep[R={R}]", False, 0, str(exc)))
            continue
        checks.extend(_geometry_checks(deep, tag=f"@deep[R={R}]"))
    return LemmaReport(r, m, checks)


def pivot_agreement_violations(
    ps: PointSet,
    sample_pairs: int | None = None,
    seed: int = 0,
) -> tuple[list[str], int]:
    """Compare the color-swap pivot against the geometric facet search on
    every (position, below-point) pair, or on a random sample of pairs."""
    states = list(geometry.transversals(ps))
    violations: list[str] = []
    cases = 0

    def check(S: Transversal, p: PointId) -> None:
        nonlocal cases
        cases += 1
        try:
            geometry.pivot(ps, S, p, method="both")
        except (DegeneracyError, GeneralPositionError, ValueError) as exc:
            if len(violations) < 5:
                violations.append(f"{S.members} with {p}: {exc}")

    if sample_pairs is None:
        for S in states:
            for p in geometry.below_set(ps, S, allow_on=ps.is_augmented):
                check(S, p)
    else:
        rng = derive_rng(seed, "pivot-pairs")
        below_cache: dict[tuple[PointId, ...], tuple[PointId, ...]] = {}
        attempts = 0
        while cases < sample_pairs and attempts < 100 * sample_pairs:
            attempts += 1
            S = states[rng.randrange(len(states))]
            below = below_cache.get(S.members)
            if below is None:
                below = geometry.below_set(ps, S, allow_on=ps.is_augmented)
                below_cache[S.members] = below
            if not below:
                continue
            check(S, below[rng.randrange(len(below))])
    return violations, cases


# ---------------------------------------------------------------------------
# statistical phase-law verification
# ---------------------------------------------------------------------------


@dataclass
class PhaseLawReport:
    """Empirical conformance of trace phases to their transition laws.

    ``transition``: pooled chi-square over all source phases of the jump
    distribution (uniform weight per lower phase, escape weight ``delta``).
    ``color``: chi-square of phase-change pivot colors against uniform.
    ``good_phase_rows``: per-phase ``(k, floor, p_hat, se, ok)`` with
    ``ok = (p_hat >= floor - 3 se)``.
    """

    r: int
    m: int
    delta: int
    trials: int
    seed: int
    transition_stat: float
    transition_df: int
    transition_p: float
    color_stat: float
    color_df: int
    color_p: float
    good_phase_rows: list[tuple[int, float, float, float, bool]]
    entry_consequence_ok: bool

    def all_ok(self, significance: float = CHI2_SIGNIFICANCE) -> bool:
        return (
            self.transition_p >= significance
            and self.color_p >= significance
            and all(row[4] for row in self.good_phase_rows)
            and self.entry_consequence_ok
        )

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "m": self.m,
            "delta": self.delta,
            "trials": self.trials,
            "seed": self.seed,
            "transition": {
                "stat": self.transition_stat,
                "df": self.transition_df,
                "p": self.transition_p,
            },
            "pivot_color": {
                "stat": self.color_stat,
                "df": self.color_df,
                "p": self.color_p,
            },
            "good_phases": [
                {"k": k, "floor": b, "p_hat": p, "se": se, "ok": ok}
                for k, b, p, se, ok in self.good_phase_rows
            ],
            "entry_consequence_ok": self.entry_consequence_ok,
            "all_ok": self.all_ok(),
        }


def phase_law_report(
    r: int,
    m: int,
    delta: int,
    trials: int,
    seed: int,
    alphas: Iterable[int] | None = None,
) -> PhaseLawReport:
    """Stream ``trials`` augmented traces and test the phase laws."""
    ps = geometry.gen_point_set(r, m).augmented(alphas)
    cfg = ProcessConfig(
        ps, process.adversary_start(ps), delta=delta, count_terminal_step=True
    )
    transition_counts: dict[int, dict[int, int]] = {}
    color_counts = [0] * r
    good_counts = [0] * (m + 1)  # index k
    consequence_ok = True

    for i in range(trials):
        trace = process.run(cfg, derive_rng(seed, "trace", i))
        seq = trace.phase_sequence()
        for prev, nxt in zip(seq, seq[1:]):
            transition_counts.setdefault(prev, {})
            transition_counts[prev][nxt] = transition_counts[prev].get(nxt, 0) + 1
        for sigma, phi in trace.phase_changes():
            if phi > 0:
                pivot = trace.records[sigma - 1].pivot
                assert pivot is not None
                color_counts[pivot.color - 1] += 1
        report = process.good_phases(cfg, trace)
        for k in report.phases:
            if 1 <= k <= m:
                good_counts[k] += 1
        if not all(report.entry_all_below.values()):
            consequence_ok = False

    # pooled chi-square of the jump law, one multinomial row per source phase
    stat = 0.0
    df = 0
    for src, targets in sorted(transition_counts.items()):
        weight_total = r * (src - 1) + delta
        if weight_total == 0 or src < 1:
            continue
        outcomes = list(range(1, src)) + ([0] if delta > 0 else [])
        if len(outcomes) < 2:
            continue
        row_total = sum(targets.values())
        for x in outcomes:
            p = (r if x > 0 else delta) / weight_total
            expected = row_total * p
            observed = targets.get(x, 0)
            stat += (observed - expected) ** 2 / expected
        unexpected = set(targets) - set(outcomes)
        if unexpected:
            stat = math.inf
        df += len(outcomes) - 1
    transition_p = float(_chi2.sf(stat, df)) if df > 0 else 1.0

    color_total = sum(color_counts)
    color_stat = sum(
        (c - color_total / r) ** 2 / (color_total / r) for c in color_counts
    )
    color_df = r - 1
    color_p = float(_chi2.sf(color_stat, color_df)) if color_df > 0 else 1.0

    rows = []
    for k in range(1, m):
        floor = 1 / (r * (delta + k * r))
        p_hat = good_counts[k] / trials
        se = math.sqrt(p_hat * (1 - p_hat) / trials)
        rows.append((k, floor, p_hat, se, p_hat >= floor - 3 * se))

    return PhaseLawReport(
        r=r,
        m=m,
        delta=delta,
        trials=trials,
        seed=seed,
        transition_stat=stat,
        transition_df=df,
        transition_p=transition_p,
        color_stat=color_stat,
        color_df=color_df,
        color_p=color_p,
        good_phase_rows=rows,
        entry_consequence_ok=consequence_ok,
    )
