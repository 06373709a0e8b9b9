"""The pivoting process on a labelled point set, with phase bookkeeping.

From a transversal the process draws a pivot from the strictly-below points
plus a formal escape symbol weighted ``delta``, swaps the pivot in, and
repeats until it escapes to the terminal position.  With ``delta == 0`` the
escape fires only once no point is left below, which reproduces the plain
process up to the single final escape hop; traces therefore expose both step
counts (``pivot_count`` and ``total_steps = pivot_count + 1``).

Transversal positions form a finite acyclic chain: every pivot strictly
lowers the sum of axis intersections, which both guarantees termination and
gives the back-substitution order for exact expected durations.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from random import Random
from typing import Iterable, Iterator

from . import geometry
from .errors import InstanceTooLargeError, InternalInvariantError
from .geometry import PointId, PointSet, Transversal

__all__ = [
    "GoodPhaseReport",
    "ProcessConfig",
    "TERMINAL",
    "Trace",
    "TraceRecord",
    "adversary_start",
    "exact_expected_steps",
    "good_phases",
    "main_start",
    "phase_from_min_t",
    "phase_of",
    "run",
    "step",
    "trace_to_jsonl",
    "worst_case_expected_steps",
]

STATE_CAP_ENV = "PIVOTLAB_STATE_CAP"
STEP_BUDGET_ENV = "PIVOTLAB_STEP_BUDGET"
DEFAULT_STATE_CAP = 10**6


class _Terminal:
    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "TERMINAL"


TERMINAL = _Terminal()


def _state_cap(cap: int | None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get(STATE_CAP_ENV, DEFAULT_STATE_CAP))


# ---------------------------------------------------------------------------
# configuration and starts
# ---------------------------------------------------------------------------


def main_start(point_set: PointSet) -> Transversal:
    """The all-axes start of maximal construction phase: ``{m e_1, ..., m e_r}``."""
    r, m = point_set.r, point_set.m
    return geometry.make_transversal(
        point_set, [PointId(i, r, m) for i in range(1, r + 1)]
    )


def adversary_start(point_set: PointSet) -> Transversal:
    """The augmented start ``{alpha_1 e_1, ..., alpha_r e_r}``."""
    if not point_set.is_augmented:
        raise ValueError("adversary start needs an augmented point set")
    r, m = point_set.r, point_set.m
    return geometry.make_transversal(
        point_set, [PointId(i, r, m + 1) for i in range(1, r + 1)]
    )


class ProcessConfig:
    """One process instance: point set, escape weight, start position, and
    which of the two step counts the exact solver reports.

    ``count_terminal_step=False`` reports pivots only (the plain-process
    convention); ``True`` also counts the final escape hop (the augmented
    convention).  Simulated traces always carry both counts.
    """

    def __init__(
        self,
        point_set: PointSet,
        start: Transversal,
        delta: int = 0,
        count_terminal_step: bool = False,
    ) -> None:
        if delta < 0:
            raise ValueError("delta must be >= 0")
        # re-validation also confirms membership of every start point
        geometry.make_transversal(point_set, start.members)
        self.point_set = point_set
        self.start = start
        self.delta = delta
        self.count_terminal_step = count_terminal_step
        self._nodes: dict[tuple[PointId, ...], _Node] = {}

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (
            f"ProcessConfig(r={self.point_set.r}, m={self.point_set.m}, "
            f"delta={self.delta}, start={[p.as_tuple() for p in self.start.members]})"
        )


@dataclass(frozen=True)
class _Node:
    """Cached per-position data: axis intersections, phase, the strictly
    -below points and their color-swap successors."""

    t_sum: Fraction
    phase: int
    below: tuple[PointId, ...]
    succ: tuple[Transversal, ...]


def _node(cfg: ProcessConfig, position: Transversal) -> _Node:
    node = cfg._nodes.get(position.members)
    if node is None:
        ps = cfg.point_set
        tvec = geometry.axis_intersections(ps, position)
        # adversary hyperplanes may pass exactly through inner-layer points;
        # those are not strictly below and never enter the pivot pool
        below = geometry.below_set(ps, position, allow_on=ps.is_augmented)
        succ = tuple(position.replace(p) for p in below)
        node = _Node(sum(tvec), phase_of(ps, position), below, succ)
        cfg._nodes[position.members] = node
    return node


# ---------------------------------------------------------------------------
# phases
# ---------------------------------------------------------------------------


def phase_of(point_set: PointSet, position) -> int:
    """Phase of a position: the smallest phase among its outermost-layer
    members (0 for the terminal position)."""
    if position is TERMINAL:
        return 0
    phases = [p.phase for p in position.members if p.layer == point_set.r]
    if not phases:
        raise InternalInvariantError(
            f"transversal {position.members} has no outermost-layer point"
        )
    return min(phases)


def phase_from_min_t(point_set: PointSet, position: Transversal) -> Fraction:
    """The equivalent axis-intersection characterization: ``min(t_1..t_r)``.
    Agrees exactly with :func:`phase_of` on the standard families."""
    return min(geometry.axis_intersections(point_set, position))


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceRecord:
    """One visited position: the pivot chosen there is a point id, or
    ``None`` for the final escape hop."""

    t: int
    members: tuple[PointId, ...]
    below_count: int
    phase: int
    pivot: PointId | None


@dataclass(frozen=True)
class Trace:
    records: tuple[TraceRecord, ...]

    @property
    def pivot_count(self) -> int:
        return len(self.records) - 1

    @property
    def total_steps(self) -> int:
        """Pivot count plus the final escape hop."""
        return len(self.records)

    def steps(self, count_terminal_step: bool) -> int:
        return self.total_steps if count_terminal_step else self.pivot_count

    def positions(self) -> Iterator[tuple[PointId, ...]]:
        return (rec.members for rec in self.records)

    def phase_changes(self) -> list[tuple[int, int]]:
        """Times and values of phase changes, including the final change to
        phase 0 at the escape hop."""
        changes = []
        for prev, rec in zip(self.records, self.records[1:]):
            if rec.phase != prev.phase:
                changes.append((rec.t, rec.phase))
        changes.append((len(self.records), 0))
        return changes

    def phase_sequence(self) -> list[int]:
        return [self.records[0].phase] + [phi for _, phi in self.phase_changes()]


def trace_to_jsonl(trace: Trace) -> str:
    lines = []
    for rec in trace.records:
        lines.append(
            json.dumps(
                {
                    "t": rec.t,
                    "S": [list(p.as_tuple()) for p in rec.members],
                    "pivot": "inf" if rec.pivot is None else list(rec.pivot.as_tuple()),
                    "below": rec.below_count,
                    "phase": rec.phase,
                },
                separators=(",", ":"),
            )
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------


def step(cfg: ProcessConfig, position: Transversal, rng: Random):
    """One transition: returns ``(next_position, pivot)`` where the pivot is
    a point id or ``None`` for the escape.

    The pivot is drawn with a single uniform integer over ``|below| + delta``
    outcomes, mapped to below points first; with ``delta == 0`` and nothing
    below the escape is forced without consuming randomness.
    """
    node = _node(cfg, position)
    total = len(node.below) + cfg.delta
    if total == 0:
        return TERMINAL, None
    i = rng.randrange(total)
    if i < len(node.below):
        return node.succ[i], node.below[i]
    return TERMINAL, None


def run(cfg: ProcessConfig, rng: Random) -> Trace:
    """Run to the terminal position, recording every visited transversal."""
    budget = int(
        os.environ.get(STEP_BUDGET_ENV, cfg.point_set.transversal_count() + 1)
    )
    records = []
    position = cfg.start
    prev_t_sum = None
    t = 0
    while True:
        node = _node(cfg, position)
        if prev_t_sum is not None and node.t_sum >= prev_t_sum:
            raise InternalInvariantError(
                "axis-intersection sum failed to decrease; monotonicity is broken"
            )
        prev_t_sum = node.t_sum
        nxt, pivot = step(cfg, position, rng)
        records.append(
            TraceRecord(t, position.members, len(node.below), node.phase, pivot)
        )
        t += 1
        if t > budget:
            raise InternalInvariantError(
                "process exceeded its step budget; positions must not repeat"
            )
        if nxt is TERMINAL:
            return Trace(tuple(records))
        position = nxt


# ---------------------------------------------------------------------------
# good phases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GoodPhaseReport:
    """Good phases of one trace.

    A visited phase is good when it was entered by pivoting a point of the
    last color and the entry position avoids the second-outermost layer.
    ``entry_all_below[k]`` records the expected consequence: whether every
    second-outermost-layer point was strictly below the entry position.
    Empty below dimension 2, where the notion is not defined.
    """

    phases: frozenset[int]
    entry_all_below: dict[int, bool]


def good_phases(cfg: ProcessConfig, trace: Trace) -> GoodPhaseReport:
    ps = cfg.point_set
    r = ps.r
    if r < 2:
        return GoodPhaseReport(frozenset(), {})
    layer_rm1 = set(ps.layer_members(r - 1))
    good: set[int] = set()
    entry_all_below: dict[int, bool] = {}
    for sigma, phi in trace.phase_changes():
        if phi == 0 or sigma >= len(trace.records):
            continue
        pivot = trace.records[sigma - 1].pivot
        entry = trace.records[sigma]
        assert pivot is not None  # a positive-phase change is a point pivot
        if pivot.color != r:
            continue
        if any(p.layer == r - 1 for p in entry.members):
            continue
        good.add(phi)
        entry_node = _node(cfg, Transversal(entry.members))
        entry_all_below[phi] = layer_rm1 <= set(entry_node.below)
    return GoodPhaseReport(frozenset(good), entry_all_below)


# ---------------------------------------------------------------------------
# exact expected durations
# ---------------------------------------------------------------------------


def exact_expected_steps(cfg: ProcessConfig, cap: int | None = None) -> Fraction:
    """Exact expected step count from ``cfg.start``, per the config's
    counting convention.

    Enumerates all transversals, then back-substitutes in increasing order of
    the axis-intersection sum (pivots strictly decrease it, so successors are
    always solved first).
    """
    ps = cfg.point_set
    count = ps.transversal_count()
    if count > _state_cap(cap):
        raise InstanceTooLargeError(
            f"instance too large for exact mode: {count} transversals exceed "
            f"the cap of {_state_cap(cap)}"
        )
    states = list(geometry.transversals(ps))
    nodes = {s: _node(cfg, s) for s in states}
    expected: dict[tuple[PointId, ...], Fraction] = {}
    for s in sorted(states, key=lambda s: nodes[s].t_sum):
        node = nodes[s]
        total = len(node.below) + cfg.delta
        if total == 0:
            expected[s.members] = Fraction(1)  # forced escape hop
            continue
        acc = Fraction(0)
        for nxt in node.succ:
            value = expected.get(nxt.members)
            if value is None:
                raise InternalInvariantError(
                    "pivot against the axis-sum order; monotonicity is broken"
                )
            acc += value
        expected[s.members] = 1 + acc / total
    result = expected[cfg.start.members]
    return result if cfg.count_terminal_step else result - 1


def worst_case_expected_steps(
    r: int,
    m: int,
    delta: int,
    alpha_options: Iterable[int],
    count_terminal_step: bool = True,
    cap: int | None = None,
) -> tuple[Fraction, tuple[int, ...]]:
    """Adversary sweep: exact expected duration minimized over all augmented
    starts with each ``alpha_i`` drawn from ``alpha_options``."""
    base = geometry.gen_point_set(r, m)
    options = sorted(set(alpha_options))
    best: tuple[Fraction, tuple[int, ...]] | None = None
    for alphas in product(options, repeat=r):
        ps = base.augmented(alphas)
        cfg = ProcessConfig(
            ps, adversary_start(ps), delta=delta,
            count_terminal_step=count_terminal_step,
        )
        value = exact_expected_steps(cfg, cap=cap)
        if best is None or value < best[0]:
            best = (value, alphas)
    if best is None:
        raise ValueError("no alpha choices supplied")
    return best
