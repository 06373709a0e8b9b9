"""Comb orientations of grid graphs and their directed random walks.

A grid is the Cartesian product of complete graphs ``K_{m_1} x ... x K_{m_r}``:
vertices are coordinate tuples (1-based entries), and two vertices are adjacent
iff they differ in exactly one coordinate.  The *comb orientation* assigns the
values of the last factor a permutation of ranks, directs every edge between
two hyperplanes toward the endpoint whose last coordinate has the smaller
rank, and recurses independently inside each hyperplane.  Every orientation
built this way is acyclic and has a unique sink in every subgrid.

The orientation can be augmented with a terminal vertex reachable through
``delta`` parallel escape edges from every grid vertex (one edge from each
sink if ``delta`` is zero), turning the walk into an absorbing chain whose
expected absorption time this module computes exactly over the rationals.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from random import Random
from typing import Callable, Iterator, Union

from .errors import InstanceTooLargeError, InternalInvariantError

__all__ = [
    "AugmentedConfig",
    "CombOrientation",
    "GridSpec",
    "OutArcs",
    "TERMINAL",
    "Vertex",
    "WalkOutcome",
    "build_comb",
    "comb_from_dict",
    "comb_to_dict",
    "embed_padded",
    "expected_duration_exact",
    "flip_top_pair_out",
    "grid_out_function",
    "grid_spec",
    "has_topological_order",
    "identity_comb",
    "is_unique_sink_orientation",
    "orient_edge",
    "out_neighbors",
    "unique_sink_violations",
    "uso_lemma_bound",
    "uso_theorem_bound",
    "walk",
]

Vertex = tuple[int, ...]

STATE_CAP_ENV = "PIVOTLAB_STATE_CAP"
STEP_BUDGET_ENV = "PIVOTLAB_STEP_BUDGET"
DEFAULT_STATE_CAP = 10**6


class _Terminal:
    """Sentinel for the absorbing terminal vertex."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "TERMINAL"


TERMINAL = _Terminal()


def _state_cap(cap: int | None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get(STATE_CAP_ENV, DEFAULT_STATE_CAP))


def _step_budget(default: int) -> int:
    return int(os.environ.get(STEP_BUDGET_ENV, default))


# ---------------------------------------------------------------------------
# grid & orientation data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Shape of a grid: one complete-graph factor per coordinate."""

    factor_sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(s < 1 for s in self.factor_sizes):
            raise ValueError("every factor size must be >= 1")

    @property
    def dimension(self) -> int:
        return len(self.factor_sizes)

    @property
    def size(self) -> int:
        """Grid size: the sum of the factor sizes (not the vertex count)."""
        return sum(self.factor_sizes)

    @property
    def vertex_count(self) -> int:
        return math.prod(self.factor_sizes)

    def vertices(self) -> Iterator[Vertex]:
        return product(*(range(1, s + 1) for s in self.factor_sizes))

    def contains(self, v: Vertex) -> bool:
        return len(v) == self.dimension and all(
            1 <= c <= s for c, s in zip(v, self.factor_sizes)
        )


@dataclass(frozen=True)
class AugmentedConfig:
    """Escape-edge multiplicity toward the terminal vertex.

    ``delta >= 1`` attaches ``delta`` parallel terminal edges to every vertex;
    ``delta == 0`` attaches a single terminal edge to each sink only, so the
    terminal is the one global sink either way.
    """

    delta: int = 0

    def __post_init__(self) -> None:
        if self.delta < 0:
            raise ValueError("delta must be >= 0")


@dataclass(frozen=True)
class CombOrientation:
    """Recursive comb orientation.

    ``ranks[v-1]`` is the rank given to value ``v`` of the last factor
    (rank 1 sits at the sink end); ``children[v-1]`` orients the hyperplane
    with last coordinate ``v``.  A zero-dimensional comb is the leaf with
    empty ``ranks`` and ``children``.
    """

    ranks: tuple[int, ...]
    children: tuple["CombOrientation", ...]

    def __post_init__(self) -> None:
        if len(self.ranks) != len(self.children):
            raise ValueError("need exactly one child orientation per value")
        if self.ranks and sorted(self.ranks) != list(range(1, len(self.ranks) + 1)):
            raise ValueError("ranks must be a permutation of 1..m")
        child_sizes = {c.sizes for c in self.children}
        if len(child_sizes) > 1:
            raise ValueError("all children must orient grids of the same shape")

    @property
    def dimension(self) -> int:
        return 0 if not self.ranks else 1 + self.children[0].dimension

    @property
    def m(self) -> int:
        """Size of the last factor."""
        return len(self.ranks)

    @property
    def sizes(self) -> tuple[int, ...]:
        if not self.ranks:
            return ()
        return self.children[0].sizes + (len(self.ranks),)


LEAF = CombOrientation((), ())


def grid_spec(comb: CombOrientation) -> GridSpec:
    return GridSpec(comb.sizes)


def build_comb(r: int, m: int, rng: Random) -> CombOrientation:
    """Build a random comb: uniform rank permutation at the top level,
    independent recursive children below.

    The draw order is fixed (top permutation first, then children in value
    order) so a seeded stream reproduces the structure bit for bit.
    """
    if r < 0:
        raise ValueError("dimension must be >= 0")
    if m < 1:
        raise ValueError("factor size must be >= 1")
    if r == 0:
        return LEAF
    ranks = tuple(rng.sample(range(1, m + 1), m))
    children = tuple(build_comb(r - 1, m, rng) for _ in range(m))
    return CombOrientation(ranks, children)


def identity_comb(r: int, m: int) -> CombOrientation:
    """The deterministic comb whose every permutation is the identity."""
    return _identity_for((m,) * r)


def _identity_for(sizes: tuple[int, ...]) -> CombOrientation:
    if not sizes:
        return LEAF
    m = sizes[-1]
    child = _identity_for(sizes[:-1])
    return CombOrientation(tuple(range(1, m + 1)), (child,) * m)


# ---------------------------------------------------------------------------
# orientation queries
# ---------------------------------------------------------------------------


def orient_edge(comb: CombOrientation, u: Vertex, v: Vertex) -> tuple[Vertex, Vertex]:
    """Return the edge ``{u, v}`` as an ordered pair ``(tail, head)``.

    The two vertices must differ in exactly one coordinate.  Edges along the
    last factor follow the top-level ranks (higher rank is the tail); edges
    along earlier factors are oriented by the child of the shared last
    coordinate, recursively.
    """
    spec = grid_spec(comb)
    if not (spec.contains(u) and spec.contains(v)):
        raise ValueError(f"vertices must lie in the grid {spec.factor_sizes}")
    diff = [i for i, (a, b) in enumerate(zip(u, v)) if a != b]
    if len(diff) != 1:
        raise ValueError("vertices must differ in exactly one coordinate")
    d = diff[0]
    node = comb
    for level in range(spec.dimension - 1, d, -1):
        node = node.children[u[level] - 1]
    if node.ranks[u[d] - 1] > node.ranks[v[d] - 1]:
        return (u, v)
    return (v, u)


@dataclass(frozen=True)
class OutArcs:
    """Out-edge multiset of a vertex: grid targets plus the terminal vertex
    with an integer multiplicity (parallel edges are never materialized)."""

    targets: tuple[Vertex, ...]
    terminal: int

    @property
    def degree(self) -> int:
        return len(self.targets) + self.terminal


def _grid_out_targets(comb: CombOrientation, v: Vertex) -> list[Vertex]:
    if not comb.ranks:
        return []
    last = len(v) - 1
    my_rank = comb.ranks[v[last] - 1]
    out = [
        v[:last] + (w,)
        for w in range(1, comb.m + 1)
        if comb.ranks[w - 1] < my_rank
    ]
    child = comb.children[v[last] - 1]
    out.extend(t + (v[last],) for t in _grid_out_targets(child, v[:last]))
    return out


def _is_sink(comb: CombOrientation, v: Vertex) -> bool:
    node = comb
    for c in reversed(v):
        if node.ranks[c - 1] != 1:
            return False
        node = node.children[c - 1]
    return True


def out_neighbors(
    comb: CombOrientation, cfg: AugmentedConfig | None, v: Vertex
) -> OutArcs:
    """Out-edges of ``v``: grid arcs under the comb, plus terminal edges per
    ``cfg`` (``None`` means the plain, unaugmented grid)."""
    spec = grid_spec(comb)
    if not spec.contains(v):
        raise ValueError(f"vertex {v} not in grid {spec.factor_sizes}")
    targets = tuple(_grid_out_targets(comb, v))
    if cfg is None:
        terminal = 0
    elif cfg.delta > 0:
        terminal = cfg.delta
    else:
        terminal = 1 if not targets else 0
    return OutArcs(targets, terminal)


def grid_out_function(comb: CombOrientation) -> Callable[[Vertex], tuple[Vertex, ...]]:
    """Grid-arc adjacency as a plain callable (for the structural checkers)."""
    return lambda v: tuple(_grid_out_targets(comb, v))


def flip_top_pair_out(
    comb: CombOrientation, a: int, b: int
) -> Callable[[Vertex], tuple[Vertex, ...]]:
    """Adjacency with the rank rule reversed for the single top-factor value
    pair ``{a, b}``.  Fault injection for the checker-sensitivity tests: with
    three or more values this creates a directed triangle, so some subgrid
    loses its sink.
    """
    if a == b or not comb.ranks:
        raise ValueError("need two distinct values of the top factor")
    last = comb.dimension - 1
    pair = {a, b}

    def out(v: Vertex) -> tuple[Vertex, ...]:
        arcs = set(_grid_out_targets(comb, v))
        if v[last] in pair:
            (other,) = pair - {v[last]}
            w = v[:last] + (other,) + v[last + 1 :]
            if w in arcs:
                arcs.discard(w)
            else:
                arcs.add(w)
        return tuple(sorted(arcs))

    return out


# ---------------------------------------------------------------------------
# walks and exact expectations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WalkOutcome:
    """Result of one walk: the step count and (optionally) the vertex
    sequence, whose last entry is the final sink or ``TERMINAL``."""

    steps: int
    visited: tuple[Union[Vertex, _Terminal], ...] | None = None


def _uniform_vertex(spec: GridSpec, rng: Random) -> Vertex:
    idx = rng.randrange(spec.vertex_count)
    coords = []
    for s in spec.factor_sizes:
        idx, c = divmod(idx, s)
        coords.append(c + 1)
    return tuple(coords)


def walk(
    comb: CombOrientation,
    cfg: AugmentedConfig | None,
    start: Vertex | str,
    rng: Random,
    record: bool = True,
) -> WalkOutcome:
    """Run one directed random walk.

    Each step draws uniformly over the out-edge multiset, so the terminal is
    chosen with probability ``delta / (outdeg + delta)``.  The walk stops at a
    sink (plain grid) or at the terminal (augmented).  ``start`` may be a
    vertex or ``"uniform"``.
    """
    spec = grid_spec(comb)
    if start == "uniform":
        v = _uniform_vertex(spec, rng)
    else:
        v = start  # type: ignore[assignment]
        if not spec.contains(v):
            raise ValueError(f"start vertex {v} not in grid {spec.factor_sizes}")
    budget = _step_budget(spec.vertex_count + 1)
    visited: list[Union[Vertex, _Terminal]] = [v]
    steps = 0
    while True:
        arcs = out_neighbors(comb, cfg, v)
        if arcs.degree == 0:
            break  # sink of the plain grid
        i = rng.randrange(arcs.degree)
        steps += 1
        if steps > budget:
            raise InternalInvariantError(
                "walk exceeded its step budget; the orientation is not acyclic"
            )
        if i < len(arcs.targets):
            v = arcs.targets[i]
            if record:
                visited.append(v)
        else:
            if record:
                visited.append(TERMINAL)
            break
    return WalkOutcome(steps, tuple(visited) if record else None)


def _rank_key(comb: CombOrientation, v: Vertex) -> tuple[int, ...]:
    key = []
    node = comb
    for c in reversed(v):
        key.append(node.ranks[c - 1])
        node = node.children[c - 1]
    return tuple(key)


def expected_duration_exact(
    comb: CombOrientation,
    cfg: AugmentedConfig | None,
    start: Vertex | str = "uniform",
    cap: int | None = None,
) -> Fraction:
    """Exact expected walk duration, as a rational.

    Every edge strictly decreases the vertex's rank tuple lexicographically,
    so one back-substitution pass in ascending rank order solves the whole
    chain.  ``start == "uniform"`` averages over all grid vertices.
    """
    spec = grid_spec(comb)
    if spec.vertex_count > _state_cap(cap):
        raise InstanceTooLargeError(
            f"instance too large for exact mode: {spec.vertex_count} vertices "
            f"exceed the cap of {_state_cap(cap)}"
        )
    if start != "uniform" and not spec.contains(start):  # type: ignore[arg-type]
        raise ValueError(f"start vertex {start} not in grid {spec.factor_sizes}")

    if comb.dimension <= 1:
        values = _chain_expectations(comb, cfg)
    else:
        values = {}
        for v in sorted(spec.vertices(), key=lambda u: _rank_key(comb, u)):
            arcs = out_neighbors(comb, cfg, v)
            if arcs.degree == 0:
                values[v] = Fraction(0)
                continue
            try:
                total = sum((values[w] for w in arcs.targets), Fraction(0))
            except KeyError as exc:  # pragma: no cover - tripwire
                raise InternalInvariantError(
                    "edge against the rank order; the orientation is not acyclic"
                ) from exc
            values[v] = 1 + total / arcs.degree

    if start == "uniform":
        return sum(values.values(), Fraction(0)) / len(values)
    return values[start]  # type: ignore[index]


def _chain_expectations(
    comb: CombOrientation, cfg: AugmentedConfig | None
) -> dict[Vertex, Fraction]:
    """Expectations for dimensions 0 and 1, where the orientation is a rank
    chain and a running prefix sum replaces the quadratic re-summation."""
    if comb.dimension == 0:
        e = Fraction(0) if cfg is None else Fraction(1)
        return {(): e}
    by_rank = sorted(range(1, comb.m + 1), key=lambda v: comb.ranks[v - 1])
    values: dict[Vertex, Fraction] = {}
    running = Fraction(0)
    for t, v in enumerate(by_rank, start=1):
        if cfg is None:
            terminal = 0
        elif cfg.delta > 0:
            terminal = cfg.delta
        else:
            terminal = 1 if t == 1 else 0
        degree = (t - 1) + terminal
        e = Fraction(0) if degree == 0 else 1 + running / degree
        values[(v,)] = e
        running += e
    return values


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def uso_lemma_bound(r: int, m: int, delta: int = 0) -> float:
    """Duration lower bound for the augmented walk from a uniform start,
    in expectation over the randomized construction:
    ``(ln(m+delta+1) - ln(delta+1))**r / r!``."""
    if r < 0 or m < 1 or delta < 0:
        raise ValueError("need r >= 0, m >= 1, delta >= 0")
    return (math.log(m + delta + 1) - math.log(delta + 1)) ** r / math.factorial(r)


def uso_theorem_bound(r: int, m: int) -> float:
    """Companion bound for the plain (unaugmented) walk: the augmented bound
    at ``delta == 0`` minus the one final terminal step."""
    return uso_lemma_bound(r, m, 0) - 1.0


# ---------------------------------------------------------------------------
# padding to grids of arbitrary size
# ---------------------------------------------------------------------------


def embed_padded(comb: CombOrientation, n: int) -> CombOrientation:
    """Embed a comb on ``r`` equal factors of size ``m = floor(n/r)`` into a
    grid of size ``n`` (sum of factor sizes).

    Padded values of every factor receive ranks above all original values, in
    index order, and padded hyperplanes carry identity combs; hence every edge
    between the original subgrid and the new vertices points into the subgrid,
    and the result is again an acyclic unique sink orientation (checked
    computationally on small cases rather than assumed).
    """
    r = comb.dimension
    if r < 1:
        raise ValueError("cannot pad a zero-dimensional orientation")
    sizes = comb.sizes
    if len(set(sizes)) != 1:
        raise ValueError("padding expects equal factor sizes")
    m = sizes[-1]
    if n <= r:
        raise ValueError(f"no valid grid: size {n} must exceed dimension {r}")
    if n // r != m:
        raise ValueError(
            f"target size {n} is incompatible with factor size {m}: "
            f"expected floor(n/r) == {m}"
        )
    if n == r * m:
        return comb
    extra = n - r * m
    target = tuple(m + 1 if i < extra else m for i in range(r))
    return _pad(comb, target)


def _pad(node: CombOrientation, sizes: tuple[int, ...]) -> CombOrientation:
    if node.dimension == 0:
        return node
    m = node.m
    top = sizes[-1]
    ranks = node.ranks + tuple(range(m + 1, top + 1))
    children = tuple(_pad(c, sizes[:-1]) for c in node.children)
    children += tuple(_identity_for(sizes[:-1]) for _ in range(top - m))
    return CombOrientation(ranks, children)


# ---------------------------------------------------------------------------
# structural checks (acyclicity, unique sinks per subgrid)
# ---------------------------------------------------------------------------

OutFn = Callable[[Vertex], tuple[Vertex, ...]]


def _subgrid_choices(spec: GridSpec, cap: int) -> list[list[tuple[int, ...]]]:
    count = math.prod(2**s - 1 for s in spec.factor_sizes)
    if count > cap:
        raise InstanceTooLargeError(
            f"{count} subgrids exceed the exhaustive-check cap of {cap}"
        )
    choices = []
    for s in spec.factor_sizes:
        values = range(1, s + 1)
        subsets = []
        for mask in range(1, 2**s):
            subsets.append(tuple(v for v in values if mask & (1 << (v - 1))))
        choices.append(subsets)
    return choices


def unique_sink_violations(
    spec: GridSpec,
    out_fn: OutFn,
    cap: int | None = None,
    max_report: int = 5,
) -> list[tuple[tuple[int, ...], ...]]:
    """Exhaustively check every subgrid for a unique sink; returns the
    offending subgrids (as tuples of per-factor value subsets), empty if the
    orientation is a unique sink orientation."""
    bad = []
    for subsets in product(*_subgrid_choices(spec, _state_cap(cap))):
        member = [set(s) for s in subsets]
        sinks = 0
        for v in product(*subsets):
            if not any(
                all(w[i] in member[i] for i in range(len(w))) for w in out_fn(v)
            ):
                sinks += 1
                if sinks > 1:
                    break
        if sinks != 1:
            bad.append(subsets)
            if len(bad) >= max_report:
                break
    return bad


def is_unique_sink_orientation(
    comb_or_spec: CombOrientation | GridSpec,
    out_fn: OutFn | None = None,
    cap: int | None = None,
) -> bool:
    if isinstance(comb_or_spec, CombOrientation):
        spec = grid_spec(comb_or_spec)
        out_fn = out_fn or grid_out_function(comb_or_spec)
    else:
        spec = comb_or_spec
        if out_fn is None:
            raise ValueError("an adjacency function is required with a bare GridSpec")
    return not unique_sink_violations(spec, out_fn, cap=cap, max_report=1)


def has_topological_order(
    comb_or_spec: CombOrientation | GridSpec,
    out_fn: OutFn | None = None,
    cap: int | None = None,
) -> bool:
    """Kahn's algorithm over the full edge set."""
    if isinstance(comb_or_spec, CombOrientation):
        spec = grid_spec(comb_or_spec)
        out_fn = out_fn or grid_out_function(comb_or_spec)
    else:
        spec = comb_or_spec
        if out_fn is None:
            raise ValueError("an adjacency function is required with a bare GridSpec")
    if spec.vertex_count > _state_cap(cap):
        raise InstanceTooLargeError("grid too large for the acyclicity check")
    indeg: dict[Vertex, int] = {v: 0 for v in spec.vertices()}
    outs: dict[Vertex, tuple[Vertex, ...]] = {}
    for v in spec.vertices():
        outs[v] = out_fn(v)
        for w in outs[v]:
            indeg[w] += 1
    queue = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in outs[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == spec.vertex_count


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def comb_to_dict(comb: CombOrientation) -> dict:
    return {
        "r": comb.dimension,
        "m": comb.m,
        "perm": list(comb.ranks),
        "children": [comb_to_dict(c) for c in comb.children],
    }


def comb_from_dict(data: dict) -> CombOrientation:
    return CombOrientation(
        tuple(data["perm"]),
        tuple(comb_from_dict(c) for c in data["children"]),
    )
