"""Exact-integer point families around one requirement line, with rational
geometric predicates.

The construction lives in ``Z^r``: every point has exactly one positive
coordinate (its *color* index), carries a *layer* index ``j`` that fixes its
trailing tail of negative powers of ``m``, and a *phase* index ``k``.  Points
of the outermost layer ``j == r`` sit on the coordinate axes as ``k * e_i``.
The requirement line is the diagonal ``R * (1, ..., 1)``; a subset is
*pierced* when its convex hull meets that line, and a pierced set with one
point per color is a *transversal* (a pierced simplex).

Every predicate here is decided exactly: coordinates are Python ints
(magnitudes reach ``m**(2r-1)``), all derived values are ``Fraction``.
Floats never participate in a geometric decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping

from .errors import DegeneracyError, GeneralPositionError

__all__ = [
    "Coords",
    "PointId",
    "PointSet",
    "Side",
    "Transversal",
    "adversary_phase",
    "augment",
    "axis_intersections",
    "below_set",
    "flip_tail_sign",
    "gen_point",
    "gen_point_set",
    "hyperplane_coefficients",
    "is_pierced_subset",
    "make_transversal",
    "matrix_rank",
    "pivot",
    "pivot_color_swap",
    "pivot_generic",
    "project_deep",
    "side_of",
    "solve_exact",
    "transversals",
]

Coords = tuple[int, ...]


# ---------------------------------------------------------------------------
# small exact linear algebra (dense, rational, tiny systems)
# ---------------------------------------------------------------------------


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    a = [row[:] for row in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivot_cols: list[int] = []
    pr = 0
    for c in range(ncols):
        pivot = next((i for i in range(pr, nrows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[pr], a[pivot] = a[pivot], a[pr]
        inv = a[pr][c]
        a[pr] = [x / inv for x in a[pr]]
        for i in range(nrows):
            if i != pr and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[pr])]
        pivot_cols.append(c)
        pr += 1
        if pr == nrows:
            break
    return a, pivot_cols


def matrix_rank(rows: Iterable[Iterable[int | Fraction]]) -> int:
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return 0
    return len(_rref(mat)[1])


def solve_exact(
    a: Iterable[Iterable[int | Fraction]], b: Iterable[int | Fraction]
) -> tuple[str, list[Fraction] | None]:
    """Solve ``A x = b`` exactly.

    Returns ``("unique", x)``, ``("inconsistent", None)`` or
    ``("underdetermined", None)``.  Handles any shape; tiny systems only.
    """
    rows = [[Fraction(x) for x in row] for row in a]
    rhs = [Fraction(x) for x in b]
    if not rows:
        return ("unique", []) if all(x == 0 for x in rhs) else ("inconsistent", None)
    ncols = len(rows[0])
    aug = [row + [v] for row, v in zip(rows, rhs)]
    red, piv = _rref(aug)
    if ncols in piv:
        return ("inconsistent", None)
    if len(piv) < ncols:
        return ("underdetermined", None)
    x = [Fraction(0)] * ncols
    for i, c in enumerate(piv):
        x[c] = red[i][ncols]
    return ("unique", x)


# ---------------------------------------------------------------------------
# point identities and the coordinate formula
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class PointId:
    """Label of a point: color ``i``, layer ``j`` (``i <= j``), phase ``k``.

    Adversary points use phase ``m + 1`` and always sit in the outermost
    layer; that contextual rule is enforced where ``m`` is known.
    """

    color: int
    layer: int
    phase: int

    def __post_init__(self) -> None:
        if self.color < 1 or self.layer < self.color or self.phase < 1:
            raise ValueError(f"invalid point id {self}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.color, self.layer, self.phase)


def adversary_phase(m: int) -> int:
    return m + 1


def gen_point(r: int, m: int, pid: PointId, alpha: int | None = None) -> Coords:
    """Exact coordinates of the point labelled ``pid`` in the ``(r, m)``
    family.

    Layer ``r`` points are ``k * e_i``; any other layer ``j`` has positive
    entry ``(m**3 + m**5 + ... + m**(2(r-j)+1)) + (r-j)*m + k`` at the color
    index followed by the tail ``-m**(2(r-j)+1), ..., -m**5, -m**3``.
    Adversary points (phase ``m + 1``) need an explicit ``alpha``.
    """
    i, j, k = pid.color, pid.layer, pid.phase
    if r < 1 or m < 1:
        raise ValueError("need r >= 1 and m >= 1")
    if not (1 <= i <= j <= r):
        raise ValueError(f"point id {pid} out of range for dimension {r}")
    if k == m + 1:
        if j != r:
            raise ValueError("adversary points live in the outermost layer")
        if alpha is None:
            raise ValueError(f"adversary point {pid} needs a configured alpha")
        if alpha < m:
            raise ValueError(f"adversary alpha {alpha} below the minimum {m}")
        return tuple(alpha if t == i else 0 for t in range(1, r + 1))
    if not 1 <= k <= m:
        raise ValueError(f"phase {k} out of range for m={m}")
    if j == r:
        return tuple(k if t == i else 0 for t in range(1, r + 1))
    tail_exponents = [2 * (r - j) + 1 - 2 * s for s in range(r - j)]
    positive = sum(m**e for e in tail_exponents) + (r - j) * m + k
    coords = [0] * r
    coords[i - 1] = positive
    for pos, e in zip(range(j, r), tail_exponents):
        coords[pos] = -(m**e)
    return tuple(coords)


# ---------------------------------------------------------------------------
# point sets
# ---------------------------------------------------------------------------


class PointSet:
    """An immutable labelled point set in ``Z^r``.

    Usually built by :meth:`generate` (the standard family) or
    :func:`project_deep`; arbitrary labelled sets are accepted for fault
    injection, but no general-position repair is attempted.
    """

    def __init__(
        self,
        r: int,
        m: int,
        points: Mapping[PointId, Coords],
        alphas: tuple[int, ...] | None = None,
    ) -> None:
        if r < 1 or m < 1:
            raise ValueError("need r >= 1 and m >= 1")
        self.r = r
        self.m = m
        self.alphas = alphas
        self._points: dict[PointId, Coords] = dict(points)
        seen: dict[Coords, PointId] = {}
        for pid, xs in self._points.items():
            if len(xs) != r:
                raise ValueError(f"point {pid} has {len(xs)} coordinates, want {r}")
            if xs in seen:
                raise ValueError(f"points {seen[xs]} and {pid} coincide at {xs}")
            seen[xs] = pid
        self._colors: dict[int, tuple[PointId, ...]] = {}
        for i in range(1, r + 1):
            members = sorted(p for p in self._points if p.color == i)
            self._colors[i] = tuple(members)
        self._hyperplanes: dict[tuple[PointId, ...], tuple[Fraction, ...]] = {}

    # -- construction ------------------------------------------------------

    @classmethod
    def generate(cls, r: int, m: int) -> "PointSet":
        points = {}
        for i in range(1, r + 1):
            for j in range(i, r + 1):
                for k in range(1, m + 1):
                    pid = PointId(i, j, k)
                    points[pid] = gen_point(r, m, pid)
        return cls(r, m, points)

    def augmented(self, alphas: Iterable[int] | None = None) -> "PointSet":
        """Add one adversary point per axis (phase ``m + 1``).

        Defaults to ``alpha_i = m + 1`` everywhere: values below ``m`` are
        invalid, and ``alpha_i == m`` would coincide with the on-axis point of
        phase ``m``, so the smallest usable value is ``m + 1``.
        """
        if self.alphas is not None:
            raise ValueError("point set is already augmented")
        chosen = tuple(alphas) if alphas is not None else (self.m + 1,) * self.r
        if len(chosen) != self.r:
            raise ValueError(f"need {self.r} alphas, got {len(chosen)}")
        for a in chosen:
            if a < self.m:
                raise ValueError(f"alpha {a} below the minimum {self.m}")
            if a == self.m:
                raise ValueError(
                    f"alpha {a} coincides with the on-axis point of phase {self.m}; "
                    f"use alpha >= {self.m + 1}"
                )
        points = dict(self._points)
        for i in range(1, self.r + 1):
            pid = PointId(i, self.r, adversary_phase(self.m))
            points[pid] = gen_point(self.r, self.m, pid, alpha=chosen[i - 1])
        return PointSet(self.r, self.m, points, alphas=chosen)

    # -- access ------------------------------------------------------------

    @property
    def is_augmented(self) -> bool:
        return self.alphas is not None

    def ids(self) -> tuple[PointId, ...]:
        return tuple(sorted(self._points))

    def coords(self, pid: PointId) -> Coords:
        return self._points[pid]

    def color_class(self, i: int) -> tuple[PointId, ...]:
        return self._colors[i]

    def layer_members(self, j: int) -> tuple[PointId, ...]:
        return tuple(p for p in self.ids() if p.layer == j)

    def transversal_count(self) -> int:
        count = 1
        for i in range(1, self.r + 1):
            count *= len(self._colors[i])
        return count

    def __len__(self) -> int:
        return len(self._points)

    def __contains__(self, pid: PointId) -> bool:
        return pid in self._points

    def __iter__(self) -> Iterator[PointId]:
        return iter(self.ids())

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        tag = f", alphas={self.alphas}" if self.is_augmented else ""
        return f"PointSet(r={self.r}, m={self.m}, n={len(self)}{tag})"

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "m": self.m,
            "alphas": list(self.alphas) if self.alphas else None,
            "points": [
                {
                    "i": pid.color,
                    "j": pid.layer,
                    "k": pid.phase,
                    "coords": [str(c) for c in self.coords(pid)],
                }
                for pid in self.ids()
            ],
        }

    def to_csv_rows(self) -> list[list[str]]:
        header = ["i", "j", "k"] + [f"x{t}" for t in range(1, self.r + 1)]
        rows = [header]
        for pid in self.ids():
            rows.append(
                [str(pid.color), str(pid.layer), str(pid.phase)]
                + [str(c) for c in self.coords(pid)]
            )
        return rows


def gen_point_set(r: int, m: int) -> PointSet:
    return PointSet.generate(r, m)


def augment(point_set: PointSet, alphas: Iterable[int] | None = None) -> PointSet:
    return point_set.augmented(alphas)


def project_deep(R: int, m: int, r: int) -> PointSet:
    """Drop the outer layers of the ``(R, m)`` family and truncate to the
    first ``r`` coordinates, keeping the original labels.

    The result behaves like the ``(r, m)`` family with all phases shifted by
    a common offset; the verification suite runs on it unchanged.
    """
    if not (R > r >= 1):
        raise ValueError("need R > r >= 1")
    if m < 3:
        raise ValueError("the projection argument needs m >= 3")
    points = {}
    for i in range(1, r + 1):
        for j in range(i, r + 1):
            for k in range(1, m + 1):
                pid = PointId(i, j, k)
                points[pid] = gen_point(R, m, pid)[:r]
    return PointSet(r, m, points)


def flip_tail_sign(point_set: PointSet, pid: PointId, coord_index: int) -> PointSet:
    """Copy of the set with one coordinate's sign flipped on one point.

    Deliberate fault injection: used to confirm the verification suite
    actually rejects broken sets.
    """
    coords = point_set.coords(pid)
    if not 0 <= coord_index < len(coords):
        raise ValueError("coordinate index out of range")
    if coords[coord_index] == 0:
        raise ValueError("flipping a zero coordinate changes nothing")
    mutated = list(coords)
    mutated[coord_index] = -mutated[coord_index]
    points = {q: point_set.coords(q) for q in point_set.ids()}
    points[pid] = tuple(mutated)
    return PointSet(point_set.r, point_set.m, points, alphas=point_set.alphas)


# ---------------------------------------------------------------------------
# transversals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Transversal:
    """One point per color, ordered by color.  Identity is the member tuple;
    axis intersections are derived (and cached on the owning point set)."""

    members: tuple[PointId, ...]

    def member(self, color: int) -> PointId:
        return self.members[color - 1]

    def replace(self, point: PointId) -> "Transversal":
        members = list(self.members)
        members[point.color - 1] = point
        return Transversal(tuple(members))


def make_transversal(point_set: PointSet, ids: Iterable[PointId]) -> Transversal:
    chosen = sorted(ids)
    if len(chosen) != point_set.r:
        raise ValueError(f"a transversal needs exactly {point_set.r} points")
    for color, pid in enumerate(chosen, start=1):
        if pid not in point_set:
            raise ValueError(f"{pid} is not a member of the point set")
        if pid.color != color:
            raise ValueError("a transversal needs exactly one point per color")
    return Transversal(tuple(chosen))


def transversals(point_set: PointSet) -> Iterator[Transversal]:
    """All transversals, in deterministic (color-sorted member) order."""
    classes = [point_set.color_class(i) for i in range(1, point_set.r + 1)]
    for members in product(*classes):
        yield Transversal(members)


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------


class Side(IntEnum):
    BELOW = -1
    ON = 0
    ABOVE = 1


def is_pierced_subset(points: Iterable[Coords], r: int) -> bool:
    """Exact test of whether the convex hull meets the diagonal line.

    Projects along the diagonal (consecutive coordinate differences) and asks
    whether the origin lies in the hull of the projections.  By Caratheodory
    it suffices to find one affinely independent subset of at most ``r``
    projected points whose barycentric coordinates for the origin are all
    nonnegative; each candidate is one exact linear solve.
    """
    pts = list(points)
    if not pts:
        return False
    if any(len(x) != r for x in pts):
        raise ValueError(f"points must have {r} coordinates")
    if r == 1:
        return True  # the whole line is the requirement line
    proj = [tuple(x[t] - x[t + 1] for t in range(r - 1)) for x in pts]
    dim = r - 1
    for size in range(1, min(len(proj), dim + 1) + 1):
        for subset in combinations(proj, size):
            rows = [[Fraction(q[t]) for q in subset] for t in range(dim)]
            rows.append([Fraction(1)] * size)
            rhs = [Fraction(0)] * dim + [Fraction(1)]
            status, lam = solve_exact(rows, rhs)
            if status == "unique" and all(l >= 0 for l in lam):  # type: ignore[union-attr]
                return True
    return False


def hyperplane_coefficients(
    point_set: PointSet, simplex: Transversal
) -> tuple[Fraction, ...]:
    """Coefficients ``c`` of the spanning hyperplane ``c . x == 1``.

    Cached per member tuple.  A singular system, a coefficient of zero, or a
    nonpositive axis intersection all violate general position and raise
    :class:`DegeneracyError`; on the standard families this indicates a
    construction bug.
    """
    cached = point_set._hyperplanes.get(simplex.members)
    if cached is not None:
        return cached
    rows = [point_set.coords(pid) for pid in simplex.members]
    status, c = solve_exact(rows, [1] * len(rows))
    if status != "unique":
        raise DegeneracyError(
            f"spanning system of {simplex.members} is {status}; "
            "the simplex is degenerate"
        )
    assert c is not None
    if any(ci == 0 for ci in c):
        raise DegeneracyError(
            f"hyperplane of {simplex.members} is parallel to a coordinate axis"
        )
    if any(ci < 0 for ci in c):
        raise DegeneracyError(
            f"hyperplane of {simplex.members} meets an axis on the negative side"
        )
    coeffs = tuple(c)
    point_set._hyperplanes[simplex.members] = coeffs
    return coeffs


def axis_intersections(
    point_set: PointSet, simplex: Transversal
) -> tuple[Fraction, ...]:
    """Positive values ``t_1..t_r`` where the simplex's hull meets each
    coordinate axis (``t_i = 1 / c_i`` from the spanning hyperplane)."""
    return tuple(1 / c for c in hyperplane_coefficients(point_set, simplex))


def side_of(point_set: PointSet, simplex: Transversal, x: PointId | Coords) -> Side:
    """Exact side of ``x`` relative to the simplex's spanning hyperplane,
    oriented so the diagonal direction points to ``ABOVE``."""
    coords = point_set.coords(x) if isinstance(x, PointId) else x
    c = hyperplane_coefficients(point_set, simplex)
    value = sum((ci * xi for ci, xi in zip(c, coords)), Fraction(0)) - 1
    if value > 0:
        return Side.ABOVE
    if value < 0:
        return Side.BELOW
    return Side.ON


def below_set(
    point_set: PointSet, simplex: Transversal, allow_on: bool = False
) -> tuple[PointId, ...]:
    """All points strictly below the simplex, in id order; members are never
    included.

    A non-member lying exactly on the hyperplane raises by default: on the
    standard unaugmented families that cannot happen, so it signals a broken
    set.  Augmented sets can place an adversary hyperplane exactly through
    inner-layer points (e.g. equal ``alpha_i = m + 1`` gives the start
    hyperplane coordinate-sum ``m + 1``, which phase-1 inner points hit), so
    callers working on augmented sets pass ``allow_on=True``; such points are
    simply not below, which is all the pivot draw ever asks.
    """
    members = set(simplex.members)
    below = []
    for pid in point_set.ids():
        if pid in members:
            continue
        side = side_of(point_set, simplex, pid)
        if side is Side.ON and not allow_on:
            raise GeneralPositionError(
                f"{pid} lies on the hyperplane of {simplex.members}"
            )
        if side is Side.BELOW:
            below.append(pid)
    return tuple(below)


# ---------------------------------------------------------------------------
# pivoting
# ---------------------------------------------------------------------------


def _require_below(point_set: PointSet, simplex: Transversal, p: PointId) -> None:
    if p in set(simplex.members):
        raise ValueError(f"pivot point {p} is already a member")
    if side_of(point_set, simplex, p) is not Side.BELOW:
        raise ValueError(f"pivot point {p} is not strictly below the simplex")


def pivot_color_swap(
    point_set: PointSet, simplex: Transversal, p: PointId
) -> Transversal:
    """Pivot by replacing the member of the pivot's color.

    On the standard families this is the unique pierced facet exchange; the
    agreement with :func:`pivot_generic` is a verified invariant, not an
    assumption baked into the generic search.
    """
    _require_below(point_set, simplex, p)
    return simplex.replace(p)


def pivot_generic(
    point_set: PointSet, simplex: Transversal, p: PointId
) -> Transversal:
    """Pivot by geometric facet search: among the facets of the extended
    simplex that contain ``p``, exactly one other than the current position
    is pierced; return it."""
    _require_below(point_set, simplex, p)
    r = point_set.r
    pierced_facets = []
    for removed in simplex.members:
        facet = [pid for pid in simplex.members if pid != removed] + [p]
        coords = [point_set.coords(pid) for pid in facet]
        if is_pierced_subset(coords, r):
            pierced_facets.append(facet)
    if len(pierced_facets) != 1:
        raise DegeneracyError(
            f"pivot of {simplex.members} with {p}: expected exactly one pierced "
            f"facet, found {len(pierced_facets)}"
        )
    facet = pierced_facets[0]
    colors = sorted(pid.color for pid in facet)
    if colors != list(range(1, r + 1)):
        raise DegeneracyError(
            f"pierced facet {facet} does not carry one point per color"
        )
    return Transversal(tuple(sorted(facet)))


def pivot(
    point_set: PointSet,
    simplex: Transversal,
    p: PointId,
    method: str = "swap",
) -> Transversal:
    """Pivot at ``simplex`` with the strictly-below point ``p``.

    ``method`` is ``"swap"`` (default, constant time), ``"facet"`` (geometric
    search) or ``"both"`` (run both and insist they agree).
    """
    if method == "swap":
        return pivot_color_swap(point_set, simplex, p)
    if method == "facet":
        return pivot_generic(point_set, simplex, p)
    if method == "both":
        swapped = pivot_color_swap(point_set, simplex, p)
        searched = pivot_generic(point_set, simplex, p)
        if swapped != searched:
            raise DegeneracyError(
                f"pivot disagreement at {simplex.members} with {p}: "
                f"swap gives {swapped.members}, facet search gives {searched.members}"
            )
        return swapped
    raise ValueError(f"unknown pivot method {method!r}")
