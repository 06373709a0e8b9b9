"""Tests for the exact point construction and its rational predicates."""

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from pivotlab.errors import DegeneracyError, GeneralPositionError
from pivotlab.geometry import (
    PointId,
    PointSet,
    Side,
    Transversal,
    augment,
    axis_intersections,
    below_set,
    flip_tail_sign,
    gen_point,
    gen_point_set,
    hyperplane_coefficients,
    is_pierced_subset,
    make_transversal,
    matrix_rank,
    pivot,
    pivot_color_swap,
    pivot_generic,
    project_deep,
    side_of,
    solve_exact,
    transversals,
)


def barycentric_axis_values(ps: PointSet, simplex: Transversal) -> tuple:
    """Independent oracle for axis intersections: per axis, solve the
    barycentric system (member columns, weights summing to one, target on the
    axis) and insist the weights are nonnegative."""
    r = ps.r
    cols = [ps.coords(p) for p in simplex.members]
    values = []
    for axis in range(r):
        rows = []
        for coord in range(r):
            rows.append(
                [Fraction(cols[j][coord]) for j in range(r)]
                + [Fraction(-1 if coord == axis else 0)]
            )
        rows.append([Fraction(1)] * r + [Fraction(0)])
        status, sol = solve_exact(rows, [0] * r + [1])
        assert status == "unique"
        weights, t = sol[:r], sol[r]
        assert all(w >= 0 for w in weights)
        assert t > 0
        values.append(t)
    return tuple(values)


# ---------------------------------------------------------------------------
# exact solver
# ---------------------------------------------------------------------------


def test_solve_exact_unique():
    status, x = solve_exact([[2, 0], [1, 1]], [4, 5])
    assert status == "unique" and x == [2, 3]


def test_solve_exact_inconsistent_and_underdetermined():
    assert solve_exact([[1, 1], [1, 1]], [1, 2])[0] == "inconsistent"
    assert solve_exact([[1, 1]], [1])[0] == "underdetermined"


def test_matrix_rank():
    assert matrix_rank([[1, 2], [2, 4]]) == 1
    assert matrix_rank([[1, 0], [0, 1]]) == 2
    assert matrix_rank([]) == 0


@settings(max_examples=50)
@given(
    st.lists(
        st.lists(st.integers(-9, 9), min_size=3, max_size=3),
        min_size=3,
        max_size=3,
    ),
    st.lists(st.integers(-9, 9), min_size=3, max_size=3),
)
def test_solve_exact_solutions_satisfy_system(a, b):
    status, x = solve_exact(a, b)
    if status == "unique":
        for row, rhs in zip(a, b):
            assert sum(Fraction(c) * v for c, v in zip(row, x)) == rhs


# ---------------------------------------------------------------------------
# point generation
# ---------------------------------------------------------------------------


def test_gen_point_on_axis():
    assert gen_point(3, 4, PointId(1, 3, 2)) == (2, 0, 0)


def test_gen_point_inner_layers():
    assert gen_point(3, 4, PointId(1, 1, 1)) == (1097, -1024, -64)
    assert gen_point(2, 2, PointId(1, 1, 2)) == (12, -8)


def test_gen_point_adversary_needs_alpha():
    assert gen_point(2, 3, PointId(1, 2, 4), alpha=5) == (5, 0)
    with pytest.raises(ValueError, match="alpha"):
        gen_point(2, 3, PointId(1, 2, 4))
    with pytest.raises(ValueError, match="outermost"):
        gen_point(3, 3, PointId(1, 1, 4), alpha=5)


def test_gen_point_validates_ranges():
    with pytest.raises(ValueError):
        gen_point(2, 3, PointId(1, 3, 1))
    with pytest.raises(ValueError):
        gen_point(2, 3, PointId(1, 2, 5))
    with pytest.raises(ValueError):
        PointId(2, 1, 1)


@settings(max_examples=120)
@given(st.data())
def test_sign_structure(data):
    r = data.draw(st.integers(1, 4))
    m = data.draw(st.integers(1, 5))
    i = data.draw(st.integers(1, r))
    j = data.draw(st.integers(i, r))
    k = data.draw(st.integers(1, m))
    coords = gen_point(r, m, PointId(i, j, k))
    assert sum(coords) > 0
    assert coords[i - 1] > 0
    assert all(c <= 0 for t, c in enumerate(coords) if t != i - 1)


def test_point_set_cardinality_and_plane():
    ps = gen_point_set(3, 4)
    assert len(ps) == 24  # binom(4, 2) * 4
    assert all(ps.coords(p)[2] == -64 for p in ps if p.layer <= 2)


def test_point_set_r1_is_the_axis_prefix():
    ps = gen_point_set(1, 5)
    assert sorted(ps.coords(p) for p in ps) == [(k,) for k in range(1, 6)]


def test_point_set_rejects_coincident_points():
    with pytest.raises(ValueError, match="coincide"):
        PointSet(1, 2, {PointId(1, 1, 1): (1,), PointId(1, 1, 2): (1,)})


def test_augment_defaults_and_validation():
    ps = gen_point_set(2, 2)
    aug = augment(ps)
    assert aug.alphas == (3, 3)
    assert len(aug) == len(ps) + 2
    assert aug.coords(PointId(1, 2, 3)) == (3, 0)
    with pytest.raises(ValueError, match="below the minimum"):
        augment(ps, [1, 3])
    with pytest.raises(ValueError, match="coincides"):
        augment(ps, [2, 3])
    with pytest.raises(ValueError, match="already augmented"):
        augment(aug)


# ---------------------------------------------------------------------------
# piercedness
# ---------------------------------------------------------------------------


def test_unit_transversal_is_pierced():
    for r in (1, 2, 3, 4):
        pts = [tuple(1 if t == i else 0 for t in range(r)) for i in range(r)]
        assert is_pierced_subset(pts, r)


def test_single_color_pair_is_not_pierced():
    assert not is_pierced_subset([(1, 0), (2, 0)], 2)


def test_every_transversal_of_small_family_is_pierced():
    ps = gen_point_set(2, 3)
    for S in transversals(ps):
        assert is_pierced_subset([ps.coords(p) for p in S.members], 2)


@pytest.mark.parametrize("r,m", [(2, 3), (3, 2)])
def test_pierced_iff_full_colors_exhaustive(r, m):
    ps = gen_point_set(r, m)
    ids = ps.ids()
    for size in range(1, r + 1):
        for subset in combinations(ids, size):
            pierced = is_pierced_subset([ps.coords(p) for p in subset], r)
            full = sorted(p.color for p in subset) == list(range(1, r + 1))
            assert pierced == full, subset


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_pierced_iff_full_colors_on_larger_subsets(data):
    # the equivalence holds at any size, not just size <= r
    ps = gen_point_set(2, 4)
    ids = list(ps.ids())
    size = data.draw(st.integers(1, 4))
    subset = data.draw(st.permutations(ids)) [:size]
    pierced = is_pierced_subset([ps.coords(p) for p in subset], 2)
    full = {p.color for p in subset} == {1, 2}
    assert pierced == full


def test_pierced_rejects_wrong_arity():
    with pytest.raises(ValueError):
        is_pierced_subset([(1, 2, 3)], 2)
    assert not is_pierced_subset([], 3)


# ---------------------------------------------------------------------------
# axis intersections / sides
# ---------------------------------------------------------------------------


def test_axis_points_intersect_at_their_phases():
    ps = gen_point_set(3, 4)
    S = make_transversal(ps, [PointId(i, 3, 4) for i in (1, 2, 3)])
    assert axis_intersections(ps, S) == (4, 4, 4)


def test_axis_intersections_worked_example():
    ps = gen_point_set(2, 2)
    S = make_transversal(ps, [PointId(1, 1, 1), PointId(2, 2, 1)])
    assert ps.coords(PointId(1, 1, 1)) == (11, -8)
    assert axis_intersections(ps, S) == (Fraction(11, 9), Fraction(1))
    # the minimizing axis value is contributed by a member on that axis
    assert ps.coords(S.member(2)) == (0, 1)


@pytest.mark.parametrize("r,m", [(2, 3), (3, 2)])
def test_axis_intersections_match_barycentric_oracle(r, m):
    ps = gen_point_set(r, m)
    for S in transversals(ps):
        assert axis_intersections(ps, S) == barycentric_axis_values(ps, S)


def test_side_of_examples():
    ps = gen_point_set(2, 2)
    S = make_transversal(ps, [PointId(1, 2, 2), PointId(2, 2, 2)])
    assert side_of(ps, S, (1, 0)) is Side.BELOW
    assert side_of(ps, S, (2, 0)) is Side.ON
    assert side_of(ps, S, (11, -8)) is Side.ABOVE


def test_below_set_examples():
    ps = gen_point_set(2, 2)
    S = make_transversal(ps, [PointId(1, 2, 2), PointId(2, 2, 2)])
    assert below_set(ps, S) == (PointId(1, 2, 1), PointId(2, 2, 1))
    ps14 = gen_point_set(1, 4)
    S14 = make_transversal(ps14, [PointId(1, 1, 3)])
    assert below_set(ps14, S14) == (PointId(1, 1, 1), PointId(1, 1, 2))


def test_below_set_flags_on_point():
    # a custom point on the hyperplane of {2e1, 2e2} (coordinate sum 2)
    ps = gen_point_set(2, 2)
    points = {p: ps.coords(p) for p in ps.ids()}
    points[PointId(1, 1, 2)] = (3, -1)
    broken = PointSet(2, 2, points)
    S = make_transversal(broken, [PointId(1, 2, 2), PointId(2, 2, 2)])
    with pytest.raises(GeneralPositionError, match="lies on the hyperplane"):
        below_set(broken, S)
    # tolerant mode excludes it instead (the augmented-set convention)
    assert PointId(1, 1, 2) not in below_set(broken, S, allow_on=True)


def test_augmented_default_start_has_on_points_tolerated():
    # with equal alphas = m+1 the start hyperplane passes exactly through the
    # phase-1 inner-layer points; they are neither below nor above
    ps = augment(gen_point_set(2, 6))
    start = make_transversal(ps, [PointId(1, 2, 7), PointId(2, 2, 7)])
    assert side_of(ps, start, PointId(1, 1, 1)) is Side.ON
    with pytest.raises(GeneralPositionError):
        below_set(ps, start)
    below = below_set(ps, start, allow_on=True)
    assert PointId(1, 1, 1) not in below


def test_degenerate_simplex_raises():
    # a hyperplane through the origin cannot be written as c.x == 1
    ps = PointSet(1, 2, {PointId(1, 1, 1): (2,), PointId(1, 1, 2): (0,)})
    with pytest.raises(DegeneracyError):
        hyperplane_coefficients(ps, Transversal((PointId(1, 1, 2),)))
    # the line -x + y == 1 meets the first axis at -1: rejected
    ps2 = PointSet(2, 2, {PointId(1, 1, 1): (0, 1), PointId(2, 2, 1): (1, 2)})
    with pytest.raises(DegeneracyError, match="negative side"):
        hyperplane_coefficients(
            ps2, Transversal((PointId(1, 1, 1), PointId(2, 2, 1)))
        )
    # the line y == 1 never meets the first axis: rejected as parallel
    ps3 = PointSet(2, 2, {PointId(1, 1, 1): (0, 1), PointId(2, 2, 1): (5, 1)})
    with pytest.raises(DegeneracyError, match="parallel"):
        hyperplane_coefficients(
            ps3, Transversal((PointId(1, 1, 1), PointId(2, 2, 1)))
        )


# ---------------------------------------------------------------------------
# pivoting
# ---------------------------------------------------------------------------


def test_pivot_color_swap_examples():
    ps = gen_point_set(2, 2)
    S = make_transversal(ps, [PointId(1, 2, 2), PointId(2, 2, 2)])
    assert pivot(ps, S, PointId(1, 2, 1), method="both").members == (
        PointId(1, 2, 1),
        PointId(2, 2, 2),
    )
    assert pivot(ps, S, PointId(2, 2, 1), method="both").members == (
        PointId(1, 2, 2),
        PointId(2, 2, 1),
    )


def test_pivot_monotonicity_witness():
    ps = gen_point_set(2, 2)
    S = make_transversal(ps, [PointId(1, 2, 2), PointId(2, 2, 2)])
    after = pivot(ps, S, PointId(2, 2, 1))
    assert axis_intersections(ps, S) == (2, 2)
    assert axis_intersections(ps, after) == (2, 1)


def test_pivot_requires_strictly_below():
    ps = gen_point_set(2, 2)
    S = make_transversal(ps, [PointId(1, 2, 2), PointId(2, 2, 2)])
    with pytest.raises(ValueError, match="not strictly below"):
        pivot(ps, S, PointId(1, 1, 1))
    with pytest.raises(ValueError, match="already a member"):
        pivot(ps, S, PointId(1, 2, 2))


def test_pivot_unknown_method():
    ps = gen_point_set(2, 2)
    S = make_transversal(ps, [PointId(1, 2, 2), PointId(2, 2, 2)])
    with pytest.raises(ValueError, match="unknown pivot method"):
        pivot(ps, S, PointId(1, 2, 1), method="guess")


@pytest.mark.parametrize("r,m", [(2, 3), (3, 2)])
def test_pivot_generic_agrees_with_swap_exhaustive(r, m):
    ps = gen_point_set(r, m)
    for S in transversals(ps):
        for p in below_set(ps, S):
            assert pivot_generic(ps, S, p) == pivot_color_swap(ps, S, p)


# ---------------------------------------------------------------------------
# transversal plumbing
# ---------------------------------------------------------------------------


def test_make_transversal_validation():
    ps = gen_point_set(2, 2)
    with pytest.raises(ValueError, match="one point per color"):
        make_transversal(ps, [PointId(1, 1, 1), PointId(1, 2, 1)])
    with pytest.raises(ValueError, match="exactly 2"):
        make_transversal(ps, [PointId(1, 1, 1)])
    with pytest.raises(ValueError, match="not a member"):
        make_transversal(ps, [PointId(1, 1, 1), PointId(2, 2, 9)])


def test_transversal_count_matches_enumeration():
    for r, m in [(2, 3), (3, 2)]:
        ps = gen_point_set(r, m)
        assert ps.transversal_count() == len(list(transversals(ps)))


# ---------------------------------------------------------------------------
# deep projection & mutation
# ---------------------------------------------------------------------------


def test_project_deep_small_example():
    B = project_deep(2, 3, 1)
    assert sorted(B.coords(p)[0] for p in B) == [31, 32, 33]
    assert {p.layer for p in B} == {1}


def test_project_deep_cardinality_and_labels():
    B = project_deep(3, 3, 2)
    A = gen_point_set(2, 3)
    assert len(B) == len(A)
    assert B.ids() == A.ids()


def test_project_deep_validation():
    with pytest.raises(ValueError):
        project_deep(2, 3, 2)
    with pytest.raises(ValueError):
        project_deep(3, 2, 2)


def test_flip_tail_sign():
    ps = gen_point_set(2, 4)
    pid = PointId(1, 1, 1)
    mutated = flip_tail_sign(ps, pid, 1)
    assert mutated.coords(pid)[1] == -ps.coords(pid)[1]
    with pytest.raises(ValueError, match="zero coordinate"):
        flip_tail_sign(ps, PointId(1, 2, 1), 1)


def test_serialization_shapes():
    ps = augment(gen_point_set(2, 2), [4, 3])
    blob = ps.to_json_dict()
    assert blob["alphas"] == [4, 3]
    assert all(isinstance(p["coords"][0], str) for p in blob["points"])
    rows = ps.to_csv_rows()
    assert rows[0] == ["i", "j", "k", "x1", "x2"]
    assert len(rows) == len(ps) + 1
