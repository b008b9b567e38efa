"""Chart atlases, torus actions and Chen-Ruan cohomology."""

import cmath
import json
import math
from fractions import Fraction
from itertools import product
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gerbelab import orbifold
from gerbelab.cli import load_fixture
from gerbelab.groups import cyclic_group, direct_product, symmetric_group
from gerbelab.orbifold import (
    ChartAtlas,
    ToralAction,
    atlas_check,
    cr_cohomology,
    degree_shift,
    fixed_locus,
    sectors,
)

F = Fraction


def root(k, j=1):
    return cmath.exp(2j * math.pi * j / k)


def cyclic_on_t2(k, M, zeta=None):
    return ToralAction(cyclic_group(k), 2, {1: M}, {1: [[zeta if zeta is not None else root(k)]]})


ROT = {
    2: [[-1, 0], [0, -1]],
    3: [[0, -1], [1, -1]],
    4: [[0, -1], [1, 0]],
    6: [[1, -1], [1, 0]],
}


def kummer():
    return ToralAction.from_json(load_fixture("kummer")["input"])


def pillowcase():
    return cyclic_on_t2(2, ROT[2], -1)


# -- oracles -------------------------------------------------------------------


def grid_fixed_count(mats, n, N):
    """Points of (1/N Z)^n / Z^n fixed by every matrix, by exhaustion."""
    count = 0
    for x in product(range(N), repeat=n):
        if all(all(sum(int(m[i][j]) * x[j] for j in range(n)) % N == x[i] for i in range(n)) for m in mats):
            count += 1
    return count


def stringy_euler(A):
    """(1/|G|) * sum over commuting pairs of the Euler number of the common fixed set."""
    G = A.group
    total = 0
    for g in G:
        for h in G:
            if G.mul[g][h] != G.mul[h][g]:
                continue
            locus = orbifold._fixed_locus_of([A.rho_Z[g], A.rho_Z[h]], A.n)
            total += locus.components if locus.fixed_dim == 0 else 0
    assert total % G.order == 0
    return total // G.order


def alternating_total(A):
    return sum(sum((-1) ** p * b for p, b in enumerate(s.betti)) for s in sectors(A))


# -- atlas -----------------------------------------------------------------------------


def test_s3_atlas_passes_and_a_bad_twist_is_caught():
    doc = load_fixture("s3-atlas")["input"]
    assert atlas_check(ChartAtlas.from_json(doc)).ok
    bad = json.loads(json.dumps(doc))
    bad["twists"][0]["element"] = "[0, 1, 2]"
    rep = atlas_check(ChartAtlas.from_json(bad))
    assert not rep.ok and len(rep.violations) == 4  # the transpositions and the 3-cycles that Ad(ab) moves


def test_atlas_rejects_non_homomorphism():
    doc = load_fixture("s3-atlas")["input"]
    bad = json.loads(json.dumps(doc))
    m = bad["homs"][2]["map"]
    keys = sorted(m)
    m[keys[1]], m[keys[2]] = m[keys[2]], m[keys[1]]
    with pytest.raises(ValueError):
        ChartAtlas.from_json(bad)


def test_missing_transition_is_reported():
    doc = load_fixture("s3-atlas")["input"]
    doc = dict(doc, homs=doc["homs"][:2])
    with pytest.raises(orbifold.MissingChartDataError):
        atlas_check(ChartAtlas.from_json(doc))


# -- actions ------------------------------------------------------------------------------


def test_action_validation():
    with pytest.raises(orbifold.ActionError):
        ToralAction(cyclic_group(2), 2, {1: [[2, 0], [0, 1]]})
    with pytest.raises(orbifold.ActionError):
        ToralAction(cyclic_group(3), 2, {1: ROT[4]})
    with pytest.raises(orbifold.ActionError):
        cyclic_on_t2(4, ROT[4], root(3))


def test_action_extends_from_generators():
    A = cyclic_on_t2(4, ROT[4], 1j)
    assert np.array_equal(A.rho_Z[2], -np.eye(2, dtype=int))


def test_snapping_tolerance():
    A = cyclic_on_t2(4, ROT[4], cmath.exp(1j * (math.pi / 2 + 1e-11)))
    assert degree_shift(A, 1) == F(1, 4)
    with pytest.raises(orbifold.SnappingError):
        degree_shift(A, 1, tolerance=1e-13)


# -- shifts ----------------------------------------------------------------------------------


@pytest.mark.parametrize("k", sorted(ROT))
def test_cyclic_shifts(k):
    A = cyclic_on_t2(k, ROT[k])
    for j in range(k):
        assert degree_shift(A, j) == F(j, k)


def test_kummer_shift():
    assert degree_shift(kummer(), 1) == 1


ALL_ACTIONS = {
    **{f"T2/Z{k}": cyclic_on_t2(k, ROT[k]) for k in ROT},
    "kummer": kummer(),
    "T4/Z4": ToralAction(cyclic_group(4), 4, {1: np.kron(np.eye(2, dtype=int), ROT[4])}, {1: [[1j, 0], [0, -1j]]}),
    "T4/Z3": ToralAction(cyclic_group(3), 4, {1: np.kron(np.eye(2, dtype=int), ROT[3])}, {1: [[root(3), 0], [0, root(3, 2)]]}),
    "T4/Z2xZ2": ToralAction(
        direct_product(cyclic_group(2), cyclic_group(2)),
        4,
        {1: np.diag([-1, -1, 1, 1]), 2: np.diag([1, 1, -1, -1])},
        {1: [[-1, 0], [0, 1]], 2: [[1, 0], [0, -1]]},
    ),
    "T4/S3": ToralAction(
        symmetric_group(3),
        4,
        {
            1: [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
            3: np.block([[np.array(ROT[3]), np.zeros((2, 2), dtype=int)], [np.zeros((2, 2), dtype=int), np.array(ROT[3]) @ np.array(ROT[3])]]),
        },
        {1: [[0, 1], [1, 0]], 3: [[root(3), 0], [0, root(3, 2)]]},
    ),
}


@pytest.mark.parametrize("name", sorted(ALL_ACTIONS))
def test_shift_pairs_with_inverse(name):
    A = ALL_ACTIONS[name]
    G = A.group
    for g in G:
        assert degree_shift(A, g) + degree_shift(A, G.inv[g]) == orbifold._nonunit_eigenvalue_count(A, g)


@pytest.mark.parametrize("name", sorted(ALL_ACTIONS))
def test_shift_agrees_with_log_det_mod_1(name):
    A = ALL_ACTIONS[name]
    for g in A.group:
        gap = (float(degree_shift(A, g)) - orbifold.log_det_shift(A, g)) % 1.0
        assert min(gap, 1 - gap) < 1e-9


# -- fixed loci ----------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(ALL_ACTIONS))
def test_fixed_locus_matches_grid_count(name):
    A = ALL_ACTIONS[name]
    for g in A.group:
        loc = fixed_locus(A, g)
        for N in (2, 3, 4, 6):
            if A.n == 4 and N > 4:
                continue
            expected = grid_fixed_count([A.rho_Z[g]], A.n, N)
            divisors = loc._divisors
            assert math.prod(math.gcd(d, N) for d in divisors) * N**loc.fixed_dim == expected


@pytest.mark.parametrize("k", sorted(ROT))
def test_isolated_fixed_points_follow_lefschetz(k):
    A = cyclic_on_t2(k, ROT[k])
    for j in range(1, k):
        M = A.rho_Z[j]
        lefschetz = abs(round(np.linalg.det(np.eye(2) - M.astype(float))))
        assert fixed_locus(A, j).components == lefschetz


def test_minus_identity_on_t4_has_16_points():
    loc = fixed_locus(kummer(), 1)
    assert loc.fixed_dim == 0 and loc.components == 16
    assert len({loc.component_of(x) for x in loc.component_reps}) == 16


def test_component_representatives_are_fixed():
    A = ALL_ACTIONS["T4/Z2xZ2"]
    for g in A.group:
        loc = fixed_locus(A, g)
        for x in loc.component_reps:
            y = tuple(sum((A.rho_Z[g][i, j] * x[j] for j in range(4)), F(0)) % 1 for i in range(4))
            assert y == x


# -- Chen-Ruan ------------------------------------------------------------------------------


def test_kummer_table():
    assert cr_cohomology(kummer()) == {0: 1, 2: 22, 4: 1}


def test_pillowcase_table():
    """Four isolated points with shift 1/2 land in degree 1."""
    assert cr_cohomology(pillowcase()) == {0: 1, 1: 4, 2: 1}


def test_t2_z3_and_z4_tables():
    assert cr_cohomology(ALL_ACTIONS["T2/Z3"]) == {0: 1, F(2, 3): 3, F(4, 3): 3, 2: 1}
    assert cr_cohomology(ALL_ACTIONS["T2/Z4"]) == {0: 1, F(1, 2): 2, 1: 3, F(3, 2): 2, 2: 1}


@pytest.mark.parametrize("n", [2, 4, 6])
def test_trivial_group_gives_torus_betti(n):
    A = ToralAction(cyclic_group(1), n, {}, {})
    assert cr_cohomology(A) == {k: comb(n, k) for k in range(n + 1)}


@pytest.mark.parametrize("name", sorted(ALL_ACTIONS))
def test_alternating_sum_is_stringy_euler_number(name):
    A = ALL_ACTIONS[name]
    assert alternating_total(A) == stringy_euler(A)


@pytest.mark.parametrize("name", sorted(ALL_ACTIONS))
def test_cr_table_is_symmetric(name):
    """Degrees pair as d <-> 2m - d for actions in SL(m, C)-free or general position alike."""
    A = ALL_ACTIONS[name]
    table = cr_cohomology(A)
    top = A.n
    assert {top - d: v for d, v in table.items()} == table


def test_untwisted_sector_of_kummer():
    s = sectors(kummer())
    assert s[0].betti == [1, 0, 6, 0, 1]
    assert s[1].betti == [16] and s[1].components == 16


def test_codimension_shift_and_subgroup_sectors():
    A = kummer()
    assert orbifold.codimension_shift(A, {0, 1}) == 1
    assert orbifold.subgroup_sector_betti(A, {0, 1}) == [16]
    assert orbifold.codimension_shift(pillowcase(), {0, 1}) == F(1, 2)
    S = ALL_ACTIONS["T4/S3"]
    assert orbifold.subgroup_sector_betti(S, {0}) == orbifold.sector_betti(S, 0)


def test_real_action_without_complex_data_refuses_twisted_degrees():
    A = ToralAction(cyclic_group(2), 2, {1: ROT[2]})
    with pytest.raises(orbifold.ActionError):
        cr_cohomology(A)


SL2Z_WORDS = [[[1, 1], [0, 1]], [[1, 0], [1, 1]], [[0, -1], [1, 0]]]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(ROT)), st.lists(st.integers(0, 2), max_size=4))
def test_conjugate_actions_have_the_same_table(k, word):
    P = np.eye(2, dtype=int)
    for w in word:
        P = P @ np.array(SL2Z_WORDS[w])
    P_inv = np.round(np.linalg.inv(P)).astype(int)
    M = P @ np.array(ROT[k]) @ P_inv
    A = cyclic_on_t2(k, M.tolist())
    assert cr_cohomology(A) == cr_cohomology(cyclic_on_t2(k, ROT[k]))
    for j in range(k):
        assert fixed_locus(A, j).components == fixed_locus(ALL_ACTIONS[f"T2/Z{k}"], j).components
