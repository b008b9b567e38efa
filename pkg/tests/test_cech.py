"""Cech nerves, cochains, cohomology, 2-cocycles and lifting obstructions."""

import json
import random
from fractions import Fraction

import pytest
import sympy
from conftest import NERVES, RP2_GENERATOR_EDGES
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.combinatorics import Permutation

from gerbelab import cech
from gerbelab.cech import (
    QZ,
    Cochain,
    GroupCochain,
    GroupExtension,
    Q,
    Z,
    Zmod,
    are_cohomologous,
    coboundary,
    coboundary_matrix,
    cohomology,
    induced_cocycle,
    lifting_obstruction,
    nerve_from_facets,
    nonabelian_2cocycle_check,
    twist_by_coboundary,
)
from gerbelab.groups import cyclic_group, direct_product, symmetric_group

S3 = symmetric_group(3)
Z2, Z3, Z4 = cyclic_group(2), cyclic_group(3), cyclic_group(4)
SIGN = tuple(0 if Permutation(json.loads(lab)).is_even else 1 for lab in S3.labels)


def random_cochain(nerve, k, coeffs, rng, bound=5):
    vals = {}
    for s in nerve.of_degree(k):
        if coeffs.kind in ("Q", "Q/Z"):
            vals[s] = Fraction(rng.randint(-bound, bound), rng.randint(1, 6))
        else:
            vals[s] = rng.randint(-bound, bound)
    return Cochain(k, coeffs, vals)


def rank_mod_p(M, p):
    """Gaussian elimination over GF(p), written out independently."""
    rows = [[int(x) % p for x in r] for r in M]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def dim_mod_p(nerve, k, p):
    rk = rank_mod_p(coboundary_matrix(nerve, k).tolist(), p) if nerve.count(k + 1) else 0
    prev = rank_mod_p(coboundary_matrix(nerve, k - 1).tolist(), p) if k > 0 else 0
    return nerve.count(k) - rk - prev


# -- nerves ----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "name, f", [("sphere2", [4, 6, 4]), ("rp2", [6, 15, 10]), ("torus", [7, 21, 14]), ("sphere3", [5, 10, 10, 5])]
)
def test_f_vectors(name, f):
    assert NERVES[name].f_vector() == f


def test_single_triangle():
    N = nerve_from_facets([(0, 1, 2)])
    assert N.f_vector() == [3, 3, 1]
    with pytest.raises(ValueError):
        nerve_from_facets([(0, 0, 1)])


# -- coboundary ------------------------------------------------------------------------


def test_coboundary_examples():
    N = nerve_from_facets([(0, 1, 2)])
    assert coboundary(N, Cochain(0, Z, {(0,): 3, (1,): 3, (2,): 3})).is_zero()
    c = Cochain(1, Z, {(0, 1): 1, (1, 2): 1, (0, 2): 2})
    assert coboundary(N, c).values == {(0, 1, 2): 0}


def test_missing_value_is_reported():
    N = nerve_from_facets([(0, 1, 2)])
    with pytest.raises(cech.MissingValueError):
        coboundary(N, Cochain(1, Z, {(0, 1): 1}))


def test_alternating_evaluation():
    c = Cochain(2, Z, {(0, 1, 2): 5})
    assert c(1, 0, 2) == -5 and c(2, 0, 1) == 5 and c(0, 0, 1) == 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(NERVES)), st.sampled_from(["Z", "Q", "Z/6", "Q/Z"]), st.integers(0, 2**32))
def test_delta_squared_is_zero(name, coeffs, seed):
    N = NERVES[name]
    coeffs = cech.Coefficients.parse(coeffs)
    rng = random.Random(seed)
    for k in range(max(N.dim - 1, 0)):
        c = random_cochain(N, k, coeffs, rng)
        assert coboundary(N, coboundary(N, c)).is_zero()


# -- cohomology -------------------------------------------------------------------------


EXPECTED_Z = {
    "sphere2": ["Z^1", "0", "Z^1"],
    "solid_tetra": ["Z^1", "0", "0", "0"],
    "simplex4": ["Z^1", "0", "0", "0", "0"],
    "rp2": ["Z^1", "0", "Z/2"],
    "torus": ["Z^1", "Z^2", "Z^1"],
    "sphere3": ["Z^1", "0", "0", "Z^1"],
}


@pytest.mark.parametrize("name", sorted(EXPECTED_Z))
def test_integral_cohomology(name):
    N = NERVES[name]
    assert [str(cohomology(N, k)) for k in range(N.dim + 1)] == EXPECTED_Z[name]


@pytest.mark.parametrize("name", sorted(NERVES))
@pytest.mark.parametrize("p", [2, 3, 5])
def test_mod_p_dimension_matches_gf_p_elimination(name, p):
    N = NERVES[name]
    for k in range(N.dim + 1):
        assert cohomology(N, k, Zmod(p)).dimension == dim_mod_p(N, k, p)


@pytest.mark.parametrize("name", sorted(NERVES))
def test_rational_betti_and_euler(name):
    N = NERVES[name]
    b = [cohomology(N, k, Q).betti for k in range(N.dim + 1)]
    for k in range(N.dim + 1):
        rk = sympy.Matrix(coboundary_matrix(N, k).tolist()).rank() if N.count(k + 1) else 0
        prev = sympy.Matrix(coboundary_matrix(N, k - 1).tolist()).rank() if k else 0
        assert b[k] == N.count(k) - rk - prev
    assert sum((-1) ** k * x for k, x in enumerate(b)) == N.euler_characteristic()


def test_rp2_with_z4_coefficients():
    N = NERVES["rp2"]
    assert [str(cohomology(N, k, Zmod(4))) for k in range(3)] == ["(Z/4)^1", "Z/2", "Z/2"]


def test_qz_cohomology_refused():
    with pytest.raises(ValueError):
        cohomology(NERVES["rp2"], 1, QZ)


# -- equivalence -------------------------------------------------------------------------------


def test_tetrahedron_generator_is_not_trivial():
    N = NERVES["sphere2"]
    gen = Cochain(2, Z, {s: int(s == (0, 1, 2)) for s in N.of_degree(2)})
    assert are_cohomologous(N, gen, Cochain.zero(N, 2, Z)) is None
    # over Q/Z the integral generator becomes exact
    as_qz = Cochain(2, QZ, gen.values)
    assert as_qz.is_zero()


def test_b_zero_leaves_c_unchanged():
    N = NERVES["torus"]
    c = random_cochain(N, 2, Z, random.Random(1))
    assert twist_by_coboundary(N, c, Cochain.zero(N, 1, Z)) == c


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(NERVES)), st.sampled_from(["Z", "Q", "Z/4", "Z/3", "Q/Z"]), st.integers(0, 2**32))
def test_twist_round_trip(name, coeffs, seed):
    N = NERVES[name]
    coeffs = cech.Coefficients.parse(coeffs)
    rng = random.Random(seed)
    c = random_cochain(N, 2, coeffs, rng)
    b = random_cochain(N, 1, coeffs, rng)
    c2 = twist_by_coboundary(N, c, b)
    w = are_cohomologous(N, c, c2)
    assert w is not None and twist_by_coboundary(N, c, w) == c2


def test_qz_classes_on_the_sphere():
    """H^2(S^2; Q/Z) = Q/Z: a single triangle valued 1/2 is not exact, value 1 is zero."""
    N = NERVES["sphere2"]
    half = Cochain(2, QZ, {s: Fraction(int(s == (0, 1, 2)), 2) for s in N.of_degree(2)})
    zero = Cochain.zero(N, 2, QZ)
    assert are_cohomologous(N, zero, half) is None
    spread = Cochain(2, QZ, {(0, 1, 2): Fraction(1, 2), (0, 1, 3): Fraction(1, 2), (0, 2, 3): 0, (1, 2, 3): 0})
    assert are_cohomologous(N, zero, spread) is not None  # two triangles of opposite orientation sign


# -- non-abelian 2-cocycles -----------------------------------------------------------------------


def test_identity_cocycle_passes():
    N = NERVES["simplex4"]
    assert nonabelian_2cocycle_check(N, GroupCochain.constant(N, 2, S3)).ok


def test_abelian_failure_lists_tetrahedra():
    N = NERVES["solid_tetra"]
    c = GroupCochain(2, Z3, {(0, 1, 2): 1, (0, 1, 3): 0, (0, 2, 3): 0, (1, 2, 3): 0})
    rep = nonabelian_2cocycle_check(N, c)
    assert not rep.ok and [v[0] for v in rep.tetra_violations] == [(0, 1, 2, 3)]


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["solid_tetra", "simplex4", "sphere3"]), st.sampled_from([2, 3, 4, 5]), st.integers(0, 2**32))
def test_abelian_specialization_is_delta(name, m, seed):
    N = NERVES[name]
    rng = random.Random(seed)
    c = random_cochain(N, 2, Zmod(m), rng)
    gc = GroupCochain(2, cyclic_group(m), {s: v for s, v in c.values.items()})
    assert nonabelian_2cocycle_check(N, gc).ok == coboundary(N, c).is_zero()


def ad_twisted_cocycle(N, g):
    """c_ijl = g_ij g_jl g_il^-1 with band twist lam_ij = Ad(g_ij)."""
    G = g.group
    c = {(i, j, l): G.m(g.values[(i, j)], g.values[(j, l)], G.inv[g.values[(i, l)]]) for i, j, l in N.of_degree(2)}
    lam = {e: tuple(G.conj(g.values[e], x) for x in G) for e in N.of_degree(1)}
    return GroupCochain(2, G, c), lam


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=10, max_size=10))
def test_s3_cocycles_with_band_twist(values):
    N = NERVES["simplex4"]
    g = GroupCochain(1, S3, dict(zip(N.of_degree(1), values)))
    c, lam = ad_twisted_cocycle(N, g)
    assert nonabelian_2cocycle_check(N, c, lam).ok
    # pushing along the sign character gives an honest Z/2 cocycle
    sc = induced_cocycle(SIGN, c, Z2)
    assert nonabelian_2cocycle_check(N, sc).ok
    assert coboundary(N, cech.group_cochain_to_additive(sc, 2)).is_zero()


def test_wrong_band_twist_is_reported():
    N = NERVES["solid_tetra"]
    g = GroupCochain(1, S3, {e: 1 for e in N.of_degree(1)})
    c, lam = ad_twisted_cocycle(N, g)
    lam[(0, 1)] = tuple(S3)
    rep = nonabelian_2cocycle_check(N, c, lam)
    assert not rep.ok and rep.triangle_violations


def test_induced_by_identity_and_trivial_maps():
    N = NERVES["simplex4"]
    c = GroupCochain(2, S3, {s: i % 6 for i, s in enumerate(N.of_degree(2))})
    assert induced_cocycle(tuple(S3), c, S3) == c
    triv = induced_cocycle((0,) * 6, c, Z2)
    assert set(triv.values.values()) == {Z2.identity}
    with pytest.raises(ValueError):
        induced_cocycle((0, 1, 0, 0, 0, 0), c, Z2)


# -- lifting obstruction ----------------------------------------------------------------------------


def z2_z4_z2():
    return GroupExtension(Z2, Z4, Z2, (0, 2), (0, 1, 0, 1), (0, 1))


def rp2_generator():
    N = NERVES["rp2"]
    return GroupCochain(1, Z2, {e: int(e in RP2_GENERATOR_EDGES) for e in N.of_degree(1)})


def test_rp2_generator_is_a_nonzero_class():
    N = NERVES["rp2"]
    u = cech.group_cochain_to_additive(rp2_generator(), 2)
    assert coboundary(N, u).is_zero()
    assert are_cohomologous(N, Cochain.zero(N, 1, Zmod(2)), u) is None


def test_trivial_u_has_trivial_obstruction():
    N = NERVES["rp2"]
    c = lifting_obstruction(z2_z4_z2(), N, GroupCochain.constant(N, 1, Z2))
    assert set(c.values.values()) == {0}


def test_rp2_obstruction_is_the_bockstein():
    N = NERVES["rp2"]
    u = rp2_generator()
    c = lifting_obstruction(z2_z4_z2(), N, u)
    # Bockstein: lift u to 0/1 integers, take the coboundary and halve it
    lift = Cochain(1, Z, {e: v for e, v in u.values.items()})
    beta = {s: (v // 2) % 2 for s, v in coboundary(N, lift).values.items()}
    assert c.values == beta
    add = cech.group_cochain_to_additive(c, 2)
    assert are_cohomologous(N, Cochain.zero(N, 2, Zmod(2)), add) is None


def test_split_extension_is_unobstructed():
    N = NERVES["rp2"]
    V = direct_product(Z2, Z2)  # elements (a, b) at index 2a + b
    ext = GroupExtension(Z2, V, Z2, (0, 1), (0, 0, 1, 1), (0, 2))
    c = lifting_obstruction(ext, N, rp2_generator())
    assert set(c.values.values()) == {0}


def test_non_central_extension_uses_a_band_twist():
    N = NERVES["simplex4"]
    A3 = [i for i, s in enumerate(SIGN) if s == 0]
    # Z3 -> S3 -> Z2; Z3 generated by a 3-cycle
    three = next(x for x in A3 if x != S3.identity)
    incl = (S3.identity, three, S3.m(three, three))
    trans = next(i for i, s in enumerate(SIGN) if s == 1)
    ext = GroupExtension(Z3, S3, Z2, incl, SIGN, (S3.identity, trans))
    assert not ext.is_central
    u = GroupCochain(1, Z2, {(i, j): (j - i) % 2 for i, j in N.of_degree(1)})
    with pytest.raises(ValueError):
        lifting_obstruction(ext, N, u)
    c = lifting_obstruction(ext, N, u, require_central=False)
    lam = cech.obstruction_band_twist(ext, N, u)
    assert nonabelian_2cocycle_check(N, c, lam).ok


def test_non_cocycle_u_is_rejected():
    N = NERVES["rp2"]
    u = GroupCochain(1, Z2, {e: int(e == (0, 1)) for e in N.of_degree(1)})
    with pytest.raises(cech.NotCocycleError):
        lifting_obstruction(z2_z4_z2(), N, u)


def test_extension_validation():
    with pytest.raises(ValueError):
        GroupExtension(Z2, Z4, Z2, (0, 1), (0, 1, 0, 1), (0, 1))  # image of H is not the kernel
    with pytest.raises(ValueError):
        GroupExtension(Z2, Z4, Z2, (0, 2), (0, 1, 0, 1), (0, 0))  # section misses


def test_cochain_json_round_trip():
    N = NERVES["torus"]
    c = random_cochain(N, 1, Q, random.Random(3))
    assert Cochain.from_json(1, Q, c.to_json()) == c
    g = rp2_generator()
    assert GroupCochain.from_json(1, Z2, g.to_json()) == g
