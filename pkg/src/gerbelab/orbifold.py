"""Orbifold charts and Chen-Ruan cohomology of global torus quotients.

A :class:`ToralAction` is a finite group acting on ``T^n = R^n / Z^n`` by
integer matrices, together with a complex representation on ``C^m``
(``n = 2m``) that fixes the degree shifts.  Twisted sectors are indexed by
conjugacy classes of elements; fixed loci are read off Smith normal forms.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .algebra import (
    determinant,
    format_fraction,
    identity,
    int_matrix,
    inverse,
    kernel_basis,
    rank,
    rat_matrix,
    smith_normal_form,
)
from .groups import (
    FiniteGroup,
    centralizer,
    conjugacy_classes,
    is_homomorphism,
    normalizer,
)

__all__ = [
    "ActionError",
    "AtlasReport",
    "ChartAtlas",
    "FixedLocus",
    "MissingChartDataError",
    "NonIntegralAverageError",
    "SectorReport",
    "SnappingError",
    "ToralAction",
    "atlas_check",
    "codimension_shift",
    "cr_cohomology",
    "degree_shift",
    "fixed_locus",
    "log_det_shift",
    "sector_betti",
    "sectors",
    "subgroup_sector_betti",
]

DEFAULT_TOLERANCE = 1e-6
HOM_TOLERANCE = 1e-9


class MissingChartDataError(KeyError):
    pass


class ActionError(ValueError):
    pass


class SnappingError(ValueError):
    pass


class NonIntegralAverageError(ArithmeticError):
    pass


# -- chart compatibility -----------------------------------------------------


@dataclass
class ChartAtlas:
    """Chart groups with transition homomorphisms and twisting elements.

    ``homs[(x, y)]`` maps elements of chart ``y`` into chart ``x``
    (element-index tuple); ``twists[(x, y, z)]`` is an element of chart ``x``.
    """

    charts: Mapping[str, FiniteGroup]
    homs: Mapping[tuple[str, str], tuple[int, ...]] = field(default_factory=dict)
    twists: Mapping[tuple[str, str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        for (x, y), f in self.homs.items():
            if x not in self.charts or y not in self.charts:
                raise MissingChartDataError(f"homomorphism between unknown charts {x}, {y}")
            if not is_homomorphism(f, self.charts[y], self.charts[x]):
                raise ValueError(f"transition map {y} -> {x} is not a homomorphism")

    @classmethod
    def from_json(cls, doc: Mapping) -> ChartAtlas:
        charts = {name: FiniteGroup.from_json(g) for name, g in doc["charts"].items()}
        homs = {}
        for h in doc.get("homs", []):
            src, dst = charts[h["source"]], charts[h["target"]]
            f = [None] * src.order
            for a, b in h["map"].items():
                f[src.index(a)] = dst.index(b)
            if None in f:
                raise ValueError(f"map {h['source']} -> {h['target']} is not total")
            homs[(h["target"], h["source"])] = tuple(f)
        twists = {}
        for t in doc.get("twists", []):
            x, y, z = t["charts"]
            twists[(x, y, z)] = charts[x].index(t["element"])
        return cls(charts, homs, twists)


@dataclass
class AtlasReport:
    checked: list
    violations: list  # (x, y, z, gamma, lhs, rhs)

    @property
    def ok(self) -> bool:
        return not self.violations


def atlas_check(atlas: ChartAtlas, triples: Iterable[tuple[str, str, str]] | None = None) -> AtlasReport:
    """Check ``Phi_xy(Phi_yz(g)) = c_xyz Phi_xz(g) c_xyz^-1`` for every g."""
    triples = list(atlas.twists) if triples is None else list(triples)
    violations = []
    for x, y, z in triples:
        try:
            f_xy = atlas.homs[(x, y)]
            f_yz = atlas.homs[(y, z)]
            f_xz = atlas.homs[(x, z)]
            c = atlas.twists[(x, y, z)]
        except KeyError as exc:
            raise MissingChartDataError(f"missing data for triple {(x, y, z)}: {exc}") from None
        G = atlas.charts[x]
        for g in atlas.charts[z]:
            lhs = f_xy[f_yz[g]]
            rhs = G.conj(c, f_xz[g])
            if lhs != rhs:
                violations.append((x, y, z, g, lhs, rhs))
    return AtlasReport(triples, violations)


# -- torus actions -------------------------------------------------------------


def _extend_hom(G: FiniteGroup, given: Mapping[int, object], one, mult, same) -> dict:
    """Extend values on a generating set multiplicatively over G."""
    if G.generated(given) != frozenset(G):
        raise ActionError("representation is not given on a generating set")
    values = {G.identity: one}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s, val in given.items():
                y = G.mul[x][s]
                v = mult(values[x], val)
                if y not in values:
                    values[y] = v
                    nxt.append(y)
        frontier = nxt
    for s, val in given.items():
        if not same(values[s], val):
            raise ActionError(f"given value on {G.labels[s]} conflicts with the generated representation")
    return values


@dataclass
class ToralAction:
    """A finite group acting on ``T^n`` by integer matrices.

    ``rho_Z`` and ``rho_C`` may be given on generators only; they are
    extended multiplicatively and then verified on the full table.
    """

    group: FiniteGroup
    n: int
    rho_Z: Mapping[int, np.ndarray]
    rho_C: Mapping[int, np.ndarray] | None = None

    def __post_init__(self):
        G = self.group
        rz = {G.index(k): int_matrix(v) for k, v in self.rho_Z.items()}
        for k, v in rz.items():
            if v.shape != (self.n, self.n):
                raise ActionError(f"rho_Z({G.labels[k]}) has shape {v.shape}, expected {(self.n, self.n)}")
        if len(rz) < G.order:
            rz = _extend_hom(G, rz, identity(self.n), lambda a, b: a @ b, np.array_equal)
        for g in G:
            if abs(determinant(rz[g])) != 1:
                raise ActionError(f"rho_Z({G.labels[g]}) is not invertible over Z")
        for a in G:
            for b in G:
                if not np.array_equal(rz[G.mul[a][b]], rz[a] @ rz[b]):
                    raise ActionError(f"rho_Z is not a homomorphism at ({G.labels[a]}, {G.labels[b]})")
        self.rho_Z = rz
        if self.rho_C is None:
            return
        if self.n % 2:
            raise ActionError("a complex structure needs even n")
        m = self.n // 2
        rc = {G.index(k): np.asarray(v, dtype=complex).reshape(m, m) for k, v in self.rho_C.items()}
        close = lambda a, b: np.allclose(a, b, atol=HOM_TOLERANCE, rtol=0)
        if len(rc) < G.order:
            rc = _extend_hom(G, rc, np.eye(m, dtype=complex), lambda a, b: a @ b, close)
        for a in G:
            for b in G:
                if not close(rc[G.mul[a][b]], rc[a] @ rc[b]):
                    raise ActionError(f"rho_C is not a homomorphism at ({G.labels[a]}, {G.labels[b]})")
        for g in G:
            if not close(np.linalg.matrix_power(rc[g], G.element_order(g)), np.eye(m)):
                raise ActionError(f"rho_C({G.labels[g]}) does not have the order of {G.labels[g]}")
        self.rho_C = rc

    @property
    def complex_dim(self) -> int:
        return self.n // 2

    @classmethod
    def from_json(cls, doc: Mapping) -> ToralAction:
        G = FiniteGroup.from_json(doc["group"])
        rz = {G.index(k): int_matrix(v) for k, v in doc["rho_Z"].items()}
        rc = None
        if "rho_C" in doc:
            rc = {}
            for k, rows in doc["rho_C"].items():
                rc[G.index(k)] = np.array([[complex(re, im) for re, im in row] for row in rows])
        return cls(G, int(doc["n"]), rz, rc)


def log_det_shift(A: ToralAction, g: int) -> float:
    """``-(i / 2 pi) Log det rho_C(g)`` with the principal logarithm.

    This only pins down the degree shift modulo 1.
    """
    if A.rho_C is None:
        raise ActionError("no complex representation given")
    det = np.linalg.det(A.rho_C[g]) if A.complex_dim else 1.0
    return (-1j / (2 * math.pi) * cmath.log(det)).real


def _snapped_angles(A: ToralAction, g: int, tolerance: float) -> list[Fraction]:
    """Eigenvalue angles of rho_C(g) as exact fractions of a full turn."""
    if A.rho_C is None:
        raise ActionError("no complex representation given")
    k = A.group.element_order(g)
    out = []
    for lam in np.linalg.eigvals(A.rho_C[g]) if A.complex_dim else []:
        turn = (cmath.phase(lam) / (2 * math.pi)) % 1.0
        j = round(turn * k)
        err = abs(turn - j / k)
        if err * 2 * math.pi > tolerance:
            raise SnappingError(
                f"eigenvalue {lam} of rho_C({A.group.labels[g]}) is not a {k}-th root of unity within {tolerance}"
            )
        out.append(Fraction(j % k, k))
    return sorted(out)


def degree_shift(A: ToralAction, g: int, tolerance: float = DEFAULT_TOLERANCE) -> Fraction:
    """Sum of eigenvalue angles of rho_C(g) divided by 2 pi, angles in [0, 2 pi).

    Cross-checked against :func:`log_det_shift` modulo 1.
    """
    shift = sum(_snapped_angles(A, g, tolerance), Fraction(0))
    det_value = log_det_shift(A, g)
    gap = (float(shift) - det_value) % 1.0
    if min(gap, 1.0 - gap) > max(tolerance, 1e-9) * max(1, A.complex_dim):
        raise AssertionError(f"eigenvalue shift {shift} disagrees with the determinant value {det_value} mod 1")
    return shift


def _nonunit_eigenvalue_count(A: ToralAction, g: int, tolerance: float = DEFAULT_TOLERANCE) -> int:
    return sum(1 for a in _snapped_angles(A, g, tolerance) if a != 0)


# -- fixed loci ----------------------------------------------------------------


@dataclass
class FixedLocus:
    """Fixed set of a group of torus automorphisms.

    It is a disjoint union of ``components`` translates of a subtorus of
    dimension ``fixed_dim``.
    """

    fixed_dim: int
    components: int
    component_reps: list[tuple[Fraction, ...]]
    tangent_basis: list[tuple[Fraction, ...]]
    # internals used to label components
    _V_inv: np.ndarray = field(repr=False, default=None)
    _divisors: list[int] = field(repr=False, default_factory=list)

    def component_of(self, x: Sequence[Fraction]) -> tuple[int, ...]:
        """Label of the component containing the fixed point x (mod 1)."""
        y = [sum((self._V_inv[i, j] * x[j] for j in range(len(x))), Fraction(0)) for i in range(len(x))]
        label = []
        for i, d in enumerate(self._divisors):
            v = y[i] * d
            if v.denominator != 1:
                raise ValueError("point is not fixed")
            label.append(int(v) % d)
        return tuple(label)


def _fixed_locus_of(mats: Sequence[np.ndarray], n: int) -> FixedLocus:
    if mats:
        M = int_matrix(np.vstack([m - identity(n) for m in mats]))
    else:
        M = int_matrix([], shape=(0, n))
    _, D, V = smith_normal_form(M)
    r = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    divisors = [D[i, i] for i in range(r)]
    comps = math.prod(divisors)
    V_inv = inverse(V)
    reps = []
    # enumerate y_i = a_i / d_i for the torsion coordinates, other coordinates 0
    ranges = [range(d) for d in divisors]
    for a in product(*ranges):
        y = [Fraction(ai, d) for ai, d in zip(a, divisors)] + [Fraction(0)] * (n - r)
        x = tuple(sum((V[i, j] * y[j] for j in range(n)), Fraction(0)) % 1 for i in range(n))
        reps.append(x)
    tangent = kernel_basis(M) if M.shape[0] else [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    return FixedLocus(n - r, comps, reps, tangent, V_inv, divisors)


def fixed_locus(A: ToralAction, g: int) -> FixedLocus:
    """Fixed set of ``x -> rho_Z(g) x`` on the torus."""
    return _fixed_locus_of([A.rho_Z[g]], A.n)


def _restricted_matrix(rho: np.ndarray, basis: list) -> np.ndarray:
    """Matrix R of rho on the invariant subspace spanned by basis: rho B = B R."""
    f = len(basis)
    if f == 0:
        return rat_matrix([], shape=(0, 0))
    B = rat_matrix([list(v) for v in basis]).T  # n x f
    image = rat_matrix(rho) @ B
    # pick f independent rows of B
    chosen = []
    for i in range(B.shape[0]):
        if rank(rat_matrix([list(B[j]) for j in chosen + [i]])) > len(chosen):
            chosen.append(i)
        if len(chosen) == f:
            break
    Bs = rat_matrix([list(B[i]) for i in chosen])
    R = inverse(Bs) @ rat_matrix([list(image[i]) for i in chosen])
    if not np.array_equal(B @ R, image):
        raise AssertionError("subspace is not invariant")
    return R


def _exterior_trace(R: np.ndarray, p: int) -> Fraction:
    """Trace of Lambda^p R = sum of principal p x p minors."""
    f = R.shape[0]
    if p == 0:
        return Fraction(1)
    total = Fraction(0)
    for idx in combinations(range(f), p):
        total += Fraction(determinant(R[np.ix_(idx, idx)]))
    return total


def _invariant_betti(A: ToralAction, locus: FixedLocus, acting: Iterable[int]) -> list[int]:
    """Betti numbers of (fixed locus) / (acting group) by character averaging."""
    acting = sorted(acting)
    f = locus.fixed_dim
    labels = [locus.component_of(x) for x in locus.component_reps]
    sums = [Fraction(0)] * (f + 1)
    for c in acting:
        rho = A.rho_Z[c]
        perm_fixed = 0
        for x, lab in zip(locus.component_reps, labels):
            y = tuple(sum((rho[i, j] * x[j] for j in range(A.n)), Fraction(0)) % 1 for i in range(A.n))
            if locus.component_of(y) == lab:
                perm_fixed += 1
        R = _restricted_matrix(rho, locus.tangent_basis)
        for p in range(f + 1):
            sums[p] += perm_fixed * _exterior_trace(R, p)
    out = []
    for p, s in enumerate(sums):
        avg = s / len(acting)
        if avg.denominator != 1 or avg < 0:
            raise NonIntegralAverageError(f"character average {avg} in degree {p} is not a non-negative integer")
        out.append(int(avg))
    return out


def sector_betti(A: ToralAction, g: int) -> list[int]:
    """Rational Betti numbers of the twisted sector ``X^g / C(g)``."""
    locus = fixed_locus(A, g)
    return _invariant_betti(A, locus, centralizer(A.group, g))


def subgroup_sector_betti(A: ToralAction, H: Iterable[int]) -> list[int]:
    """Betti numbers of ``X^H / N(H)`` for a subgroup H (chart of the inertia)."""
    H = frozenset(H)
    N = normalizer(A.group, H)
    locus = _fixed_locus_of([A.rho_Z[h] for h in sorted(H)], A.n)
    return _invariant_betti(A, locus, N)


def codimension_shift(A: ToralAction, H: Iterable[int]) -> Fraction:
    """Half the complex codimension of the fixed locus of H: ``(m - dim_C X^H) / 2``."""
    locus = _fixed_locus_of([A.rho_Z[h] for h in sorted(frozenset(H))], A.n)
    return Fraction(A.complex_dim * 2 - locus.fixed_dim, 4)


@dataclass
class SectorReport:
    class_rep: int
    class_size: int
    fixed_dim: int
    components: int
    shift: Fraction
    betti: list[int]

    def to_json(self, G: FiniteGroup) -> dict:
        return {
            "class_rep": G.labels[self.class_rep],
            "class_size": self.class_size,
            "fixed_dim": self.fixed_dim,
            "components": self.components,
            "shift": format_fraction(self.shift),
            "betti": self.betti,
        }


def sectors(A: ToralAction, tolerance: float = DEFAULT_TOLERANCE) -> list[SectorReport]:
    """One report per conjugacy class, ordered by smallest class element."""
    out = []
    for cls in conjugacy_classes(A.group):
        g = cls[0]
        locus = fixed_locus(A, g)
        betti = _invariant_betti(A, locus, centralizer(A.group, g))
        shift = degree_shift(A, g, tolerance) if A.rho_C is not None else Fraction(0)
        out.append(SectorReport(g, len(cls), locus.fixed_dim, locus.components, shift, betti))
    return out


def cr_cohomology(A: ToralAction, tolerance: float = DEFAULT_TOLERANCE) -> dict[Fraction, int]:
    """Chen-Ruan Betti numbers: degree (possibly fractional) -> dimension.

    Sector Betti numbers are placed in degree ``p + 2 * shift``; only
    nonzero dimensions are returned, sorted by degree.
    """
    if A.rho_C is None and A.group.order > 1:
        raise ActionError("twisted sectors need a complex representation for degree shifts")
    table: dict[Fraction, int] = defaultdict(int)
    for s in sectors(A, tolerance):
        for p, b in enumerate(s.betti):
            if b:
                table[Fraction(p) + 2 * s.shift] += b
    return dict(sorted(table.items()))
