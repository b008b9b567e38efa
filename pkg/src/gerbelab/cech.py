"""Cech cochains on the nerve of a finite cover.

Abelian cochains carry coefficients in Z, Q, Z/m or Q/Z; group-valued
cochains carry element indices of a :class:`~gerbelab.groups.FiniteGroup`.
Values are stored on strictly increasing simplices only; abelian
evaluation on permuted vertex tuples is sign-alternating.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from math import gcd

import numpy as np

from .algebra import (
    as_fraction,
    format_fraction,
    int_matrix,
    smith_normal_form,
    solve,
    solve_integer,
)
from .groups import FiniteGroup, is_homomorphism

__all__ = [
    "QZ",
    "Cochain",
    "Coefficients",
    "CohomologyGroup",
    "GroupCochain",
    "GroupExtension",
    "MissingValueError",
    "Nerve",
    "NotCocycleError",
    "Q",
    "TwoCocycleReport",
    "Z",
    "Zmod",
    "are_cohomologous",
    "coboundary",
    "coboundary_matrix",
    "cohomology",
    "group_cochain_to_additive",
    "induced_cocycle",
    "lifting_obstruction",
    "nerve_from_facets",
    "nonabelian_2cocycle_check",
    "obstruction_band_twist",
    "parse_simplex",
    "simplex_key",
    "twist_by_coboundary",
]


class MissingValueError(KeyError):
    pass


class NotCocycleError(ValueError):
    pass


def simplex_key(s: Sequence[int]) -> str:
    return ",".join(str(v) for v in s)


def parse_simplex(key) -> tuple[int, ...]:
    if isinstance(key, str):
        return tuple(int(x) for x in key.split(",")) if key.strip() else ()
    return tuple(int(x) for x in key)


# -- nerves ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Nerve:
    """Finite abstract simplicial complex, closed under faces."""

    vertex_count: int
    simplices: Mapping[int, tuple[tuple[int, ...], ...]]

    @property
    def dim(self) -> int:
        return max((k for k, s in self.simplices.items() if s), default=-1)

    def of_degree(self, k: int) -> tuple[tuple[int, ...], ...]:
        return self.simplices.get(k, ())

    def count(self, k: int) -> int:
        return len(self.of_degree(k))

    def f_vector(self) -> list[int]:
        return [self.count(k) for k in range(self.dim + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.f_vector()))

    def facets(self) -> list[tuple[int, ...]]:
        alls = [s for k in range(self.dim + 1) for s in self.of_degree(k)]
        sets = [frozenset(s) for s in alls]
        return [s for s, fs in zip(alls, sets) if not any(fs < t for t in sets)]


def nerve_from_facets(facets: Iterable[Sequence[int]]) -> Nerve:
    """Downward closure of a list of vertex tuples."""
    found: dict[int, set] = {}
    vertices = set()
    for f in facets:
        f = tuple(int(v) for v in f)
        if len(set(f)) != len(f):
            raise ValueError(f"facet {f} repeats a vertex")
        f = tuple(sorted(f))
        vertices.update(f)
        for k in range(len(f)):
            found.setdefault(k, set()).update(combinations(f, k + 1))
    vertex_count = max(vertices) + 1 if vertices else 0
    return Nerve(vertex_count, {k: tuple(sorted(s)) for k, s in sorted(found.items())})


# -- coefficients ------------------------------------------------------------


@dataclass(frozen=True)
class Coefficients:
    """One of Z, Q, Z/m (``modulus=m``) or Q/Z (``kind="Q/Z"``)."""

    kind: str
    modulus: int | None = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Z/m", "Q/Z"):
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if self.kind == "Z/m" and (self.modulus is None or self.modulus < 2):
            raise ValueError("Z/m needs a modulus >= 2")

    @classmethod
    def parse(cls, text: str) -> Coefficients:
        text = text.strip()
        if text in ("Z", "Q", "Q/Z"):
            return cls(text)
        if text.startswith("Z/"):
            return cls("Z/m", int(text[2:]))
        raise ValueError(f"cannot parse coefficients {text!r}")

    def __str__(self):
        return f"Z/{self.modulus}" if self.kind == "Z/m" else self.kind

    def normalize(self, x):
        if self.kind == "Z":
            q = as_fraction(x)
            if q.denominator != 1:
                raise ValueError(f"{x!r} is not an integer")
            return q.numerator
        if self.kind == "Z/m":
            q = as_fraction(x)
            if q.denominator != 1:
                raise ValueError(f"{x!r} is not an integer")
            return q.numerator % self.modulus
        if self.kind == "Q":
            return as_fraction(x)
        return as_fraction(x) % 1

    @property
    def zero(self):
        return self.normalize(0)

    def format(self, x) -> str:
        return format_fraction(x)


Z = Coefficients("Z")
Q = Coefficients("Q")
QZ = Coefficients("Q/Z")


def Zmod(m: int) -> Coefficients:
    return Coefficients("Z/m", m)


# -- cochains ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Cochain:
    """Abelian k-cochain: one value per increasing (k+1)-tuple."""

    degree: int
    coeffs: Coefficients
    values: Mapping[tuple[int, ...], object]

    def __post_init__(self):
        clean = {}
        for key, v in self.values.items():
            key = parse_simplex(key)
            if len(key) != self.degree + 1 or list(key) != sorted(set(key)):
                raise ValueError(f"cochain key {key} is not an increasing {self.degree + 1}-tuple")
            clean[key] = self.coeffs.normalize(v)
        object.__setattr__(self, "values", dict(sorted(clean.items())))

    @classmethod
    def zero(cls, nerve: Nerve, degree: int, coeffs: Coefficients) -> Cochain:
        return cls(degree, coeffs, {s: 0 for s in nerve.of_degree(degree)})

    def __call__(self, *vertices: int):
        """Value on an arbitrary vertex tuple, alternating in the order."""
        if len(set(vertices)) < len(vertices):
            return self.coeffs.zero
        order = sorted(range(len(vertices)), key=lambda p: vertices[p])
        key = tuple(vertices[p] for p in order)
        if key not in self.values:
            raise MissingValueError(f"no value on simplex {key}")
        v = self.values[key]
        return self.coeffs.normalize(_perm_sign(order) * v)

    def _combine(self, other, op):
        if self.degree != other.degree or self.coeffs != other.coeffs:
            raise ValueError("cochains of different type")
        keys = set(self.values) | set(other.values)
        z = self.coeffs.zero
        return Cochain(self.degree, self.coeffs, {k: op(self.values.get(k, z), other.values.get(k, z)) for k in keys})

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return Cochain(self.degree, self.coeffs, {k: -v for k, v in self.values.items()})

    def __eq__(self, other):
        if not isinstance(other, Cochain) or self.degree != other.degree or self.coeffs != other.coeffs:
            return False
        z = self.coeffs.zero
        keys = set(self.values) | set(other.values)
        return all(self.values.get(k, z) == other.values.get(k, z) for k in keys)

    __hash__ = None

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values.values())

    def support(self) -> list[tuple[int, ...]]:
        return [k for k, v in self.values.items() if v != 0]

    def to_json(self) -> dict:
        return {simplex_key(k): format_fraction(v) for k, v in self.values.items()}

    @classmethod
    def from_json(cls, degree: int, coeffs: Coefficients, doc: Mapping) -> Cochain:
        return cls(degree, coeffs, {parse_simplex(k): v for k, v in doc.items()})


def _perm_sign(order) -> int:
    order = list(order)
    sign = 1
    for i in range(len(order)):
        while order[i] != i:
            j = order[i]
            order[i], order[j] = order[j], order[i]
            sign = -sign
    return sign


@dataclass(frozen=True, eq=False)
class GroupCochain:
    """Cochain with values in a (possibly non-abelian) finite group."""

    degree: int
    group: FiniteGroup
    values: Mapping[tuple[int, ...], int]

    def __post_init__(self):
        clean = {}
        for key, v in self.values.items():
            key = parse_simplex(key)
            if len(key) != self.degree + 1 or list(key) != sorted(set(key)):
                raise ValueError(f"cochain key {key} is not an increasing {self.degree + 1}-tuple")
            clean[key] = self.group.index(v)
        object.__setattr__(self, "values", dict(sorted(clean.items())))

    def __getitem__(self, simplex) -> int:
        key = parse_simplex(simplex)
        try:
            return self.values[key]
        except KeyError:
            raise MissingValueError(f"no value on simplex {key}") from None

    def __eq__(self, other):
        return isinstance(other, GroupCochain) and self.degree == other.degree and self.values == other.values

    __hash__ = None

    def to_json(self) -> dict:
        return {simplex_key(k): self.group.labels[v] for k, v in self.values.items()}

    @classmethod
    def from_json(cls, degree: int, group: FiniteGroup, doc: Mapping) -> GroupCochain:
        return cls(degree, group, {parse_simplex(k): group.index(v) for k, v in doc.items()})

    @classmethod
    def constant(cls, nerve: Nerve, degree: int, group: FiniteGroup, value=None) -> GroupCochain:
        v = group.identity if value is None else group.index(value)
        return cls(degree, group, {s: v for s in nerve.of_degree(degree)})


def _require_defined(nerve: Nerve, c, degree: int) -> None:
    missing = [s for s in nerve.of_degree(degree) if s not in c.values]
    if missing:
        raise MissingValueError(f"cochain has no value on simplices {missing[:5]}")


# -- coboundary and cohomology --------------------------------------------------


def coboundary(nerve: Nerve, c: Cochain) -> Cochain:
    """``(dc)(i_0 .. i_{k+1}) = sum_j (-1)^j c(i_0 .. ^i_j .. i_{k+1})``."""
    k = c.degree
    _require_defined(nerve, c, k)
    out = {}
    for s in nerve.of_degree(k + 1):
        total = c.coeffs.zero
        for j in range(k + 2):
            face = s[:j] + s[j + 1 :]
            v = c.values[face]
            total = total + v if j % 2 == 0 else total - v
        out[s] = total
    return Cochain(k + 1, c.coeffs, out)


def coboundary_matrix(nerve: Nerve, k: int) -> np.ndarray:
    """Integer matrix of ``d: C^k -> C^(k+1)`` (rows: (k+1)-simplices)."""
    src = nerve.of_degree(k) if k >= 0 else ()
    dst = nerve.of_degree(k + 1)
    col = {s: i for i, s in enumerate(src)}
    rows = []
    for s in dst:
        row = [0] * len(src)
        for j in range(len(s)):
            row[col[s[:j] + s[j + 1 :]]] += (-1) ** j
        rows.append(row)
    return int_matrix(rows, shape=(len(dst), len(src)))


@dataclass(frozen=True)
class CohomologyGroup:
    """``Z^betti + sum Z/t`` for integer coefficients.

    For ``Z/m`` coefficients ``betti`` counts full ``Z/m`` summands and
    ``torsion`` lists the orders of smaller cyclic summands; for Q the
    torsion is empty.
    """

    betti: int
    torsion: tuple[int, ...]
    coeffs: Coefficients = Z

    @property
    def dimension(self) -> int:
        """Vector-space dimension, for field coefficients (Q or Z/p)."""
        if self.coeffs.kind == "Z/m":
            return self.betti + len(self.torsion)
        return self.betti

    def is_trivial(self) -> bool:
        return self.betti == 0 and not self.torsion

    def __str__(self):
        base = "Z" if self.coeffs.kind == "Z" else f"({self.coeffs})" if self.coeffs.kind == "Z/m" else str(self.coeffs)
        parts = [f"{base}^{self.betti}"] if self.betti else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def _integral_cohomology(nerve: Nerve, k: int) -> tuple[int, list[int]]:
    if k < 0:
        return 0, []
    n_k = nerve.count(k)
    d_k = coboundary_matrix(nerve, k)
    r_k = smith_normal_form(d_k).rank if d_k.size else 0
    if k > 0:
        snf = smith_normal_form(coboundary_matrix(nerve, k - 1))
        r_prev = snf.rank
        torsion = [d for d in snf.diagonal[:r_prev] if d > 1]
    else:
        r_prev, torsion = 0, []
    return n_k - r_k - r_prev, torsion


def cohomology(nerve: Nerve, k: int, coeffs: Coefficients = Z) -> CohomologyGroup:
    """``H^k`` of the nerve with constant coefficients, via Smith normal form."""
    if coeffs.kind == "Q/Z":
        raise ValueError("Q/Z cohomology is not finitely generated; use Z or Z/m")
    betti, torsion = _integral_cohomology(nerve, k)
    if coeffs.kind == "Z":
        return CohomologyGroup(betti, tuple(torsion), coeffs)
    if coeffs.kind == "Q":
        return CohomologyGroup(betti, (), coeffs)
    # H^k(C; Z/m) = H^k(C) (x) Z/m  +  Tor(H^(k+1)(C), Z/m) for free cochain complexes
    m = coeffs.modulus
    _, torsion_next = _integral_cohomology(nerve, k + 1)
    orders = [gcd(t, m) for t in torsion + torsion_next]
    full = betti + sum(1 for g in orders if g == m)
    part = tuple(sorted(g for g in orders if 1 < g < m))
    return CohomologyGroup(full, part, coeffs)


# -- non-abelian 2-cocycles --------------------------------------------------


@dataclass
class TwoCocycleReport:
    tetra_violations: list  # (simplex, lhs, rhs)
    triangle_violations: list  # (simplex,) where the band twist fails to compose

    @property
    def ok(self) -> bool:
        return not self.tetra_violations and not self.triangle_violations


def _identity_aut(G: FiniteGroup) -> tuple[int, ...]:
    return tuple(G)


def nonabelian_2cocycle_check(
    nerve: Nerve,
    c: GroupCochain,
    lam: Mapping[tuple[int, int], Sequence[int]] | None = None,
) -> TwoCocycleReport:
    """Check the twisted 2-cocycle law.

    On every 3-simplex ``(i, j, l, m)``:
    ``lam_ij(c_jlm) c_ijm = c_ijl c_ilm``; on every 2-simplex
    ``lam_ij o lam_jl = Ad(c_ijl) o lam_il``.  ``lam`` maps edges to
    automorphisms of the band (element permutations); None means trivial.
    """
    G = c.group
    _require_defined(nerve, c, 2)
    ident = _identity_aut(G)
    if lam is None:
        lam_of = lambda e: ident
    else:
        lam = {parse_simplex(k): tuple(v) for k, v in lam.items()}
        for e in nerve.of_degree(1):
            if e not in lam:
                raise MissingValueError(f"band twist missing on edge {e}")
            if not is_homomorphism(lam[e], G, G) or sorted(lam[e]) != list(G):
                raise ValueError(f"band twist on {e} is not an automorphism")
        lam_of = lam.__getitem__
    tetra = []
    for i, j, l, m in nerve.of_degree(3):
        lhs = G.mul[lam_of((i, j))[c.values[(j, l, m)]]][c.values[(i, j, m)]]
        rhs = G.mul[c.values[(i, j, l)]][c.values[(i, l, m)]]
        if lhs != rhs:
            tetra.append(((i, j, l, m), lhs, rhs))
    tri = []
    if lam is not None:
        for i, j, l in nerve.of_degree(2):
            a, b, d = lam_of((i, j)), lam_of((j, l)), lam_of((i, l))
            cc = c.values[(i, j, l)]
            if any(a[b[x]] != G.conj(cc, d[x]) for x in G):
                tri.append(((i, j, l),))
    report = TwoCocycleReport(tetra, tri)
    if lam is None and G.is_abelian:
        # additive reading: dc = c_jlm - c_ilm + c_ijm - c_ijl
        for s in nerve.of_degree(3):
            i, j, l, m = s
            x = G.m(c.values[(j, l, m)], G.inv[c.values[(i, l, m)]], c.values[(i, j, m)], G.inv[c.values[(i, j, l)]])
            assert (x == G.identity) == (s not in {v[0] for v in tetra})
    return report


# -- abelian equivalence ------------------------------------------------------


def twist_by_coboundary(nerve: Nerve, c: Cochain, b: Cochain) -> Cochain:
    """``c + d b``."""
    if b.degree != c.degree - 1:
        raise ValueError("b must have degree one less than c")
    return c + coboundary(nerve, b)


def are_cohomologous(nerve: Nerve, c: Cochain, c2: Cochain) -> Cochain | None:
    """A cochain b with ``c + d b = c2``, or None when no such b exists."""
    if c.degree != c2.degree or c.coeffs != c2.coeffs:
        raise ValueError("cochains of different type")
    k = c.degree
    _require_defined(nerve, c, k)
    _require_defined(nerve, c2, k)
    coeffs = c.coeffs
    diff = c2 - c
    rhs = [diff.values[s] for s in nerve.of_degree(k)]
    if k == 0:
        ok = all(v == 0 for v in rhs)
        return Cochain(-1, coeffs, {}) if ok else None
    A = coboundary_matrix(nerve, k - 1)
    if coeffs.kind == "Q":
        x = solve(A, rhs)
    elif coeffs.kind == "Z":
        x = solve_integer(A, rhs)
    elif coeffs.kind == "Z/m":
        x = solve_integer(A, rhs, modulus=coeffs.modulus)
    else:
        x = solve_integer(A, rhs, modulus=1)
    if x is None:
        return None
    b = Cochain(k - 1, coeffs, dict(zip(nerve.of_degree(k - 1), x)))
    if twist_by_coboundary(nerve, c, b) != c2:
        raise AssertionError("solver returned a non-witness")
    return b


# -- functoriality and obstructions -------------------------------------------


def induced_cocycle(f: Sequence[int], c: GroupCochain, target: FiniteGroup) -> GroupCochain:
    """Push a group-valued cochain forward along a homomorphism."""
    f = tuple(f)
    if not is_homomorphism(f, c.group, target):
        raise ValueError("map is not a group homomorphism")
    return GroupCochain(c.degree, target, {k: f[v] for k, v in c.values.items()})


def group_cochain_to_additive(c: GroupCochain, modulus: int) -> Cochain:
    """Reinterpret a cochain valued in ``cyclic_group(modulus)`` additively."""
    if c.group.order != modulus:
        raise ValueError("group order does not match the modulus")
    return Cochain(c.degree, Zmod(modulus) if modulus > 1 else Z, {k: int(c.group.labels[v]) for k, v in c.values.items()})


@dataclass
class GroupExtension:
    """``1 -> H -> Lp -> L -> 1`` with a set-theoretic section ``L -> Lp``."""

    H: FiniteGroup
    Lp: FiniteGroup
    L: FiniteGroup
    inclusion: tuple[int, ...]
    projection: tuple[int, ...]
    section: tuple[int, ...]

    def __post_init__(self):
        H, Lp, L = self.H, self.Lp, self.L
        self.inclusion = tuple(self.inclusion)
        self.projection = tuple(self.projection)
        self.section = tuple(self.section)
        if not is_homomorphism(self.inclusion, H, Lp) or len(set(self.inclusion)) != H.order:
            raise ValueError("inclusion is not an injective homomorphism")
        if not is_homomorphism(self.projection, Lp, L) or set(self.projection) != set(L):
            raise ValueError("projection is not a surjective homomorphism")
        kernel = {x for x in Lp if self.projection[x] == L.identity}
        if kernel != set(self.inclusion):
            raise ValueError("kernel of the projection is not the image of H")
        if len(self.section) != L.order or any(self.projection[self.section[a]] != a for a in L):
            raise ValueError("section does not split the projection")
        self._pullback = {x: h for h, x in enumerate(self.inclusion)}

    @property
    def is_central(self) -> bool:
        image = set(self.inclusion)
        return all(self.Lp.mul[x][g] == self.Lp.mul[g][x] for x in image for g in self.Lp)

    def pull_back(self, x: int) -> int:
        return self._pullback[x]

    @classmethod
    def from_json(cls, doc: Mapping) -> GroupExtension:
        H = FiniteGroup.from_json(doc["H"])
        Lp = FiniteGroup.from_json(doc["Lp"])
        L = FiniteGroup.from_json(doc["L"])

        def total(src, dst, m, name):
            out = [None] * src.order
            for a, b in m.items():
                out[src.index(a)] = dst.index(b)
            if None in out:
                raise ValueError(f"{name} is not defined on every element")
            return tuple(out)

        return cls(
            H,
            Lp,
            L,
            total(H, Lp, doc["inclusion"], "inclusion"),
            total(Lp, L, doc["projection"], "projection"),
            total(L, Lp, doc["section"], "section"),
        )


def _require_strict_cocycle(nerve: Nerve, u: GroupCochain) -> None:
    G = u.group
    _require_defined(nerve, u, 1)
    bad = [t for t in nerve.of_degree(2) if G.mul[u.values[t[:2]]][u.values[t[1:]]] != u.values[(t[0], t[2])]]
    if bad:
        raise NotCocycleError(f"u_ij u_jl != u_il on triangles {bad[:5]}")


def lifting_obstruction(
    ext: GroupExtension, nerve: Nerve, u: GroupCochain, require_central: bool = True
) -> GroupCochain:
    """H-valued 2-cochain ``c_ijl = s(u_ij) s(u_jl) s(u_il)^-1`` measuring the failure to lift u."""
    if u.group is not ext.L and u.group.mul != ext.L.mul:
        raise ValueError("u is not valued in the quotient group")
    _require_strict_cocycle(nerve, u)
    if require_central and not ext.is_central:
        raise ValueError("H is not central in Lp; the obstruction needs a band twist (see obstruction_band_twist)")
    Lp, s = ext.Lp, ext.section
    out = {}
    for i, j, l in nerve.of_degree(2):
        x = Lp.m(s[u.values[(i, j)]], s[u.values[(j, l)]], Lp.inv[s[u.values[(i, l)]]])
        out[(i, j, l)] = ext.pull_back(x)
    c = GroupCochain(2, ext.H, out)
    lam = None if ext.is_central else obstruction_band_twist(ext, nerve, u)
    report = nonabelian_2cocycle_check(nerve, c, lam)
    if not report.ok:
        raise AssertionError(f"obstruction fails the cocycle law: {report}")
    return c


def obstruction_band_twist(ext: GroupExtension, nerve: Nerve, u: GroupCochain) -> dict:
    """Automorphisms ``Ad(s(u_ij))`` of H on each edge."""
    Lp, s = ext.Lp, ext.section
    lam = {}
    for e in nerve.of_degree(1):
        g = s[u.values[e]]
        lam[e] = tuple(ext.pull_back(Lp.conj(g, ext.inclusion[h])) for h in ext.H)
    return lam
