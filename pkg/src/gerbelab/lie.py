"""Lie algebras over Q: Chevalley-Eilenberg cohomology, invariant metrics,
the canonical 3-form, double extensions and curvature of invariant forms.

Wedge bases are the strictly increasing index tuples in lexicographic
order.  The Chevalley-Eilenberg differential uses the convention
``d xi(x, y) = -xi([x, y])``.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import comb

import numpy as np

from .algebra import (
    as_fraction,
    format_fraction,
    is_zero,
    kernel_basis,
    rank,
    rat_matrix,
    zeros,
)

__all__ = [
    "BilinearForm",
    "InvalidAlgebraError",
    "InvariantForm",
    "InvariantFormSpace",
    "LieAlgebra",
    "LieValidation",
    "NotInvariantError",
    "NotMorphismError",
    "NotSkewError",
    "abelian",
    "betti",
    "betti_numbers",
    "bracket_forms",
    "ce_apply",
    "ce_differential",
    "curvature",
    "curving",
    "curving_law_residual",
    "double_extension",
    "gl",
    "heisenberg",
    "invariance_defects",
    "invariant_symmetric_forms",
    "is_closed",
    "is_morphism",
    "nu_form",
    "pushforward_form",
    "sl2",
    "validate",
    "wedge_basis",
]


class InvalidAlgebraError(ValueError):
    """The structure constants violate the Jacobi identity."""


class NotInvariantError(ValueError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NotSkewError(ValueError):
    """The endomorphism is not skew for the scalar product.

    ``pairs`` lists ``(a, b, w(a, b), w(b, a))`` for basis pairs where
    ``w(u1, u2) = <h u1, u2>`` fails antisymmetry.
    """

    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)


class NotMorphismError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A Lie algebra given by rational structure constants.

    ``structure_constants[(i, j)][k]`` is the coefficient of ``e_k`` in
    ``[e_i, e_j]`` for ``i < j``.  Antisymmetry is implicit; the Jacobi
    identity is only checked by :func:`validate`.
    """

    dim: int
    basis_names: tuple[str, ...]
    structure_constants: Mapping[tuple[int, int], Mapping[int, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.basis_names) != self.dim:
            raise ValueError("basis_names must have length dim")
        clean = {}
        for (i, j), coeffs in self.structure_constants.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise ValueError(f"bracket index ({i}, {j}) out of range")
            if i == j:
                if any(as_fraction(c) for c in coeffs.values()):
                    raise ValueError("[e_i, e_i] must vanish")
                continue
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            row = dict(clean.get((i, j), {}))
            for k, c in coeffs.items():
                k = int(k)
                if not 0 <= k < self.dim:
                    raise ValueError(f"bracket target {k} out of range")
                row[k] = row.get(k, Fraction(0)) + sign * as_fraction(c)
            row = {k: c for k, c in sorted(row.items()) if c != 0}
            if row:
                clean[(i, j)] = row
        object.__setattr__(self, "structure_constants", dict(sorted(clean.items())))

    @classmethod
    def from_brackets(cls, names: Sequence[str], brackets: Mapping[tuple[str, str], Mapping[str, object]]):
        """Build from name-keyed brackets, e.g. ``{("x", "y"): {"z": 1}}``."""
        idx = {n: i for i, n in enumerate(names)}
        sc = {}
        for (a, b), coeffs in brackets.items():
            sc[(idx[a], idx[b])] = {idx[k]: v for k, v in coeffs.items()}
        return cls(len(names), tuple(names), sc)

    @cached_property
    def tensor(self) -> tuple:
        """Dense ``c[i][j][k]`` with both orderings filled in."""
        n = self.dim
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), coeffs in self.structure_constants.items():
            for k, v in coeffs.items():
                c[i][j][k] = v
                c[j][i][k] = -v
        return tuple(tuple(tuple(r) for r in plane) for plane in c)

    def bracket(self, x: Sequence, y: Sequence) -> tuple[Fraction, ...]:
        n = self.dim
        out = [Fraction(0)] * n
        c = self.tensor
        for i in range(n):
            if not x[i]:
                continue
            for j in range(n):
                if not y[j]:
                    continue
                f = x[i] * y[j]
                for k, v in enumerate(c[i][j]):
                    if v:
                        out[k] += f * v
        return tuple(out)

    def basis_vector(self, i: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def ad(self, i: int) -> np.ndarray:
        """Matrix of ``ad(e_i)`` acting on column vectors."""
        c = self.tensor
        return rat_matrix([[c[i][j][k] for j in range(self.dim)] for k in range(self.dim)], (self.dim, self.dim))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "basis": list(self.basis_names),
            "brackets": [
                {"i": i, "j": j, "coeffs": {str(k): format_fraction(v) for k, v in coeffs.items()}}
                for (i, j), coeffs in self.structure_constants.items()
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> LieAlgebra:
        n = int(doc["dim"])
        names = tuple(doc.get("basis") or [f"e{i + 1}" for i in range(n)])
        sc = {}
        for b in doc.get("brackets", []):
            key = (int(b["i"]), int(b["j"]))
            if key in sc:
                raise ValueError(f"bracket ({key[0]}, {key[1]}) given twice")
            sc[key] = {int(k): as_fraction(v) for k, v in b["coeffs"].items()}
        return cls(n, names, sc)


# -- standard algebras -------------------------------------------------------


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(n, tuple(f"e{i + 1}" for i in range(n)))


def heisenberg() -> LieAlgebra:
    return LieAlgebra.from_brackets(["x", "y", "z"], {("x", "y"): {"z": 1}})


def sl2() -> LieAlgebra:
    return LieAlgebra.from_brackets(
        ["h", "e", "f"], {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}}
    )


def gl(n: int) -> LieAlgebra:
    """gl(n, Q) in the basis of matrix units E_ab, row-major."""
    names = [f"E{a + 1}{b + 1}" for a in range(n) for b in range(n)]
    sc = {}
    for (a, b), (c, d) in combinations(list(product(range(n), repeat=2)), 2):
        i, j = a * n + b, c * n + d
        coeffs = {}
        # [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb
        if b == c:
            coeffs[a * n + d] = coeffs.get(a * n + d, 0) + 1
        if d == a:
            coeffs[c * n + b] = coeffs.get(c * n + b, 0) - 1
        if any(coeffs.values()):
            sc[(i, j)] = coeffs
    return LieAlgebra(n * n, tuple(names), sc)


# -- validation --------------------------------------------------------------


@dataclass
class LieValidation:
    jacobi_holds: bool
    violations: list  # (i, j, k, defect vector)
    nilpotency_class: int | None
    integral: bool

    @property
    def ok(self) -> bool:
        return self.jacobi_holds


def _span_rank(vectors) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    return rank(rat_matrix(vectors))


def _span_basis(vectors, n):
    """Independent subset spanning the same space (greedy)."""
    basis = []
    r = 0
    for v in vectors:
        if _span_rank(basis + [v]) > r:
            basis.append(v)
            r += 1
    return basis


def validate(L: LieAlgebra) -> LieValidation:
    n = L.dim
    e = [L.basis_vector(i) for i in range(n)]
    violations = []
    for i, j, k in combinations(range(n), 3):
        a = L.bracket(e[i], L.bracket(e[j], e[k]))
        b = L.bracket(e[j], L.bracket(e[k], e[i]))
        c = L.bracket(e[k], L.bracket(e[i], e[j]))
        defect = tuple(x + y + z for x, y, z in zip(a, b, c))
        if any(defect):
            violations.append((i, j, k, defect))
    integral = all(v.denominator == 1 for row in L.structure_constants.values() for v in row.values())

    nil_class = None
    if not violations:
        current = _span_basis(e, n)
        for step in range(1, n + 2):
            nxt = _span_basis([L.bracket(x, y) for x in e for y in current], n)
            if not nxt:
                nil_class = step
                break
            if len(nxt) == len(current):
                break
            current = nxt
        if n == 0:
            nil_class = 0
    return LieValidation(not violations, violations, nil_class, integral)


def _require_valid(L: LieAlgebra) -> None:
    report = validate(L)
    if not report.jacobi_holds:
        raise InvalidAlgebraError(f"Jacobi identity fails on triples {[v[:3] for v in report.violations]}")


# -- Chevalley-Eilenberg complex ---------------------------------------------


def wedge_basis(n: int, k: int) -> list[tuple[int, ...]]:
    return list(combinations(range(n), k))


def _sort_sign(k: int, rest: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted tuple for ``(k,) + rest`` with rest increasing."""
    if k in rest:
        return None
    below = sum(1 for r in rest if r < k)
    return (-1) ** below, tuple(sorted((k,) + rest))


def ce_differential(L: LieAlgebra, k: int) -> np.ndarray:
    """Matrix of ``d: Lambda^k -> Lambda^(k+1)`` on the dual of L.

    Column ``I`` is the coordinate vector of ``d(e^I)``; rows are indexed
    by ``wedge_basis(dim, k + 1)``.
    """
    n = L.dim
    if not 0 <= k <= n:
        raise ValueError(f"degree {k} outside 0..{n}")
    src = wedge_basis(n, k)
    dst = wedge_basis(n, k + 1)
    col = {t: i for i, t in enumerate(src)}
    d = zeros(len(dst), len(src), rational=True)
    c = L.tensor
    for r, J in enumerate(dst):
        for a, b in combinations(range(k + 1), 2):
            rest = tuple(x for p, x in enumerate(J) if p not in (a, b))
            sgn = (-1) ** (a + b)
            for t, coeff in enumerate(c[J[a]][J[b]]):
                if not coeff:
                    continue
                s = _sort_sign(t, rest)
                if s is None:
                    continue
                d[r, col[s[1]]] += sgn * s[0] * coeff
    return d


def betti(L: LieAlgebra, k: int) -> int:
    """Dimension of the k-th Chevalley-Eilenberg cohomology with Q coefficients."""
    _require_valid(L)
    n = L.dim
    if not 0 <= k <= n:
        raise ValueError(f"degree {k} outside 0..{n}")
    rk = rank(ce_differential(L, k))
    rk_prev = rank(ce_differential(L, k - 1)) if k > 0 else 0
    return comb(n, k) - rk - rk_prev


def betti_numbers(L: LieAlgebra) -> list[int]:
    _require_valid(L)
    ranks = [rank(ce_differential(L, k)) for k in range(L.dim + 1)]
    return [comb(L.dim, k) - ranks[k] - (ranks[k - 1] if k else 0) for k in range(L.dim + 1)]


# -- forms -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BilinearForm:
    gram: np.ndarray

    def __post_init__(self):
        g = rat_matrix(self.gram)
        if g.shape[0] != g.shape[1]:
            raise ValueError("Gram matrix must be square")
        g.flags.writeable = False
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def rank(self) -> int:
        return rank(self.gram)

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.gram, self.gram.T))

    @property
    def is_nondegenerate(self) -> bool:
        return self.rank == self.dim

    def __call__(self, x, y) -> Fraction:
        return sum((x[i] * self.gram[i, j] * y[j] for i in range(self.dim) for j in range(self.dim) if x[i] and y[j]), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, BilinearForm) and np.array_equal(self.gram, other.gram)

    def __hash__(self):
        return hash(tuple(self.gram.flat))

    def __repr__(self):
        return f"BilinearForm({[[format_fraction(x) for x in r] for r in self.gram.tolist()]})"


@dataclass(frozen=True, eq=False)
class InvariantForm:
    """A constant-coefficient alternating form, possibly vector valued.

    ``components`` maps strictly increasing index tuples of length
    ``degree`` to coefficient vectors of length ``value_dim``.  Zero
    components are dropped, so equal forms compare equal.
    """

    degree: int
    algebra_dim: int
    value_dim: int
    components: Mapping[tuple[int, ...], tuple[Fraction, ...]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, vec in self.components.items():
            key = tuple(int(i) for i in key)
            vec = tuple(as_fraction(v) for v in vec)
            if len(key) != self.degree or list(key) != sorted(set(key)):
                raise ValueError(f"component key {key} is not a strictly increasing {self.degree}-tuple")
            if key and not 0 <= key[-1] < self.algebra_dim or key and key[0] < 0:
                raise ValueError(f"component key {key} out of range")
            if len(vec) != self.value_dim:
                raise ValueError(f"component {key} has {len(vec)} values, expected {self.value_dim}")
            if any(vec):
                clean[key] = vec
        object.__setattr__(self, "components", dict(sorted(clean.items())))

    @classmethod
    def zero(cls, degree, algebra_dim, value_dim=1):
        return cls(degree, algebra_dim, value_dim, {})

    @classmethod
    def scalar(cls, degree, algebra_dim, coeffs: Mapping[tuple[int, ...], object]):
        return cls(degree, algebra_dim, 1, {k: (v,) for k, v in coeffs.items()})

    def __call__(self, *indices: int) -> tuple[Fraction, ...]:
        """Evaluate on basis vectors, extending by alternation."""
        if len(indices) != self.degree:
            raise ValueError("wrong number of arguments")
        if len(set(indices)) < len(indices):
            return (Fraction(0),) * self.value_dim
        order = sorted(range(len(indices)), key=lambda p: indices[p])
        sign = _perm_sign(order)
        vec = self.components.get(tuple(indices[p] for p in order))
        if vec is None:
            return (Fraction(0),) * self.value_dim
        return tuple(sign * v for v in vec)

    def _check_compatible(self, other):
        if (self.degree, self.algebra_dim, self.value_dim) != (other.degree, other.algebra_dim, other.value_dim):
            raise ValueError("forms of different type")

    def __add__(self, other):
        self._check_compatible(other)
        out = dict(self.components)
        for k, v in other.components.items():
            base = out.get(k, (Fraction(0),) * self.value_dim)
            out[k] = tuple(a + b for a, b in zip(base, v))
        return InvariantForm(self.degree, self.algebra_dim, self.value_dim, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        s = as_fraction(s)
        return InvariantForm(
            self.degree, self.algebra_dim, self.value_dim, {k: tuple(s * x for x in v) for k, v in self.components.items()}
        )

    def __eq__(self, other):
        return (
            isinstance(other, InvariantForm)
            and (self.degree, self.algebra_dim, self.value_dim) == (other.degree, other.algebra_dim, other.value_dim)
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.degree, self.algebra_dim, self.value_dim, tuple(self.components.items())))

    def is_zero(self) -> bool:
        return not self.components

    def column(self, slot: int) -> list[Fraction]:
        """Coordinates of one value component in ``wedge_basis(algebra_dim, degree)``."""
        zero = (Fraction(0),) * self.value_dim
        return [self.components.get(t, zero)[slot] for t in wedge_basis(self.algebra_dim, self.degree)]

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "algebra_dim": self.algebra_dim,
            "value_dim": self.value_dim,
            "components": {",".join(map(str, k)): [format_fraction(x) for x in v] for k, v in self.components.items()},
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> InvariantForm:
        comps = {}
        for key, vec in doc.get("components", {}).items():
            idx = tuple(int(x) for x in key.split(",")) if key else ()
            comps[idx] = vec if isinstance(vec, list) else [vec]
        return cls(int(doc["degree"]), int(doc["algebra_dim"]), int(doc.get("value_dim", 1)), comps)

    def __repr__(self):
        body = ", ".join(f"{k}: {[format_fraction(x) for x in v]}" for k, v in self.components.items())
        return f"InvariantForm(degree={self.degree}, {{{body}}})"


def _perm_sign(order) -> int:
    order = list(order)
    sign = 1
    for i in range(len(order)):
        while order[i] != i:
            j = order[i]
            order[i], order[j] = order[j], order[i]
            sign = -sign
    return sign


def ce_apply(L: LieAlgebra, form: InvariantForm) -> InvariantForm:
    """Chevalley-Eilenberg differential, applied to each value coordinate."""
    if form.algebra_dim != L.dim:
        raise ValueError("form lives on an algebra of different dimension")
    k = form.degree
    d = ce_differential(L, k)
    targets = wedge_basis(L.dim, k + 1)
    cols = [form.column(s) for s in range(form.value_dim)]
    out = {}
    for r, J in enumerate(targets):
        vec = tuple(sum((d[r, i] * col[i] for i in range(len(col)) if col[i]), Fraction(0)) for col in cols)
        out[J] = vec
    return InvariantForm(k + 1, L.dim, form.value_dim, out)


def is_closed(L: LieAlgebra, form: InvariantForm) -> bool:
    if form.degree >= L.dim:
        return True
    return ce_apply(L, form).is_zero()


# -- invariant scalar products -------------------------------------------------


def invariance_defects(L: LieAlgebra, B: BilinearForm) -> list:
    """Basis triples (a, b, c) with ``B([a,b],c) + B(b,[a,c]) != 0``."""
    n = L.dim
    c = L.tensor
    g = B.gram
    bad = []
    for a, b, t in product(range(n), repeat=3):
        val = sum((c[a][b][k] * g[k, t] for k in range(n) if c[a][b][k]), Fraction(0))
        val += sum((c[a][t][k] * g[b, k] for k in range(n) if c[a][t][k]), Fraction(0))
        if val:
            bad.append((a, b, t, val))
    return bad


@dataclass
class InvariantFormSpace:
    """Basis of the ad-invariant symmetric bilinear forms on an algebra."""

    algebra: LieAlgebra
    basis: list[BilinearForm]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def ranks(self) -> list[int]:
        return [b.rank for b in self.basis]

    def combine(self, coeffs: Sequence) -> BilinearForm:
        n = self.algebra.dim
        g = zeros(n, n, rational=True)
        for c, b in zip(coeffs, self.basis):
            g = g + as_fraction(c) * b.gram
        return BilinearForm(g)

    def generic(self, attempts: int = 8) -> BilinearForm:
        """An element of maximal rank, from deterministic coefficient probes."""
        n = self.algebra.dim
        if not self.basis:
            return BilinearForm(zeros(n, n, rational=True))
        best = None
        for t in range(2, 2 + attempts):
            B = self.combine([t**i for i in range(len(self.basis))])
            if best is None or B.rank > best.rank:
                best = B
            if best.rank == n:
                break
        return best

    def contains(self, B: BilinearForm) -> bool:
        if not self.basis:
            return is_zero(B.gram)
        cols = [list(b.gram.flat) for b in self.basis]
        target = list(B.gram.flat)
        return rank(rat_matrix(cols)) == rank(rat_matrix(cols + [target]))

    def has_nondegenerate(self) -> bool:
        return self.generic().is_nondegenerate


def invariant_symmetric_forms(L: LieAlgebra) -> InvariantFormSpace:
    """All symmetric B with ``B([x,y],z) + B(y,[x,z]) = 0``, as a kernel."""
    _require_valid(L)
    n = L.dim
    unknowns = [(p, q) for p in range(n) for q in range(p, n)]
    pos = {u: i for i, u in enumerate(unknowns)}

    def var(p, q):
        return pos[(p, q) if p <= q else (q, p)]

    c = L.tensor
    rows = []
    for a, b, t in product(range(n), repeat=3):
        row = [Fraction(0)] * len(unknowns)
        for k in range(n):
            if c[a][b][k]:
                row[var(k, t)] += c[a][b][k]
            if c[a][t][k]:
                row[var(b, k)] += c[a][t][k]
        if any(row):
            rows.append(row)
    if rows:
        sols = kernel_basis(rat_matrix(rows))
    else:
        sols = [tuple(Fraction(int(i == j)) for i in range(len(unknowns))) for j in range(len(unknowns))]
    basis = []
    for s in sols:
        g = zeros(n, n, rational=True)
        for (p, q), v in zip(unknowns, s):
            g[p, q] = v
            g[q, p] = v
        basis.append(BilinearForm(g))
    return InvariantFormSpace(L, basis)


def nu_form(L: LieAlgebra, B: BilinearForm) -> InvariantForm:
    """The trilinear form ``nu(x, y, z) = B([x, y], z)``.

    Raises NotInvariantError when nu is not alternating, which happens
    exactly when B is not ad-invariant.
    """
    if B.dim != L.dim:
        raise ValueError("form and algebra dimensions differ")
    if not B.is_symmetric:
        raise ValueError("nu requires a symmetric bilinear form")
    n = L.dim
    c = L.tensor
    g = B.gram

    def raw(i, j, k):
        return sum((c[i][j][t] * g[t, k] for t in range(n) if c[i][j][t]), Fraction(0))

    bad = []
    for i, j, k in product(range(n), repeat=3):
        v = raw(i, j, k)
        # antisymmetry in (i, j) is automatic; check the swap of j and k
        if v != -raw(i, k, j):
            bad.append((i, j, k))
    if bad:
        raise NotInvariantError("nu is not alternating; B is not ad-invariant", bad)
    nu = InvariantForm.scalar(3, n, {t: raw(*t) for t in combinations(range(n), 3)})
    if not is_closed(L, nu):
        raise AssertionError("nu built from an invariant form must be closed")
    return nu


def double_extension(U_form: BilinearForm, h) -> tuple[LieAlgebra, BilinearForm]:
    """Double extension of the abelian metric algebra (U, <,>) by a skew map h.

    Basis order: ``f`` (spanning V*), ``e1..em`` (U), ``z`` (spanning V).
    Brackets: ``[z, u] = h(u)`` and ``[u1, u2] = <h u1, u2> f``.  The
    scalar product is ``<u1,u2> + v1 v2 + v1'(v2) + v2'(v1)``.
    """
    h = rat_matrix(h)
    G = U_form.gram
    m = U_form.dim
    if h.shape != (m, m):
        raise ValueError("h must be an m x m matrix")
    if not U_form.is_symmetric:
        raise ValueError("scalar product on U must be symmetric")
    if not U_form.is_nondegenerate:
        raise ValueError("scalar product on U is degenerate")
    w = h.T @ G  # w[a, b] = <h e_a, e_b>
    bad = [(a, b, w[a, b], w[b, a]) for a in range(m) for b in range(a + 1, m) if w[a, b] != -w[b, a]]
    bad += [(a, a, w[a, a], w[a, a]) for a in range(m) if w[a, a] != 0]
    if bad:
        a, b, wab, wba = bad[0]
        raise NotSkewError(
            f"h is not skew: w(e{a + 1}, e{b + 1}) = {format_fraction(wab)} "
            f"but w(e{b + 1}, e{a + 1}) = {format_fraction(wba)}",
            bad,
        )
    n = m + 2
    f_idx, z_idx = 0, m + 1
    names = ("f",) + tuple(f"e{i + 1}" for i in range(m)) + ("z",)
    sc = {}
    for a in range(m):
        # [z, e_a] = h e_a; stored with i < j as [e_a, z] = -h e_a
        coeffs = {1 + t: -h[t, a] for t in range(m) if h[t, a]}
        if coeffs:
            sc[(1 + a, z_idx)] = coeffs
        for b in range(a + 1, m):
            if w[a, b]:
                sc[(1 + a, 1 + b)] = {f_idx: w[a, b]}
    L = LieAlgebra(n, names, sc)
    g = zeros(n, n, rational=True)
    g[1 : m + 1, 1 : m + 1] = G
    g[z_idx, z_idx] = Fraction(1)
    g[f_idx, z_idx] = g[z_idx, f_idx] = Fraction(1)
    B = BilinearForm(g)
    if not validate(L).jacobi_holds:
        raise AssertionError("double extension failed the Jacobi identity")
    if invariance_defects(L, B) or not B.is_nondegenerate:
        raise AssertionError("double extension scalar product is not an invariant metric")
    return L, B


# -- curvature of invariant connection forms ---------------------------------


def bracket_forms(H: LieAlgebra, a: InvariantForm, b: InvariantForm) -> InvariantForm:
    """``[a, b](x, y) = [a(x), b(y)] - [a(y), b(x)]`` for H-valued 1-forms.

    With this convention ``[theta, theta](x, y) = 2 [theta(x), theta(y)]``.
    """
    if a.degree != 1 or b.degree != 1:
        raise ValueError("bracket_forms takes 1-forms")
    if a.value_dim != H.dim or b.value_dim != H.dim:
        raise ValueError("form values do not match the value algebra")
    a._check_compatible(b)
    n = a.algebra_dim
    out = {}
    for x, y in combinations(range(n), 2):
        p = H.bracket(a(x), b(y))
        q = H.bracket(a(y), b(x))
        out[(x, y)] = tuple(s - t for s, t in zip(p, q))
    return InvariantForm(2, n, H.dim, out)


def curvature(L: LieAlgebra, H: LieAlgebra, theta: InvariantForm) -> InvariantForm:
    """``d theta + 1/2 [theta, theta]`` for an H-valued invariant 1-form on L."""
    if theta.degree != 1 or theta.algebra_dim != L.dim:
        raise ValueError("theta must be a 1-form on L")
    if theta.value_dim != H.dim:
        raise ValueError(f"theta has {theta.value_dim} value components but H has dimension {H.dim}")
    return ce_apply(L, theta) + bracket_forms(H, theta, theta).scale(Fraction(1, 2))


def curving(L: LieAlgebra, H: LieAlgebra, theta: InvariantForm, alpha: InvariantForm) -> InvariantForm:
    """Curving of theta relative to the reference connection alpha."""
    theta._check_compatible(alpha)
    return curvature(L, H, theta) - curvature(L, H, alpha)


def curving_law_residual(
    L: LieAlgebra, H: LieAlgebra, theta: InvariantForm, alpha: InvariantForm, base: InvariantForm | None = None
) -> InvariantForm:
    """Residual of the transformation law for a shift ``theta -> theta + alpha``.

    ``K(theta + alpha) - K(theta) - d alpha - 1/2([alpha,alpha] + [theta,alpha] + [alpha,theta])``
    where ``K`` is the curving relative to ``base`` (zero by default).
    Vanishes identically.
    """
    if base is None:
        base = InvariantForm.zero(1, L.dim, H.dim)
    lhs = curving(L, H, theta + alpha, base)
    rhs = (
        curving(L, H, theta, base)
        + ce_apply(L, alpha)
        + (bracket_forms(H, alpha, alpha) + bracket_forms(H, theta, alpha) + bracket_forms(H, alpha, theta)).scale(
            Fraction(1, 2)
        )
    )
    return lhs - rhs


def is_morphism(f, source: LieAlgebra, target: LieAlgebra) -> bool:
    """Whether the matrix f (target.dim x source.dim) preserves brackets."""
    f = rat_matrix(f)
    if f.shape != (target.dim, source.dim):
        raise ValueError("morphism matrix has the wrong shape")
    cols = [tuple(f[:, i]) for i in range(source.dim)]
    for i, j in combinations(range(source.dim), 2):
        lhs = tuple(f @ np.array(source.bracket(source.basis_vector(i), source.basis_vector(j)), dtype=object))
        if lhs != target.bracket(cols[i], cols[j]):
            return False
    return True


def pushforward_form(f, theta: InvariantForm, source: LieAlgebra, target: LieAlgebra) -> InvariantForm:
    """Apply a verified Lie algebra morphism to the values of theta."""
    f = rat_matrix(f)
    if theta.value_dim != source.dim:
        raise ValueError("theta values do not live in the source algebra")
    if not is_morphism(f, source, target):
        raise NotMorphismError("map does not preserve brackets")
    out = {}
    for key, vec in theta.components.items():
        out[key] = tuple(sum((f[r, c] * vec[c] for c in range(source.dim) if vec[c]), Fraction(0)) for r in range(target.dim))
    return InvariantForm(theta.degree, theta.algebra_dim, target.dim, out)
