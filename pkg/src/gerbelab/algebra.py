"""Exact linear algebra over Q and Z.

Matrices are 2-D numpy arrays of ``dtype=object`` holding either
:class:`fractions.Fraction` (rational matrices) or Python ``int``
(integer matrices), so no arithmetic ever rounds.  Rank and kernels use
fraction-free (Bareiss) elimination; integer problems go through the
Smith normal form.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple

import numpy as np

__all__ = [
    "SmithForm",
    "as_fraction",
    "cokernel_invariants",
    "determinant",
    "format_fraction",
    "identity",
    "int_matrix",
    "inverse",
    "is_zero",
    "kernel_basis",
    "matrix_from_json",
    "matrix_to_json",
    "rank",
    "rat_matrix",
    "rat_vector",
    "smith_normal_form",
    "solve",
    "solve_integer",
    "zeros",
]


def as_fraction(x) -> Fraction:
    """Coerce ``x`` to a Fraction.  Accepts ints, Fractions and "p/q" strings.

    Floats are rejected: silently converting them would smuggle rounding
    into an exact pipeline.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_fraction(q) -> str:
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _shape_of(rows, shape):
    rows = [list(r) for r in rows]
    if shape is None:
        ncols = len(rows[0]) if rows else 0
        shape = (len(rows), ncols)
    if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
        raise ValueError(f"ragged or mis-shaped matrix data for shape {shape}")
    return rows, shape


def rat_matrix(rows, shape=None) -> np.ndarray:
    """Build a rational matrix (object array of Fractions)."""
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        shape = rows.shape
        rows = rows.tolist()
    rows, shape = _shape_of(rows, shape)
    out = np.empty(shape, dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = as_fraction(x)
    return out


def int_matrix(rows, shape=None) -> np.ndarray:
    """Build an integer matrix (object array of Python ints)."""
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        shape = rows.shape
        rows = rows.tolist()
    rows, shape = _shape_of(rows, shape)
    out = np.empty(shape, dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            q = as_fraction(x)
            if q.denominator != 1:
                raise ValueError(f"non-integral entry {x!r} in integer matrix")
            out[i, j] = q.numerator
    return out


def rat_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_fraction(v) for v in values)


def identity(n: int, rational: bool = False) -> np.ndarray:
    one = Fraction(1) if rational else 1
    zero = Fraction(0) if rational else 0
    out = np.full((n, n), zero, dtype=object)
    for i in range(n):
        out[i, i] = one
    return out


def zeros(nrows: int, ncols: int, rational: bool = False) -> np.ndarray:
    return np.full((nrows, ncols), Fraction(0) if rational else 0, dtype=object)


def is_zero(m) -> bool:
    return all(x == 0 for x in np.asarray(m, dtype=object).flat)


# -- fraction-free elimination ----------------------------------------------


def _integer_rows(m) -> list[list[int]]:
    """Clear denominators row by row; row scaling preserves rank and kernel."""
    m = np.asarray(m, dtype=object)
    rows = []
    for r in m.tolist():
        r = [as_fraction(x) for x in r]
        den = lcm(*(x.denominator for x in r)) if r else 1
        rows.append([int(x * den) for x in r])
    return rows


def _bareiss_echelon(a: list[list[int]]) -> tuple[list[int], int]:
    """Fraction-free row echelon form, in place.

    Returns the pivot columns and the number of row swaps.
    """
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    prev = 1
    r = 0
    swaps = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[p], a[r] = a[r], a[p]
            swaps += 1
        piv = a[r][c]
        for i in range(r + 1, nrows):
            lead = a[i][c]
            row_i, row_r = a[i], a[r]
            for j in range(c + 1, ncols):
                q, rem = divmod(piv * row_i[j] - lead * row_r[j], prev)
                assert rem == 0, "Bareiss division must be exact"
                row_i[j] = q
            row_i[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return pivots, swaps


def rank(m) -> int:
    """Rank over Q."""
    m = np.asarray(m, dtype=object)
    if m.size == 0:
        return 0
    pivots, _ = _bareiss_echelon(_integer_rows(m))
    return len(pivots)


def kernel_basis(m) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel ``{v : m v = 0}``.

    One vector per free column, with that free variable set to 1 and the
    other free variables 0.
    """
    m = np.asarray(m, dtype=object)
    ncols = m.shape[1]
    if m.shape[0] == 0 or ncols == 0:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    a = _integer_rows(m)
    pivots, _ = _bareiss_echelon(a)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            s = sum((a[r][j] * x[j] for j in range(pc + 1, ncols) if a[r][j]), Fraction(0))
            x[pc] = -s / a[r][pc]
        basis.append(tuple(x))
    return basis


def determinant(m):
    """Exact determinant; an ``int`` for integer input, else a Fraction."""
    m = np.asarray(m, dtype=object)
    n, k = m.shape
    if n != k:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    integral = all(as_fraction(x).denominator == 1 for x in m.flat)
    scale = Fraction(1)
    rows = []
    for r in m.tolist():
        r = [as_fraction(x) for x in r]
        den = lcm(*(x.denominator for x in r))
        scale *= den
        rows.append([int(x * den) for x in r])
    pivots, swaps = _bareiss_echelon(rows)
    if len(pivots) < n:
        det = Fraction(0)
    else:
        det = Fraction(rows[n - 1][n - 1] * (-1) ** swaps) / scale
    return int(det) if integral else det


def inverse(m) -> np.ndarray:
    """Exact inverse of a square rational matrix (Gauss-Jordan over Q)."""
    m = rat_matrix(m)
    n = m.shape[0]
    if m.shape[1] != n:
        raise ValueError("inverse of a non-square matrix")
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m.tolist())]
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return rat_matrix([r[n:] for r in a], shape=(n, n))


def solve(m, b) -> tuple[Fraction, ...] | None:
    """One rational solution of ``m x = b``, or None if inconsistent."""
    m = rat_matrix(m)
    b = rat_vector(b)
    nrows, ncols = m.shape
    aug = rat_matrix([list(r) + [bi] for r, bi in zip(m.tolist(), b)], shape=(nrows, ncols + 1))
    a = _integer_rows(aug)
    pivots, _ = _bareiss_echelon(a)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r in range(len(pivots) - 1, -1, -1):
        pc = pivots[r]
        s = sum((a[r][j] * x[j] for j in range(pc + 1, ncols) if a[r][j]), Fraction(0))
        x[pc] = (a[r][ncols] - s) / a[r][pc]
    return tuple(x)


# -- Smith normal form -------------------------------------------------------


class SmithForm(NamedTuple):
    """``U @ m @ V == D`` with U, V unimodular and D in Smith form."""

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        k = min(self.D.shape)
        return [self.D[i, i] for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _id_rows(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(m) -> SmithForm:
    """Smith normal form with transforms, by iterated gcd reduction.

    The pivot is always the entry of least nonzero absolute value in the
    active block (ties: lowest row, then lowest column), so the output is
    deterministic.  The decomposition is re-verified before returning.
    """
    m = int_matrix(m)
    nr, nc = m.shape
    a = [list(r) for r in m.tolist()]
    u = _id_rows(nr)
    v = _id_rows(nc)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(min(nr, nc)):
        while True:
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    x = a[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = a[t][t]
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            if any(a[i][t] for i in range(t + 1, nr)) or any(a[t][j] for j in range(t + 1, nc)):
                continue
            bad = next(
                (i for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if best is None:
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    out = SmithForm(int_matrix(u, (nr, nr)), int_matrix(a, (nr, nc)), int_matrix(v, (nc, nc)))
    _verify_smith(m, out)
    return out


def _verify_smith(m, snf: SmithForm) -> None:
    U, D, V = snf
    if not np.array_equal(U @ m @ V, D):
        raise AssertionError("Smith decomposition does not reproduce D")
    if abs(determinant(U)) != 1 or abs(determinant(V)) != 1:
        raise AssertionError("Smith transforms are not unimodular")
    nr, nc = D.shape
    for i in range(nr):
        for j in range(nc):
            if i != j and D[i, j] != 0:
                raise AssertionError("Smith form is not diagonal")
    diag = snf.diagonal
    for x, y in itertools.pairwise(diag):
        if x < 0 or (x == 0 and y != 0) or (x and y % x):
            raise AssertionError(f"divisibility chain broken: {diag}")


def cokernel_invariants(m) -> tuple[int, list[int]]:
    """Invariant factors of ``Z^rows / m Z^cols``: (free rank, torsion > 1)."""
    snf = smith_normal_form(m)
    r = snf.rank
    torsion = [d for d in snf.diagonal[:r] if d > 1]
    return snf.D.shape[0] - r, torsion


def solve_integer(m, b, modulus=None) -> tuple | None:
    """Solve ``m x = b`` over Z, Z/modulus, or Q/Z.

    ``modulus`` is None for Z, an int for Z/modulus, or ``1`` together with
    rational ``b`` for Q/Z (equations hold modulo 1).  Returns a solution
    vector (ints, residues, or Fractions in [0, 1)) or None.
    """
    m = int_matrix(m)
    nr, nc = m.shape
    U, D, V = smith_normal_form(m)
    diag = [D[i, i] for i in range(min(nr, nc))]
    if modulus == 1:
        rhs = [as_fraction(x) for x in b]
    else:
        rhs = [int(as_fraction(x)) for x in b]
    s = [sum((U[i, j] * rhs[j] for j in range(nr)), 0) for i in range(nr)]
    y = [0] * nc
    for i in range(nr):
        d = diag[i] if i < len(diag) else 0
        si = s[i]
        if modulus is None:
            if d == 0:
                if si != 0:
                    return None
            elif si % d:
                return None
            else:
                y[i] = si // d
        elif modulus == 1:
            if d == 0:
                if Fraction(si).denominator != 1:
                    return None
            else:
                y[i] = Fraction(si) / d
        else:
            g = gcd(d, modulus)
            if si % g:
                return None
            if d % modulus:
                mg = modulus // g
                y[i] = (si // g) * pow(d // g, -1, mg) % mg
    x = [sum((V[i, j] * y[j] for j in range(nc)), 0) for i in range(nc)]
    if modulus == 1:
        x = [Fraction(xi) % 1 for xi in x]
    elif modulus is not None:
        x = [xi % modulus for xi in x]
    return tuple(x)


# -- serialization -----------------------------------------------------------


def matrix_to_json(m) -> list[list[str]]:
    return [[format_fraction(x) for x in row] for row in np.asarray(m, dtype=object).tolist()]


def matrix_from_json(data, integral: bool = False, shape: Sequence[int] | None = None) -> np.ndarray:
    return int_matrix(data, shape) if integral else rat_matrix(data, shape)
