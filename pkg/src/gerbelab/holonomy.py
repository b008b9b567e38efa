"""Discrete gerbe data on triangulated surfaces and nerves.

U(1) is modelled additively as Q/Z, so holonomies are exact rationals
mod 1.  Non-abelian connective data use rational matrices, with
``u_* x = u x u^-1`` as the action of a transition element on the band's
Lie algebra.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import determinant, inverse, rat_matrix
from .cech import (
    QZ,
    Cochain,
    Coefficients,
    CohomologyGroup,
    MissingValueError,
    Nerve,
    are_cohomologous,
    coboundary,
    cohomology,
    parse_simplex,
)

__all__ = [
    "ConnectiveData",
    "ConnectiveReport",
    "DefectReport",
    "GerbeConnection",
    "OrientedSurface",
    "SequenceCocycle",
    "SurfaceError",
    "connective_consistency",
    "curvature_defect",
    "holonomy_cocycle",
    "orient_surface",
    "surface_holonomy",
    "two_sequence_3cocycle",
    "two_sequence_4cocycle",
]


class SurfaceError(ValueError):
    pass


# -- surfaces ------------------------------------------------------------------


def _edge_signs(tri):
    """Boundary of (i, j, l) = (j, l) - (i, l) + (i, j)."""
    i, j, l = tri
    return {(j, l): 1, (i, l): -1, (i, j): 1}


@dataclass(frozen=True, eq=False)
class OrientedSurface:
    """A closed oriented triangulated surface: a nerve plus triangle signs."""

    nerve: Nerve
    orientation: Mapping[tuple[int, int, int], int]

    def __post_init__(self):
        orient = {parse_simplex(k): int(v) for k, v in self.orientation.items()}
        tris = self.nerve.of_degree(2)
        if self.nerve.count(3):
            raise SurfaceError("nerve has 3-simplices; not a surface")
        if set(orient) != set(tris) or any(v not in (1, -1) for v in orient.values()):
            raise SurfaceError("orientation must assign +1 or -1 to every triangle")
        total: dict = {e: [] for e in self.nerve.of_degree(1)}
        for t in tris:
            for e, s in _edge_signs(t).items():
                total[e].append(orient[t] * s)
        for e, signs in total.items():
            if len(signs) != 2:
                raise SurfaceError(f"edge {e} lies on {len(signs)} triangles; surface is not closed")
            if sum(signs) != 0:
                raise SurfaceError(f"orientations induce the same direction on edge {e}")
        object.__setattr__(self, "orientation", dict(sorted(orient.items())))


def orient_surface(nerve: Nerve) -> OrientedSurface:
    """Coherent orientation by propagation across edges (first triangle +1)."""
    tris = nerve.of_degree(2)
    if not tris:
        raise SurfaceError("no triangles")
    by_edge: dict = {}
    for t in tris:
        for e in _edge_signs(t):
            by_edge.setdefault(e, []).append(t)
    for e in nerve.of_degree(1):
        if len(by_edge.get(e, ())) != 2:
            raise SurfaceError(f"edge {e} lies on {len(by_edge.get(e, ()))} triangles; surface is not closed")
    orient = {}
    for start in tris:
        if start in orient:
            continue
        orient[start] = 1
        queue = deque([start])
        while queue:
            t = queue.popleft()
            for e, s in _edge_signs(t).items():
                (other,) = [x for x in by_edge[e] if x != t]
                want = -orient[t] * s * _edge_signs(other)[e]
                if other not in orient:
                    orient[other] = want
                    queue.append(other)
                elif orient[other] != want:
                    raise SurfaceError("surface is not orientable")
    return OrientedSurface(nerve, orient)


# -- abelian holonomy ---------------------------------------------------------------


@dataclass(frozen=True)
class GerbeConnection:
    """Abelian gerbe data: classifying cocycle c, comparison 1-cochain a, curving primitives h."""

    c: Cochain
    a: Cochain
    h: Cochain | None = None

    def __post_init__(self):
        if self.c.degree != 2 or self.a.degree != 1 or (self.h is not None and self.h.degree != 0):
            raise ValueError("expected degrees c: 2, a: 1, h: 0")


def holonomy_cocycle(nerve: Nerve, g: GerbeConnection) -> Cochain:
    """``d_ijl = -c_ijl - a_jl + a_il - a_ij`` (additive form), in Q/Z.

    Raises AssertionError if c is closed but the result is not.
    """
    c = Cochain(2, QZ, g.c.values)
    a = Cochain(1, QZ, g.a.values)
    for s in nerve.of_degree(2):
        if s not in c.values:
            raise MissingValueError(f"c has no value on {s}")
    d = -(c + coboundary(nerve, a))
    if nerve.count(3) and coboundary(nerve, c).is_zero() and not coboundary(nerve, d).is_zero():
        raise AssertionError("holonomy cocycle of a closed c must be closed")
    return d


def surface_holonomy(g: GerbeConnection, surface: OrientedSurface) -> Fraction:
    """Sum of ``orientation(t) * d(t)`` over the triangles, mod 1."""
    d = holonomy_cocycle(surface.nerve, g)
    return sum((s * d.values[t] for t, s in surface.orientation.items()), Fraction(0)) % 1


# -- non-abelian constant connective data -------------------------------------------


def _act(u, x):
    """Transition element u acting on a Lie algebra matrix: ``u x u^-1``."""
    return u @ x @ inverse(u)


def _matrix_map(data: Mapping, keylen: int) -> dict:
    out = {}
    for k, v in data.items():
        key = parse_simplex(k) if not isinstance(k, int) else (k,)
        if len(key) != keylen:
            raise ValueError(f"key {k} should name a {keylen - 1}-simplex")
        out[key] = rat_matrix(v)
    return out


@dataclass
class DefectReport:
    delta: dict  # edge -> matrix
    residuals: dict  # triangle -> matrix (must vanish)

    @property
    def ok(self) -> bool:
        return all(not np.any(r != 0) for r in self.residuals.values())


def curvature_defect(nerve: Nerve, omega: Mapping, u: Mapping) -> DefectReport:
    """``Delta_ij = Omega_i - u_ij Omega_j u_ij^-1`` and its twisted cocycle law.

    ``omega`` maps vertices to square matrices (a matrix Lie algebra; 1 x 1
    for an abelian band), ``u`` maps edges to invertible matrices.  When
    ``u_ij u_jl = u_il`` on a triangle, ``Delta_ij + u_ij Delta_jl u_ij^-1 - Delta_il``
    vanishes there; the residuals are reported for every triangle.
    """
    om = _matrix_map(omega, 1)
    uu = _matrix_map(u, 2)
    shapes = {m.shape for m in om.values()} | {m.shape for m in uu.values()}
    if len(shapes) != 1 or next(iter(shapes))[0] != next(iter(shapes))[1]:
        raise ValueError(f"dimension mismatch among matrices: {sorted(shapes)}")
    for v in nerve.of_degree(0):
        if v not in om:
            raise MissingValueError(f"no curvature on vertex {v[0]}")
    for e in nerve.of_degree(1):
        if e not in uu:
            raise MissingValueError(f"no transition on edge {e}")
        if determinant(uu[e]) == 0:
            raise ValueError(f"transition on edge {e} is singular")
    delta = {(i, j): om[(i,)] - _act(uu[(i, j)], om[(j,)]) for i, j in nerve.of_degree(1)}
    residuals = {}
    for i, j, l in nerve.of_degree(2):
        residuals[(i, j, l)] = delta[(i, j)] + _act(uu[(i, j)], delta[(j, l)]) - delta[(i, l)]
    return DefectReport(delta, residuals)


@dataclass
class ConnectiveData:
    """Vertexwise connection values, edge transitions and triangle twists.

    Transitions must compose up to the twist: ``u_ij u_jl = u_il c_ijl``.
    """

    alpha: dict
    u: dict
    c: dict

    @classmethod
    def from_mappings(cls, alpha: Mapping, u: Mapping, c: Mapping) -> ConnectiveData:
        return cls(_matrix_map(alpha, 1), _matrix_map(u, 2), _matrix_map(c, 3))


@dataclass
class ConnectiveReport:
    alpha_edges: dict  # edge -> alpha_i - u_ij alpha_j u_ij^-1
    lhs: dict  # triangle -> u_ij.alpha_jl - alpha_il + alpha_ij
    defects: dict  # triangle -> alpha_l - c alpha_l c^-1
    residuals: dict  # triangle -> lhs - u_il.defect

    @property
    def ok(self) -> bool:
        return all(not np.any(r != 0) for r in self.residuals.values())


def connective_consistency(nerve: Nerve, data: ConnectiveData) -> ConnectiveReport:
    """Check the telescoping relation for constant connective data.

    ``u_ij.alpha_jl - alpha_il + alpha_ij = u_il.(alpha_l - c_ijl.alpha_l)``
    with the ``c^-1 dc`` term absent because every datum is constant.
    """
    al, u, c = data.alpha, data.u, data.c
    for t in nerve.of_degree(2):
        i, j, l = t
        try:
            lhs = u[(i, j)] @ u[(j, l)]
            rhs = u[(i, l)] @ c[t]
        except KeyError as exc:
            raise MissingValueError(f"missing connective data near {t}: {exc}") from None
        if not np.array_equal(lhs, rhs):
            raise ValueError(f"u_ij u_jl != u_il c_ijl on triangle {t}")
    alpha_e = {(i, j): al[(i,)] - _act(u[(i, j)], al[(j,)]) for i, j in nerve.of_degree(1)}
    lhs, defects, residuals = {}, {}, {}
    for t in nerve.of_degree(2):
        i, j, l = t
        lhs[t] = _act(u[(i, j)], alpha_e[(j, l)]) - alpha_e[(i, l)] + alpha_e[(i, j)]
        defects[t] = al[(l,)] - _act(c[t], al[(l,)])
        residuals[t] = lhs[t] - _act(u[(i, l)], defects[t])
    return ConnectiveReport(alpha_e, lhs, defects, residuals)


# -- 2-sequences ---------------------------------------------------------------------


@dataclass
class SequenceCocycle:
    cochain: Cochain
    closed: bool
    cohomology: CohomologyGroup | None = None
    exact_witness: Cochain | None = field(default=None)


def two_sequence_3cocycle(nerve: Nerve, ustar: Cochain) -> SequenceCocycle:
    """``c*_ijl = u*_li + u*_ij + u*_jl`` with alternating evaluation."""
    if ustar.degree != 1:
        raise ValueError("u* must be a 1-cochain")
    out = {(i, j, l): ustar(l, i) + ustar(i, j) + ustar(j, l) for i, j, l in nerve.of_degree(2)}
    c = Cochain(2, ustar.coeffs, out)
    closed = coboundary(nerve, c).is_zero() if nerve.count(3) else True
    return SequenceCocycle(c, closed)


def two_sequence_4cocycle(nerve: Nerve, cstar: Cochain, classify: Coefficients | None = None) -> SequenceCocycle:
    """``c_ijlm = (d c*)_ijlm``, checked closed and classified in H^3.

    ``classify`` picks the coefficients for the H^3 computation (default:
    those of c*, with Q/Z replaced by Z).
    """
    if cstar.degree != 2:
        raise ValueError("c* must be a 2-cochain")
    c = coboundary(nerve, cstar)
    closed = coboundary(nerve, c).is_zero() if nerve.count(4) else True
    if not closed:
        raise AssertionError("coboundary of a cochain must be closed")
    coeffs = classify or (cstar.coeffs if cstar.coeffs.kind in ("Z", "Q", "Z/m") else Coefficients("Z"))
    h3 = cohomology(nerve, 3, coeffs)
    witness = are_cohomologous(nerve, Cochain.zero(nerve, 3, c.coeffs), c)
    return SequenceCocycle(c, closed, h3, witness)
