"""Command-line front end.

Every subcommand reads one JSON input document (``--input PATH`` or
``--fixture NAME``) and prints a report, as text or as JSON.  Exit codes:
0 on success, 1 when a mathematical check fails, 2 on malformed input.
Exact rationals are written as strings (``"p/q"``).
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import cech, groups, holonomy, lie, orbifold
from .algebra import format_fraction, rat_matrix

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID = 0, 1, 2
STATUS = {EXIT_OK: "ok", EXIT_CHECK_FAILED: "check-failed", EXIT_INVALID: "invalid-input"}

# Mathematical "no" answers; everything else that escapes a handler as
# ValueError/KeyError/TypeError is treated as bad input.
CHECK_ERRORS = (
    lie.InvalidAlgebraError,
    lie.NotInvariantError,
    lie.NotSkewError,
    lie.NotMorphismError,
    cech.NotCocycleError,
    holonomy.SurfaceError,
    orbifold.NonIntegralAverageError,
)
INPUT_ERRORS = (ValueError, KeyError, TypeError, IndexError, OSError, json.JSONDecodeError)


@dataclass
class CommandRequest:
    command: tuple[str, ...]
    document: object = None
    output_format: str = "text"
    tolerance: float = orbifold.DEFAULT_TOLERANCE
    max_group_order: int = groups.DEFAULT_MAX_ORDER
    options: dict = field(default_factory=dict)


@dataclass
class RunReport:
    command: tuple[str, ...]
    status: str
    payload: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)
    lines: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return {v: k for k, v in STATUS.items()}[self.status]

    def to_json(self) -> dict:
        return {
            "command": " ".join(self.command),
            "status": self.status,
            "payload": self.payload,
            "diagnostics": self.diagnostics,
        }

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2, sort_keys=True)
        out = list(self.lines)
        if self.diagnostics:
            out.append(f"{len(self.diagnostics)} diagnostic(s):")
            out += [f"  - {d}" for d in self.diagnostics]
        out.append(f"status: {self.status}")
        return "\n".join(out)


class _Fail(Exception):
    """Raised by handlers to report a failed mathematical check with a payload."""

    def __init__(self, payload, diagnostics, lines=()):
        super().__init__("; ".join(map(str, diagnostics)))
        self.payload, self.diagnostics, self.lines = payload, diagnostics, list(lines)


# -- helpers -----------------------------------------------------------------------


def _frac(x) -> str:
    return format_fraction(x)


def _require(doc, *keys):
    if not isinstance(doc, Mapping):
        raise ValueError("input document must be a JSON object")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise KeyError(f"input document is missing {missing}")


def _nerve(doc):
    _require(doc, "facets")
    facets = doc["facets"]
    if not isinstance(facets, list) or not facets:
        raise ValueError("'facets' must be a non-empty list of vertex lists")
    return cech.nerve_from_facets(facets)


def _coeffs(doc, default="Z"):
    return cech.Coefficients.parse(str(doc.get("coefficients", default)))


def _matrix_text(m) -> str:
    return "[" + "; ".join(" ".join(_frac(x) for x in row) for row in m) + "]"


def _matrix_json(m):
    return [[_frac(x) for x in row] for row in m]


def _algebra(doc):
    return lie.LieAlgebra.from_json(doc["algebra"] if isinstance(doc, Mapping) and "algebra" in doc else doc)


# -- lie ---------------------------------------------------------------------------


def lie_validate(req):
    L = _algebra(req.document)
    v = lie.validate(L)
    payload = {
        "dim": L.dim,
        "basis": list(L.basis_names),
        "jacobi": v.jacobi_holds,
        "nilpotency_class": v.nilpotency_class,
        "integral": v.integral,
    }
    lines = [
        f"Lie algebra of dimension {L.dim} on basis {', '.join(L.basis_names)}",
        f"Jacobi identity: {'holds' if v.jacobi_holds else 'fails'}",
        f"nilpotency class: {v.nilpotency_class if v.nilpotency_class is not None else 'not nilpotent'}",
        f"integral structure constants: {v.integral}",
    ]
    if not v.jacobi_holds:
        diags = [
            f"Jacobi fails on ({L.basis_names[i]}, {L.basis_names[j]}, {L.basis_names[k]}): defect "
            + "(" + ", ".join(_frac(x) for x in d) + ")"
            for i, j, k, d in v.violations
        ]
        raise _Fail(payload, diags, lines)
    return payload, lines


def lie_betti(req):
    L = _algebra(req.document)
    b = lie.betti_numbers(L)
    lines = ["k  b_k"] + [f"{k}  {x}" for k, x in enumerate(b)]
    lines.append("betti: " + ",".join(map(str, b)))
    return {"dim": L.dim, "betti": b, "euler_characteristic": sum((-1) ** k * x for k, x in enumerate(b))}, lines


def lie_invforms(req):
    L = _algebra(req.document)
    space = lie.invariant_symmetric_forms(L)
    generic = space.generic()
    payload = {
        "dimension": space.dimension,
        "basis": [_matrix_json(b.gram) for b in space.basis],
        "ranks": space.ranks,
        "generic_rank": generic.rank,
        "has_nondegenerate": generic.is_nondegenerate,
    }
    lines = [f"invariant symmetric forms: dimension {space.dimension}"]
    lines += [f"  B{i}: {_matrix_text(b.gram)} (rank {b.rank})" for i, b in enumerate(space.basis)]
    lines.append(f"non-degenerate member: {'yes' if generic.is_nondegenerate else 'no'} (max rank {generic.rank})")
    return payload, lines


def _algebra_and_metric(doc):
    """Either an explicit algebra (+ optional form) or double-extension data."""
    if isinstance(doc, Mapping) and "h" in doc and "form" in doc and "algebra" not in doc:
        return lie.double_extension(lie.BilinearForm(rat_matrix(doc["form"])), doc["h"])
    L = _algebra(doc)
    if isinstance(doc, Mapping) and "form" in doc:
        return L, lie.BilinearForm(rat_matrix(doc["form"]))
    space = lie.invariant_symmetric_forms(L)
    return L, space.generic()


def lie_nu(req):
    L, B = _algebra_and_metric(req.document)
    nu = lie.nu_form(L, B)
    names = L.basis_names
    lines = [f"form: {_matrix_text(B.gram)}", "nu(x, y, z) = B([x, y], z):"]
    lines += [f"  nu({', '.join(names[i] for i in k)}) = {_frac(v[0])}" for k, v in nu.components.items()]
    if nu.is_zero():
        lines.append("  (identically zero)")
    closed = lie.is_closed(L, nu)
    lines.append(f"closed: {closed}")
    return {"form": _matrix_json(B.gram), "nu": nu.to_json(), "closed": closed, "nonzero": not nu.is_zero()}, lines


def lie_doubleext(req):
    doc = req.document
    _require(doc, "form", "h")
    try:
        L, B = lie.double_extension(lie.BilinearForm(rat_matrix(doc["form"])), doc["h"])
    except lie.NotSkewError as exc:
        pairs = [{"a": a + 1, "b": b + 1, "w_ab": _frac(x), "w_ba": _frac(y)} for a, b, x, y in exc.pairs]
        raise _Fail({"rejected": True, "antisymmetry_failures": pairs}, [str(exc)], ["h rejected: not skew"]) from None
    nu = lie.nu_form(L, B)
    names = L.basis_names
    lines = [f"double extension of dimension {L.dim} on basis {', '.join(names)}", "brackets:"]
    for (i, j), coeffs in L.structure_constants.items():
        rhs = " + ".join(f"{_frac(c)} {names[k]}" for k, c in sorted(coeffs.items()))
        lines.append(f"  [{names[i]}, {names[j]}] = {rhs}")
    lines.append(f"invariant metric: {_matrix_text(B.gram)}")
    lines += [f"  nu({', '.join(names[i] for i in k)}) = {_frac(v[0])}" for k, v in nu.components.items()]
    payload = {"algebra": L.to_json(), "metric": _matrix_json(B.gram), "nu": nu.to_json(), "rejected": False}
    return payload, lines


def lie_curvature(req):
    doc = req.document
    _require(doc, "algebra", "theta")
    L = lie.LieAlgebra.from_json(doc["algebra"])
    H = lie.LieAlgebra.from_json(doc["values"]) if "values" in doc else L
    theta = lie.InvariantForm.from_json(doc["theta"])
    omega = lie.curvature(L, H, theta)
    payload = {"curvature": omega.to_json()}
    lines = ["curvature d theta + 1/2 [theta, theta]:"]
    lines += [
        f"  ({L.basis_names[i]}, {L.basis_names[j]}) -> (" + ", ".join(_frac(x) for x in v) + ")"
        for (i, j), v in omega.components.items()
    ]
    if omega.is_zero():
        lines.append("  flat")
    if "alpha" in doc:
        alpha = lie.InvariantForm.from_json(doc["alpha"])
        K = lie.curving(L, H, theta, alpha)
        payload["curving"] = K.to_json()
        lines.append(f"curving relative to alpha: {len(K.components)} nonzero component(s)")
    return payload, lines


# -- orbifold ----------------------------------------------------------------------


def _group(doc):
    return groups.FiniteGroup.from_json(doc["group"] if isinstance(doc, Mapping) and "group" in doc else doc)


def orbifold_classes(req):
    G = _group(req.document)
    lab = G.labels
    classes = groups.conjugacy_classes(G)
    payload = {
        "order": G.order,
        "abelian": G.is_abelian,
        "conjugacy_classes": [[lab[x] for x in c] for c in classes],
        "centralizer_orders": [len(groups.centralizer(G, c[0])) for c in classes],
    }
    lines = [f"group of order {G.order}{' (abelian)' if G.is_abelian else ''}", f"{len(classes)} conjugacy classes:"]
    lines += [f"  [{', '.join(lab[x] for x in c)}] centralizer order {len(groups.centralizer(G, c[0]))}" for c in classes]
    sub = groups.subgroup_classes(G, req.max_group_order)
    payload["subgroup_classes"] = [
        {"order": len(orbit[0]), "conjugates": len(orbit), "representative": [lab[x] for x in sorted(orbit[0])]} for orbit in sub
    ]
    lines.append(f"{len(sub)} conjugacy classes of subgroups (orders {', '.join(str(len(o[0])) for o in sub)})")
    return payload, lines


def orbifold_atlas(req):
    atlas = orbifold.ChartAtlas.from_json(req.document)
    report = orbifold.atlas_check(atlas)
    payload = {"checked": [list(t) for t in report.checked], "violations": len(report.violations)}
    lines = [f"checked {len(report.checked)} triple(s) of charts"]
    if not report.ok:
        diags = []
        for x, y, z, g, l, r in report.violations:
            G, Gz = atlas.charts[x], atlas.charts[z]
            diags.append(f"({x},{y},{z}) at {Gz.labels[g]}: Phi_xy Phi_yz gives {G.labels[l]}, Ad(c) Phi_xz gives {G.labels[r]}")
        raise _Fail(payload, diags, lines)
    lines.append("every transition composes up to its twisting element")
    return payload, lines


def _action(req):
    return orbifold.ToralAction.from_json(req.document)


def orbifold_shift(req):
    A = _action(req)
    G = A.group
    rows, lines = [], ["element  order  shift  log-det (mod 1)"]
    for g in G:
        s = orbifold.degree_shift(A, g, req.tolerance)
        ld = orbifold.log_det_shift(A, g)
        rows.append({"element": G.labels[g], "order": G.element_order(g), "shift": _frac(s), "log_det_mod_1": round(ld % 1.0, 9)})
        lines.append(f"{G.labels[g]}  {G.element_order(g)}  {_frac(s)}  {ld % 1.0:.9f}")
    return {"shifts": rows}, lines


def orbifold_fixed(req):
    A = _action(req)
    G = A.group
    rows, lines = [], ["element  fixed dim  components"]
    for g in G:
        loc = orbifold.fixed_locus(A, g)
        rows.append({"element": G.labels[g], "fixed_dim": loc.fixed_dim, "components": loc.components})
        lines.append(f"{G.labels[g]}  {loc.fixed_dim}  {loc.components}")
    return {"fixed_loci": rows}, lines


def orbifold_sectors(req):
    A = _action(req)
    reps = orbifold.sectors(A, req.tolerance)
    lines = ["class rep  size  fixed dim  components  shift  betti"]
    lines += [
        f"{A.group.labels[s.class_rep]}  {s.class_size}  {s.fixed_dim}  {s.components}  {_frac(s.shift)}  {','.join(map(str, s.betti))}"
        for s in reps
    ]
    return {"sectors": [s.to_json(A.group) for s in reps]}, lines


def orbifold_cr(req):
    A = _action(req)
    table = orbifold.cr_cohomology(A, req.tolerance)
    lines = ["degree  dimension"] + [f"{_frac(d)}  {n}" for d, n in table.items()]
    lines.append(f"total: {sum(table.values())}")
    return {"degrees": {_frac(d): n for d, n in table.items()}, "total": sum(table.values())}, lines


# -- cech --------------------------------------------------------------------------


def cech_h(req):
    doc = req.document
    N = _nerve(doc)
    coeffs = _coeffs(doc)
    degrees = doc.get("degrees", list(range(N.dim + 1)))
    rows = []
    lines = [f"nerve: f-vector {N.f_vector()}, Euler characteristic {N.euler_characteristic()}", f"coefficients: {coeffs}"]
    for k in degrees:
        H = cech.cohomology(N, int(k), coeffs)
        rows.append({"degree": int(k), "rank": H.betti, "torsion": list(H.torsion), "group": str(H)})
        lines.append(f"H^{k} = {H}")
    return {"f_vector": N.f_vector(), "coefficients": str(coeffs), "cohomology": rows}, lines


def _group_cochain(doc, key, degree, G):
    _require(doc, key)
    return cech.GroupCochain.from_json(degree, G, doc[key])


def cech_check2(req):
    doc = req.document
    N = _nerve(doc)
    if "group" in doc:
        G = groups.FiniteGroup.from_json(doc["group"])
        c = _group_cochain(doc, "c", 2, G)
        lam = None
        if "lambda" in doc:
            lam = {}
            for e, m in doc["lambda"].items():
                f = [None] * G.order
                for a, b in m.items():
                    f[G.index(a)] = G.index(b)
                if None in f:
                    raise ValueError(f"band twist on edge {e} is not total")
                lam[cech.parse_simplex(e)] = tuple(f)
        rep = cech.nonabelian_2cocycle_check(N, c, lam)
        diags = [f"tetrahedron {cech.simplex_key(s)}: {G.labels[l]} != {G.labels[r]}" for s, l, r in rep.tetra_violations]
        diags += [f"triangle {cech.simplex_key(s[0])}: band twists do not compose up to Ad(c)" for s in rep.triangle_violations]
    else:
        c = cech.Cochain.from_json(2, _coeffs(doc), doc["c"])
        d = cech.coboundary(N, c)
        diags = [f"tetrahedron {cech.simplex_key(s)}: dc = {_frac(v)}" for s, v in d.values.items() if v]
    payload = {"tetrahedra": N.count(3), "triangles": N.count(2), "violations": len(diags)}
    lines = [f"checked {N.count(3)} tetrahedra and {N.count(2)} triangles"]
    if diags:
        raise _Fail(payload, diags, lines)
    lines.append("2-cocycle law holds")
    return payload, lines


def cech_equiv(req):
    doc = req.document
    N = _nerve(doc)
    coeffs = _coeffs(doc)
    _require(doc, "c", "c2")
    k = int(doc.get("degree", 2))
    c = cech.Cochain.from_json(k, coeffs, doc["c"])
    c2 = cech.Cochain.from_json(k, coeffs, doc["c2"])
    b = cech.are_cohomologous(N, c, c2)
    payload = {"cohomologous": b is not None, "witness": b.to_json() if b is not None else None}
    if b is None:
        raise _Fail(payload, [f"no {k - 1}-cochain b over {coeffs} satisfies c + db = c2"], ["not cohomologous"])
    return payload, ["cohomologous; witness b with c + db = c2:"] + [f"  b({s}) = {v}" for s, v in b.to_json().items()]


def cech_induce(req):
    doc = req.document
    _require(doc, "source", "target", "map", "c")
    S = groups.FiniteGroup.from_json(doc["source"])
    T = groups.FiniteGroup.from_json(doc["target"])
    f = [None] * S.order
    for a, b in doc["map"].items():
        f[S.index(a)] = T.index(b)
    if None in f:
        raise ValueError("homomorphism is not defined on every element")
    if not groups.is_homomorphism(f, S, T):
        raise _Fail({"homomorphism": False}, ["map does not preserve products"], ["not a homomorphism"])
    k = int(doc.get("degree", 2))
    c = cech.GroupCochain.from_json(k, S, doc["c"])
    out = cech.induced_cocycle(f, c, T)
    payload = {"homomorphism": True, "induced": out.to_json()}
    lines = ["induced cochain:"] + [f"  {s}: {v}" for s, v in out.to_json().items()]
    if k == 2 and "facets" in doc:
        N = _nerve(doc)
        if cech.nonabelian_2cocycle_check(N, c).ok:
            ok = cech.nonabelian_2cocycle_check(N, out).ok
            payload["cocycle_preserved"] = ok
            lines.append(f"cocycle law preserved: {ok}")
            if not ok:
                raise _Fail(payload, ["image of a cocycle fails the cocycle law"], lines)
    return payload, lines


def _cyclic_order(G):
    """n when G is literally ``cyclic_group(n)``, else None."""
    C = groups.cyclic_group(G.order)
    return G.order if G.mul == C.mul and G.labels == C.labels else None


def cech_obstruct(req):
    doc = req.document
    N = _nerve(doc)
    ext = cech.GroupExtension.from_json(doc)
    u = _group_cochain(doc, "u", 1, ext.L)
    c = cech.lifting_obstruction(ext, N, u, require_central=False)
    payload = {"central": ext.is_central, "obstruction": c.to_json()}
    lines = [f"extension is {'central' if ext.is_central else 'not central (band twisted by Ad s(u))'}"]
    lines.append(f"obstruction nontrivial on {sum(v != ext.H.identity for v in c.values.values())} of {N.count(2)} triangles")
    m = _cyclic_order(ext.H)
    if m is not None and ext.is_central:
        add = cech.group_cochain_to_additive(c, m)
        b = cech.are_cohomologous(N, cech.Cochain.zero(N, 2, add.coeffs), add)
        payload["class_trivial"] = b is not None
        payload["coboundary_witness"] = b.to_json() if b is not None else None
        lines.append(f"class in H^2(nerve; Z/{m}): {'trivial' if b is not None else 'nonzero'}")
    return payload, lines


# -- gerbe -------------------------------------------------------------------------


def _connection(doc, N):
    _require(doc, "c", "a")
    c = cech.Cochain.from_json(2, cech.QZ, doc["c"])
    a = cech.Cochain.from_json(1, cech.QZ, doc["a"])
    return holonomy.GerbeConnection(c, a)


def gerbe_holonomy(req):
    doc = req.document
    N = _nerve(doc)
    d = holonomy.holonomy_cocycle(N, _connection(doc, N))
    closed = cech.coboundary(N, d).is_zero() if N.count(3) else True
    lines = ["holonomy cocycle d (mod 1):"] + [f"  d({s}) = {v}" for s, v in d.to_json().items()]
    return {"d": d.to_json(), "closed": closed}, lines + [f"closed: {closed}"]


def gerbe_surface(req):
    doc = req.document
    N = _nerve(doc)
    conn = _connection(doc, N)
    if "orientation" in doc:
        surf = holonomy.OrientedSurface(N, doc["orientation"])
    else:
        surf = holonomy.orient_surface(N)
    hol = holonomy.surface_holonomy(conn, surf)
    payload = {
        "orientation": {cech.simplex_key(t): s for t, s in surf.orientation.items()},
        "holonomy": _frac(hol),
    }
    return payload, [f"surface holonomy: {_frac(hol)} mod 1"]


def gerbe_defect(req):
    doc = req.document
    N = _nerve(doc)
    if "alpha" in doc:
        _require(doc, "u", "c")
        data = holonomy.ConnectiveData.from_mappings(doc["alpha"], doc["u"], doc["c"])
        rep = holonomy.connective_consistency(N, data)
        payload = {
            "alpha_edges": {cech.simplex_key(k): _matrix_json(v) for k, v in rep.alpha_edges.items()},
            "defects": {cech.simplex_key(k): _matrix_json(v) for k, v in rep.defects.items()},
        }
        diags = [f"triangle {cech.simplex_key(t)}: residual {_matrix_text(r)}" for t, r in rep.residuals.items() if np.any(r != 0)]
        lines = [f"connective consistency on {N.count(2)} triangle(s)"]
    else:
        _require(doc, "omega", "u")
        rep = holonomy.curvature_defect(N, doc["omega"], doc["u"])
        payload = {"delta": {cech.simplex_key(k): _matrix_json(v) for k, v in rep.delta.items()}}
        diags = [f"triangle {cech.simplex_key(t)}: residual {_matrix_text(r)}" for t, r in rep.residuals.items() if np.any(r != 0)]
        lines = ["curvature defect Delta_ij = Omega_i - u_ij Omega_j u_ij^-1:"]
        lines += [f"  Delta({cech.simplex_key(k)}) = {_matrix_text(v)}" for k, v in rep.delta.items()]
    if diags:
        raise _Fail(payload, diags, lines)
    lines.append("twisted cocycle law holds on every triangle")
    return payload, lines


def gerbe_seq3(req):
    doc = req.document
    N = _nerve(doc)
    _require(doc, "ustar")
    u = cech.Cochain.from_json(1, _coeffs(doc), doc["ustar"])
    res = holonomy.two_sequence_3cocycle(N, u)
    lines = ["c* on triangles:"] + [f"  {s}: {v}" for s, v in res.cochain.to_json().items()]
    payload = {"cstar": res.cochain.to_json(), "closed": res.closed}
    if not res.closed:
        raise _Fail(payload, ["c* is not closed"], lines)
    return payload, lines + ["closed: True"]


def gerbe_seq4(req):
    doc = req.document
    N = _nerve(doc)
    _require(doc, "cstar")
    cs = cech.Cochain.from_json(2, _coeffs(doc), doc["cstar"])
    res = holonomy.two_sequence_4cocycle(N, cs)
    exact = res.exact_witness is not None
    payload = {
        "c": res.cochain.to_json(),
        "closed": res.closed,
        "H3": str(res.cohomology),
        "exact": exact,
    }
    lines = [f"c = dc* on {N.count(3)} tetrahedra, {len(res.cochain.support())} nonzero", f"closed: {res.closed}"]
    lines += [f"H^3 = {res.cohomology}", f"exact: {exact}"]
    return payload, lines


# -- dispatch ----------------------------------------------------------------------


HANDLERS: dict[tuple[str, str], Callable] = {
    ("lie", "validate"): lie_validate,
    ("lie", "betti"): lie_betti,
    ("lie", "invforms"): lie_invforms,
    ("lie", "nu"): lie_nu,
    ("lie", "doubleext"): lie_doubleext,
    ("lie", "curvature"): lie_curvature,
    ("orbifold", "classes"): orbifold_classes,
    ("orbifold", "atlas"): orbifold_atlas,
    ("orbifold", "shift"): orbifold_shift,
    ("orbifold", "fixed"): orbifold_fixed,
    ("orbifold", "sectors"): orbifold_sectors,
    ("orbifold", "cr"): orbifold_cr,
    ("cech", "h"): cech_h,
    ("cech", "check2"): cech_check2,
    ("cech", "equiv"): cech_equiv,
    ("cech", "induce"): cech_induce,
    ("cech", "obstruct"): cech_obstruct,
    ("gerbe", "holonomy"): gerbe_holonomy,
    ("gerbe", "surface"): gerbe_surface,
    ("gerbe", "defect"): gerbe_defect,
    ("gerbe", "seq3"): gerbe_seq3,
    ("gerbe", "seq4"): gerbe_seq4,
}

AREA_HELP = {
    "lie": "Lie algebra cohomology and invariant metrics",
    "orbifold": "group actions, sectors and Chen-Ruan degrees",
    "cech": "cochains, cohomology and obstructions on nerves",
    "gerbe": "discrete holonomy and 2-sequence cocycles",
}

HELP = {
    ("lie", "validate"): "check antisymmetry and the Jacobi identity",
    ("lie", "betti"): "Chevalley-Eilenberg Betti numbers",
    ("lie", "invforms"): "basis of invariant symmetric bilinear forms",
    ("lie", "nu"): "the 3-form B([x,y],z) and its closedness",
    ("lie", "doubleext"): "double extension by a skew derivation",
    ("lie", "curvature"): "curvature of a Lie-algebra-valued 1-form",
    ("orbifold", "classes"): "conjugacy classes and centralizers",
    ("orbifold", "atlas"): "check chart transitions and their composition",
    ("orbifold", "shift"): "degree shift of a matrix of finite order",
    ("orbifold", "fixed"): "fixed locus of one group element on the torus",
    ("orbifold", "sectors"): "twisted sectors with shifts and Betti numbers",
    ("orbifold", "cr"): "Chen-Ruan degree table",
    ("cech", "h"): "simplicial cohomology of a nerve",
    ("cech", "check2"): "2-cocycle law for abelian or group-valued cochains",
    ("cech", "equiv"): "decide whether two cochains are cohomologous",
    ("cech", "induce"): "push a cochain along a coefficient homomorphism",
    ("cech", "obstruct"): "lifting obstruction through a group extension",
    ("gerbe", "holonomy"): "holonomy cocycle from c and a",
    ("gerbe", "surface"): "holonomy over a closed oriented surface",
    ("gerbe", "defect"): "curvature defect or connective consistency",
    ("gerbe", "seq3"): "3-cocycle from a 2-sequence 1-cochain",
    ("gerbe", "seq4"): "4-cocycle from a 2-sequence 2-cochain",
}


def run(req: CommandRequest) -> RunReport:
    """Dispatch one request; never raises for bad input or failed checks."""
    key = tuple(req.command)
    handler = HANDLERS.get(key)
    if handler is None:
        return RunReport(key, STATUS[EXIT_INVALID], diagnostics=[f"unknown command {' '.join(key)}"])
    try:
        payload, lines = handler(req)
    except _Fail as f:
        return RunReport(key, STATUS[EXIT_CHECK_FAILED], f.payload, f.diagnostics, f.lines)
    except CHECK_ERRORS as exc:
        return RunReport(key, STATUS[EXIT_CHECK_FAILED], {}, [f"{type(exc).__name__}: {exc}"])
    except INPUT_ERRORS as exc:
        return RunReport(key, STATUS[EXIT_INVALID], {}, [f"{type(exc).__name__}: {exc}"])
    return RunReport(key, STATUS[EXIT_OK], payload, [], lines)


# -- fixtures ----------------------------------------------------------------------


def _fixture_dir():
    return resources.files("gerbelab") / "fixtures"


def list_fixtures() -> list[dict]:
    """The bundled fixture catalogue, sorted by name."""
    out = []
    for entry in sorted(_fixture_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            doc = json.loads(entry.read_text())
            out.append(
                {
                    "name": doc["name"],
                    "command": " ".join(doc["command"]),
                    "description": doc["description"],
                    "expect_exit": doc.get("expect_exit", 0),
                }
            )
    return out


def load_fixture(name: str) -> dict:
    path = _fixture_dir() / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled fixture named {name!r}")
    return json.loads(path.read_text())


def check_fixtures(fmt: str = "text", **overrides) -> tuple[int, str]:
    """Run every fixture with its own command; compare exit codes."""
    results = []
    for item in list_fixtures():
        fx = load_fixture(item["name"])
        rep = run(CommandRequest(tuple(fx["command"]), fx["input"], **overrides))
        results.append({"name": item["name"], "exit": rep.exit_code, "expected": item["expect_exit"]})
    ok = all(r["exit"] == r["expected"] for r in results)
    if fmt == "json":
        text = json.dumps({"status": "ok" if ok else "check-failed", "results": results}, indent=2, sort_keys=True)
    else:
        text = "\n".join(
            f"{'PASS' if r['exit'] == r['expected'] else 'FAIL'}  {r['name']} (exit {r['exit']}, expected {r['expected']})"
            for r in results
        )
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), text


# -- argument parsing --------------------------------------------------------------


SUBCOMMANDS = {
    "lie": ["validate", "betti", "invforms", "nu", "doubleext", "curvature"],
    "orbifold": ["classes", "atlas", "shift", "fixed", "sectors", "cr"],
    "cech": ["h", "check2", "equiv", "induce", "obstruct"],
    "gerbe": ["holonomy", "surface", "defect", "seq3", "seq4"],
}


def _common(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="PATH", help="JSON input document ('-' for stdin)")
    src.add_argument("--fixture", metavar="NAME", help="use the input of a bundled fixture")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--tolerance", type=float, default=orbifold.DEFAULT_TOLERANCE, help="eigenvalue snapping tolerance")
    p.add_argument("--max-group-order", type=int, default=groups.DEFAULT_MAX_ORDER, help="bound for subgroup enumeration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gerbelab", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="area", required=True)
    for area, ops in SUBCOMMANDS.items():
        ap = top.add_parser(area, help=AREA_HELP[area])
        sub = ap.add_subparsers(dest="op", required=True)
        for op in ops:
            _common(sub.add_parser(op, help=HELP[(area, op)]))
    fp = top.add_parser("fixtures", help="list or check the bundled fixtures")
    fp.add_argument("--format", choices=["text", "json"], default="text")
    fp.add_argument("--check", action="store_true", help="run every fixture and compare exit codes")
    fp.add_argument("--tolerance", type=float, default=orbifold.DEFAULT_TOLERANCE)
    fp.add_argument("--max-group-order", type=int, default=groups.DEFAULT_MAX_ORDER)
    return parser


def _read_document(args):
    if args.fixture:
        return load_fixture(args.fixture)["input"]
    if not args.input:
        raise ValueError("one of --input or --fixture is required")
    if args.input == "-":
        return json.load(sys.stdin)
    with open(args.input, encoding="utf-8") as fh:
        return json.load(fh)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if args.area == "fixtures":
        if args.check:
            code, text = check_fixtures(args.format, tolerance=args.tolerance, max_group_order=args.max_group_order)
            print(text)
            return code
        cat = list_fixtures()
        if args.format == "json":
            print(json.dumps(cat, indent=2, sort_keys=True))
        else:
            width = max(len(c["name"]) for c in cat)
            for c in cat:
                print(f"{c['name']:<{width}}  [{c['command']}]  {c['description']}")
        return EXIT_OK
    command = (args.area, args.op)
    try:
        doc = _read_document(args)
    except INPUT_ERRORS as exc:
        rep = RunReport(command, STATUS[EXIT_INVALID], {}, [f"{type(exc).__name__}: {exc}"])
    else:
        req = CommandRequest(command, doc, args.format, args.tolerance, args.max_group_order)
        rep = run(req)
    print(rep.render(args.format))
    return rep.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
