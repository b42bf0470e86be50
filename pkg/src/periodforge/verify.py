"""Independent checks on a TranslationSurface.

Everything here is exact.  Angles are never computed: the total angle at a
vertex is read off by counting how often the ccw sweep of outgoing edge
directions passes the positive real axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .character import Character, omega
from .exactnum import QScalar, QVec2, ZERO, det2, format_scalar
from .surface import TranslationSurface
from .symplectic import act_left, act_right

__all__ = [
    "VerifyError",
    "VerifyReport",
    "Check",
    "structure_errors",
    "vertex_classes",
    "euler_genus",
    "cone_angles",
    "periods",
    "intersection_gram",
    "area",
    "verify",
    "standard_form",
]


class VerifyError(ValueError):
    pass


def standard_form(n: int) -> list[list[int]]:
    J = [[0] * (2 * n) for _ in range(2 * n)]
    for j in range(n):
        J[2 * j][2 * j + 1] = 1
        J[2 * j + 1][2 * j] = -1
    return J


# -- structure --------------------------------------------------------------

def structure_errors(s: TranslationSurface) -> list[str]:
    errs = []
    E = len(s.edges)
    for e, p in enumerate(s.pairing):
        if not 0 <= p < E:
            errs.append(f"edge {e} is unpaired")
        elif p == e:
            errs.append(f"edge {e} is paired with itself")
        elif s.pairing[p] != e:
            errs.append(f"pairing is not an involution at edges {e}, {p}")
        elif s.edges[p].vector != -s.edges[e].vector:
            errs.append(f"edges {e} and {p} are not glued by a translation")
    unbounded = [f.id for f in s.faces if f.unbounded]
    if len(unbounded) > 1:
        errs.append(f"{len(unbounded)} unbounded faces; at most one allowed")
    if unbounded and s.mode != "meromorphic":
        errs.append("abelian surface has an unbounded face")
    for f in s.faces:
        if not f.edges:
            errs.append(f"face {f.id} has no edges")
            continue
        total = QVec2(0, 0)
        for e in f.edges:
            total = total + s.edges[e].vector
        if not total.is_zero():
            errs.append(f"face {f.id} boundary does not close")
        if f.unbounded:
            continue
        if f.vertices is None or len(f.vertices) != len(f.edges):
            errs.append(f"bounded face {f.id} needs one vertex per edge")
            continue
        m = len(f.vertices)
        for k, e in enumerate(f.edges):
            if f.vertices[k] + s.edges[e].vector != f.vertices[(k + 1) % m]:
                errs.append(f"face {f.id}: edge {e} does not join its vertices")
                break
        if _polygon_area(f.vertices).sign() <= 0:
            errs.append(f"face {f.id} does not have positive area")
    return errs


def _polygon_area(verts) -> QScalar:
    acc = ZERO
    m = len(verts)
    for k in range(m):
        acc = acc + det2(verts[k], verts[(k + 1) % m])
    return acc / 2


def _require_valid(s: TranslationSurface) -> None:
    errs = structure_errors(s)
    if errs:
        raise VerifyError("; ".join(errs[:5]))


# -- vertices ---------------------------------------------------------------

def vertex_classes(s: TranslationSurface) -> list[list[int]]:
    """Outgoing edges around each vertex, in counterclockwise order."""
    _require_valid(s)
    seen = [False] * len(s.edges)
    classes = []
    for e0 in range(len(s.edges)):
        if seen[e0]:
            continue
        cyc = []
        e = e0
        while not seen[e]:
            seen[e] = True
            cyc.append(e)
            e = s.ccw_rotation(e)
        if e != e0:
            raise VerifyError("vertex rotation is not a permutation")
        classes.append(cyc)
    return classes


def _class_of(classes) -> dict:
    where = {}
    for ci, cyc in enumerate(classes):
        for pos, e in enumerate(cyc):
            where[e] = (ci, pos)
    return where


def _connected(s: TranslationSurface) -> bool:
    if not s.faces:
        return False
    seen = {0}
    stack = [0]
    while stack:
        f = stack.pop()
        for e in s.faces[f].edges:
            g = s.edges[s.pairing[e]].face
            if g not in seen:
                seen.add(g)
                stack.append(g)
    return len(seen) == len(s.faces)


def euler_genus(s: TranslationSurface) -> tuple[int, int]:
    classes = vertex_classes(s)
    if not _connected(s):
        raise VerifyError("surface is disconnected")
    V, E, F = len(classes), len(s.edges) // 2, len(s.faces)
    chi = V - E + F
    if chi % 2:
        raise VerifyError(f"odd Euler characteristic {chi}")
    return chi, (2 - chi) // 2


def _half(v: QVec2) -> int:
    return 0 if (v.y.sign() > 0 or (v.y.is_zero() and v.x.sign() > 0)) else 1


def _arg_less(a: QVec2, b: QVec2) -> bool:
    """Exact comparison of arguments in [0, 2 pi)."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha < hb
    return det2(a, b).sign() > 0


def cone_angles(s: TranslationSurface) -> list[tuple[int, int]]:
    """``(class index, k)`` with total angle ``2 pi k`` at each vertex class."""
    out = []
    for ci, cyc in enumerate(vertex_classes(s)):
        dirs = [s.edges[e].vector for e in cyc]
        m = len(dirs)
        k = 0
        for i in range(m):
            a, b = dirs[i], dirs[(i + 1) % m]
            if not _arg_less(a, b):
                k += 1
        if k < 1:
            raise VerifyError(f"vertex class {ci} has no positive winding")
        out.append((ci, k))
    return out


# -- cycles -----------------------------------------------------------------

def _check_closed(s: TranslationSurface, path, where) -> None:
    if not path:
        raise VerifyError("empty cycle")
    m = len(path)
    for i in range(m):
        e, f = path[i], path[(i + 1) % m]
        if where[s.next_edge(e)][0] != where[f][0]:
            raise VerifyError(f"cycle breaks between edges {e} and {f}")


def periods(s: TranslationSurface) -> list[QVec2]:
    where = _class_of(vertex_classes(s))
    out = []
    for label, path in s.basis:
        try:
            _check_closed(s, path, where)
        except VerifyError as exc:
            raise VerifyError(f"cycle {label}: {exc}") from None
        total = QVec2(0, 0)
        for e in path:
            total = total + s.edges[e].vector
        out.append(total)
    return out


def _visits(s: TranslationSurface, path, where):
    m = len(path)
    for i in range(m):
        e_in, e_out = path[i - 1], path[i]
        yield where[e_out][0], where[s.pairing[e_in]][1], where[e_out][1]


def intersection_gram(s: TranslationSurface) -> list[list[int]]:
    """Algebraic intersection numbers of the declared cycles.

    The first cycle is pushed off to its left.  At a shared vertex the second
    cycle crosses it where exactly one of its two edges lies strictly inside
    the left sector of the first.
    """
    classes = vertex_classes(s)
    where = _class_of(classes)
    sizes = [len(c) for c in classes]
    visits = []
    for label, path in s.basis:
        _check_closed(s, path, where)
        visits.append(list(_visits(s, path, where)))

    def inside(v, x, b, a):
        m = sizes[v]
        span = (a - b) % m or m
        off = (x - b) % m
        return 0 < off < span

    N = len(s.basis)
    G = [[0] * N for _ in range(N)]
    for i in range(N):
        for j in range(N):
            total = 0
            for v, a, b in visits[i]:
                for w, c, d in visits[j]:
                    if v != w:
                        continue
                    total += inside(v, d, b, a) - inside(v, c, b, a)
            G[i][j] = total
    return G


def area(s: TranslationSurface) -> QScalar:
    total = ZERO
    for f in s.faces:
        if not f.unbounded:
            total = total + _polygon_area(f.vertices)
    return total


# -- report -----------------------------------------------------------------

@dataclass
class Check:
    name: str
    status: str  # "pass", "fail" or "n/a"
    detail: str = ""


@dataclass
class VerifyReport:
    mode: str
    euler_characteristic: Optional[int] = None
    genus: Optional[int] = None
    cells: Optional[tuple] = None
    cone_points: list = field(default_factory=list)
    pole_faces: int = 0
    total_area: Optional[QScalar] = None
    periods: list = field(default_factory=list)
    gram: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def check(self, name: str) -> Optional[Check]:
        return next((c for c in self.checks if c.name == name), None)

    @property
    def branching(self) -> int:
        return sum(k - 1 for _, k in self.cone_points)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "passed": self.passed,
            "euler_characteristic": self.euler_characteristic,
            "genus": self.genus,
            "cells": list(self.cells) if self.cells else None,
            "cone_points": [{"class": c, "angle_multiple": k} for c, k in self.cone_points if k != 1],
            "regular_vertices": sum(1 for _, k in self.cone_points if k == 1),
            "branching": self.branching if self.cone_points else None,
            "pole_faces": self.pole_faces,
            "total_area": format_scalar(self.total_area) if self.total_area is not None else None,
            "periods": [[format_scalar(p.x), format_scalar(p.y)] for p in self.periods],
            "gram": self.gram,
            "checks": [{"name": c.name, "status": c.status, "detail": c.detail} for c in self.checks],
        }

    def to_text(self) -> str:
        lines = [f"mode: {self.mode}"]
        if self.cells:
            V, E, F = self.cells
            lines.append(f"cells: V={V} E={E} F={F}")
        lines.append(f"euler characteristic: {self.euler_characteristic}")
        lines.append(f"genus: {self.genus}")
        cones = [k for _, k in self.cone_points if k != 1]
        lines.append("cone points: " + (", ".join(f"{k}*2pi" for k in cones) if cones else "none"))
        lines.append(f"pole faces: {self.pole_faces}")
        if self.total_area is not None:
            lines.append(f"area: {format_scalar(self.total_area)}")
        for c in self.checks:
            extra = f" ({c.detail})" if c.detail else ""
            lines.append(f"[{c.status.upper()}] {c.name}{extra}")
        lines.append("result: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def verify(s: TranslationSurface) -> VerifyReport:
    rep = VerifyReport(mode=s.mode)
    add = rep.checks.append

    errs = structure_errors(s)
    if errs:
        add(Check("structure", "fail", "; ".join(errs[:5])))
        return rep
    add(Check("structure", "pass"))

    try:
        chi, g = euler_genus(s)
    except VerifyError as exc:
        add(Check("topology", "fail", str(exc)))
        return rep
    rep.euler_characteristic, rep.genus = chi, g
    V = len(vertex_classes(s))
    rep.cells = (V, len(s.edges) // 2, len(s.faces))
    n = len(s.basis) // 2
    if s.basis:
        add(Check("genus", "pass" if g == n else "fail", f"genus {g}, basis of rank {2 * n}"))
    else:
        add(Check("genus", "n/a", "no declared basis"))

    rep.cone_points = cone_angles(s)
    rep.pole_faces = sum(1 for f in s.faces if f.unbounded)
    excess = rep.branching
    if s.mode == "abelian":
        ok = excess == 2 * g - 2 and rep.pole_faces == 0
        add(Check("gauss_bonnet", "pass" if ok else "fail", f"sum(k-1) = {excess}, 2g-2 = {2 * g - 2}"))
    else:
        ok = rep.pole_faces == 1
        add(Check("pole_faces", "pass" if ok else "fail", f"{rep.pole_faces} pole face(s)"))
        ok = excess == 2 * g
        add(Check("branching_degree", "pass" if ok else "fail",
                  f"sum(k-1) = {excess}, expected 2g = {2 * g} (double pole of dz at the pole face)"))

    rep.total_area = area(s)
    prov = s.provenance
    if s.mode == "meromorphic":
        add(Check("area", "n/a", "no finite area with a pole"))
    elif prov is None:
        add(Check("area", "n/a", "no provenance"))
    else:
        w = omega(prov.character)
        ok = rep.total_area == w
        add(Check("area", "pass" if ok else "fail",
                  f"area {format_scalar(rep.total_area)}, omega {format_scalar(w)}"))

    if not s.basis:
        add(Check("periods", "n/a", "no declared basis"))
        add(Check("intersection_form", "n/a", "no declared basis"))
        return rep
    try:
        rep.periods = periods(s)
    except VerifyError as exc:
        add(Check("periods", "fail", str(exc)))
        return rep
    if prov is None:
        add(Check("periods", "n/a", "no provenance"))
    else:
        built = Character.from_columns(rep.periods, prov.character.d)
        ok = built == prov.character
        add(Check("periods", "pass" if ok else "fail",
                  "match the provenance character" if ok else "differ from the provenance character"))
        if prov.trace is not None:
            tr = prov.trace
            if prov.pushed_forward:
                back = act_right(built, tr.accumulated_gamma.inverse())
                ok = back == tr.input and act_left(tr.output, tr.left_inverse()) == prov.character
            else:
                back = tr.pull_back(built)
                ok = back == tr.input and tr.output == prov.character
            add(Check("pullback", "pass" if ok else "fail",
                      "periods pull back to the input" if ok else "pullback differs from the input"))

    rep.gram = intersection_gram(s)
    N = len(rep.gram)
    anti = all(rep.gram[i][j] == -rep.gram[j][i] for i in range(N) for j in range(N))
    ok = anti and rep.gram == standard_form(n) and len(s.basis) % 2 == 0
    add(Check("intersection_form", "pass" if ok else "fail",
              "standard symplectic" if ok else ("not antisymmetric" if not anti else f"gram {rep.gram}")))
    return rep
