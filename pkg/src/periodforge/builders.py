"""Explicit constructions of translation surfaces with prescribed periods.

Every builder lays out planar sheets with a :class:`~periodforge.gluing.Layout`
and declares the basis ``x_j, y_j`` as side paths, so that the holonomy of
``x_j`` (resp. ``y_j``) is column ``2j`` (resp. ``2j+1``) of the character.
"""
from __future__ import annotations

from fractions import Fraction

from .character import Character, omega, omega_blocks
from .exactnum import QScalar, QVec2, ZERO, det2
from .gluing import Layout
from .surface import SurfaceError, TranslationSurface
from .symplectic import is_normal_form

__all__ = [
    "build_torus",
    "build_xplus",
    "build_slit_rectangle",
    "build_meromorphic",
    "inscribed_radius",
]


def _v(x, y) -> QVec2:
    return QVec2(x, y)


def inscribed_radius(z: QVec2, w: QVec2) -> Fraction:
    """Largest ``2^-k`` with ``[-r, r]^2`` strictly inside the parallelogram centred at 0."""
    area = abs(det2(z, w))
    if area.is_zero():
        raise SurfaceError("degenerate parallelogram has no interior")
    r = Fraction(1)
    while True:
        ok = True
        for sx in (1, -1):
            for sy in (1, -1):
                q = _v(r * sx, r * sy)
                # coordinates of q in the basis (z, w) must lie in (-1/2, 1/2)
                if not (abs(det2(q, w)) * 2 < area and abs(det2(z, q)) * 2 < area):
                    ok = False
        if ok:
            return r
        r /= 2


def build_torus(z: QVec2, w: QVec2, d: int = 0) -> TranslationSurface:
    """One parallelogram with opposite sides glued."""
    if det2(z, w).sign() <= 0:
        raise SurfaceError("torus needs det(z, w) > 0")
    lay = Layout(d)
    sheet = lay.add_sheet("P1")
    sides = lay.parallelogram(sheet, _v(0, 0), z, w, "P1")
    return lay.build([("x1", [sides["bottom"]]), ("y1", [sides["right"]])], "abelian")


def _basis_labels(n: int):
    for j in range(n):
        yield f"x{j + 1}", f"y{j + 1}"


def build_xplus(chi: Character) -> TranslationSurface:
    """Chain of parallelograms, consecutive ones joined along a common slit.

    Every ``P_j`` is centred at the origin of its own sheet, so all of them
    contain the square ``[-r, r]^2``.  Slit ``j`` is the vertical segment at
    ``x = -r + 2rj/n`` of height ``r``; it is cut in ``P_j`` and ``P_{j+1}``
    and the four banks are glued crosswise.
    """
    ws = omega_blocks(chi)
    bad = [j + 1 for j, w in enumerate(ws) if w.sign() <= 0]
    if bad:
        raise SurfaceError(f"handles {bad} have non-positive area; character is not in X+")
    n = chi.n
    cols = chi.columns()
    r = min(inscribed_radius(cols[2 * j], cols[2 * j + 1]) for j in range(n))
    lay = Layout(chi.d)
    sheets = [lay.add_sheet(f"P{j + 1}") for j in range(n)]
    basis = []
    for j in range(n):
        z, w = cols[2 * j], cols[2 * j + 1]
        sides = lay.parallelogram(sheets[j], -(z + w) / 2, z, w, f"P{j + 1}")
        lx, ly = f"x{j + 1}", f"y{j + 1}"
        basis += [(lx, [sides["bottom"]]), (ly, [sides["right"]])]
    for j in range(n - 1):
        x = -r + 2 * r * (j + 1) / n
        a, b = _v(x, -r / 2), _v(x, r / 2)
        lower = lay.slit(sheets[j], a, b, f"beta{j + 1}@P{j + 1}")
        upper = lay.slit(sheets[j + 1], a, b, f"beta{j + 1}@P{j + 2}")
        lay.cross_glue(lower, upper)
    return lay.build(basis, "abelian")


def build_slit_rectangle(chi: Character) -> TranslationSurface:
    """One ``a_1 x 1`` rectangle with a pair of cross-glued horizontal slits per handle ``j >= 2``.

    Slits of handle ``j`` sit at height ``j/(n+1)``; ``beta_j`` has length
    ``l = min(a_j, a_1 - a_j)/2`` and starts at ``x = (a_1 - a_j - l)/2``, and
    its partner is ``beta_j + (a_j, 0)``.  A connector segment joins the right
    end of ``beta_j`` to the left end of its partner and carries ``x_j``.
    """
    if not is_normal_form(chi):
        raise SurfaceError("slit rectangle needs the lattice normal form")
    n = chi.n
    a1 = omega(chi)
    lay = Layout(chi.d)
    sheet = lay.add_sheet("rectangle")
    sides = lay.parallelogram(sheet, _v(0, 0), _v(a1, 0), _v(0, 1), "R")
    basis = [("x1", [sides["bottom"]]), ("y1", [sides["right"]])]
    for j in range(1, n):
        aj = chi.u[2 * j]
        h = Fraction(j + 1, n + 1)
        ell = min(aj, a1 - aj) / 2
        x0 = (a1 - aj - ell) / 2
        beta = lay.slit(sheet, _v(x0, h), _v(x0 + ell, h), f"beta{j + 1}")
        beta2 = lay.slit(sheet, _v(x0 + aj, h), _v(x0 + aj + ell, h), f"beta{j + 1}'")
        lay.cross_glue(beta, beta2)
        conn = lay.connector(sheet, _v(x0 + ell, h), _v(x0 + aj, h), f"link{j + 1}")
        basis += [(f"x{j + 1}", [beta[0], conn]), (f"y{j + 1}", [beta2[0], beta2[1]])]
    return lay.build(basis, "abelian")


def build_meromorphic(chi: Character, case: str) -> TranslationSurface:
    """One-pole gluing: a box sheet whose outside is the pole face.

    Case ``"A"`` (all block areas nonzero, the first negative): handles with
    negative area become parallelogram holes in the box with opposite sides
    glued; handles with positive area are separate tori attached to the box by
    a cross-glued horizontal slit.  Case ``"B"`` (imaginary row zero, real row
    positive): every handle is a flat parallelogram lying on the real axis.
    Items are placed left to right on the line ``y = 0`` with gap 1.
    """
    if chi.is_zero():
        raise SurfaceError("the one-pole construction needs a nonzero character")
    n = chi.n
    cols = chi.columns()
    lay = Layout(chi.d)
    box = lay.add_sheet("Q1")
    basis = []
    cursor = QScalar(0)
    top = QScalar(0)
    if case == "A":
        ws = omega_blocks(chi)
        if any(w.is_zero() for w in ws) or ws[0].sign() >= 0:
            raise SurfaceError("case A needs every block area nonzero and the first one negative")
        for j in range(n):
            z, w = cols[2 * j], cols[2 * j + 1]
            lx, ly = f"x{j + 1}", f"y{j + 1}"
            if ws[j].sign() < 0:
                corners = [_v(0, 0), z, w, z + w]
                minx = min(c.x for c in corners)
                miny = min(c.y for c in corners)
                maxx = max(c.x for c in corners)
                maxy = max(c.y for c in corners)
                p = _v(cursor - minx, -miny)
                sides = lay.parallelogram(box, p, z, w, f"P{j + 1}")
                cursor = cursor + (maxx - minx) + 1
                top = max(top, maxy - miny)
            else:
                sheet = lay.add_sheet(f"T{j + 1}")
                sides = lay.parallelogram(sheet, -(z + w) / 2, z, w, f"T{j + 1}")
                r = inscribed_radius(z, w)
                inner = lay.slit(sheet, _v(-r / 2, 0), _v(r / 2, 0), f"gamma{j + 1}@T{j + 1}")
                outer = lay.slit(box, _v(cursor, 0), _v(cursor + r, 0), f"gamma{j + 1}@Q1")
                lay.cross_glue(inner, outer)
                cursor = cursor + r + 1
            basis += [(lx, [sides["bottom"]]), (ly, [sides["right"]])]
    elif case == "B":
        if not all(x.is_zero() for x in chi.v) or not all(x.sign() > 0 for x in chi.u):
            raise SurfaceError("case B needs a zero imaginary row and a positive real row")
        for j in range(n):
            z, w = cols[2 * j], cols[2 * j + 1]
            sides = lay.parallelogram(box, _v(cursor, 0), z, w, f"P{j + 1}")
            cursor = cursor + z.x + w.x + 1
            basis += [(f"x{j + 1}", [sides["bottom"]]), (f"y{j + 1}", [sides["right"]])]
    else:
        raise ValueError(f"unknown case {case!r}")
    lay.box(box, _v(-1, -1), _v(cursor, top + 1))
    return lay.build(basis, "meromorphic")
