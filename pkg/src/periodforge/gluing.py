"""Turn planar sheets with glued boundary sides into a polygon complex.

A sheet is a region of its own copy of the plane, described only by its
boundary sides.  A side is a directed segment ``A -> B`` together with the bank
(``"L"`` or ``"R"``) on which the sheet lies.  Two sides are glued when one is
a translate of the other; the point ``A + s (B - A)`` of one is identified with
the same parameter on the other, and the banks must be opposite.

Each sheet is cut into trapezoids along vertical lines through segment
endpoints, after a rational shear that makes every segment non-vertical.  The
trapezoid sides are split at the union of the breakpoints of both partners so
that every edge has exactly one partner of opposite vector.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exactnum import QScalar, QVec2, ZERO, det2
from .surface import Edge, Face, SurfaceError, TranslationSurface

__all__ = ["Layout", "Side", "UNBOUNDED"]

UNBOUNDED = -1

_SHEARS = [Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(1, 3), Fraction(-1, 3),
           Fraction(2, 3), Fraction(1, 5), Fraction(-2, 7), Fraction(3, 11), Fraction(5, 13)]


@dataclass(frozen=True)
class Side:
    id: int
    sheet: int
    a: QVec2
    b: QVec2
    bank: str
    label: str

    @property
    def vector(self) -> QVec2:
        return self.b - self.a


def _orient(p: QVec2, q: QVec2, r: QVec2) -> int:
    return det2(q - p, r - p).sign()


@dataclass
class _Elem:
    """Elementary piece of a carrier line inside one sheet, in sheared coordinates."""

    s0: QScalar
    t0: QScalar
    s1: QScalar
    t1: QScalar
    upper: Optional[int]  # side id whose sheet region lies above
    lower: Optional[int]

    def t_at(self, s: QScalar) -> QScalar:
        return self.t0 + (self.t1 - self.t0) * ((s - self.s0) / (self.s1 - self.s0))


class Layout:
    """Collects sheets, sides and gluings, then builds a TranslationSurface."""

    def __init__(self, d: int = 0):
        self.d = d
        self.sheet_names: list[str] = []
        self.sides: list[Side] = []
        self.partner: dict[int, int] = {}
        self.outer_cycle: list[int] = []  # sides of the unbounded face, in traversal order

    # -- construction ---------------------------------------------------
    def add_sheet(self, name: str) -> int:
        self.sheet_names.append(name)
        return len(self.sheet_names) - 1

    def add_side(self, sheet: int, a: QVec2, b: QVec2, bank: str, label: str = "") -> int:
        if bank not in ("L", "R"):
            raise SurfaceError(f"bank must be L or R, got {bank!r}")
        if (b - a).is_zero():
            raise SurfaceError(f"side {label!r} has zero length")
        sid = len(self.sides)
        self.sides.append(Side(sid, sheet, a, b, bank, label))
        return sid

    def glue(self, s1: int, s2: int) -> None:
        A, B = self.sides[s1], self.sides[s2]
        if A.vector != B.vector:
            raise SurfaceError(f"glued sides {A.label!r} and {B.label!r} are not translates")
        if A.bank == B.bank:
            raise SurfaceError(f"glued sides {A.label!r} and {B.label!r} lie on the same bank")
        if s1 in self.partner or s2 in self.partner:
            raise SurfaceError("side glued twice")
        self.partner[s1] = s2
        self.partner[s2] = s1

    def parallelogram(self, sheet: int, p: QVec2, z: QVec2, w: QVec2, label: str) -> dict:
        """Sides of the parallelogram ``p, p+z, p+z+w, p+w`` with opposite sides glued.

        The same banks are correct whether the sheet is the inside (``det(z, w) > 0``),
        the outside (a hole, ``det(z, w) < 0``), or both banks of a flat one.
        """
        bottom = self.add_side(sheet, p, p + z, "L", f"{label}.bottom")
        top = self.add_side(sheet, p + w, p + w + z, "R", f"{label}.top")
        left = self.add_side(sheet, p, p + w, "R", f"{label}.left")
        right = self.add_side(sheet, p + z, p + z + w, "L", f"{label}.right")
        self.glue(bottom, top)
        self.glue(left, right)
        return {"bottom": bottom, "top": top, "left": left, "right": right}

    def slit(self, sheet: int, a: QVec2, b: QVec2, label: str) -> tuple[int, int]:
        return (self.add_side(sheet, a, b, "L", f"{label}.L"),
                self.add_side(sheet, a, b, "R", f"{label}.R"))

    def cross_glue(self, s1: tuple[int, int], s2: tuple[int, int]) -> None:
        """Glue two slits crosswise: L of one to R of the other."""
        self.glue(s1[0], s2[1])
        self.glue(s1[1], s2[0])

    def connector(self, sheet: int, a: QVec2, b: QVec2, label: str) -> int:
        """An interior segment that only serves as a path for cycles; returns its L side."""
        left, right = self.slit(sheet, a, b, label)
        self.glue(left, right)
        return left

    def box(self, sheet: int, lo: QVec2, hi: QVec2) -> None:
        """Outer rectangle of ``sheet``; its outside becomes the unbounded face."""
        c0, c1, c2, c3 = lo, QVec2(hi.x, lo.y), hi, QVec2(lo.x, hi.y)
        inner, outer = [], []
        for k, (a, b) in enumerate(((c0, c1), (c1, c2), (c2, c3), (c3, c0))):
            inner.append(self.add_side(sheet, a, b, "L", f"box.{k}"))
            outer.append(self.add_side(UNBOUNDED, a, b, "R", f"pole.{k}"))
            self.glue(inner[-1], outer[-1])
        if self.outer_cycle:
            raise SurfaceError("only one unbounded face is allowed")
        self.outer_cycle = list(reversed(outer))

    # -- decomposition --------------------------------------------------
    def build(self, basis: Sequence[tuple[str, Sequence[int]]], mode: str) -> TranslationSurface:
        for s in self.sides:
            if s.id not in self.partner:
                raise SurfaceError(f"side {s.label!r} is not glued")
        traps_by_sheet = {}
        lam_by_sheet = {}
        # tau breakpoints per side
        self._mark_cache = {}
        breaks: dict[int, set] = {s.id: {QScalar(0), QScalar(1)} for s in self.sides}
        for sheet in range(len(self.sheet_names)):
            sides = [s for s in self.sides if s.sheet == sheet]
            if not sides:
                raise SurfaceError(f"sheet {self.sheet_names[sheet]!r} has no boundary")
            lam = self._choose_shear(sides)
            lam_by_sheet[sheet] = lam
            elems = self._elements(sides, lam)
            self._check_crossings(elems)
            traps, cuts = self._trapezoids(elems, sheet)
            traps_by_sheet[sheet] = (traps, cuts)
            for sid, svals in self._side_breaks(elems, cuts, lam).items():
                breaks[sid] |= svals
        for sid, pid in self.partner.items():
            if sid < pid:
                union = breaks[sid] | breaks[pid]
                breaks[sid] = breaks[pid] = union

        edges: list[tuple] = []  # (face, start QVec2 or None, vector, key)
        faces: list[tuple] = []  # (unbounded, [edge indices], vertices)
        side_edges: dict[tuple, int] = {}

        def emit(face_idx, start, vec, key):
            edges.append((face_idx, start, vec, key))
            if key[0] == "side":
                side_edges[key[1:]] = len(edges) - 1
            return len(edges) - 1

        for sheet in range(len(self.sheet_names)):
            traps, cuts = traps_by_sheet[sheet]
            lam = lam_by_sheet[sheet]
            for k, lo_e, hi_e in traps:
                s_a, s_b = cuts[k], cuts[k + 1]
                fidx = len(faces)
                ids, verts = [], []
                boundary = []
                boundary += self._side_run(lo_e.upper, lo_e, s_a, s_b, lam, breaks)
                boundary += self._wall_run(sheet, k + 1, "west", lo_e.t_at(s_b), hi_e.t_at(s_b), s_b, lam,
                                           traps_by_sheet)
                boundary += self._side_run(hi_e.lower, hi_e, s_b, s_a, lam, breaks)
                boundary += self._wall_run(sheet, k, "east", hi_e.t_at(s_a), lo_e.t_at(s_a), s_a, lam,
                                           traps_by_sheet)
                for start, end, key in boundary:
                    ids.append(emit(fidx, start, end - start, key))
                    verts.append(start)
                faces.append((False, ids, verts))

        if self.outer_cycle:
            fidx = len(faces)
            ids = []
            for sid in self.outer_cycle:
                s = self.sides[sid]
                taus = sorted(breaks[sid], reverse=(s.bank == "R"))
                for t0, t1 in zip(taus, taus[1:]):
                    key = ("side", sid, min(t0, t1), max(t0, t1))
                    ids.append(emit(fidx, None, s.vector * (t1 - t0), key))
            faces.append((True, ids, None))

        # pair edges by key
        index = {}
        for i, (_, _, _, key) in enumerate(edges):
            if key in index:
                raise SurfaceError(f"duplicate edge key {key}")
            index[key] = i
        pairing = [-1] * len(edges)
        for i, (_, _, vec, key) in enumerate(edges):
            if key[0] == "side":
                pk = ("side", self.partner[key[1]], key[2], key[3])
            else:
                pk = (key[0], key[1], key[2], key[3], key[4], "west" if key[5] == "east" else "east")
            j = index.get(pk)
            if j is None:
                raise SurfaceError(f"no partner for edge {key}")
            if edges[j][2] != -vec:
                raise AssertionError(f"partner vectors disagree for {key}")
            pairing[i] = j

        face_objs = [
            Face(i, tuple(ids), unb, None if unb else tuple(verts)) for i, (unb, ids, verts) in enumerate(faces)
        ]
        edge_objs = [Edge(i, f, vec) for i, (f, _, vec, _) in enumerate(edges)]

        cycles = []
        for label, path in basis:
            seq = []
            for sid in path:
                s = self.sides[sid]
                taus = sorted(breaks[sid], reverse=(s.bank == "R"))
                for t0, t1 in zip(taus, taus[1:]):
                    seq.append(side_edges[(sid, min(t0, t1), max(t0, t1))])
            cycles.append((label, tuple(seq)))
        return TranslationSurface(mode, self.d, face_objs, edge_objs, pairing, cycles)

    # -- helpers --------------------------------------------------------
    @staticmethod
    def _shear(p: QVec2, lam: Fraction) -> tuple[QScalar, QScalar]:
        return p.x + p.y * lam, p.y

    @staticmethod
    def _unshear(s: QScalar, t: QScalar, lam: Fraction) -> QVec2:
        return QVec2(s - t * lam, t)

    def _choose_shear(self, sides: list[Side]) -> Fraction:
        for lam in _SHEARS:
            if all(not (s.vector.x + s.vector.y * lam).is_zero() for s in sides):
                return lam
        raise SurfaceError("no admissible shear for sheet")

    def _elements(self, sides: list[Side], lam: Fraction) -> list[_Elem]:
        # group collinear sides into carriers
        carriers: list[list[Side]] = []
        for s in sides:
            for group in carriers:
                r = group[0]
                if det2(r.vector, s.vector).is_zero() and det2(r.vector, s.a - r.a).is_zero():
                    group.append(s)
                    break
            else:
                carriers.append([s])
        elems = []
        for group in carriers:
            marks = set()
            spans = []
            for s in group:
                sa, _ = self._shear(s.a, lam)
                sb, _ = self._shear(s.b, lam)
                marks.update((sa, sb))
                rising = sb > sa
                # the sheet lies above a rising L side or a falling R side
                up = (s.bank == "L") == rising
                spans.append((min(sa, sb), max(sa, sb), up, s))
            marks = sorted(marks)
            ref = group[0]
            ra, rta = self._shear(ref.a, lam)
            rb, rtb = self._shear(ref.b, lam)

            def t_on(sv):
                return rta + (rtb - rta) * ((sv - ra) / (rb - ra))

            for m0, m1 in zip(marks, marks[1:]):
                upper = lower = None
                for lo, hi, up, s in spans:
                    if lo <= m0 and m1 <= hi:
                        if up:
                            if upper is not None:
                                raise SurfaceError(f"sides {s.label!r} overlap on the same bank")
                            upper = s.id
                        else:
                            if lower is not None:
                                raise SurfaceError(f"sides {s.label!r} overlap on the same bank")
                            lower = s.id
                if upper is None and lower is None:
                    continue
                elems.append(_Elem(m0, t_on(m0), m1, t_on(m1), upper, lower))
        return elems

    def _check_crossings(self, elems: list[_Elem]) -> None:
        pts = [(QVec2(e.s0, e.t0), QVec2(e.s1, e.t1)) for e in elems]
        for i in range(len(pts)):
            p1, p2 = pts[i]
            for j in range(i + 1, len(pts)):
                q1, q2 = pts[j]
                o1, o2 = _orient(p1, p2, q1), _orient(p1, p2, q2)
                o3, o4 = _orient(q1, q2, p1), _orient(q1, q2, p2)
                if o1 * o2 < 0 and o3 * o4 < 0:
                    raise SurfaceError("placement collision: two boundary segments cross")
                if o1 == o2 == 0:
                    # collinear pieces from different carriers cannot share interior
                    if max(p1.x, q1.x) < min(p2.x, q2.x):
                        raise SurfaceError("placement collision: overlapping collinear segments")

    def _trapezoids(self, elems: list[_Elem], sheet: int):
        cuts = sorted({e.s0 for e in elems} | {e.s1 for e in elems})
        traps = []
        for k in range(len(cuts) - 1):
            a, b = cuts[k], cuts[k + 1]
            mid = (a + b) / 2
            active = [e for e in elems if e.s0 <= a and b <= e.s1]
            active.sort(key=lambda e: e.t_at(mid))
            if active and active[0].lower is not None:
                raise SurfaceError(f"sheet {self.sheet_names[sheet]!r} is unbounded below")
            if active and active[-1].upper is not None:
                raise SurfaceError(f"sheet {self.sheet_names[sheet]!r} is unbounded above")
            for lo_e, hi_e in zip(active, active[1:]):
                inside_above = lo_e.upper is not None
                inside_below = hi_e.lower is not None
                if inside_above != inside_below:
                    raise SurfaceError(f"sheet {self.sheet_names[sheet]!r} has inconsistent banks")
                if inside_above:
                    traps.append((k, lo_e, hi_e))
        return traps, cuts

    def _side_breaks(self, elems, cuts, lam) -> dict:
        out: dict[int, set] = {}
        for e in elems:
            for sid in (e.upper, e.lower):
                if sid is None:
                    continue
                s = self.sides[sid]
                sa, _ = self._shear(s.a, lam)
                sb, _ = self._shear(s.b, lam)
                for c in cuts:
                    if e.s0 <= c <= e.s1:
                        out.setdefault(sid, set()).add((c - sa) / (sb - sa))
        return out

    def _side_run(self, sid, elem, s_from, s_to, lam, breaks):
        """Pieces of side ``sid`` along ``elem`` from shear-abscissa ``s_from`` to ``s_to``."""
        s = self.sides[sid]
        sa, _ = self._shear(s.a, lam)
        sb, _ = self._shear(s.b, lam)
        tau_from = (s_from - sa) / (sb - sa)
        tau_to = (s_to - sa) / (sb - sa)
        lo, hi = min(tau_from, tau_to), max(tau_from, tau_to)
        taus = sorted((t for t in breaks[sid] if lo <= t <= hi), reverse=tau_from > tau_to)
        vec = s.vector
        run = []
        for t0, t1 in zip(taus, taus[1:]):
            p0 = s.a + vec * t0
            p1 = s.a + vec * t1
            run.append((p0, p1, ("side", sid, min(t0, t1), max(t0, t1))))
        return run

    def _wall_run(self, sheet, k, facing, t_from, t_to, s, lam, traps_by_sheet):
        """Vertical wall pieces on cut ``k`` between heights ``t_from`` and ``t_to``.

        ``facing`` names the side of the wall the face lies on.  Walls are split at
        every height where a trapezoid corner sits on this cut, so both faces
        meeting across the wall see identical pieces.
        """
        if t_from == t_to:
            return []
        marks = self._cut_marks(sheet, k, traps_by_sheet)
        lo, hi = min(t_from, t_to), max(t_from, t_to)
        ts = sorted((t for t in marks | {lo, hi} if lo <= t <= hi), reverse=t_from > t_to)
        run = []
        for t0, t1 in zip(ts, ts[1:]):
            run.append((self._unshear(s, t0, lam), self._unshear(s, t1, lam),
                        ("wall", sheet, k, min(t0, t1), max(t0, t1), facing)))
        return run

    def _cut_marks(self, sheet, k, traps_by_sheet) -> set:
        cache = getattr(self, "_mark_cache", None)
        if cache is None:
            cache = self._mark_cache = {}
        key = (sheet, k)
        if key not in cache:
            traps, cuts = traps_by_sheet[sheet]
            c = cuts[k]
            marks = set()
            for kk, lo_e, hi_e in traps:
                if kk == k or kk + 1 == k:
                    marks.add(lo_e.t_at(c))
                    marks.add(hi_e.t_at(c))
            cache[key] = marks
        return cache[key]
