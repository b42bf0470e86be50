"""Translation surfaces as exact polygon gluings.

A surface is a list of faces, each bounded by directed edges, and a fixed-point
free involution pairing every edge with a partner of opposite vector.  Bounded
faces carry exact vertex positions (counterclockwise); the single optional
unbounded face only lists its boundary edges and their vectors.

A declared homology cycle is a sequence of edge ids, each traversed in the
direction of its own face boundary.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .character import Character
from .exactnum import QScalar, QVec2, FieldError, format_scalar, parse_scalar

__all__ = ["SurfaceError", "Face", "Edge", "TranslationSurface", "Provenance"]


class SurfaceError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: int
    face: int
    vector: QVec2


@dataclass(frozen=True)
class Face:
    id: int
    edges: tuple
    unbounded: bool = False
    vertices: Optional[tuple] = None  # QVec2 positions; vertices[k] starts edges[k]


@dataclass
class Provenance:
    """The character the surface realizes and the trace back to the user's input.

    With ``pushed_forward`` set, the surface was built for ``trace.output`` and
    then mapped by the inverse of the trace's left factor, so ``character`` is
    the input times the accumulated symplectic matrix.
    """

    character: Character
    path: str
    trace: Optional[object] = None  # symplectic.ReductionTrace
    pushed_forward: bool = False

    def input_character(self) -> Character:
        return self.trace.input if self.trace is not None else self.character

    def to_dict(self) -> dict:
        doc = {"path": self.path, "character": self.character.to_dict()}
        if self.trace is not None:
            doc["trace"] = self.trace.to_dict()
        if self.pushed_forward:
            doc["pushed_forward"] = True
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Provenance":
        from .symplectic import ReductionTrace

        trace = ReductionTrace.from_dict(doc["trace"]) if doc.get("trace") else None
        return cls(Character.from_dict(doc["character"]), str(doc.get("path", "")), trace,
                   bool(doc.get("pushed_forward", False)))


@dataclass
class TranslationSurface:
    mode: str
    d: int
    faces: list
    edges: list
    pairing: list  # pairing[e] = partner edge id
    basis: list = field(default_factory=list)  # [(label, (edge ids...)), ...]
    provenance: Optional[Provenance] = None

    def __post_init__(self):
        if self.mode not in ("abelian", "meromorphic"):
            raise SurfaceError(f"unknown mode {self.mode!r}")
        if len(self.pairing) != len(self.edges):
            raise SurfaceError("pairing must list a partner for every edge")
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise SurfaceError(f"edge ids must be 0..E-1 in order (edge {i} has id {e.id})")
        for i, f in enumerate(self.faces):
            if f.id != i:
                raise SurfaceError(f"face ids must be 0..F-1 in order (face {i} has id {f.id})")
            for e in f.edges:
                if not 0 <= e < len(self.edges) or self.edges[e].face != i:
                    raise SurfaceError(f"face {i} lists edge {e} that does not belong to it")
        owned = sorted(e for f in self.faces for e in f.edges)
        if owned != list(range(len(self.edges))):
            raise SurfaceError("every edge must appear in exactly one face boundary")

    @property
    def genus_hint(self) -> int:
        return len(self.basis) // 2

    # -- combinatorics --------------------------------------------------
    def next_edge(self, e: int) -> int:
        f = self.faces[self.edges[e].face]
        k = f.edges.index(e)
        return f.edges[(k + 1) % len(f.edges)]

    def prev_edge(self, e: int) -> int:
        f = self.faces[self.edges[e].face]
        k = f.edges.index(e)
        return f.edges[k - 1]

    def ccw_rotation(self, e: int) -> int:
        """Next outgoing edge counterclockwise around the start vertex of ``e``."""
        return self.pairing[self.prev_edge(e)]

    def linear_image(self, A) -> "TranslationSurface":
        """The surface mapped by a real 2x2 matrix ``A`` with positive determinant.

        Pairings stay translations and orientation is kept, so combinatorics
        and the basis carry over unchanged while periods become ``A * periods``.
        """
        (a, b), (c, e) = [[_scalar(x) for x in row] for row in A]
        if (a * e - b * c).sign() <= 0:
            raise SurfaceError("linear image needs a matrix with positive determinant")

        def f(v: QVec2) -> QVec2:
            return QVec2(a * v.x + b * v.y, c * v.x + e * v.y)

        d = self.d or next((x.d for x in (a, b, c, e) if x.d), 0)
        edges = [Edge(x.id, x.face, f(x.vector)) for x in self.edges]
        faces = [Face(x.id, x.edges, x.unbounded, None if x.vertices is None else tuple(f(p) for p in x.vertices))
                 for x in self.faces]
        return TranslationSurface(self.mode, d, faces, edges, list(self.pairing), list(self.basis), self.provenance)

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        faces = []
        for f in self.faces:
            doc = {"id": f.id, "unbounded": f.unbounded, "edges": list(f.edges)}
            if f.vertices is not None:
                doc["vertices"] = [[format_scalar(p.x), format_scalar(p.y)] for p in f.vertices]
            faces.append(doc)
        doc = {
            "mode": self.mode,
            "d": self.d,
            "faces": faces,
            "edges": [
                {"id": e.id, "face": e.face, "vector": [format_scalar(e.vector.x), format_scalar(e.vector.y)]}
                for e in self.edges
            ],
            "pairing": [[e, p] for e, p in enumerate(self.pairing) if e < p or p == e],
            "basis": [{"label": lab, "edges": list(path)} for lab, path in self.basis],
        }
        if self.provenance is not None:
            doc["provenance"] = self.provenance.to_dict()
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "TranslationSurface":
        try:
            edges = [Edge(int(e["id"]), int(e["face"]), _vec(e["vector"])) for e in doc["edges"]]
            faces = []
            for f in doc["faces"]:
                verts = f.get("vertices")
                faces.append(
                    Face(
                        int(f["id"]),
                        tuple(int(x) for x in f["edges"]),
                        bool(f.get("unbounded", False)),
                        tuple(_vec(v) for v in verts) if verts is not None else None,
                    )
                )
            pairing = [-1] * len(edges)
            for a, b in doc["pairing"]:
                a, b = int(a), int(b)
                if not (0 <= a < len(edges) and 0 <= b < len(edges)):
                    raise SurfaceError(f"pairing ({a}, {b}) references a missing edge")
                if pairing[a] != -1 or pairing[b] != -1:
                    raise SurfaceError(f"edge paired twice in ({a}, {b})")
                pairing[a], pairing[b] = b, a
            basis = [(str(c["label"]), tuple(int(x) for x in c["edges"])) for c in doc.get("basis", [])]
            prov = Provenance.from_dict(doc["provenance"]) if doc.get("provenance") else None
            return cls(str(doc["mode"]), int(doc["d"]), faces, edges, pairing, basis, prov)
        except (KeyError, TypeError, ValueError, FieldError) as exc:
            if isinstance(exc, SurfaceError):
                raise
            raise SurfaceError(f"malformed surface document: {exc}") from None

    @classmethod
    def loads(cls, text: str) -> "TranslationSurface":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SurfaceError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(doc)


def _scalar(x) -> QScalar:
    return x if isinstance(x, QScalar) else QScalar(x)


def _vec(pair) -> QVec2:
    x, y = pair
    return QVec2(parse_scalar(x), parse_scalar(y))
