"""Period characters in matrix form and their classification.

A character of a genus-``n`` surface is stored as the 2 x 2n matrix whose
columns are its values on ``x_1, y_1, ..., x_n, y_n``; row 0 is the real part,
row 1 the imaginary part.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .exactnum import (
    ZERO,
    FieldError,
    QScalar,
    QVec2,
    det2,
    integer_column_reduce,
    lcm_denominator,
    parse_scalar,
    format_scalar,
    rank_q,
    sign,
)

__all__ = [
    "Character",
    "CharacterError",
    "ImageAnalysis",
    "Classification",
    "Verdict",
    "omega",
    "omega_blocks",
    "analyze_image",
    "classify",
    "degree_bound",
]


class CharacterError(ValueError):
    pass


@dataclass(frozen=True)
class Character:
    n: int
    d: int
    rows: tuple  # (u, v), each a tuple of 2n QScalar

    def __post_init__(self):
        if self.n < 1:
            raise CharacterError("genus must be at least 1")
        if len(self.rows) != 2 or any(len(r) != 2 * self.n for r in self.rows):
            raise CharacterError(f"matrix must be 2 x {2 * self.n}")
        for r in self.rows:
            for x in r:
                if x.d not in (0, self.d):
                    raise CharacterError(f"entry {x} is not in Q(sqrt({self.d}))")

    @classmethod
    def from_rows(cls, u: Sequence, v: Sequence, d: int = 0) -> "Character":
        if len(u) != len(v) or len(u) % 2:
            raise CharacterError("rows must have equal even length")
        u = tuple(QScalar.coerce(x) for x in u)
        v = tuple(QScalar.coerce(x) for x in v)
        return cls(len(u) // 2, d, (u, v))

    @classmethod
    def from_blocks(cls, blocks: Sequence, d: int = 0) -> "Character":
        """Build from ``[[[a, b], [c, d]], ...]``, one 2x2 block per handle."""
        u, v = [], []
        for (a, b), (c, dd) in blocks:
            u += [a, b]
            v += [c, dd]
        return cls.from_rows(u, v, d)

    @classmethod
    def from_columns(cls, cols: Sequence[QVec2], d: int = 0) -> "Character":
        return cls.from_rows([c.x for c in cols], [c.y for c in cols], d)

    @property
    def u(self):
        return self.rows[0]

    @property
    def v(self):
        return self.rows[1]

    def column(self, k: int) -> QVec2:
        return QVec2(self.rows[0][k], self.rows[1][k])

    def columns(self) -> list[QVec2]:
        return [self.column(k) for k in range(2 * self.n)]

    def block(self, j: int):
        """0-based block ``M_{j+1}`` as ``((a, b), (c, d))``."""
        u, v = self.rows
        return (u[2 * j], u[2 * j + 1]), (v[2 * j], v[2 * j + 1])

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    # -- I/O ------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "matrix": [[format_scalar(x) for x in r] for r in self.rows],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Character":
        try:
            n, d, mat = int(doc["n"]), int(doc["d"]), doc["matrix"]
        except (KeyError, TypeError, ValueError) as exc:
            raise CharacterError(f"character document needs n, d, matrix ({exc})") from None
        if not isinstance(mat, list) or len(mat) != 2:
            raise CharacterError("matrix must have exactly two rows")
        rows = []
        for i, r in enumerate(mat):
            if not isinstance(r, list) or len(r) != 2 * n:
                raise CharacterError(f"matrix row {i} must have {2 * n} entries")
            row = []
            for j, text in enumerate(r):
                try:
                    x = parse_scalar(text)
                except FieldError as exc:
                    raise CharacterError(f"matrix[{i}][{j}]: {exc}") from None
                row.append(x)
            rows.append(tuple(row))
        return cls(n, d, tuple(rows))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Character":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CharacterError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(doc)

    def __str__(self):
        blocks = []
        for j in range(self.n):
            (a, b), (c, d) = self.block(j)
            blocks.append(f"[[{a}, {b}], [{c}, {d}]]")
        return f"Character(n={self.n}, d={self.d}, " + ", ".join(blocks) + ")"


def omega_blocks(chi: Character) -> list[QScalar]:
    out = []
    for j in range(chi.n):
        (a, b), (c, d) = chi.block(j)
        out.append(a * d - b * c)
    return out


def omega(chi: Character) -> QScalar:
    total = ZERO
    for w in omega_blocks(chi):
        total = total + w
    return total


@dataclass(frozen=True)
class ImageAnalysis:
    abstract_rank: int
    span_dim: int
    lattice_basis: Optional[tuple] = None  # (QVec2, QVec2) when a rank-2 lattice
    covolume: Optional[QScalar] = None

    @property
    def discrete(self) -> bool:
        return self.abstract_rank == self.span_dim

    @property
    def is_lattice(self) -> bool:
        return self.abstract_rank == 2 and self.span_dim == 2

    def to_dict(self) -> dict:
        doc = {
            "abstract_rank": self.abstract_rank,
            "span_dim": self.span_dim,
            "discrete": self.discrete,
        }
        if self.lattice_basis is not None:
            doc["lattice_basis"] = [[format_scalar(c) for c in b] for b in self.lattice_basis]
            doc["covolume"] = format_scalar(self.covolume)
        return doc


def _expand(x: QScalar) -> tuple[Fraction, Fraction]:
    return x.p, x.q


def analyze_image(chi: Character) -> ImageAnalysis:
    cols = chi.columns()
    # each column as a vector in Q^4 over the basis {1, sqrt d} x {re, im}
    expanded = [[*_expand(c.x), *_expand(c.y)] for c in cols]
    abstract_rank = rank_q(list(zip(*expanded))) if expanded else 0

    nonzero = [c for c in cols if not c.is_zero()]
    if not nonzero:
        span_dim = 0
    elif any(det2(nonzero[0], c).sign() != 0 for c in nonzero[1:]):
        span_dim = 2
    else:
        span_dim = 1

    if not (abstract_rank == 2 and span_dim == 2):
        return ImageAnalysis(abstract_rank, span_dim)

    # Z-basis of the column module: clear denominators, reduce over Z
    scale = lcm_denominator(f for row in expanded for f in row)
    int_mat = [[int(f * scale) for f in col] for col in expanded]
    H, _, r = integer_column_reduce([list(row) for row in zip(*int_mat)])
    assert r == 2, "rank mismatch between Q-rank and Z-reduction"
    basis = []
    for j in range(2):
        px, qx, py, qy = (Fraction(H[i][j], scale) for i in range(4))
        basis.append(QVec2(QScalar(px, qx, chi.d), QScalar(py, qy, chi.d)))
    cov = abs(det2(basis[0], basis[1]))
    if cov.sign() <= 0:
        raise AssertionError("lattice basis is degenerate")
    return ImageAnalysis(2, 2, tuple(basis), cov)


class Verdict(str, Enum):
    TRIVIAL = "Trivial"
    OBSTRUCTION_ONE_FAILS = "ObstructionOneFails"
    LATTICE_OBSTRUCTED = "LatticeObstructed"
    REALIZABLE_ABELIAN = "RealizableAbelian"


def degree_bound(verdict: Verdict, n: int) -> int:
    """Minimal branching degree d(rho) for a translation holonomy."""
    if verdict is Verdict.TRIVIAL:
        return 2 * n + 2
    if verdict is Verdict.REALIZABLE_ABELIAN:
        return 2 * n - 2
    return 2 * n


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    omega: QScalar
    image: ImageAnalysis
    degree_bound: int
    torus_degree: Optional[int] = None
    n: int = 0
    flags: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        doc = {
            "verdict": self.verdict.value,
            "n": self.n,
            "omega": format_scalar(self.omega),
            "omega_float": float(self.omega),
            "image": self.image.to_dict(),
            "degree_bound": self.degree_bound,
        }
        if self.torus_degree is not None:
            doc["torus_degree"] = self.torus_degree
        if self.flags:
            doc["flags"] = list(self.flags)
        return doc


def classify(chi: Character) -> Classification:
    w = omega(chi)
    image = analyze_image(chi)
    flags = []
    if chi.n < 3:
        flags.append("classification only: realization needs genus >= 3")
    if image.abstract_rank == 1 and image.span_dim == 1:
        flags.append("rank-1 discrete image: lattice obstruction not applicable")

    torus_degree = None
    if image.is_lattice:
        q = w / image.covolume
        if not q.is_rational() or q.p.denominator != 1:
            raise AssertionError(f"omega/covolume = {q} is not an integer")
        torus_degree = int(q.p)
        if torus_degree < 0:
            torus_degree = None

    if chi.is_zero():
        verdict = Verdict.TRIVIAL
    elif sign(w) <= 0:
        verdict = Verdict.OBSTRUCTION_ONE_FAILS
    elif image.is_lattice and w < 2 * image.covolume:
        verdict = Verdict.LATTICE_OBSTRUCTED
    else:
        verdict = Verdict.REALIZABLE_ABELIAN
    return Classification(
        verdict, w, image, degree_bound(verdict, chi.n), torus_degree, chi.n, tuple(flags)
    )
