"""Integer symplectic moves on characters.

Conventions: homology basis ordered ``x_1, y_1, ..., x_n, y_n`` (0-based
indices ``2j`` and ``2j+1``), ``J`` block diagonal with blocks
``[[0, 1], [-1, 0]]``.  A matrix ``g`` acts on a character from the right,
``M -> M g``; column ``k`` of ``g`` is the new ``k``-th basis cycle written in
the old basis.  A 2x2 matrix ``A`` with positive determinant acts from the
left, ``M -> A M``.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .character import Character, analyze_image, classify, omega, omega_blocks, Verdict
from .exactnum import ONE, ZERO, QScalar, QVec2, det2, egcd, bezout, integer_kernel, format_scalar, parse_scalar

log = logging.getLogger(__name__)

__all__ = [
    "SymplecticError",
    "SpIntMatrix",
    "ReductionTrace",
    "standard_j",
    "act_right",
    "act_left",
    "block_sl2",
    "block_swap",
    "shear",
    "cross_shear",
    "transvection",
    "complete_symplectic_basis",
    "clear_zero_coordinates",
    "reduce_lattice_image",
    "is_normal_form",
    "xplus_search",
    "meromorphic_preprocess",
    "SearchResult",
]


class SymplecticError(ValueError):
    pass


def standard_j(n: int) -> list[list[int]]:
    J = [[0] * (2 * n) for _ in range(2 * n)]
    for j in range(n):
        J[2 * j][2 * j + 1] = 1
        J[2 * j + 1][2 * j] = -1
    return J


def _matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = [[0] * p for _ in range(n)]
    for i in range(n):
        Ai, Oi = A[i], out[i]
        for k in range(m):
            a = Ai[k]
            if a:
                Bk = B[k]
                for j in range(p):
                    if Bk[j]:
                        Oi[j] += a * Bk[j]
    return out


def _transpose(A):
    return [list(r) for r in zip(*A)]


def omega_int(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(a[2 * j] * b[2 * j + 1] - a[2 * j + 1] * b[2 * j] for j in range(len(a) // 2))


class SpIntMatrix:
    """An element of Sp(2n, Z); the symplectic identity is checked on construction."""

    __slots__ = ("n", "entries", "word")

    def __init__(self, entries, word: Sequence[str] = (), check: bool = True):
        rows = tuple(tuple(int(x) for x in r) for r in entries)
        size = len(rows)
        if size == 0 or size % 2 or any(len(r) != size for r in rows):
            raise SymplecticError("entries must form a square 2n x 2n integer matrix")
        object.__setattr__(self, "n", size // 2)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "word", tuple(word))
        if check and not self.is_symplectic():
            raise SymplecticError("matrix does not satisfy M^T J M = J")

    def __setattr__(self, key, value):
        raise AttributeError("SpIntMatrix is immutable")

    def is_symplectic(self) -> bool:
        J = standard_j(self.n)
        M = [list(r) for r in self.entries]
        return _matmul(_matmul(_transpose(M), J), M) == J

    @classmethod
    def identity(cls, n: int) -> "SpIntMatrix":
        return cls([[int(i == j) for j in range(2 * n)] for i in range(2 * n)], (), check=False)

    def is_identity(self) -> bool:
        return all(self.entries[i][j] == (i == j) for i in range(2 * self.n) for j in range(2 * self.n))

    def __matmul__(self, other: "SpIntMatrix") -> "SpIntMatrix":
        if self.n != other.n:
            raise SymplecticError("genus mismatch")
        prod = _matmul(self.entries, other.entries)
        return SpIntMatrix(prod, self.word + other.word, check=False)

    def inverse(self) -> "SpIntMatrix":
        # g^{-1} = -J g^T J
        J = standard_j(self.n)
        inv = _matmul(_matmul(J, _transpose(self.entries)), J)
        inv = [[-x for x in r] for r in inv]
        return SpIntMatrix(inv, tuple(f"inv({w})" for w in reversed(self.word)), check=False)

    def determinant(self) -> int:
        from fractions import Fraction

        m = [[Fraction(x) for x in r] for r in self.entries]
        size, det = len(m), Fraction(1)
        for c in range(size):
            piv = next((i for i in range(c, size) if m[i][c] != 0), None)
            if piv is None:
                return 0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            det *= m[c][c]
            for i in range(c + 1, size):
                f = m[i][c] / m[c][c]
                if f:
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return int(det)

    def __eq__(self, other):
        return isinstance(other, SpIntMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"SpIntMatrix(n={self.n}, word={list(self.word)})"

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


# -- generators -------------------------------------------------------------

def _embed(n: int, updates: dict, tag: str) -> SpIntMatrix:
    E = [[int(i == j) for j in range(2 * n)] for i in range(2 * n)]
    for (i, j), val in updates.items():
        E[i][j] = val
    return SpIntMatrix(E, (tag,))


def block_sl2(n: int, j: int, S) -> SpIntMatrix:
    """``S`` in SL(2, Z) acting on the basis pair of handle ``j``."""
    (a, b), (c, d) = S
    if a * d - b * c != 1:
        raise SymplecticError("block move must have determinant 1")
    return _embed(
        n,
        {(2 * j, 2 * j): a, (2 * j, 2 * j + 1): b, (2 * j + 1, 2 * j): c, (2 * j + 1, 2 * j + 1): d},
        f"sl2[{j + 1}]({a},{b},{c},{d})",
    )


def block_swap(n: int, j: int, k: int) -> SpIntMatrix:
    if j == k:
        return SpIntMatrix.identity(n)
    upd = {}
    for off in (0, 1):
        upd[(2 * j + off, 2 * j + off)] = 0
        upd[(2 * k + off, 2 * k + off)] = 0
        upd[(2 * j + off, 2 * k + off)] = 1
        upd[(2 * k + off, 2 * j + off)] = 1
    return _embed(n, upd, f"swap[{j + 1},{k + 1}]")


def shear(n: int, j: int, k: int, t: int) -> SpIntMatrix:
    """Heisenberg shear ``x_k -> x_k - t x_j``, ``y_j -> y_j + t y_k``.

    Moves ``t * det(z_j, w_k)`` of area from handle ``k`` to handle ``j``.
    """
    if j == k:
        raise SymplecticError("shear needs two distinct handles")
    return _embed(n, {(2 * j, 2 * k): -t, (2 * k + 1, 2 * j + 1): t}, f"shear[{j + 1}<-{k + 1}]({t})")


def cross_shear(n: int, j: int, k: int, s: int) -> SpIntMatrix:
    """``y_j -> y_j + s x_k`` and ``y_k -> y_k + s x_j``."""
    if j == k:
        raise SymplecticError("cross shear needs two distinct handles")
    return _embed(n, {(2 * k, 2 * j + 1): s, (2 * j, 2 * k + 1): s}, f"xshear[{j + 1},{k + 1}]({s})")


def transvection(n: int, vec: Sequence[int], t: int) -> SpIntMatrix:
    """``z -> z + t * omega(v, z) * v`` for an integer vector ``v``."""
    size = 2 * n
    J = standard_j(n)
    vJ = [sum(vec[i] * J[i][k] for i in range(size)) for k in range(size)]
    E = [[int(i == k) + t * vec[i] * vJ[k] for k in range(size)] for i in range(size)]
    return SpIntMatrix(E, (f"tv({','.join(map(str, vec))};{t})",))


def _from_columns(n: int, cols: Sequence[Sequence[int]], tag: str) -> SpIntMatrix:
    return SpIntMatrix(_transpose([list(c) for c in cols]), (tag,))


# -- actions ----------------------------------------------------------------

def act_right(chi: Character, g: SpIntMatrix) -> Character:
    if g.n != chi.n:
        raise SymplecticError(f"dimension mismatch: character genus {chi.n}, matrix genus {g.n}")
    size = 2 * chi.n
    rows = []
    for r in chi.rows:
        new = []
        for k in range(size):
            acc = ZERO
            for i in range(size):
                c = g.entries[i][k]
                if c:
                    acc = acc + (r[i] if c == 1 else r[i] * c)
            new.append(acc)
        rows.append(tuple(new))
    return Character(chi.n, chi.d, tuple(rows))


def _left_det(A) -> QScalar:
    (a, b), (c, d) = A
    return a * d - b * c


def _coerce_left(A):
    return tuple(tuple(QScalar.coerce(x) for x in r) for r in A)


def act_left(chi: Character, A) -> Character:
    A = _coerce_left(A)
    if _left_det(A).sign() <= 0:
        raise SymplecticError("left action needs a matrix with positive determinant")
    (a, b), (c, d) = A
    u, v = chi.rows
    nu = tuple(a * x + b * y for x, y in zip(u, v))
    nv = tuple(c * x + d * y for x, y in zip(u, v))
    return Character(chi.n, chi.d, (nu, nv))


def _left_mul(A, B):
    return tuple(
        tuple(A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)) for i in range(2)
    )


def _left_inverse(A):
    (a, b), (c, d) = A
    det = a * d - b * c
    return ((d / det, -b / det), (-c / det, a / det))


_LEFT_ID = ((ONE, ZERO), (ZERO, ONE))


# -- traces -----------------------------------------------------------------

@dataclass
class TraceStep:
    description: str
    kind: str  # "gamma" or "left"
    matrix: object  # SpIntMatrix or 2x2 tuple of QScalar

    def to_dict(self) -> dict:
        if self.kind == "gamma":
            return {"description": self.description, "kind": "gamma",
                    "matrix": self.matrix.to_list(), "word": list(self.matrix.word)}
        return {"description": self.description, "kind": "left",
                "matrix": [[format_scalar(x) for x in r] for r in self.matrix]}


@dataclass
class ReductionTrace:
    input: Character
    output: Character = None
    steps: list = field(default_factory=list)
    accumulated_gamma: SpIntMatrix = None
    accumulated_left: tuple = _LEFT_ID
    iterations: int = 0

    def __post_init__(self):
        if self.output is None:
            self.output = self.input
        if self.accumulated_gamma is None:
            self.accumulated_gamma = SpIntMatrix.identity(self.input.n)

    def apply(self, g: SpIntMatrix, description: str) -> Character:
        self.output = act_right(self.output, g)
        self.accumulated_gamma = self.accumulated_gamma @ g
        self.steps.append(TraceStep(description, "gamma", g))
        return self.output

    def apply_left(self, A, description: str) -> Character:
        A = _coerce_left(A)
        self.output = act_left(self.output, A)
        self.accumulated_left = _left_mul(A, self.accumulated_left)
        self.steps.append(TraceStep(description, "left", A))
        return self.output

    def extend(self, other: "ReductionTrace") -> None:
        if other.input != self.output:
            raise SymplecticError("cannot chain traces: input does not match output")
        for st in other.steps:
            if st.kind == "gamma":
                self.apply(st.matrix, st.description)
            else:
                self.apply_left(st.matrix, st.description)
        self.iterations += other.iterations

    def replay(self) -> Character:
        chi = self.input
        for st in self.steps:
            chi = act_right(chi, st.matrix) if st.kind == "gamma" else act_left(chi, st.matrix)
        return chi

    def check(self) -> bool:
        """Replay matches output, and output == L * input * G."""
        if self.replay() != self.output:
            return False
        direct = act_right(act_left(self.input, self.accumulated_left), self.accumulated_gamma)
        if direct != self.output:
            return False
        return omega(self.output) == _left_det(self.accumulated_left) * omega(self.input)

    @property
    def has_left(self) -> bool:
        return self.accumulated_left != _LEFT_ID

    def left_inverse(self) -> tuple:
        return _left_inverse(self.accumulated_left)

    def pull_back(self, chi: Character) -> Character:
        """Undo the trace: ``L^{-1} chi G^{-1}``."""
        return act_right(act_left(chi, _left_inverse(self.accumulated_left)),
                         self.accumulated_gamma.inverse())

    def to_dict(self) -> dict:
        return {
            "input": self.input.to_dict(),
            "output": self.output.to_dict(),
            "steps": [s.to_dict() for s in self.steps],
            "accumulated_gamma": self.accumulated_gamma.to_list(),
            "accumulated_left": [[format_scalar(x) for x in r] for r in self.accumulated_left],
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ReductionTrace":
        inp = Character.from_dict(doc["input"])
        tr = cls(inp)
        for st in doc["steps"]:
            if st["kind"] == "gamma":
                tr.apply(SpIntMatrix(st["matrix"], st.get("word", ())), st["description"])
            else:
                A = tuple(tuple(parse_scalar(x) for x in r) for r in st["matrix"])
                tr.apply_left(A, st["description"])
        tr.iterations = int(doc.get("iterations", 0))
        out = Character.from_dict(doc["output"])
        if out != tr.output:
            raise SymplecticError("trace document does not replay to its recorded output")
        if tr.accumulated_gamma.to_list() != doc["accumulated_gamma"]:
            raise SymplecticError("trace document: accumulated gamma mismatch")
        return tr


# -- completion -------------------------------------------------------------

def complete_symplectic_basis(u: Sequence[int], v: Sequence[int]) -> SpIntMatrix:
    """Extend integer ``u, v`` in Z^4 with ``omega(u, v) == 1`` to a basis of Sp(4, Z).

    Columns of the result are ``u, v, p, q`` where ``p, q`` span the integer
    points of the symplectic complement of ``span(u, v)``.
    """
    u, v = [int(x) for x in u], [int(x) for x in v]
    if len(u) != 4 or len(v) != 4:
        raise SymplecticError("completion is defined for vectors in Z^4")
    if omega_int(u, v) != 1:
        raise SymplecticError(f"omega(u, v) = {omega_int(u, v)}, expected 1")
    J = standard_j(2)
    # W^perp = {z : omega(z, u) = omega(z, v) = 0}; omega(z, a) = z . (J a)
    Ju = [sum(J[i][k] * u[k] for k in range(4)) for i in range(4)]
    Jv = [sum(J[i][k] * v[k] for k in range(4)) for i in range(4)]
    kern = integer_kernel([Jv, Ju])
    if len(kern) != 2:
        raise AssertionError("symplectic complement must have rank 2")
    p, q = kern
    w = omega_int(p, q)
    if w == -1:
        p, q = q, p
    elif w != 1:
        raise AssertionError(f"complement basis has omega {w}")
    return _from_columns(2, [u, v, p, q], "completion")


def _embed4(n: int, g4: SpIntMatrix, j: int, k: int, tag: str) -> SpIntMatrix:
    """Place an Sp(4) element on handles ``j`` (first pair) and ``k`` (second pair)."""
    idx = [2 * j, 2 * j + 1, 2 * k, 2 * k + 1]
    E = [[int(a == b) for b in range(2 * n)] for a in range(2 * n)]
    for a in range(4):
        for b in range(4):
            E[idx[a]][idx[b]] = g4.entries[a][b]
    return SpIntMatrix(E, (tag,))


# -- zero clearing ----------------------------------------------------------

def _sl2_to_second(c: int, d: int):
    """S in SL(2, Z) with ``(c, d) S == (0, gcd)``."""
    g, x, y = egcd(c, d)
    return ((d // g, x), (-c // g, y)), g


def _sl2_to_first(a: int, b: int):
    """S in SL(2, Z) with ``(a, b) S == (gcd, 0)``."""
    g, x, y = egcd(a, b)
    return ((x, -b // g), (y, a // g)), g


def _nonzero(x: QScalar) -> bool:
    return not x.is_zero()


def clear_zero_coordinates(chi: Character, form: str = "row") -> ReductionTrace:
    """Find an integer symplectic move that removes zeros.

    ``form="row"``: every coordinate of the real row ``u`` becomes nonzero.
    ``form="blocks"``: every block determinant becomes nonzero; needs
    ``omega(chi) > 0``.
    """
    tr = ReductionTrace(chi)
    if form == "row":
        if all(x.is_zero() for x in chi.u):
            raise SymplecticError("row u is zero; nothing to spread")
        _clear_row(tr, 0)
    elif form == "blocks":
        if omega(chi).sign() <= 0:
            raise SymplecticError("block form needs omega(chi) > 0")
        _clear_blocks(tr)
    else:
        raise ValueError(f"unknown form {form!r}")
    return tr


def _clear_row(tr: ReductionTrace, row: int) -> None:
    n = tr.input.n
    # pass 1: blocks with exactly one zero entry are fixed in place
    for j in range(n):
        r = tr.output.rows[row]
        a, b = r[2 * j], r[2 * j + 1]
        if a.is_zero() and _nonzero(b):
            tr.apply(block_sl2(n, j, ((1, 0), (1, 1))), f"fill x{j + 1} from y{j + 1}")
        elif b.is_zero() and _nonzero(a):
            tr.apply(block_sl2(n, j, ((1, 1), (0, 1))), f"fill y{j + 1} from x{j + 1}")
    # pass 2: empty blocks borrow from a full one; the donor block is untouched
    r = tr.output.rows[row]
    donor = next(j for j in range(n) if _nonzero(r[2 * j]))
    for j in range(n):
        r = tr.output.rows[row]
        if r[2 * j].is_zero() and r[2 * j + 1].is_zero():
            tr.apply(shear(n, donor, j, -1), f"fill x{j + 1} from x{donor + 1}")
            tr.apply(block_sl2(n, j, ((1, 1), (0, 1))), f"fill y{j + 1} from x{j + 1}")
    assert all(_nonzero(x) for x in tr.output.rows[row])


def _clear_blocks(tr: ReductionTrace) -> None:
    """Make every block determinant nonzero; needs independent rows."""
    n = tr.input.n
    for j in range(n):
        if _nonzero(omega_blocks(tr.output)[j]):
            continue
        chi = tr.output
        z, w = chi.column(2 * j), chi.column(2 * j + 1)
        if z.is_zero() and w.is_zero():
            donor = next(k for k in range(n) if k != j and not (chi.column(2 * k).is_zero() and chi.column(2 * k + 1).is_zero()))
            if chi.column(2 * donor).is_zero():
                tr.apply(block_sl2(n, donor, ((0, 1), (-1, 0))), f"rotate handle {donor + 1}")
            tr.apply(shear(n, donor, j, -1), f"seed x{j + 1} from x{donor + 1}")
            chi = tr.output
            z, w = chi.column(2 * j), chi.column(2 * j + 1)
        if z.is_zero():
            tr.apply(block_sl2(n, j, ((0, 1), (-1, 0))), f"rotate handle {j + 1}")
            chi = tr.output
        zj = chi.column(2 * j)
        # some column of another handle is not parallel to z_j
        found = False
        for k in range(n):
            if k == j:
                continue
            for rot, S in ((False, None), (True, ((0, 1), (-1, 0)))):
                wk = chi.column(2 * k) if rot else chi.column(2 * k + 1)
                c = det2(zj, wk)
                if c.is_zero():
                    continue
                if rot:
                    tr.apply(block_sl2(n, k, S), f"rotate handle {k + 1}")
                    chi = tr.output
                wk_omega = omega_blocks(chi)[k]
                for t in (1, 2):
                    if not (wk_omega - c * t).is_zero():
                        break
                tr.apply(shear(n, j, k, t), f"transfer area {k + 1}->{j + 1}")
                found = True
                break
            if found:
                break
        if not found:
            raise SymplecticError("rows are dependent; block determinants cannot be separated")
    assert all(_nonzero(w) for w in omega_blocks(tr.output))


# -- lattice normal form ----------------------------------------------------

def is_normal_form(chi: Character) -> bool:
    """``M_1 = [[w, 0], [0, 1]]``, ``M_j = [[a_j, 0], [0, 0]]`` with ``0 < a_j < w``."""
    w = omega(chi)
    (a1, b1), (c1, d1) = chi.block(0)
    if not (a1 == w and b1.is_zero() and c1.is_zero() and d1 == 1):
        return False
    for j in range(1, chi.n):
        (a, b), (c, d) = chi.block(j)
        if not (b.is_zero() and c.is_zero() and d.is_zero() and ZERO < a < w):
            return False
    return True


def _int_rows(chi: Character) -> list[list[int]]:
    rows = []
    for r in chi.rows:
        row = []
        for x in r:
            if not x.is_rational() or x.p.denominator != 1:
                raise AssertionError(f"expected an integer entry, got {x}")
            row.append(int(x.p))
        rows.append(row)
    return rows


def reduce_lattice_image(chi: Character) -> ReductionTrace:
    """Reduce a realizable character with lattice image to the slit-rectangle normal form."""
    cls = classify(chi)
    if cls.verdict is not Verdict.REALIZABLE_ABELIAN or not cls.image.is_lattice:
        raise SymplecticError(
            f"needs a realizable character with rank-2 lattice image (verdict {cls.verdict.value})"
        )
    if chi.n < 3:
        raise SymplecticError("lattice reduction needs genus n >= 3")
    n = chi.n
    tr = ReductionTrace(chi)

    # image lattice -> Z^2
    b1, b2 = cls.image.lattice_basis
    if det2(b1, b2).sign() < 0:
        b1, b2 = b2, b1
    B = ((b1.x, b2.x), (b1.y, b2.y))
    A = _left_inverse(B)
    if A != _LEFT_ID:
        tr.apply_left(A, "normalize image lattice to Z^2")

    # stage 1: v -> e_{y1}
    for j in range(n):
        v = _int_rows(tr.output)[1]
        c, d = v[2 * j], v[2 * j + 1]
        if c != 0 or d < 0:
            if c == 0 and d == 0:
                continue
            S, _ = _sl2_to_second(c, d)
            tr.apply(block_sl2(n, j, S), f"gcd elimination: clear c{j + 1}")
    v = _int_rows(tr.output)[1]
    if v[1] == 0:
        k = next(k for k in range(n) if v[2 * k + 1] != 0)
        tr.apply(block_swap(n, 0, k), f"gcd elimination: bring handle {k + 1} first")
    for j in range(1, n):
        v = _int_rows(tr.output)[1]
        g1, gj = v[1], v[2 * j + 1]
        if gj == 0:
            continue
        G, _, _ = egcd(g1, gj)
        g1p, gjp = g1 // G, gj // G
        # alpha * gj' - beta * g1' = 1
        _, alpha, mbeta = egcd(gjp, g1p)
        beta = -mbeta
        p = [alpha, 0, beta, 0]
        q = [0, gjp, 0, -g1p]
        g4 = complete_symplectic_basis(p, q)
        cols = [[g4.entries[i][k] for i in range(4)] for k in range(4)]
        # completed vectors take handle 1, (p, q) handle j
        reordered = _from_columns(2, [cols[2], cols[3], cols[0], cols[1]], "completion")
        tr.apply(_embed4(n, reordered, 0, j, f"bezout[1,{j + 1}]"),
                 f"gcd elimination: combine handles 1 and {j + 1} (alpha={alpha}, beta={beta})")
        v = _int_rows(tr.output)[1]
        c, d = v[0], v[1]
        if c != 0 or d < 0:
            S, _ = _sl2_to_second(c, d)
            tr.apply(block_sl2(n, 0, S), "gcd elimination: clear c1")
    v = _int_rows(tr.output)[1]
    if v != [0, 1] + [0] * (2 * n - 2):
        raise AssertionError(f"imaginary row not reduced to e_y1: {v}")

    # stage 2: real row; u = (w, b1, a2, b2, ...)
    w = _int_rows(tr.output)[0][0]
    for j in range(1, n):
        u = _int_rows(tr.output)[0]
        a, b = u[2 * j], u[2 * j + 1]
        if b != 0 or a < 0:
            S, _ = _sl2_to_first(a, b)
            tr.apply(block_sl2(n, j, S), f"gcd elimination: clear b{j + 1}")
    u = _int_rows(tr.output)[0]
    b1v = u[1]
    if b1v != 0:
        gs = [w] + [u[2 * j] for j in range(1, n)]
        G, coeffs = bezout(gs)
        if G != 1:
            raise AssertionError("image is not Z^2 after normalization")
        coeffs = [-b1v * c for c in coeffs]
        for j in range(1, n):
            if coeffs[j]:
                tr.apply(cross_shear(n, 0, j, coeffs[j]), f"gcd elimination: shift b1 by a{j + 1}")
        if coeffs[0]:
            tr.apply(block_sl2(n, 0, ((1, coeffs[0]), (0, 1))), "gcd elimination: shift b1 by omega")
        for j in range(1, n):
            u = _int_rows(tr.output)[0]
            a, b = u[2 * j], u[2 * j + 1]
            if b != 0 or a < 0:
                S, _ = _sl2_to_first(a, b)
                tr.apply(block_sl2(n, j, S), f"gcd elimination: clear b{j + 1}")

    # stage 3: Heisenberg shear, 0 <= a_j < w
    for j in range(1, n):
        a = _int_rows(tr.output)[0][2 * j]
        t = a // w
        if t:
            tr.apply(shear(n, 0, j, t), f"heisenberg shear: a{j + 1} mod omega")

    # stage 4: duplication fills zero a_j
    u = _int_rows(tr.output)[0]
    donors = [j for j in range(1, n) if u[2 * j] != 0]
    if not donors:
        raise AssertionError("all a_j vanish although omega >= 2 * area")
    k = donors[0]
    for j in range(1, n):
        if _int_rows(tr.output)[0][2 * j] == 0:
            tr.apply(shear(n, k, j, -1), f"duplication: a{j + 1} := a{k + 1}")

    if not is_normal_form(tr.output):
        raise AssertionError(f"reduction did not reach normal form: {tr.output}")
    return tr


# -- X_+ search -------------------------------------------------------------

def _primitive_completion(p: int, q: int):
    """SL(2, Z) matrix with first column ``(p, q)``."""
    g, x, y = egcd(p, q)
    assert g == 1
    # p*x + q*y = 1 -> [[p, -y], [q, x]]
    return ((p, -y), (q, x))


def _cf_candidates(alpha: QScalar, beta: QScalar, depth: int = 48):
    """Coprime (m, l) making ``m*alpha + l*beta`` small, from small pairs and convergents."""
    seen = set()
    for m in range(-3, 4):
        for l in range(-3, 4):
            if (m or l) and egcd(m, l)[0] == 1 and (m, l) not in seen:
                seen.add((m, l))
                yield m, l
    if beta.is_zero():
        return
    x = -alpha / beta
    h0, h1 = 1, x.floor()
    k0, k1 = 0, 1
    rest = x - h1
    yield (k1, h1)
    for _ in range(depth):
        if rest.is_zero():
            return
        x = rest.inverse()
        a = x.floor()
        rest = x - a
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        # m*alpha + l*beta with l/m ~ -alpha/beta
        yield (k1, h1)


_J_CANDIDATES = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2)]


def _transfer(tr: ReductionTrace, j: int, k: int, lo: QScalar, hi: QScalar) -> bool:
    """Redistribute area between handles ``j`` and ``k`` so ``omega_j`` lands in ``(lo, hi)``."""
    chi = tr.output
    n = chi.n
    wj = omega_blocks(chi)[j]
    if lo < wj < hi:
        return True
    width = hi - lo
    for pj, qj in _J_CANDIDATES:
        zj = chi.column(2 * j) * pj + chi.column(2 * j + 1) * qj
        zk, wk = chi.column(2 * k), chi.column(2 * k + 1)
        alpha, beta = det2(zj, zk), det2(zj, wk)
        for m, l in _cf_candidates(alpha, beta):
            c = alpha * m + beta * l
            if c.is_zero() or not abs(c) < width:
                continue
            if c.sign() > 0:
                t = ((lo - wj) / c).floor() + 1
            else:
                t = -(((lo - wj) / (-c)).floor() + 1)
            if not (lo < wj + c * t < hi) or t == 0:
                continue
            if (pj, qj) != (1, 0):
                tr.apply(block_sl2(n, j, _primitive_completion(pj, qj)), f"basis change on handle {j + 1}")
            _, x, y = egcd(l, m)
            # [[x, m], [-y, l]]: det = x*l + y*m = 1, second column (m, l)
            if (m, l) != (0, 1):
                tr.apply(block_sl2(n, k, ((x, m), (-y, l))), f"basis change on handle {k + 1}")
            tr.apply(shear(n, j, k, t), f"transfer area {k + 1}->{j + 1} (t={t})")
            got = omega_blocks(tr.output)[j]
            assert lo < got < hi, "transfer missed its target"
            return True
    return False


def _potential(chi: Character):
    ws = omega_blocks(chi)
    return (sum(1 for w in ws if w.sign() > 0), min(ws))


def _guided(tr: ReductionTrace, budget_left: int) -> bool:
    n = tr.input.n
    failed: set = set()
    steps = 0
    while steps < budget_left:
        ws = omega_blocks(tr.output)
        if all(w.sign() > 0 for w in ws):
            return True
        negs = sorted((j for j in range(n) if ws[j].sign() <= 0), key=lambda j: ws[j])
        poss = sorted((j for j in range(n) if ws[j].sign() > 0), key=lambda j: ws[j], reverse=True)
        if not poss:
            return False
        progressed = False
        for k in negs:
            for p in poss:
                if (p, k) in failed:
                    continue
                s = ws[p] + ws[k]
                if s.sign() > 0:
                    before = len(tr.steps)
                    if _transfer(tr, k, p, ZERO, s):
                        steps += len(tr.steps) - before
                        progressed = True
                        break
                    failed.add((p, k))
            if progressed:
                break
        if progressed:
            continue
        # gather area into the largest positive handle
        top = poss[0]
        for q in poss[1:]:
            if (top, q) in failed:
                continue
            lo = ws[top] + ws[q] / 2
            hi = ws[top] + ws[q]
            before = len(tr.steps)
            if _transfer(tr, top, q, lo, hi):
                steps += len(tr.steps) - before
                progressed = True
                break
            failed.add((top, q))
        if not progressed:
            return False
    return False


def _generator_pool(n: int):
    pool = []
    for j in range(n):
        pool += [block_sl2(n, j, ((1, 1), (0, 1))), block_sl2(n, j, ((1, -1), (0, 1))),
                 block_sl2(n, j, ((1, 0), (1, 1))), block_sl2(n, j, ((1, 0), (-1, 1)))]
        for k in range(n):
            if k != j:
                pool += [shear(n, j, k, 1), shear(n, j, k, -1)]
                if k > j:
                    pool += [block_swap(n, j, k), cross_shear(n, j, k, 1), cross_shear(n, j, k, -1)]
    return pool


@dataclass
class SearchResult:
    trace: Optional[ReductionTrace]
    iterations: int
    restarts: int

    @property
    def success(self) -> bool:
        return self.trace is not None


def xplus_search(chi: Character, budget: int = 100_000, seed: int = 0) -> SearchResult:
    """Look for an integer symplectic move putting every block determinant above zero.

    Returns a result whose ``trace`` is ``None`` when the budget runs out; that
    is an inconclusive outcome, not a proof that no move exists.
    """
    if omega(chi).sign() <= 0:
        raise SymplecticError("search needs omega(chi) > 0")
    if analyze_image(chi).is_lattice:
        raise SymplecticError("lattice images go through reduce_lattice_image")
    if chi.n < 3:
        raise SymplecticError("search needs genus n >= 3")
    n = chi.n
    if all(w.sign() > 0 for w in omega_blocks(chi)):
        return SearchResult(ReductionTrace(chi), 0, 0)

    rng = random.Random(seed)
    pool = _generator_pool(n)
    used = 0
    restarts = 0
    tr = ReductionTrace(chi)
    tr.extend(clear_zero_coordinates(chi, "blocks"))
    used += len(tr.steps)
    while used < budget:
        start = len(tr.steps)
        if _guided(tr, budget - used):
            used += len(tr.steps) - start
            tr.iterations = used
            return SearchResult(tr, used, restarts)
        used += len(tr.steps) - start
        # greedy pass over the generator pool, then a seeded random kick
        best, best_pot = None, _potential(tr.output)
        for g in pool:
            used += 1
            pot = _potential(act_right(tr.output, g))
            if pot > best_pot:
                best, best_pot = g, pot
        if best is not None:
            tr.apply(best, "greedy step")
            continue
        restarts += 1
        for _ in range(rng.randint(2, 6)):
            tr.apply(rng.choice(pool), f"random kick (restart {restarts})")
            used += 1
        if any(w.is_zero() for w in omega_blocks(tr.output)):
            before = len(tr.steps)
            tr.extend(clear_zero_coordinates(tr.output, "blocks"))
            used += len(tr.steps) - before
    log.info("xplus search exhausted budget %d after %d restarts", budget, restarts)
    return SearchResult(None, used, restarts)


# -- meromorphic preprocessing ---------------------------------------------

def meromorphic_preprocess(chi: Character):
    """Prepare a nonzero character for the one-pole constructions.

    Returns ``(case, trace)``.  Case ``"A"`` (independent rows): every block
    determinant nonzero and ``omega_1 < 0``.  Case ``"B"`` (dependent rows):
    imaginary row zero and every ``a_j, b_j > 0``.
    """
    if chi.is_zero():
        raise SymplecticError("the one-pole construction needs a nonzero character")
    n = chi.n
    tr = ReductionTrace(chi)
    if analyze_image(chi).span_dim == 2:
        _clear_blocks(tr)
        ws = omega_blocks(tr.output)
        negs = [j for j in range(n) if ws[j].sign() < 0]
        if not negs:
            if n < 2:
                raise SymplecticError("genus 1 character with positive area has no one-pole model")
            s = ws[0] + ws[1]
            if not _transfer(tr, 0, 1, -s, ZERO):
                raise SymplecticError("could not create a handle with negative area")
            negs = [0]
        if negs[0] != 0:
            tr.apply(block_swap(n, 0, negs[0]), f"relabel: handle {negs[0] + 1} first")
        assert omega_blocks(tr.output)[0].sign() < 0
        assert all(not w.is_zero() for w in omega_blocks(tr.output))
        return "A", tr

    u, v = tr.output.rows
    if all(x.is_zero() for x in u):
        tr.apply_left(((0, 1), (-1, 0)), "rotate: imaginary row becomes real")
    else:
        i = next(i for i, x in enumerate(u) if _nonzero(x))
        ratio = v[i] / u[i]
        if not ratio.is_zero():
            tr.apply_left(((ONE, ZERO), (-ratio, ONE)), "shear: kill imaginary row")
    assert all(x.is_zero() for x in tr.output.v)
    _clear_row(tr, 0)
    for j in range(n):
        a = tr.output.u[2 * j]
        if a.sign() < 0:
            tr.apply(block_sl2(n, j, ((-1, 0), (0, -1))), f"negate handle {j + 1}")
        a, b = tr.output.u[2 * j], tr.output.u[2 * j + 1]
        if b.sign() < 0:
            k = (-b / a).floor() + 1
            tr.apply(block_sl2(n, j, ((1, k), (0, 1))), f"make b{j + 1} positive")
    assert all(x.sign() > 0 for x in tr.output.u)
    return "B", tr
