
import pytest

from periodforge.builders import build_meromorphic, build_slit_rectangle, build_torus, build_xplus
from periodforge.character import Character, omega
from periodforge.exactnum import QScalar, QVec2
from periodforge.gluing import Layout
from periodforge.surface import SurfaceError, TranslationSurface
from periodforge.symplectic import meromorphic_preprocess
from periodforge.verify import verify

from conftest import SQRT2

IDENTITY = [[1, 0], [0, 1]]
ZERO_BLOCK = [[0, 0], [0, 0]]


def cones(report):
    return sorted(k for _, k in report.cone_points if k > 1)


def periods_of(report, d=0):
    return Character.from_columns(report.periods, d)


def test_xplus_identity_blocks():
    chi = Character.from_blocks([IDENTITY] * 3)
    rep = verify(build_xplus(chi))
    assert rep.passed
    assert rep.genus == 3 and rep.total_area == 3
    assert cones(rep) == [2, 2, 2, 2]
    assert periods_of(rep) == chi


def test_xplus_genus_two():
    chi = Character.from_blocks([IDENTITY, [[2, 0], [0, 1]]])
    rep = verify(build_xplus(chi))
    assert rep.passed and rep.genus == 2 and rep.total_area == 3
    assert cones(rep) == [2, 2]


def test_xplus_over_sqrt2():
    chi = Character.from_rows([1, 0, SQRT2, 1, 1, -SQRT2], [0, 1, 0, 1, 1, 0], 2)
    rep = verify(build_xplus(chi))
    assert rep.passed and rep.total_area == omega(chi)
    assert periods_of(rep, 2) == chi


def test_xplus_rejects_nonpositive_handle():
    with pytest.raises(SurfaceError):
        build_xplus(Character.from_blocks([IDENTITY, ZERO_BLOCK, IDENTITY]))


@pytest.mark.parametrize(
    "a, expected_area",
    [((2, 1, 1), 2), ((9, 3, 5), 9), ((3, 2), 3)],
)
def test_slit_rectangle(a, expected_area):
    bl = [[[a[0], 0], [0, 1]]] + [[[x, 0], [0, 0]] for x in a[1:]]
    chi = Character.from_blocks(bl)
    rep = verify(build_slit_rectangle(chi))
    assert rep.passed
    assert rep.genus == len(a) and rep.total_area == expected_area
    assert cones(rep) == [2] * (2 * (len(a) - 1))
    assert periods_of(rep) == chi


def test_slit_rectangle_periods_example():
    chi = Character.from_blocks([[[2, 0], [0, 1]], [[1, 0], [0, 0]], [[1, 0], [0, 0]]])
    rep = verify(build_slit_rectangle(chi))
    assert [(p.x, p.y) for p in rep.periods] == [(2, 0), (0, 1), (1, 0), (0, 0), (1, 0), (0, 0)]


def test_slit_rectangle_rejects_non_normal_form():
    with pytest.raises(SurfaceError):
        build_slit_rectangle(Character.from_blocks([IDENTITY] * 3))


def test_meromorphic_case_a():
    chi = Character.from_blocks([IDENTITY, ZERO_BLOCK, ZERO_BLOCK])
    case, tr = meromorphic_preprocess(chi)
    assert case == "A"
    rep = verify(build_meromorphic(tr.output, case))
    assert rep.passed
    assert rep.genus == 3 and rep.pole_faces == 1 and rep.branching == 6
    assert rep.check("area").status == "n/a"


def test_meromorphic_case_b():
    chi = Character.from_rows([1, 2, 1, 1, 3, 1], [0] * 6)
    case, tr = meromorphic_preprocess(chi)
    assert case == "B" and tr.output == chi
    rep = verify(build_meromorphic(tr.output, case))
    assert rep.passed and rep.genus == 3 and rep.pole_faces == 1
    assert periods_of(rep) == chi


def test_meromorphic_zero_character():
    with pytest.raises(SurfaceError):
        build_meromorphic(Character.from_blocks([ZERO_BLOCK] * 3), "A")


def test_builds_are_deterministic():
    chi = Character.from_blocks([[[9, 0], [0, 1]], [[3, 0], [0, 0]], [[5, 0], [0, 0]]])
    assert build_slit_rectangle(chi).dumps() == build_slit_rectangle(chi).dumps()


def test_surface_json_round_trip():
    chi = Character.from_rows([1, 0, SQRT2, 1, 1, -SQRT2], [0, 1, 0, 1, 1, 0], 2)
    s = build_xplus(chi)
    again = TranslationSurface.loads(s.dumps())
    assert again.dumps() == s.dumps()
    assert verify(again).passed


def _square_layout():
    lay = Layout()
    sheet = lay.add_sheet("S")
    sides = lay.parallelogram(sheet, QVec2(0, 0), QVec2(1, 0), QVec2(0, 1), "S")
    return lay, sheet, sides


def test_layout_rejects_unglued_side():
    lay, sheet, _ = _square_layout()
    lay.add_side(sheet, QVec2(QScalar(1) / 4, QScalar(1) / 2), QVec2(QScalar(3) / 4, QScalar(1) / 2), "L")
    with pytest.raises(SurfaceError):
        lay.build([], "abelian")


def test_layout_rejects_crossing_slits():
    lay, sheet, _ = _square_layout()
    h = QScalar(1) / 2
    q1, q3 = QScalar(1) / 4, QScalar(3) / 4
    lay.connector(sheet, QVec2(q1, h), QVec2(q3, h), "a")
    lay.connector(sheet, QVec2(h, q1), QVec2(h, q3), "b")
    with pytest.raises(SurfaceError, match="collision"):
        lay.build([], "abelian")


def test_layout_glue_checks():
    lay, sheet, _ = _square_layout()
    a = lay.add_side(sheet, QVec2(0, 0), QVec2(1, 0), "L")
    b = lay.add_side(sheet, QVec2(0, 0), QVec2(2, 0), "R")
    c = lay.add_side(sheet, QVec2(0, 1), QVec2(1, 1), "L")
    with pytest.raises(SurfaceError, match="translates"):
        lay.glue(a, b)
    with pytest.raises(SurfaceError, match="same bank"):
        lay.glue(a, c)


def test_torus_helper():
    rep = verify(build_torus(QVec2(1, 0), QVec2(0, 1)))
    assert rep.passed and rep.genus == 1 and rep.total_area == 1
