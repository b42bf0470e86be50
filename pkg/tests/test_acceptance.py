"""Acceptance gate.  Each test prints one PASS/FAIL line, then asserts."""

import math
import random

import pytest

from periodforge.builders import build_meromorphic, build_torus, build_xplus
from periodforge.character import Character, Verdict, analyze_image, classify, omega
from periodforge.exactnum import QScalar, QVec2
from periodforge.pipeline import realize
from periodforge.symplectic import (
    act_right,
    complete_symplectic_basis,
    is_normal_form,
    meromorphic_preprocess,
    omega_int,
    reduce_lattice_image,
)
from periodforge.verify import euler_genus, intersection_gram, standard_form

from conftest import (
    SQRT2,
    generator_pool,
    random_lattice_character,
    random_nondiscrete_character,
    random_sqrt2_scalar,
    random_word,
    sympy_is_symplectic,
    union_find_euler,
)


@pytest.fixture
def report(capsys):
    def emit(k, title, ok, detail=""):
        with capsys.disabled():
            print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} {title} {detail}".rstrip())
        assert ok, f"criterion {k} failed: {detail}"

    return emit


def test_criterion_1_lattice_realizations(report):
    rng = random.Random(101)
    bad = []
    for i in range(200):
        n = 3 + i % 3
        chi = random_lattice_character(rng, n)
        rep = realize(chi)
        v = rep.verify_report
        ok = (rep.status == "pass" and rep.path == "lattice_normal_form" and v.genus == n
              and v.total_area == omega(chi) and v.check("pullback").status == "pass")
        if not ok:
            bad.append(chi.dumps())
    report(1, "lattice realizations verified", not bad, f"{200 - len(bad)}/200")


def test_criterion_2_normal_form_reduction(report):
    rng = random.Random(202)
    bad = 0
    for i in range(200):
        chi = random_lattice_character(rng, 3 + i % 3, -6, 6)
        tr = reduce_lattice_image(chi)
        g = tr.accumulated_gamma
        ok = (is_normal_form(tr.output) and tr.check() and g.is_symplectic()
              and tr.input == chi and tr.replay() == tr.output and tr.pull_back(tr.output) == chi)
        bad += not ok
    report(2, "normal form with replayable trace", bad == 0, f"{200 - bad}/200")


def test_criterion_3_boundary_cases(report):
    ok = True
    for n in (3, 4, 5):
        two = Character.from_blocks([[[2, 0], [0, 1]]] + [[[1, 0], [0, 0]]] * (n - 1))
        ok &= realize(two).status == "pass"
        one = Character.from_blocks([[[1, 0], [0, 1]]] + [[[0, 0], [0, 0]]] * (n - 1))
        cls = classify(one)
        ok &= cls.verdict is Verdict.LATTICE_OBSTRUCTED and cls.degree_bound == 2 * n
        rep = realize(one)
        v = rep.verify_report
        ok &= (rep.status == "pass" and rep.path.startswith("meromorphic")
               and v.pole_faces == 1 and v.genus == n and v.branching == 2 * n)
    report(3, "omega = 2 realizes, omega = 1 is obstructed", bool(ok))


def test_criterion_4_xplus_search(report):
    rng = random.Random(404)
    wins = failures = 0
    for _ in range(200):
        chi = random_nondiscrete_character(rng, 3)
        rep = realize(chi, budget=100_000, seed=0)
        if rep.status == "pass":
            wins += 1
        elif rep.status == "fail":
            failures += 1
    ok = wins >= 190 and failures == 0
    report(4, "X+ search over Q(sqrt 2)", ok, f"{wins}/200 found, {failures} failed verification")


def test_criterion_5_covolume_ratio(report):
    rng = random.Random(505)
    bad = 0
    done = 0
    while done < 1000:
        n = rng.randint(1, 4)
        N = [[rng.randint(-5, 5) for _ in range(2 * n)] for _ in range(2)]
        minors = [N[0][i] * N[1][j] - N[0][j] * N[1][i] for i in range(2 * n) for j in range(i + 1, 2 * n)]
        g = math.gcd(*minors)
        if g == 0:
            continue
        if rng.random() < 0.5:
            B = [[QScalar(rng.randint(-4, 4), 0, 0) / rng.randint(1, 3) for _ in range(2)] for _ in range(2)]
            d = 0
        else:
            B = [[random_sqrt2_scalar(rng, -2, 2) for _ in range(2)] for _ in range(2)]
            d = 2
        det_b = B[0][0] * B[1][1] - B[0][1] * B[1][0]
        if det_b.is_zero():
            continue
        rows = [[B[r][0] * N[0][i] + B[r][1] * N[1][i] for i in range(2 * n)] for r in range(2)]
        chi = Character.from_rows(rows[0], rows[1], d)
        im = analyze_image(chi)
        w_n = sum(N[0][2 * j] * N[1][2 * j + 1] - N[0][2 * j + 1] * N[1][2 * j] for j in range(n))
        expected = det_b.sign() * w_n // g
        if not (im.is_lattice and (w_n % g) == 0):
            bad += 1
        else:
            q = omega(chi) / im.covolume
            bad += not (q.q == 0 and q.p.denominator == 1 and q == expected)
        done += 1
    report(5, "omega / covolume is the exact integer predicted", bad == 0, f"{1000 - bad}/1000")


def test_criterion_6_invariance(report):
    rng = random.Random(606)
    chars = []
    for i in range(50):
        kind = i % 3
        if kind == 0:
            chars.append(random_lattice_character(rng, 3))
        elif kind == 1:
            chars.append(random_nondiscrete_character(rng, 3))
        else:
            u = [rng.randint(-2, 2) for _ in range(6)]
            v = [rng.randint(-2, 2) for _ in range(6)]
            chars.append(Character.from_rows(u, v))
    pool = generator_pool(3)
    bad = 0
    for chi in chars:
        base = classify(chi)
        cur = chi
        for _ in range(100):
            cur = act_right(cur, rng.choice(pool))
            c = classify(cur)
            if c.verdict is not base.verdict or c.degree_bound != base.degree_bound:
                bad += 1
                break
    report(6, "verdict and degree bound are Sp-invariant", bad == 0, f"{50 - bad}/50 characters")


def test_criterion_7_symplectic_oracle(report):
    rng = random.Random(707)
    bad_words = 0
    for _ in range(1000):
        n = rng.randint(1, 3)
        g = random_word(rng, n, rng.randint(1, 15))
        bad_words += not sympy_is_symplectic(g.to_list())
    bad_completions = 0
    done = 0
    while done < 1000:
        u = [rng.randint(-20, 20) for _ in range(4)]
        v = [rng.randint(-20, 20) for _ in range(4)]
        if omega_int(u, v) != 1:
            continue
        g = complete_symplectic_basis(u, v)
        cols = [list(c) for c in zip(*g.to_list())]
        bad_completions += not (sympy_is_symplectic(g.to_list()) and cols[0] == u and cols[1] == v)
        done += 1
    ok = bad_words == 0 and bad_completions == 0
    report(7, "generated matrices are symplectic", ok,
           f"words {1000 - bad_words}/1000, completions {1000 - bad_completions}/1000")


def _surface_corpus():
    rng = random.Random(808)
    out = [build_torus(QVec2(1, 0), QVec2(0, 1)), build_torus(QVec2(2, 1), QVec2(SQRT2, 3), 2)]
    out.append(build_xplus(Character.from_blocks([[[1, 0], [0, 1]]] * 3)))
    for i in range(12):
        out.append(realize(random_lattice_character(rng, 3 + i % 3)).surface)
    for _ in range(6):
        out.append(realize(random_nondiscrete_character(rng, 3)).surface)
    for n in (3, 4):
        for chi in (Character.from_blocks([[[1, 0], [0, 1]]] + [[[0, 0], [0, 0]]] * (n - 1)),
                    Character.from_rows([rng.randint(1, 3) for _ in range(2 * n)], [0] * (2 * n))):
            case, tr = meromorphic_preprocess(chi)
            out.append(build_meromorphic(tr.output, case))
    return [s for s in out if s is not None]


def test_criterion_8_surface_invariants(report):
    bad = 0
    corpus = _surface_corpus()
    for s in corpus:
        V, E, F = union_find_euler(s)
        chi_e, _ = euler_genus(s)
        G = intersection_gram(s)
        bad += not (chi_e == V - E + F and G == standard_form(len(s.basis) // 2))
    report(8, "Euler characteristic and intersection form", bad == 0, f"{len(corpus) - bad}/{len(corpus)} surfaces")
