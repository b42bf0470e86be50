"""classify -> reduce -> build -> verify, as one call."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .builders import build_meromorphic, build_slit_rectangle, build_xplus
from .character import Character, Classification, Verdict, classify
from .surface import Provenance, TranslationSurface
from .symplectic import ReductionTrace, act_left, meromorphic_preprocess, reduce_lattice_image, xplus_search
from .verify import VerifyReport, verify

__all__ = ["PipelineError", "RefusedError", "ObstructedError", "RealizationReport", "realize", "reduce"]

MODES = ("auto", "abelian", "meromorphic")


class PipelineError(ValueError):
    pass


class RefusedError(PipelineError):
    """Input outside the range where realization is claimed (genus below 3)."""


class ObstructedError(PipelineError):
    """The requested mode cannot realize this character."""


@dataclass
class RealizationReport:
    input: Character
    classification: Classification
    mode: str
    budget: int
    seed: int
    path: Optional[str] = None
    status: str = "pending"  # "pass", "fail" or "inconclusive"
    trace: Optional[ReductionTrace] = None
    surface: Optional[TranslationSurface] = None
    verify_report: Optional[VerifyReport] = None
    iterations: int = 0
    restarts: int = 0
    surface_file: Optional[str] = None
    timing: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = False) -> dict:
        doc = {
            "input": self.input.to_dict(),
            "classification": self.classification.to_dict(),
            "mode": self.mode,
            "budget": self.budget,
            "seed": self.seed,
            "path": self.path,
            "status": self.status,
            "iterations": self.iterations,
            "restarts": self.restarts,
        }
        if self.trace is not None:
            doc["trace_steps"] = len(self.trace.steps)
            doc["normalized"] = self.trace.output.to_dict()
        if self.surface_file is not None:
            doc["surface_file"] = self.surface_file
        if self.verify_report is not None:
            doc["verify"] = self.verify_report.to_dict()
        if timing:
            doc["timing"] = {k: round(v, 6) for k, v in self.timing.items()}
        return doc


def _choose(cls: Classification, mode: str) -> str:
    if mode not in MODES:
        raise PipelineError(f"unknown mode {mode!r}")
    realizable = cls.verdict is Verdict.REALIZABLE_ABELIAN
    if mode == "abelian" and not realizable:
        raise ObstructedError(f"{cls.verdict.value}: no abelian realization; try --mode meromorphic")
    if mode == "meromorphic" or not realizable:
        return "meromorphic"
    return "lattice_normal_form" if cls.image.is_lattice else "xplus_search"


def reduce(chi: Character, mode: str = "auto", budget: int = 100_000, seed: int = 0):
    """Run only the symplectic part.  Returns ``(path, trace or None, iterations)``."""
    if chi.n < 3:
        raise RefusedError("realization needs genus n >= 3")
    cls = classify(chi)
    path = _choose(cls, mode)
    if path == "lattice_normal_form":
        tr = reduce_lattice_image(chi)
        return path, tr, 0
    if path == "xplus_search":
        res = xplus_search(chi, budget=budget, seed=seed)
        return path, res.trace, res.iterations
    if chi.is_zero():
        raise ObstructedError("the zero character has no realization with one pole")
    case, tr = meromorphic_preprocess(chi)
    return f"meromorphic_{case}", tr, 0


def realize(chi: Character, mode: str = "auto", budget: int = 100_000, seed: int = 0) -> RealizationReport:
    if chi.n < 3:
        raise RefusedError("realization needs genus n >= 3 (below that the classification is not a theorem)")
    t0 = time.perf_counter()
    cls = classify(chi)
    rep = RealizationReport(chi, cls, mode, budget, seed)
    path = _choose(cls, mode)
    t1 = time.perf_counter()
    rep.timing["classify"] = t1 - t0

    if path == "lattice_normal_form":
        tr = reduce_lattice_image(chi)
    elif path == "xplus_search":
        res = xplus_search(chi, budget=budget, seed=seed)
        rep.iterations, rep.restarts = res.iterations, res.restarts
        tr = res.trace
    else:
        if chi.is_zero():
            raise ObstructedError("the zero character has no realization with one pole")
        case, tr = meromorphic_preprocess(chi)
        path = f"meromorphic_{case}"
    rep.path = path
    t2 = time.perf_counter()
    rep.timing["reduce"] = t2 - t1
    if tr is None:
        rep.status = "inconclusive"
        return rep
    rep.trace = tr

    norm = tr.output
    if path == "lattice_normal_form":
        surf = build_slit_rectangle(norm)
    elif path == "xplus_search":
        surf = build_xplus(norm)
    else:
        surf = build_meromorphic(norm, path[-1])
    surf.provenance = Provenance(norm, path, tr)
    if tr.has_left:
        # undo the lattice normalization geometrically so the surface realizes input * G
        Linv = tr.left_inverse()
        surf = surf.linear_image(Linv)
        surf.provenance = Provenance(act_left(norm, Linv), path, tr, pushed_forward=True)
    rep.surface = surf
    t3 = time.perf_counter()
    rep.timing["build"] = t3 - t2

    rep.verify_report = verify(surf)
    rep.timing["verify"] = time.perf_counter() - t3
    rep.status = "pass" if rep.verify_report.passed else "fail"
    return rep
