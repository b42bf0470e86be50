"""Command line front end: ``period-forge classify|reduce|realize|verify|degree``.

Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .character import Character, CharacterError, classify
from .exactnum import FieldError, format_scalar
from .pipeline import ObstructedError, PipelineError, RefusedError, realize, reduce
from .surface import SurfaceError, TranslationSurface
from .symplectic import SymplecticError
from .verify import verify

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("periodforge")


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load_character(path: str) -> Character:
    try:
        return Character.loads(_read(path))
    except (CharacterError, FieldError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(doc, text: str, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(text)


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


# -- commands ---------------------------------------------------------------

def cmd_classify(args) -> int:
    chi = _load_character(args.file)
    cls = classify(chi)
    lines = [f"{cls.verdict.value}, d(rho)={cls.degree_bound}",
             f"n: {cls.n}",
             f"omega: {format_scalar(cls.omega)} (~{float(cls.omega):.6g})",
             f"image: abstract rank {cls.image.abstract_rank}, real span {cls.image.span_dim}, "
             + ("discrete" if cls.image.discrete else "not discrete")]
    if cls.image.covolume is not None:
        lines.append(f"covolume: {format_scalar(cls.image.covolume)}")
    if cls.torus_degree is not None:
        lines.append(f"torus degree: {cls.torus_degree}")
    lines += [f"note: {f}" for f in cls.flags]
    _emit(cls.to_dict(), "\n".join(lines) + "\n", args.format)
    return EXIT_PASS


def cmd_degree(args) -> int:
    chi = _load_character(args.file)
    cls = classify(chi)
    doc = {"n": chi.n, "verdict": cls.verdict.value, "degree_bound": cls.degree_bound}
    _emit(doc, f"d(rho) = {cls.degree_bound} ({cls.verdict.value}, n={chi.n})\n", args.format)
    return EXIT_PASS


def cmd_reduce(args) -> int:
    chi = _load_character(args.file)
    path, tr, iters = reduce(chi, args.mode, args.budget, args.seed)
    if tr is None:
        doc = {"path": path, "status": "inconclusive", "budget": args.budget, "seed": args.seed,
               "iterations": iters}
        _emit(doc, f"inconclusive: no move found within budget {args.budget} (seed {args.seed})\n", args.format)
        return EXIT_INCONCLUSIVE
    doc = {"path": path, "budget": args.budget, "seed": args.seed, "iterations": iters, "trace": tr.to_dict()}
    if args.output:
        _write(args.output, json.dumps(doc, indent=2) + "\n")
    lines = [f"path: {path}", f"steps: {len(tr.steps)}", f"output: {tr.output}"]
    lines += [f"  {i + 1}. {st.description}" for i, st in enumerate(tr.steps)]
    if args.output and args.format == "text":
        lines.append(f"trace written to {args.output}")
    _emit(doc, "\n".join(lines) + "\n", args.format)
    return EXIT_PASS


def cmd_realize(args) -> int:
    chi = _load_character(args.file)
    rep = realize(chi, args.mode, args.budget, args.seed)
    if rep.status == "inconclusive":
        _emit(rep.to_dict(args.timing),
              f"inconclusive: search exhausted budget {args.budget} (seed {args.seed}); "
              "this is not a proof that no realization exists\n", args.format)
        return EXIT_INCONCLUSIVE
    if rep.surface is not None and rep.status == "pass" and args.output:
        _write(args.output, rep.surface.dumps())
        rep.surface_file = args.output
        # the file on disk must verify on its own
        again = verify(TranslationSurface.loads(Path(args.output).read_text()))
        if not again.passed:
            rep.status = "fail"
    lines = [
        f"verdict: {rep.classification.verdict.value}",
        f"path: {rep.path}",
        f"budget: {rep.budget}  seed: {rep.seed}  iterations: {rep.iterations}",
        f"normalized: {rep.trace.output}",
    ]
    if rep.surface_file:
        lines.append(f"surface written to {rep.surface_file}")
    if args.timing:
        lines.append("timing: " + ", ".join(f"{k} {v:.3f}s" for k, v in rep.timing.items()))
    text = "\n".join(lines) + "\n" + rep.verify_report.to_text()
    if args.format == "text":
        sys.stdout.write(text)
    else:
        _emit(rep.to_dict(args.timing), "", "json")
    return EXIT_PASS if rep.status == "pass" else EXIT_FAIL


def cmd_verify(args) -> int:
    try:
        surf = TranslationSurface.loads(_read(args.file))
    except (SurfaceError, CharacterError, FieldError, SymplecticError) as exc:
        raise InputError(f"{args.file}: {exc}") from None
    rep = verify(surf)
    _emit(rep.to_dict(), rep.to_text(), args.format)
    return EXIT_PASS if rep.passed else EXIT_FAIL


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="period-forge",
                                description="Classify and realize period characters of translation surfaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    def search(sp):
        sp.add_argument("--mode", choices=("auto", "abelian", "meromorphic"), default="auto")
        sp.add_argument("--budget", type=int, default=100_000, help="generator applications (default 100000)")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("classify", help="obstructions, image analysis and d(rho)")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("degree", help="print the minimal branching degree d(rho)")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_degree)

    sp = sub.add_parser("reduce", help="integer symplectic reduction trace")
    sp.add_argument("file")
    sp.add_argument("-o", "--output", help="write the trace document here")
    search(sp)
    common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("realize", help="build and verify a surface with the given periods")
    sp.add_argument("file")
    sp.add_argument("-o", "--output", help="write the surface document here")
    sp.add_argument("--timing", action="store_true", help="include wall-clock timings (breaks byte-identity)")
    search(sp)
    common(sp)
    sp.set_defaults(func=cmd_realize)

    sp = sub.add_parser("verify", help="check a surface document")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "budget", 1) < 0:
            raise InputError("--budget must be non-negative")
        return args.func(args)
    except (InputError, RefusedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ObstructedError, PipelineError, SymplecticError, SurfaceError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
