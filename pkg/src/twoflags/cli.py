"""Command-line front end.

Commands: classify, verify, atlas, count, locus.  All input and output is
exact rational text; identical seeds and arguments produce byte-identical
output.  Exit codes: 0 success, 1 verification failure, 2 usage or
validation error, 3 geometric degeneracy at the requested point.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import atlas as atlas_mod
from .classify import singularity_class_at
from .ekr import EkrBuild, EkrSpec, Word, build_ekr, model, model_build, MODEL_NAMES
from .errors import (
    DegeneratePivot,
    GeneratorBlowup,
    NotSpecialFlag,
    TwoflagsError,
)
from .exactalg import parse_rational
from .geometry import DEFAULT_GENERATOR_CAP, Distribution


@dataclass(frozen=True)
class VerificationOutcome:
    word: Word
    spec: EkrSpec
    point: tuple[Fraction, ...]
    expected: Word
    computed: Word
    passed: bool
    wall_seconds: float


def draw_nonzero_rational(rng: random.Random) -> Fraction:
    """A random p/q with 1 <= |p|, q <= 10; never the degenerate value 0."""
    num = rng.randint(1, 10) * rng.choice((1, -1))
    den = rng.randint(1, 10)
    return Fraction(num, den)


def draw_constants(word: Word, rng: random.Random) -> EkrSpec:
    """Random nonzero values for every admitted constant of the word."""
    b = {}
    c = {}
    for step, letter in enumerate(word.letters, start=1):
        if letter == 1:
            b[step] = draw_nonzero_rational(rng)
        if letter in (1, 2):
            c[step] = draw_nonzero_rational(rng)
    return EkrSpec(word, b, c)


def run_verification(
    length: int,
    trials: int,
    seed: int,
    zero_constants: bool,
    cap: int = DEFAULT_GENERATOR_CAP,
    generic: bool = False,
) -> list[VerificationOutcome]:
    """Classify every word of the given length at the origin, for the seeded
    random constant draws (plus the all-zero draw when requested), and
    compare against the word itself."""
    outcomes = []
    for word in atlas_mod.enumerate_words(length):
        specs = []
        if zero_constants:
            specs.append(EkrSpec(word))
        for trial in range(trials):
            rng = random.Random(f"{seed}|{word}|{trial}")
            specs.append(draw_constants(word, rng))
        for spec in specs:
            build = build_ekr(spec)
            origin = build.chart.origin()
            started = time.perf_counter()
            report = singularity_class_at(build, origin, generic=generic, cap=cap)
            elapsed = time.perf_counter() - started
            outcomes.append(
                VerificationOutcome(
                    word=word,
                    spec=spec,
                    point=origin,
                    expected=word,
                    computed=report.word,
                    passed=report.word == word,
                    wall_seconds=elapsed,
                )
            )
    return outcomes


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _parse_point(text: str) -> tuple[Fraction, ...]:
    return tuple(parse_rational(part) for part in text.split(","))


def _parse_assignments(pairs: list[str] | None) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValueError(f"expected l=value, got {pair!r}")
        key, _, value = pair.partition("=")
        out[int(key)] = parse_rational(value)
    return out


def _build_subject(args) -> EkrBuild | Distribution:
    """The object to classify: a pseudo-normal form or a raw model distribution."""
    b = _parse_assignments(args.b)
    c = _parse_assignments(args.c)
    if args.constants:
        with open(args.constants) as handle:
            data = json.load(handle)
        file_b = {int(k): parse_rational(str(v)) for k, v in data.get("b", {}).items()}
        file_c = {int(k): parse_rational(str(v)) for k, v in data.get("c", {}).items()}
        b = {**file_b, **b}
        c = {**file_c, **c}
    if args.word:
        word = Word.parse(args.word)
        return build_ekr(EkrSpec(word, b, c))
    params = {}
    for step, value in b.items():
        params[f"b{step}"] = value
    for step, value in c.items():
        params[f"c{step}"] = value
    built = model_build(args.model, **params)
    if built is not None:
        return built
    return model(args.model, **params)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _cmd_classify(args) -> int:
    subject = _build_subject(args)
    chart = subject.chart
    point = _parse_point(args.point) if args.point else chart.origin()
    report = singularity_class_at(subject, point, generic=args.generic_geometry, cap=args.cap)
    _emit(report.to_json_text() + "\n", args.out)
    return 0


def _cmd_verify(args) -> int:
    outcomes = run_verification(
        length=args.length,
        trials=args.trials,
        seed=args.seed,
        zero_constants=args.zero_constants,
        cap=args.cap,
        generic=args.generic_geometry,
    )
    failures = [o for o in outcomes if not o.passed]
    lines = []
    for outcome in failures:
        lines.append(
            "FAIL word={} constants={} computed={}".format(
                outcome.word,
                json.dumps(outcome.spec.to_json()),
                outcome.computed,
            )
        )
    words = len({o.word for o in outcomes})
    lines.append(
        "verify length={}: {} words, {} classifications, {} failures (seed={})".format(
            args.length, words, len(outcomes), len(failures), args.seed
        )
    )
    _emit("\n".join(lines) + "\n", args.out)
    return 1 if failures else 0


def _cmd_atlas(args) -> int:
    records = atlas_mod.build_atlas(args.length)
    if args.format == "json":
        text = atlas_mod.atlas_json(records) + "\n"
    elif args.format == "jsonl":
        text = atlas_mod.atlas_jsonl(records)
    elif args.format == "csv":
        text = atlas_mod.atlas_csv(records)
    else:
        text = atlas_mod.adjacency_dot(records)
    _emit(text, args.out)
    return 0


def _cmd_count(args) -> int:
    _emit(str(atlas_mod.count_classes(args.width, args.length)) + "\n", args.out)
    return 0


def _cmd_locus(args) -> int:
    word = Word.parse(args.word)
    payload = {
        "word": str(word),
        "codimension": atlas_mod.codimension(word),
        "equations": list(atlas_mod.singularity_locus_equations(word)),
    }
    _emit(json.dumps(payload) + "\n", args.out)
    return 0


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twoflags",
        description="Build, classify and enumerate pseudo-normal forms of special 2-flags.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    classify = sub.add_parser("classify", help="singularity class of a germ at a point")
    group = classify.add_mutually_exclusive_group(required=True)
    group.add_argument("--word", help="dot-separated word such as 1.2.1.3")
    group.add_argument("--model", choices=MODEL_NAMES, help="named model distribution")
    classify.add_argument("--constants", help="JSON file with b/c constants")
    classify.add_argument("--b", action="append", metavar="l=v", help="b constant, repeatable")
    classify.add_argument("--c", action="append", metavar="l=v", help="c constant, repeatable")
    classify.add_argument("--point", help="comma-separated rational coordinates (default origin)")
    classify.add_argument("--generic-geometry", action="store_true", help="recompute all geometry generically")
    classify.add_argument("--cap", type=int, default=DEFAULT_GENERATOR_CAP)
    classify.add_argument("--out", help="write output to a file instead of stdout")
    classify.set_defaults(func=_cmd_classify)

    verify = sub.add_parser("verify", help="sweep every word of a length and check the classifier")
    verify.add_argument("--length", type=int, required=True)
    verify.add_argument("--trials", type=int, default=3, help="random constant draws per word")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--zero-constants", action="store_true", help="also run the all-zero draw")
    verify.add_argument("--generic-geometry", action="store_true")
    verify.add_argument("--cap", type=int, default=DEFAULT_GENERATOR_CAP)
    verify.add_argument("--out", help="write output to a file instead of stdout")
    verify.set_defaults(func=_cmd_verify)

    atlas_cmd = sub.add_parser("atlas", help="emit the stratification records of a length")
    atlas_cmd.add_argument("--length", type=int, required=True)
    atlas_cmd.add_argument("--format", choices=("json", "jsonl", "csv", "dot"), default="json")
    atlas_cmd.add_argument("--out", help="write output to a file instead of stdout")
    atlas_cmd.set_defaults(func=_cmd_atlas)

    count = sub.add_parser("count", help="number of singularity classes")
    count.add_argument("--width", type=int, default=2)
    count.add_argument("--length", type=int, required=True)
    count.add_argument("--out", help="write output to a file instead of stdout")
    count.set_defaults(func=_cmd_count)

    locus = sub.add_parser("locus", help="locus equations of a class in its own chart")
    locus.add_argument("--word", required=True)
    locus.add_argument("--out", help="write output to a file instead of stdout")
    locus.set_defaults(func=_cmd_locus)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NotSpecialFlag, DegeneratePivot, GeneratorBlowup) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (TwoflagsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
