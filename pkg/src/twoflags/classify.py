"""Sandwich-class and singularity-class decision procedures.

The sandwich word of a flag germ at a point p records, letter by letter,
whether the pointwise inclusion D^j(p) in L(D^(j-2))(p) holds (F(p) plays
the role of L(D^0)).  The singularity word refines every non-first
non-1 sandwich letter to 2 or 3 by testing the member V_{2l+3} of the
small flag of D^s against the same target space, where the nearest non-1
letter to the left sits at position nu and l = s - nu - 1.

Two geometry sources are available.  For a pseudo-normal form the flag
members come from the per-step leading fields and the covariant/Cauchy
spaces from their closed forms, with the small flag computed on the
truncated chart of the length-s prefix (the variables the member does not
depend on are factored out).  The generic source recomputes everything
from scratch: big flag by brute-force Lie squares, covariant and Cauchy
subspaces by pointwise linear algebra, small flags on the full chart.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ChartMismatch
from .ekr import EkrBuild, Word, closed_form_F, closed_form_L
from .geometry import (
    DEFAULT_GENERATOR_CAP,
    Distribution,
    Subspace,
    big_flag,
    cauchy_char_at,
    covariant_at,
    small_flag,
    value_at,
)
from .exactalg import format_rational


@dataclass(frozen=True)
class SandwichWord:
    """Letters over {1, 2}, where 2 stands for the underlined sandwich letter."""

    letters: tuple[int, ...]

    def __post_init__(self):
        if not self.letters or self.letters[0] != 1:
            raise ChartMismatch("a sandwich word starts with the letter 1")
        if any(letter not in (1, 2) for letter in self.letters):
            raise ChartMismatch("sandwich letters are 1 or 2")

    def non_one_positions(self) -> list[int]:
        return [pos for pos, letter in enumerate(self.letters, start=1) if letter != 1]

    def __str__(self) -> str:
        return ".".join(str(letter) for letter in self.letters)


@dataclass(frozen=True)
class Evidence:
    """Refinement record for one non-first non-1 position."""

    position: int
    nu: int
    l: int
    member: int
    included: bool

    def to_json(self) -> dict:
        return {
            "position": self.position,
            "nu": self.nu,
            "l": self.l,
            "member": f"V_{self.member}",
            "included": self.included,
        }


@dataclass(frozen=True)
class ClassificationReport:
    point: tuple[Fraction, ...]
    sandwich: SandwichWord
    word: Word
    evidence: tuple[Evidence, ...]

    def to_json(self) -> dict:
        return {
            "point": [format_rational(v) for v in self.point],
            "sandwich": str(self.sandwich),
            "word": str(self.word),
            "evidence": [e.to_json() for e in self.evidence],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json())


class _ClosedGeometry:
    """Flag members and subflag targets of a pseudo-normal form.

    Flag member j is presented by the step-j leading field plus versors;
    F and L come from their closed forms, valid at every point of the
    chart.  The small-flag member for a refinement at position s is
    computed on the length-s prefix chart.
    """

    def __init__(self, build: EkrBuild, point: Sequence[Fraction], cap: int):
        self.build = build
        self.point = tuple(point)
        self.cap = cap
        self.r = build.length
        if len(self.point) != build.chart.dim:
            raise ChartMismatch(
                f"point has {len(self.point)} coordinates, chart has {build.chart.dim}"
            )

    def flag_value(self, j: int) -> Subspace:
        return value_at(self.build.flag_member(j), self.point)

    def target_value(self, nu: int) -> Subspace:
        dist = closed_form_F(self.r) if nu == 2 else closed_form_L(nu - 2, self.r)
        return value_at(dist, self.point)

    def refinement_inclusion(self, s: int, nu: int, member: int) -> bool:
        prefix = self.build.prefix_build(s)
        sub_point = self.point[: prefix.chart.dim]
        flag = small_flag(prefix.distribution, member, cap=self.cap)
        small_value = value_at(flag[-1], sub_point)
        target = closed_form_F(s) if nu == 2 else closed_form_L(nu - 2, s)
        return value_at(target, sub_point).includes(small_value)


class _GenericGeometry:
    """Flag members and subflag targets recomputed from the raw distribution."""

    def __init__(self, dist: Distribution, point: Sequence[Fraction], cap: int):
        self.dist = dist
        self.point = tuple(point)
        self.cap = cap
        tower = big_flag(dist, self.point, cap=cap)
        self.r = len(tower) - 1
        self.tower = tower  # [D^r, ..., D^0]

    def member(self, j: int) -> Distribution:
        return self.tower[self.r - j]

    def flag_value(self, j: int) -> Subspace:
        return value_at(self.member(j), self.point)

    def target_value(self, nu: int) -> Subspace:
        if nu == 2:
            return covariant_at(self.member(1), self.point)
        return cauchy_char_at(self.member(nu - 2), self.point)

    def refinement_inclusion(self, s: int, nu: int, member: int) -> bool:
        flag = small_flag(self.member(s), member, cap=self.cap)
        small_value = value_at(flag[-1], self.point)
        return self.target_value(nu).includes(small_value)


def _geometry(obj, point, generic: bool, cap: int):
    if isinstance(obj, EkrBuild) and not generic:
        return _ClosedGeometry(obj, point, cap)
    dist = obj.distribution if isinstance(obj, EkrBuild) else obj
    return _GenericGeometry(dist, point, cap)


def sandwich_class_at(
    obj: EkrBuild | Distribution,
    point: Sequence[Fraction],
    generic: bool = False,
    cap: int = DEFAULT_GENERATOR_CAP,
) -> SandwichWord:
    """The sandwich word of the germ at ``point``."""
    geo = _geometry(obj, point, generic, cap)
    return _sandwich(geo)


def _sandwich(geo) -> SandwichWord:
    letters = [1]
    for j in range(2, geo.r + 1):
        included = geo.target_value(j).includes(geo.flag_value(j))
        letters.append(2 if included else 1)
    return SandwichWord(tuple(letters))


def singularity_class_at(
    obj: EkrBuild | Distribution,
    point: Sequence[Fraction],
    generic: bool = False,
    cap: int = DEFAULT_GENERATOR_CAP,
) -> ClassificationReport:
    """The singularity class of the germ at ``point``, with refinement evidence.

    The positions nu, l, s are read off the sandwich word computed at the
    point itself, not off any label the input happens to carry.
    """
    geo = _geometry(obj, point, generic, cap)
    sandwich = _sandwich(geo)
    letters = list(sandwich.letters)
    non_one = sandwich.non_one_positions()
    evidence: list[Evidence] = []
    if non_one:
        first = non_one[0]
        letters[first - 1] = 2
        for prev, s in zip(non_one, non_one[1:]):
            l = s - prev - 1
            member = 2 * l + 3
            included = geo.refinement_inclusion(s, prev, member)
            letters[s - 1] = 3 if included else 2
            evidence.append(Evidence(position=s, nu=prev, l=l, member=member, included=included))
    word = Word(tuple(letters))
    return ClassificationReport(
        point=tuple(Fraction(v) for v in point),
        sandwich=sandwich,
        word=word,
        evidence=tuple(evidence),
    )


def singularity_locus_equations(word: Word) -> tuple[str, ...]:
    """Coordinate equations of the locus of ``word`` in its own chart.

    x_k = 0 for every position k carrying the letter 2, and x_s = 0 = y_s
    for every position s carrying the letter 3; the number of equations is
    the codimension of the class.
    """
    equations = []
    for pos, letter in enumerate(word.letters, start=1):
        if letter == 2:
            equations.append(f"x{pos}=0")
        elif letter == 3:
            equations.append(f"x{pos}=0")
            equations.append(f"y{pos}=0")
    return tuple(equations)
