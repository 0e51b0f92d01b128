"""Words over {1,2,3}, the least-upward-jumps validator, the pseudo-normal
form builders, closed forms for the covariant/Cauchy subflag, and concrete
model distributions.

A pseudo-normal form of length r lives on the flag chart (t, x0, y0, ...,
xr, yr) and is produced by r successive operations.  Operation number l
turns a rank-3 triple (Z1, Z2, Z3) into

    op 1:  Z1' = Z1 + (b_l + x_l) Z2 + (c_l + y_l) Z3
    op 2:  Z1' = x_l Z1 + Z2 + (c_l + y_l) Z3
    op 3:  Z1' = x_l Z1 + y_l Z2 + Z3

with Z2' = d/dx_l and Z3' = d/dy_l, starting from the full tangent bundle
(d/dt, d/dx0, d/dy0) of R^3.  The shift constants b_l, c_l are rationals
here; they default to 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import (
    BadModelName,
    BadSyntax,
    ConstantNotAdmitted,
    IndexOutOfRange,
    RuleViolation,
)
from .exactalg import Poly, format_rational, parse_rational
from .geometry import Chart, Distribution, VectorField

ALPHABET = (1, 2, 3)


@dataclass(frozen=True, order=True)
class Word:
    """A letter sequence over {1,2,3} satisfying the least-upward-jumps rule."""

    letters: tuple[int, ...]

    def __post_init__(self):
        if not self.letters:
            raise RuleViolation("a word needs at least one letter")
        for letter in self.letters:
            if letter not in ALPHABET:
                raise RuleViolation(f"letter {letter} is outside the alphabet 1..3")
        if self.letters[0] != 1:
            raise RuleViolation(f"first letter must be 1, got {self.letters[0]}")
        running_max = 1
        for pos, letter in enumerate(self.letters[1:], start=2):
            if letter > running_max + 1:
                raise RuleViolation(
                    f"letter {letter} at position {pos} jumps past {running_max + 1}"
                )
            running_max = max(running_max, letter)

    @classmethod
    def parse(cls, text: str) -> "Word":
        text = text.strip()
        if not text:
            raise BadSyntax("empty word")
        parts = text.split(".")
        letters = []
        for part in parts:
            if not part.isdigit():
                raise BadSyntax(f"bad segment {part!r} in word {text!r}")
            letters.append(int(part))
        return cls(tuple(letters))

    @property
    def length(self) -> int:
        return len(self.letters)

    def prefix(self, s: int) -> "Word":
        return Word(self.letters[:s])

    def __str__(self) -> str:
        return ".".join(str(letter) for letter in self.letters)


def validate_word(text: str) -> Word:
    """Parse a dot-separated digit string into a validated Word."""
    return Word.parse(text)


def _admits_b(letter: int) -> bool:
    return letter == 1


def _admits_c(letter: int) -> bool:
    return letter in (1, 2)


@dataclass(frozen=True)
class EkrSpec:
    """A word plus its admitted shift constants (1-based step -> value).

    b constants exist only at steps with letter 1, c constants at steps with
    letter 1 or 2; any other key raises ConstantNotAdmitted.  Missing
    constants default to 0.
    """

    word: Word
    b: Mapping[int, Fraction] = field(default_factory=dict)
    c: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "b", {int(k): Fraction(v) for k, v in self.b.items()})
        object.__setattr__(self, "c", {int(k): Fraction(v) for k, v in self.c.items()})
        for step in self.b:
            if not 1 <= step <= self.word.length:
                raise ConstantNotAdmitted(f"b[{step}] is outside the word of length {self.word.length}")
            if not _admits_b(self.word.letters[step - 1]):
                raise ConstantNotAdmitted(
                    f"operation {self.word.letters[step - 1]} at step {step} admits no b constant"
                )
        for step in self.c:
            if not 1 <= step <= self.word.length:
                raise ConstantNotAdmitted(f"c[{step}] is outside the word of length {self.word.length}")
            if not _admits_c(self.word.letters[step - 1]):
                raise ConstantNotAdmitted(
                    f"operation {self.word.letters[step - 1]} at step {step} admits no c constant"
                )

    def b_at(self, step: int) -> Fraction:
        return self.b.get(step, Fraction(0))

    def c_at(self, step: int) -> Fraction:
        return self.c.get(step, Fraction(0))

    def prefix(self, s: int) -> "EkrSpec":
        return EkrSpec(
            self.word.prefix(s),
            {k: v for k, v in self.b.items() if k <= s},
            {k: v for k, v in self.c.items() if k <= s},
        )

    @classmethod
    def from_json(cls, data: str | Mapping) -> "EkrSpec":
        if isinstance(data, str):
            data = json.loads(data)
        unknown = set(data) - {"word", "b", "c"}
        if unknown:
            raise ConstantNotAdmitted(f"unknown keys in spec: {sorted(unknown)}")
        if "word" not in data:
            raise BadSyntax("spec needs a 'word' entry")
        word = Word.parse(data["word"])
        b = {int(k): parse_rational(str(v)) for k, v in data.get("b", {}).items()}
        c = {int(k): parse_rational(str(v)) for k, v in data.get("c", {}).items()}
        return cls(word, b, c)

    def to_json(self) -> dict:
        out: dict = {"word": str(self.word)}
        if self.b:
            out["b"] = {str(k): format_rational(v) for k, v in sorted(self.b.items())}
        if self.c:
            out["c"] = {str(k): format_rational(v) for k, v in sorted(self.c.items())}
        return out


@dataclass(frozen=True)
class EkrBuild:
    """The result of running the operations of a spec: the final rank-3
    distribution plus the per-step leading fields, kept for flag-member
    shortcuts (the step-l leading field depends only on variables of
    index <= l)."""

    spec: EkrSpec
    chart: Chart
    leading: tuple[VectorField, ...]
    distribution: Distribution

    @property
    def word(self) -> Word:
        return self.spec.word

    @property
    def length(self) -> int:
        return self.spec.word.length

    def flag_member(self, j: int) -> Distribution:
        """Flag member number j (j = length is the distribution itself, j = 0 all of TM).

        For 1 <= j <= length the member is spanned by the step-j leading
        field together with the versors d/dx_k, d/dy_k for k >= j.
        """
        r = self.length
        if not 0 <= j <= r:
            raise IndexOutOfRange(f"flag member {j} outside 0..{r}")
        if j == 0:
            gens = [VectorField.versor(self.chart, i) for i in range(self.chart.dim)]
            return Distribution(self.chart, tuple(gens), rank_hint=self.chart.dim)
        gens = [self.leading[j - 1]]
        for k in range(j, r + 1):
            gens.append(VectorField.versor(self.chart, self.chart.x_index(k)))
            gens.append(VectorField.versor(self.chart, self.chart.y_index(k)))
        return Distribution(self.chart, tuple(gens), rank_hint=2 * (r - j) + 3)

    def prefix_build(self, s: int) -> "EkrBuild":
        """The length-s build of the word prefix; its distribution is the
        flag member number s with the variables of index > s factored out."""
        return build_ekr(self.spec.prefix(s))


def build_ekr(spec: EkrSpec) -> EkrBuild:
    """Run the operations of ``spec`` starting from (d/dt, d/dx0, d/dy0)."""
    r = spec.word.length
    chart = Chart.for_length(r)
    n = chart.dim

    def versor(index: int) -> VectorField:
        return VectorField.versor(chart, index)

    def coordinate(index: int) -> Poly:
        return Poly.variable(n, index)

    z1 = versor(0)
    z2 = versor(chart.x_index(0))
    z3 = versor(chart.y_index(0))
    leading = []
    for step, letter in enumerate(spec.word.letters, start=1):
        x_l = coordinate(chart.x_index(step))
        y_l = coordinate(chart.y_index(step))
        if letter == 1:
            shift_x = x_l + spec.b_at(step)
            shift_y = y_l + spec.c_at(step)
            z1 = z1 + z2.scaled(shift_x) + z3.scaled(shift_y)
        elif letter == 2:
            shift_y = y_l + spec.c_at(step)
            z1 = z1.scaled(x_l) + z2 + z3.scaled(shift_y)
        else:
            z1 = z1.scaled(x_l) + z2.scaled(y_l) + z3
        z2 = versor(chart.x_index(step))
        z3 = versor(chart.y_index(step))
        leading.append(z1)
    dist = Distribution(chart, (z1, z2, z3), rank_hint=3)
    return EkrBuild(spec, chart, tuple(leading), dist)


# ---------------------------------------------------------------------------
# Closed forms for the covariant subdistribution F and the Cauchy subflag
# ---------------------------------------------------------------------------


def closed_form_F(r: int) -> Distribution:
    """F = (d/dx1, d/dy1, ..., d/dxr, d/dyr) on the length-r flag chart."""
    if r < 1:
        raise IndexOutOfRange(f"length must be >= 1, got {r}")
    chart = Chart.for_length(r)
    gens = []
    for k in range(1, r + 1):
        gens.append(VectorField.versor(chart, chart.x_index(k)))
        gens.append(VectorField.versor(chart, chart.y_index(k)))
    return Distribution(chart, tuple(gens), rank_hint=2 * r)


def closed_form_L(j: int, r: int) -> Distribution:
    """L of flag member j: (d/dx_{j+1}, ..., d/dyr) for 1 <= j <= r - 1."""
    if not 1 <= j <= r - 1:
        raise IndexOutOfRange(f"L is a distribution only for 1 <= j <= {r - 1}, got {j}")
    chart = Chart.for_length(r)
    gens = []
    for k in range(j + 1, r + 1):
        gens.append(VectorField.versor(chart, chart.x_index(k)))
        gens.append(VectorField.versor(chart, chart.y_index(k)))
    return Distribution(chart, tuple(gens), rank_hint=2 * (r - j))


# ---------------------------------------------------------------------------
# Concrete models
# ---------------------------------------------------------------------------


def _jet_like_model(singular: bool) -> Distribution:
    chart = Chart.for_length(2)
    n = chart.dim
    t = VectorField.versor(chart, 0)
    x1 = Poly.variable(n, chart.x_index(1))
    y1 = Poly.variable(n, chart.y_index(1))
    x2 = Poly.variable(n, chart.x_index(2))
    y2 = Poly.variable(n, chart.y_index(2))
    dx0 = VectorField.versor(chart, chart.x_index(0))
    dy0 = VectorField.versor(chart, chart.y_index(0))
    dx1 = VectorField.versor(chart, chart.x_index(1))
    dy1 = VectorField.versor(chart, chart.y_index(1))
    core = t + dx0.scaled(x1) + dy0.scaled(y1)
    if singular:
        lead = core.scaled(x2) + dx1 + dy1.scaled(y2)
    else:
        lead = core + dx1.scaled(x2) + dy1.scaled(y2)
    return Distribution(
        chart,
        (
            lead,
            VectorField.versor(chart, chart.x_index(2)),
            VectorField.versor(chart, chart.y_index(2)),
        ),
        rank_hint=3,
    )


def bcd_chart(m: int, n: int) -> Chart:
    return Chart(tuple([f"x{i}" for i in range(m + 1)] + [f"y{j}" for j in range(1, n + 1)]))


def _bcd_model(m: int, n: int) -> Distribution:
    if not 1 <= m <= n:
        raise BadModelName(f"bcd model needs 1 <= m <= n, got m={m}, n={n}")
    chart = bcd_chart(m, n)
    dim = chart.dim
    lead = VectorField.versor(chart, chart.index("x0"))
    for i in range(1, m + 1):
        y_i = Poly.variable(dim, chart.index(f"y{i}"))
        lead = lead + VectorField.versor(chart, chart.index(f"x{i}")).scaled(y_i)
    gens = [lead] + [VectorField.versor(chart, chart.index(f"y{j}")) for j in range(1, n + 1)]
    return Distribution(chart, tuple(gens), rank_hint=n + 1)


_ZERO = Fraction(0)


def appendix_b_spec(which: str, b3: Fraction = _ZERO, c3: Fraction = _ZERO, c4: Fraction = _ZERO) -> EkrSpec:
    """The two length-4 families living in one sandwich class: the
    3-parameter family D (word 1.2.1.2) and the 2-parameter family E
    (word 1.2.1.3)."""
    if which == "D":
        return EkrSpec(Word.parse("1.2.1.2"), b={3: b3}, c={3: c3, 4: c4})
    if which == "E":
        if c4 != 0:
            raise ConstantNotAdmitted("family E admits no c4 constant")
        return EkrSpec(Word.parse("1.2.1.3"), b={3: b3}, c={3: c3})
    raise BadModelName(f"unknown appendix family {which!r}")


def model(name: str, **params) -> Distribution:
    """Concrete model distributions by name.

    ca_2      -- the homogeneous length-2 jet-bundle model
    ex_2      -- the length-2 model singular on the hypersurface {x2 = 0}
    bcd       -- corank-m model (params m, n)
    appxB_D   -- 3-parameter length-4 family (params b3, c3, c4)
    appxB_E   -- 2-parameter length-4 family (params b3, c3)
    """
    if name == "ca_2":
        return _jet_like_model(singular=False)
    if name == "ex_2":
        return _jet_like_model(singular=True)
    if name == "bcd":
        return _bcd_model(int(params.get("m", 2)), int(params.get("n", 3)))
    if name == "appxB_D":
        spec = appendix_b_spec(
            "D",
            Fraction(params.get("b3", 0)),
            Fraction(params.get("c3", 0)),
            Fraction(params.get("c4", 0)),
        )
        return build_ekr(spec).distribution
    if name == "appxB_E":
        spec = appendix_b_spec("E", Fraction(params.get("b3", 0)), Fraction(params.get("c3", 0)))
        return build_ekr(spec).distribution
    raise BadModelName(f"unknown model {name!r}")


def model_build(name: str, **params) -> EkrBuild | None:
    """The EKR presentation behind a model name, when there is one."""
    if name == "ca_2":
        return build_ekr(EkrSpec(Word.parse("1.1")))
    if name == "ex_2":
        return build_ekr(EkrSpec(Word.parse("1.2")))
    if name == "appxB_D":
        return build_ekr(
            appendix_b_spec(
                "D",
                Fraction(params.get("b3", 0)),
                Fraction(params.get("c3", 0)),
                Fraction(params.get("c4", 0)),
            )
        )
    if name == "appxB_E":
        return build_ekr(
            appendix_b_spec("E", Fraction(params.get("b3", 0)), Fraction(params.get("c3", 0)))
        )
    if name == "bcd":
        return None
    raise BadModelName(f"unknown model {name!r}")


MODEL_NAMES = ("ca_2", "ex_2", "bcd", "appxB_D", "appxB_E")
