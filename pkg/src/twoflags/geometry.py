"""Vector-field calculus over a fixed polynomial chart.

Provides Lie brackets, Lie squares, big flags (iterated Lie squares),
small flags (iterated brackets against a fixed bottom member), exterior
derivatives of 1-forms at a point, and the pointwise Cauchy-characteristic
and covariant subspaces of a distribution.

All inclusion and rank questions are decided pointwise and exactly; module
membership over the polynomial ring is never decided.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import (
    ChartMismatch,
    GeneratorBlowup,
    NotSpecialFlag,
    UnexpectedCovariantDimension,
)
from .exactalg import (
    Poly,
    RationalMatrix,
    column_space_basis,
    polynomial_nullspace,
    polynomial_nullspace_structural,
    primitive_tuple,
    rank_and_nullspace,
    span_includes,
)

DEFAULT_GENERATOR_CAP = 50_000


@dataclass(frozen=True)
class Chart:
    """An ordered tuple of coordinate names fixing variable indices."""

    names: tuple[str, ...]

    @classmethod
    def for_length(cls, r: int) -> "Chart":
        """The flag chart (t, x0, y0, x1, y1, ..., xr, yr) of dimension 2r + 3."""
        if r < 0:
            raise ChartMismatch(f"length must be nonnegative, got {r}")
        names = ["t"]
        for k in range(r + 1):
            names.append(f"x{k}")
            names.append(f"y{k}")
        return cls(tuple(names))

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def length(self) -> int:
        """Flag length r with dim = 2r + 3; only meaningful on flag charts."""
        if self.dim < 3 or self.dim % 2 == 0:
            raise ChartMismatch(f"chart of dimension {self.dim} is not a flag chart")
        return (self.dim - 3) // 2

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ChartMismatch(f"no coordinate {name!r} on chart {self.names}") from None

    def x_index(self, k: int) -> int:
        return self.index(f"x{k}")

    def y_index(self, k: int) -> int:
        return self.index(f"y{k}")

    def origin(self) -> tuple[Fraction, ...]:
        return (Fraction(0),) * self.dim

    def point(self, **coords: Fraction | int) -> tuple[Fraction, ...]:
        """Point with the named coordinates set and every other coordinate 0."""
        values = [Fraction(0)] * self.dim
        for name, value in coords.items():
            values[self.index(name)] = Fraction(value)
        return tuple(values)


def _check_point(chart: Chart, point: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if len(point) != chart.dim:
        raise ChartMismatch(f"point has {len(point)} coordinates, chart has {chart.dim}")
    return tuple(Fraction(v) for v in point)


@dataclass(frozen=True)
class VectorField:
    """Vector field with one polynomial component per chart coordinate."""

    chart: Chart
    components: tuple[Poly, ...]

    def __post_init__(self):
        if len(self.components) != self.chart.dim:
            raise ChartMismatch(
                f"{len(self.components)} components on a {self.chart.dim}-dimensional chart"
            )

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, tuple(Poly.zero(chart.dim) for _ in range(chart.dim)))

    @classmethod
    def versor(cls, chart: Chart, index: int) -> "VectorField":
        comps = [Poly.zero(chart.dim) for _ in range(chart.dim)]
        comps[index] = Poly.const(chart.dim, 1)
        return cls(chart, tuple(comps))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check_chart(other)
        return VectorField(self.chart, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check_chart(other)
        return VectorField(self.chart, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, tuple(-c for c in self.components))

    def scaled(self, factor: Poly | Fraction | int) -> "VectorField":
        return VectorField(self.chart, tuple(c * factor for c in self.components))

    def apply_to(self, f: Poly) -> Poly:
        """Directional derivative X(f) = sum_i X_i df/du_i."""
        out = Poly.zero(self.chart.dim)
        for i, comp in enumerate(self.components):
            if not comp.is_zero():
                out = out + comp * f.partial(i)
        return out

    def eval_at(self, point: Sequence[Fraction]) -> tuple[Fraction, ...]:
        point = _check_point(self.chart, point)
        return tuple(c.eval_at(point) for c in self.components)

    def normalized(self) -> "VectorField":
        """Primitive form: content 1, first nonzero leading coefficient positive."""
        return VectorField(self.chart, primitive_tuple(self.components))

    def signature(self) -> tuple:
        return tuple(c.signature() for c in self.components)

    def _check_chart(self, other: "VectorField") -> None:
        if self.chart != other.chart:
            raise ChartMismatch("vector fields live on different charts")

    def __str__(self) -> str:
        parts = [
            f"({comp})*d_{name}"
            for comp, name in zip(self.components, self.chart.names)
            if not comp.is_zero()
        ]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class OneForm:
    """Differential 1-form with one polynomial coefficient per coordinate."""

    chart: Chart
    coefficients: tuple[Poly, ...]

    def __post_init__(self):
        if len(self.coefficients) != self.chart.dim:
            raise ChartMismatch(
                f"{len(self.coefficients)} coefficients on a {self.chart.dim}-dimensional chart"
            )

    def pair_with(self, x: VectorField) -> Poly:
        """The function omega(X)."""
        if self.chart != x.chart:
            raise ChartMismatch("form and field live on different charts")
        out = Poly.zero(self.chart.dim)
        for a, comp in zip(self.coefficients, x.components):
            out = out + a * comp
        return out


@dataclass(frozen=True)
class Distribution:
    """Finitely generated module of vector fields over a chart.

    rank_hint, when set, records the expected pointwise rank at reference
    points; it is checked by the flag routines, not at construction.
    """

    chart: Chart
    generators: tuple[VectorField, ...]
    rank_hint: int | None = None

    def __post_init__(self):
        if not self.generators:
            raise ChartMismatch("a distribution needs at least one generator")
        for gen in self.generators:
            if gen.chart != self.chart:
                raise ChartMismatch("generator lives on a different chart")

    @classmethod
    def spanned_by(cls, chart: Chart, fields: Iterable[VectorField], rank_hint: int | None = None) -> "Distribution":
        return cls(chart, tuple(fields), rank_hint)


@dataclass(frozen=True)
class Subspace:
    """A pointwise linear subspace: independent basis columns in an ambient space."""

    ambient: int
    basis: RationalMatrix

    def __post_init__(self):
        if self.basis.rows != self.ambient:
            raise ChartMismatch("basis rows must equal the ambient dimension")

    @classmethod
    def from_vectors(cls, ambient: int, vectors: Sequence[Sequence[Fraction]]) -> "Subspace":
        nonzero = [tuple(v) for v in vectors if any(u != 0 for u in v)]
        return cls(ambient, column_space_basis(nonzero, ambient))

    @property
    def dim(self) -> int:
        return self.basis.cols

    def includes(self, other: "Subspace") -> bool:
        if self.ambient != other.ambient:
            raise ChartMismatch("subspaces of different ambient spaces")
        return span_includes(other.basis, self.basis)

    def contains_vector(self, vector: Sequence[Fraction]) -> bool:
        single = RationalMatrix.from_columns([tuple(vector)], ambient=self.ambient)
        return span_includes(single, self.basis)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.dim == other.dim and self.includes(other)

    def __hash__(self) -> int:  # pragma: no cover - subspaces are not hashed
        return hash((self.ambient, self.dim))


# ---------------------------------------------------------------------------
# Brackets and flags
# ---------------------------------------------------------------------------


def lie_bracket(x: VectorField, y: VectorField) -> VectorField:
    """Coordinate Lie bracket [X,Y]_j = sum_i (X_i dY_j/du_i - Y_i dX_j/du_i)."""
    if x.chart != y.chart:
        raise ChartMismatch("bracket of fields on different charts")
    n = x.chart.dim
    components = []
    for j in range(n):
        out = Poly.zero(n)
        yj = y.components[j]
        xj = x.components[j]
        for i in range(n):
            xi = x.components[i]
            if not xi.is_zero():
                d = yj.partial(i)
                if not d.is_zero():
                    out = out + xi * d
            yi = y.components[i]
            if not yi.is_zero():
                d = xj.partial(i)
                if not d.is_zero():
                    out = out - yi * d
        components.append(out)
    return VectorField(x.chart, tuple(components))


class _Dedup:
    """Generator list that drops zero fields and scalar multiples of known fields."""

    def __init__(self, chart: Chart, cap: int):
        self.chart = chart
        self.cap = cap
        self.fields: list[VectorField] = []
        self.seen: set[tuple] = set()

    def add(self, candidate: VectorField, normalized: bool = False) -> None:
        if candidate.is_zero():
            return
        normal = candidate if normalized else candidate.normalized()
        key = normal.signature()
        if key in self.seen:
            return
        self.seen.add(key)
        self.fields.append(normal)
        if len(self.fields) > self.cap:
            raise GeneratorBlowup(f"generator count exceeded the cap of {self.cap}")

    def extend(self, candidates: Iterable[VectorField]) -> None:
        for candidate in candidates:
            self.add(candidate)


def lie_square(dist: Distribution, cap: int = DEFAULT_GENERATOR_CAP) -> Distribution:
    """[D, D]: the generators of D together with all pairwise brackets, deduplicated."""
    pool = _Dedup(dist.chart, cap)
    pool.extend(dist.generators)
    gens = list(pool.fields)
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            pool.add(lie_bracket(gens[i], gens[j]))
    return Distribution(dist.chart, tuple(pool.fields))


def value_at(dist: Distribution, point: Sequence[Fraction]) -> Subspace:
    """Pointwise value of the distribution: the span of the evaluated generators."""
    point = _check_point(dist.chart, point)
    vectors = [g.eval_at(point) for g in dist.generators]
    return Subspace.from_vectors(dist.chart.dim, vectors)


def big_flag(
    dist: Distribution,
    point: Sequence[Fraction],
    cap: int = DEFAULT_GENERATOR_CAP,
) -> list[Distribution]:
    """Tower of consecutive Lie squares (D^r, D^(r-1), ..., D^0), validated at ``point``.

    Raises NotSpecialFlag unless the pointwise ranks run 3, 5, ..., dim and
    the tower reaches full rank within (dim - 3) / 2 steps.
    """
    point = _check_point(dist.chart, point)
    dim = dist.chart.dim
    if dim % 2 == 0 or dim < 3:
        raise NotSpecialFlag(f"chart dimension {dim} cannot carry a special 2-flag")
    steps = (dim - 3) // 2
    tower = [dist]
    rank = value_at(dist, point).dim
    if rank != 3:
        raise NotSpecialFlag(f"bottom member has pointwise rank {rank}, expected 3")
    for step in range(steps):
        expected = 3 + 2 * (step + 1)
        nxt = lie_square(tower[-1], cap=cap)
        rank = value_at(nxt, point).dim
        if rank != expected:
            raise NotSpecialFlag(
                f"Lie square number {step + 1} has pointwise rank {rank}, expected {expected}"
            )
        tower.append(nxt)
    return tower


def small_flag(
    dist: Distribution,
    steps: int,
    cap: int = DEFAULT_GENERATOR_CAP,
) -> list[Distribution]:
    """Small flag V_1 = D, V_{i+1} = V_i + [D, V_i]; returns [V_1, ..., V_steps].

    Generator sets are deduplicated exactly as in lie_square.  Brackets are
    taken against the generators that are new in the latest member; brackets
    against older generators were already candidates at an earlier step.
    """
    if steps < 1:
        raise ChartMismatch(f"steps must be >= 1, got {steps}")
    pool = _Dedup(dist.chart, cap)
    pool.extend(dist.generators)
    base = list(pool.fields)
    flag = [Distribution(dist.chart, tuple(pool.fields))]
    fresh = list(pool.fields)
    for _ in range(steps - 1):
        before = len(pool.fields)
        for g in base:
            for h in fresh:
                pool.add(lie_bracket(g, h))
        fresh = pool.fields[before:]
        flag.append(Distribution(dist.chart, tuple(pool.fields)))
    return flag


# ---------------------------------------------------------------------------
# Exterior derivative, Cauchy characteristics, covariant subspace
# ---------------------------------------------------------------------------


def _sparse_apply(
    sparse: dict[tuple[int, int], Fraction], vec: Sequence[Fraction], n: int
) -> dict[int, Fraction]:
    """Sparse matrix times vector, returned as an index -> value map."""
    out: dict[int, Fraction] = {}
    for (i, j), value in sparse.items():
        vj = vec[j]
        if vj:
            out[i] = out.get(i, Fraction(0)) + value * vj
    return {i: v for i, v in out.items() if v != 0}


def _exterior_sparse(form: OneForm, point: Sequence[Fraction]) -> dict[tuple[int, int], Fraction]:
    """Nonzero entries of the d(omega) matrix at a point."""
    entries: dict[tuple[int, int], Fraction] = {}
    for j, coeff in enumerate(form.coefficients):
        if coeff.is_zero():
            continue
        seen = set()
        for mono in coeff.terms:
            for var, _ in mono:
                seen.add(var)
        for i in seen:
            value = coeff.partial(i).eval_at(point)
            if value == 0:
                continue
            entries[(i, j)] = entries.get((i, j), Fraction(0)) + value
            entries[(j, i)] = entries.get((j, i), Fraction(0)) - value
    return {key: value for key, value in entries.items() if value != 0}


def exterior_derivative_at(form: OneForm, point: Sequence[Fraction]) -> RationalMatrix:
    """Matrix of d(omega) at a point: entry (i, j) is (da_j/du_i - da_i/du_j)(p)."""
    point = _check_point(form.chart, point)
    n = form.chart.dim
    sparse = _exterior_sparse(form, point)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), value in sparse.items():
        rows[i][j] = value
    return RationalMatrix.from_rows(rows)


@lru_cache(maxsize=4096)
def _structural_annihilator(dist: Distribution) -> tuple[tuple[Poly, ...], ...]:
    n = dist.chart.dim
    matrix = [[gen.components[i] for gen in dist.generators] for i in range(n)]
    return tuple(polynomial_nullspace_structural(matrix))


def annihilator_at(dist: Distribution, point: Sequence[Fraction]) -> list[OneForm]:
    """Polynomial 1-forms annihilating the distribution, with pivots regular at ``point``.

    The covector basis is point-independent (it annihilates the generators
    identically), so it is cached per distribution; when the cached basis
    degenerates at the requested point the elimination is redone with pivots
    chosen there, which raises DegeneratePivot if none exist.
    """
    point = _check_point(dist.chart, point)
    n = dist.chart.dim
    covectors = _structural_annihilator(dist)
    corank = n - value_at(dist, point).dim
    if len(covectors) == corank:
        values = [tuple(p.eval_at(point) for p in cov) for cov in covectors]
        matrix = RationalMatrix.from_columns(values, ambient=n)
        if corank == 0 or rank_and_nullspace(matrix)[0] == corank:
            return [OneForm(dist.chart, cov) for cov in covectors]
    matrix = [[gen.components[i] for gen in dist.generators] for i in range(n)]
    return [OneForm(dist.chart, cov) for cov in polynomial_nullspace(matrix, point)]


def cauchy_char_at(dist: Distribution, point: Sequence[Fraction]) -> Subspace:
    """Pointwise Cauchy-characteristic space of D at p.

    Computes {v in D(p) : d(omega)(v, w)(p) = 0 for all w in D(p) and all
    annihilating forms omega}; for distributions with a regular Cauchy
    module this equals the value of the Cauchy-characteristic module.
    """
    point = _check_point(dist.chart, point)
    n = dist.chart.dim
    basis = value_at(dist, point).basis
    d = basis.cols
    forms = annihilator_at(dist, point)
    if not forms:
        return Subspace.from_vectors(n, [basis.column(j) for j in range(d)])
    columns = [basis.column(a) for a in range(d)]
    constraint_rows: list[list[Fraction]] = []
    for form in forms:
        sparse = _exterior_sparse(form, point)
        # image_a = dmat @ v_a, then one constraint row per basis vector w
        images = [_sparse_apply(sparse, col, n) for col in columns]
        for b in range(d):
            w = columns[b]
            constraint_rows.append(
                [
                    sum((w[i] * v for i, v in images[a].items()), Fraction(0))
                    for a in range(d)
                ]
            )
    matrix = RationalMatrix.from_rows(constraint_rows)
    _, kernel = rank_and_nullspace(matrix)
    vectors = [basis.mat_vec(lam) for lam in kernel]
    return Subspace.from_vectors(n, vectors)


def covariant_at(dist: Distribution, point: Sequence[Fraction]) -> Subspace:
    """Pointwise covariant subspace of a corank-2 distribution.

    Solves for all covectors alpha with (alpha wedge d omega)|_D = 0 at p
    over every annihilating form omega, checks that the solution space has
    dimension 3, and returns its joint kernel (of dimension ambient - 3).
    """
    point = _check_point(dist.chart, point)
    n = dist.chart.dim
    basis = value_at(dist, point).basis
    d = basis.cols
    if n - d != 2:
        raise UnexpectedCovariantDimension(
            f"covariant subspace needs corank 2, got corank {n - d}"
        )
    forms = annihilator_at(dist, point)
    columns = [basis.column(a) for a in range(d)]
    rows: list[list[Fraction]] = []
    for form in forms:
        sparse = _exterior_sparse(form, point)
        pair = [[None] * d for _ in range(d)]
        for a in range(d):
            image = _sparse_apply(sparse, columns[a], n)
            for b in range(d):
                pair[a][b] = sum((columns[b][i] * v for i, v in image.items()), Fraction(0))
        for a in range(d):
            for b in range(a + 1, d):
                for c in range(b + 1, d):
                    row = [Fraction(0)] * n
                    for i in range(n):
                        row[i] = (
                            columns[a][i] * pair[b][c]
                            - columns[b][i] * pair[a][c]
                            + columns[c][i] * pair[a][b]
                        )
                    if any(v != 0 for v in row):
                        rows.append(row)
    if rows:
        _, alpha_basis = rank_and_nullspace(RationalMatrix.from_rows(rows))
    else:
        alpha_basis = [tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)]
    if len(alpha_basis) != 3:
        raise UnexpectedCovariantDimension(
            f"covariant covector space has dimension {len(alpha_basis)}, expected 3"
        )
    _, kernel = rank_and_nullspace(RationalMatrix.from_rows([list(v) for v in alpha_basis]))
    if len(kernel) != n - 3:
        raise UnexpectedCovariantDimension(
            f"covariant subspace has dimension {len(kernel)}, expected {n - 3}"
        )
    return Subspace.from_vectors(n, kernel)
