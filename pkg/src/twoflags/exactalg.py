"""Exact rational arithmetic, sparse multivariate polynomials and exact
linear algebra over the rationals and over polynomial matrices.

Rational numbers are plain ``fractions.Fraction`` values (always reduced,
positive denominator, zero is 0/1).  A polynomial is a sparse map from
monomials to nonzero Fraction coefficients; a monomial is a tuple of
``(variable index, positive exponent)`` pairs sorted by variable index,
with the empty tuple standing for the constant monomial 1.

Every value is immutable after construction and every operation is a pure
function, so concurrent use needs no locking.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import ChartMismatch, DegeneratePivot

# ((var, exp), ...) sorted by var, every exp > 0; () is the monomial 1
Mono = tuple[tuple[int, int], ...]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse the exact text format: optional sign, integer, optional '/' positive integer."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"not a rational literal: {text!r}")
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator: {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def format_rational(q: Fraction) -> str:
    """Inverse of parse_rational; integers print without a denominator."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _mono_mul(a: Mono, b: Mono) -> Mono:
    """Merge two sorted exponent tuples, adding exponents of shared variables."""
    if not a:
        return b
    if not b:
        return a
    out: list[tuple[int, int]] = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _mono_key(mono: Mono, arity: int) -> tuple[int, tuple[int, ...]]:
    """Graded-lex sort key: total degree first, then the dense exponent vector."""
    dense = [0] * arity
    deg = 0
    for var, exp in mono:
        dense[var] = exp
        deg += exp
    return (deg, tuple(dense))


class Poly:
    """Sparse multivariate polynomial with exact Fraction coefficients.

    ``terms`` maps monomials to nonzero coefficients; canonical form never
    stores a zero coefficient, so equality is plain dict equality (plus
    matching arity).  Arithmetic across different arities raises
    ChartMismatch.
    """

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms: dict[Mono, Fraction] | None = None):
        if arity < 1:
            raise ChartMismatch(f"arity must be positive, got {arity}")
        clean: dict[Mono, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            if coeff == 0:
                continue
            if mono and mono[-1][0] >= arity:
                raise ChartMismatch(f"variable index {mono[-1][0]} >= arity {arity}")
            clean[mono] = Fraction(coeff)
        self.arity = arity
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, arity: int) -> "Poly":
        return cls(arity)

    @classmethod
    def const(cls, arity: int, value: Fraction | int) -> "Poly":
        return cls(arity, {(): Fraction(value)})

    @classmethod
    def variable(cls, arity: int, index: int) -> "Poly":
        if not 0 <= index < arity:
            raise ChartMismatch(f"variable index {index} out of range for arity {arity}")
        return cls(arity, {((index, 1),): Fraction(1)})

    # -- predicates and views ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {()}

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def signature(self) -> tuple:
        """Hashable canonical form (terms sorted by monomial)."""
        return (self.arity, tuple(sorted(self.terms.items())))

    def sorted_terms(self) -> list[tuple[Mono, Fraction]]:
        """Terms in descending graded-lex order (leading term first)."""
        return sorted(
            self.terms.items(),
            key=lambda kv: _mono_key(kv[0], self.arity),
            reverse=True,
        )

    def leading(self) -> tuple[Mono, Fraction]:
        """Leading (monomial, coefficient) in graded-lex order; requires nonzero."""
        return max(self.terms.items(), key=lambda kv: _mono_key(kv[0], self.arity))

    # -- ring operations -----------------------------------------------------

    def _check_same_arity(self, other: "Poly") -> None:
        if self.arity != other.arity:
            raise ChartMismatch(f"arity mismatch: {self.arity} vs {other.arity}")

    def __add__(self, other: "Poly | Fraction | int") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(self.arity, other)
        self._check_same_arity(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            s = out.get(mono, Fraction(0)) + coeff
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        poly = Poly.__new__(Poly)
        poly.arity = self.arity
        poly.terms = out
        return poly

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        poly = Poly.__new__(Poly)
        poly.arity = self.arity
        poly.terms = {m: -c for m, c in self.terms.items()}
        return poly

    def __sub__(self, other: "Poly | Fraction | int") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(self.arity, other)
        return self + (-other)

    def __rsub__(self, other: "Fraction | int") -> "Poly":
        return (-self) + other

    def __mul__(self, other: "Poly | Fraction | int") -> "Poly":
        if not isinstance(other, Poly):
            return self.scaled(Fraction(other))
        self._check_same_arity(other)
        out: dict[Mono, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _mono_mul(ma, mb)
                s = out.get(mono, Fraction(0)) + ca * cb
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        poly = Poly.__new__(Poly)
        poly.arity = self.arity
        poly.terms = out
        return poly

    __rmul__ = __mul__

    def scaled(self, factor: Fraction | int) -> "Poly":
        factor = Fraction(factor)
        poly = Poly.__new__(Poly)
        poly.arity = self.arity
        poly.terms = {} if factor == 0 else {m: c * factor for m, c in self.terms.items()}
        return poly

    # -- calculus and evaluation ---------------------------------------------

    def partial(self, var: int) -> "Poly":
        """Exact formal partial derivative with respect to variable ``var``."""
        if not 0 <= var < self.arity:
            raise ChartMismatch(f"variable index {var} out of range for arity {self.arity}")
        out: dict[Mono, Fraction] = {}
        for mono, coeff in self.terms.items():
            for pos, (v, e) in enumerate(mono):
                if v != var:
                    continue
                if e == 1:
                    new = mono[:pos] + mono[pos + 1 :]
                else:
                    new = mono[:pos] + ((v, e - 1),) + mono[pos + 1 :]
                out[new] = out.get(new, Fraction(0)) + coeff * e
                break
        return Poly(self.arity, out)

    def eval_at(self, point: Sequence[Fraction]) -> Fraction:
        """Exact value at a rational point (length must equal the arity)."""
        if len(point) != self.arity:
            raise ChartMismatch(f"point has {len(point)} coordinates, arity is {self.arity}")
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            value = coeff
            for var, exp in mono:
                base = point[var]
                if base == 0:
                    value = Fraction(0)
                    break
                value *= Fraction(base) ** exp
            total += value
        return total

    # -- dunder plumbing -----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                return self.is_constant() and self.constant_term() == other
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.signature())

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = [f"u{v}" if e == 1 else f"u{v}^{e}" for v, e in mono]
            if not factors:
                parts.append(format_rational(coeff))
            elif coeff == 1:
                parts.append("*".join(factors))
            elif coeff == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(format_rational(coeff) + "*" + "*".join(factors))
        text = " + ".join(parts)
        return text.replace("+ -", "- ")


def poly_divexact(a: Poly, d: Poly) -> Poly:
    """Exact division a / d in the polynomial ring.

    Only valid when d divides a (as guaranteed inside Bareiss elimination);
    raises ArithmeticError otherwise.
    """
    if d.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    a._check_same_arity(d)
    if d.is_constant():
        return a.scaled(1 / d.constant_term())
    quotient = Poly.zero(a.arity)
    rest = a
    lead_mono, lead_coeff = d.leading()
    lead_exp = dict(lead_mono)
    while not rest.is_zero():
        rm, rc = rest.leading()
        rexp = dict(rm)
        q_exp = []
        for var, exp in lead_exp.items():
            have = rexp.get(var, 0)
            if have < exp:
                raise ArithmeticError("inexact polynomial division")
            if have > exp:
                q_exp.append((var, have - exp))
            rexp.pop(var)
        q_exp.extend(rexp.items())
        term = Poly(a.arity, {tuple(sorted(q_exp)): rc / lead_coeff})
        quotient = quotient + term
        rest = rest - term * d
    return quotient


def poly_content(polys: Iterable[Poly]) -> Fraction:
    """Positive rational content (gcd) of all coefficients; 0 for all-zero input."""
    num = 0
    den = 1
    for poly in polys:
        for coeff in poly.terms.values():
            num = gcd(num, abs(coeff.numerator))
            den = lcm(den, coeff.denominator)
    if num == 0:
        return Fraction(0)
    return Fraction(num, den)


def primitive_tuple(polys: Sequence[Poly]) -> tuple[Poly, ...]:
    """Normalize a covector/field: content 1, first nonzero leading coefficient positive."""
    content = poly_content(polys)
    if content == 0:
        return tuple(polys)
    for poly in polys:
        if not poly.is_zero():
            if poly.leading()[1] < 0:
                content = -content
            break
    return tuple(p.scaled(1 / content) for p in polys)


# ---------------------------------------------------------------------------
# Exact linear algebra over the rationals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalMatrix:
    """Dense matrix of Fractions, stored row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ChartMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Fraction | int]]) -> "RationalMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat = []
        for row in rows:
            if len(row) != ncols:
                raise ChartMismatch("ragged rows")
            flat.extend(Fraction(v) for v in row)
        return cls(nrows, ncols, tuple(flat))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Fraction | int]], ambient: int | None = None) -> "RationalMatrix":
        if not columns:
            return cls(ambient or 0, 0, ())
        nrows = len(columns[0])
        return cls.from_rows([[col[i] for col in columns] for i in range(nrows)])

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, tuple(Fraction(1 if i == j else 0) for i in range(n) for j in range(n)))

    def at(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix.from_rows([self.column(j) for j in range(self.cols)])

    def mat_vec(self, vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(vec) != self.cols:
            raise ChartMismatch("vector length does not match column count")
        return tuple(
            sum((self.at(i, j) * vec[j] for j in range(self.cols)), Fraction(0))
            for i in range(self.rows)
        )


def _eliminate(rows: list[list[Fraction]]) -> tuple[int, list[int], list[int]]:
    """In-place Gauss-Jordan on non-pivot rows.

    Returns (rank, pivot row indices in pivot order, pivot column indices).
    Row indices refer to the incoming order, which is preserved.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivot_rows: list[int] = []
    pivot_cols: list[int] = []
    used = [False] * nrows
    for col in range(ncols):
        pivot = next((r for r in range(nrows) if not used[r] and rows[r][col] != 0), None)
        if pivot is None:
            continue
        used[pivot] = True
        pivot_rows.append(pivot)
        pivot_cols.append(col)
        inv = 1 / rows[pivot][col]
        rows[pivot] = [v * inv for v in rows[pivot]]
        for r in range(nrows):
            if r == pivot or rows[r][col] == 0:
                continue
            factor = rows[r][col]
            rows[r] = [a - factor * b for a, b in zip(rows[r], rows[pivot])]
    return len(pivot_cols), pivot_rows, pivot_cols


def rank_and_nullspace(matrix: RationalMatrix) -> tuple[int, list[tuple[Fraction, ...]]]:
    """Exact rank and a basis of the (right) kernel {v : Mv = 0}."""
    rows = [list(matrix.row(i)) for i in range(matrix.rows)]
    rank, pivot_rows, pivot_cols = _eliminate(rows)
    free_cols = [c for c in range(matrix.cols) if c not in pivot_cols]
    basis = []
    for free in free_cols:
        vec = [Fraction(0)] * matrix.cols
        vec[free] = Fraction(1)
        for prow, pcol in zip(pivot_rows, pivot_cols):
            vec[pcol] = -rows[prow][free]
        basis.append(tuple(vec))
    return rank, basis


def matrix_rank(matrix: RationalMatrix) -> int:
    return rank_and_nullspace(matrix)[0]


def span_includes(a: RationalMatrix, b: RationalMatrix) -> bool:
    """True iff the column span of ``a`` lies inside the column span of ``b``."""
    if a.rows != b.rows:
        raise ChartMismatch(f"ambient mismatch: {a.rows} vs {b.rows}")
    rank_b = matrix_rank(b)
    joined = RationalMatrix.from_columns(b.columns() + a.columns(), ambient=a.rows)
    return matrix_rank(joined) == rank_b


def column_space_basis(columns: Sequence[Sequence[Fraction]], ambient: int) -> RationalMatrix:
    """Select a deterministic independent subset of ``columns`` spanning their space."""
    if not columns:
        return RationalMatrix(ambient, 0, ())
    matrix = RationalMatrix.from_columns(columns, ambient=ambient)
    rows = [list(matrix.row(i)) for i in range(matrix.rows)]
    _, _, pivot_cols = _eliminate(rows)
    return RationalMatrix.from_columns([columns[c] for c in pivot_cols], ambient=ambient)


# ---------------------------------------------------------------------------
# Polynomial matrices: determinant and nullspace
# ---------------------------------------------------------------------------


def poly_det(rows: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a square polynomial matrix by fraction-free Bareiss elimination."""
    n = len(rows)
    if n == 0:
        raise ChartMismatch("empty matrix has no determinant")
    arity = rows[0][0].arity
    if n == 1:
        return rows[0][0]
    work = [list(row) for row in rows]
    sign = 1
    prev = Poly.const(arity, 1)
    for step in range(n - 1):
        pivot_row = next((r for r in range(step, n) if not work[r][step].is_zero()), None)
        if pivot_row is None:
            return Poly.zero(arity)
        if pivot_row != step:
            work[step], work[pivot_row] = work[pivot_row], work[step]
            sign = -sign
        pivot = work[step][step]
        for r in range(step + 1, n):
            for c in range(step + 1, n):
                work[r][c] = poly_divexact(
                    work[r][c] * pivot - work[r][step] * work[step][c], prev
                )
            work[r][step] = Poly.zero(arity)
        prev = pivot
    det = work[n - 1][n - 1]
    return det.scaled(sign)


def _structural_pivots(rows: Sequence[Sequence[Poly]]) -> tuple[list[int], list[int]]:
    """Pivot rows (original indices) and columns for the rank over the fraction field.

    Forward Bareiss elimination with row swaps; the pivot minor of the
    original matrix on the returned rows and columns is a nonzero polynomial.
    """
    work = [list(row) for row in rows]
    perm = list(range(len(work)))
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    arity = work[0][0].arity if nrows else 1
    prev = Poly.const(arity, 1)
    pivot_cols: list[int] = []
    row_at = 0
    for col in range(ncols):
        if row_at == nrows:
            break
        pivot_row = next((r for r in range(row_at, nrows) if not work[r][col].is_zero()), None)
        if pivot_row is None:
            continue
        work[row_at], work[pivot_row] = work[pivot_row], work[row_at]
        perm[row_at], perm[pivot_row] = perm[pivot_row], perm[row_at]
        pivot = work[row_at][col]
        for r in range(row_at + 1, nrows):
            for c in range(col + 1, ncols):
                work[r][c] = poly_divexact(
                    work[r][c] * pivot - work[r][col] * work[row_at][c], prev
                )
            work[r][col] = Poly.zero(arity)
        prev = pivot
        pivot_cols.append(col)
        row_at += 1
    return perm[:row_at], pivot_cols


def _check_constraint_shape(matrix: Sequence[Sequence[Poly]]) -> tuple[int, int]:
    ambient = len(matrix)
    ngens = len(matrix[0]) if ambient else 0
    for row in matrix:
        if len(row) != ngens:
            raise ChartMismatch("ragged polynomial matrix")
    return ambient, ngens


def _kernel_by_cramer(
    constraints: Sequence[Sequence[Poly]],
    pivot_rows: Sequence[int],
    pivot_cols: Sequence[int],
    ambient: int,
    arity: int,
) -> list[tuple[Poly, ...]]:
    """Kernel vectors with minor entries: the pivot minor fills the free slot,
    the pivot slots get (negated) minors with the pivot column swapped out."""
    base = [[constraints[r][c] for c in pivot_cols] for r in pivot_rows]
    det_base = poly_det(base) if base else Poly.const(arity, 1)
    covectors = []
    for free in (c for c in range(ambient) if c not in pivot_cols):
        entries = [Poly.zero(arity)] * ambient
        entries[free] = det_base
        rhs = [constraints[r][free] for r in pivot_rows]
        for j, pcol in enumerate(pivot_cols):
            replaced = [row[:j] + [rhs[i]] + row[j + 1 :] for i, row in enumerate(base)]
            entries[pcol] = -poly_det(replaced)
        covectors.append(primitive_tuple(entries))
    return covectors


def polynomial_nullspace(
    matrix: Sequence[Sequence[Poly]],
    at_point: Sequence[Fraction],
) -> list[tuple[Poly, ...]]:
    """Polynomial covectors v with v^T M = 0 for an ambient x generators matrix M.

    Pivot rows and columns are chosen by exact elimination of M evaluated at
    ``at_point``; the kernel vectors are then assembled from Bareiss-computed
    minors of the symbolic matrix, so each output annihilates every generator
    as a polynomial identity.  Raises DegeneratePivot when the rank at the
    reference point is below the structural (generic) rank, i.e. when no
    pivot permutation is valid at that point.
    """
    ambient, ngens = _check_constraint_shape(matrix)
    if ambient == 0:
        return []
    if len(at_point) != ambient:
        raise ChartMismatch(f"point has {len(at_point)} coordinates, ambient is {ambient}")
    # constraint matrix: one row per generator, one column per ambient coordinate
    constraints = [[matrix[i][g] for i in range(ambient)] for g in range(ngens)]
    evaluated = [[entry.eval_at(at_point) for entry in row] for row in constraints]
    rank_at_point, pivot_rows, pivot_cols = _eliminate(evaluated)
    if len(_structural_pivots(constraints)[1]) > rank_at_point:
        raise DegeneratePivot(
            "generator matrix drops rank at the reference point; no valid pivot permutation"
        )
    return _kernel_by_cramer(constraints, pivot_rows, pivot_cols, ambient, matrix[0][0].arity)


def polynomial_nullspace_structural(matrix: Sequence[Sequence[Poly]]) -> list[tuple[Poly, ...]]:
    """Like polynomial_nullspace, but pivoted at a generic point.

    The covectors annihilate every generator identically; their values form
    a basis of the pointwise annihilator wherever the generator matrix keeps
    its structural rank and the covector values stay independent.
    """
    ambient, ngens = _check_constraint_shape(matrix)
    if ambient == 0:
        return []
    constraints = [[matrix[i][g] for i in range(ambient)] for g in range(ngens)]
    pivot_rows, pivot_cols = _structural_pivots(constraints)
    return _kernel_by_cramer(constraints, pivot_rows, pivot_cols, ambient, matrix[0][0].arity)
