"""Exact arithmetic over Z_(p), the integers localized at an odd prime p.

Values are `fractions.Fraction` objects whose denominators are prime to p.
Matrices are immutable grids of such fractions; the algorithms below
(Smith form, rank mod p, determinant, kernel, solve) never approximate.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy import QQ, isprime
from sympy.polys.matrices import DomainMatrix

from app.errors import DimensionMismatchError, InconsistentParametersError, NotPIntegralError

logger = logging.getLogger(__name__)

INFINITY = math.inf

Number = Union[int, Fraction]
Vector = Tuple[Fraction, ...]


def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 3 or not isprime(p):
        raise InconsistentParametersError(f"p must be an odd prime, got {p}")
    return p


def fraction_valuation(q: Fraction, p: int) -> Union[int, float]:
    """p-adic valuation of a rational; INFINITY for zero."""
    if q == 0:
        return INFINITY
    v = 0
    num = q.numerator
    while num % p == 0:
        num //= p
        v += 1
    den = q.denominator
    while den % p == 0:
        den //= p
        v -= 1
    return v


def to_local(value: Number, p: int) -> Fraction:
    """Coerce to a Fraction, rejecting anything outside Z_(p)."""
    q = Fraction(value)
    if q.denominator % p == 0:
        raise NotPIntegralError(f"not p-integral: {q} has p={p} in its denominator")
    return q


def residue(q: Fraction, p: int, depth: int = 1) -> int:
    """Image of q in Z/p^depth, as an integer in [0, p^depth)."""
    modulus = p ** depth
    if q.denominator % p == 0:
        raise NotPIntegralError(f"not p-integral: {q}")
    return q.numerator * pow(q.denominator, -1, modulus) % modulus


def as_vector(values: Iterable[Number], p: int) -> Vector:
    return tuple(to_local(x, p) for x in values)


@dataclass(frozen=True)
class PLocalScalar:
    value: Fraction
    prime: int

    def __post_init__(self):
        object.__setattr__(self, "value", to_local(self.value, self.prime))

    @classmethod
    def of(cls, value: Number, p: int) -> "PLocalScalar":
        return cls(Fraction(value), p)

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    def valuation(self) -> Union[int, float]:
        return fraction_valuation(self.value, self.prime)

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def is_zero(self) -> bool:
        return self.value == 0

    def residue(self, depth: int = 1) -> int:
        return residue(self.value, self.prime, depth)

    def _coerce(self, other) -> Fraction:
        if isinstance(other, PLocalScalar):
            if other.prime != self.prime:
                raise DimensionMismatchError(f"mixed primes {self.prime} and {other.prime}")
            return other.value
        return to_local(other, self.prime)

    def __add__(self, other):
        return PLocalScalar(self.value + self._coerce(other), self.prime)

    __radd__ = __add__

    def __sub__(self, other):
        return PLocalScalar(self.value - self._coerce(other), self.prime)

    def __rsub__(self, other):
        return PLocalScalar(self._coerce(other) - self.value, self.prime)

    def __mul__(self, other):
        return PLocalScalar(self.value * self._coerce(other), self.prime)

    __rmul__ = __mul__

    def __neg__(self):
        return PLocalScalar(-self.value, self.prime)

    def __truediv__(self, other):
        divisor = self._coerce(other)
        if fraction_valuation(divisor, self.prime) != 0:
            raise NotPIntegralError(f"division by {divisor}, which is not a unit at p={self.prime}")
        return PLocalScalar(self.value / divisor, self.prime)

    def __str__(self) -> str:
        return str(self.value)


def valuation(s: Union[PLocalScalar, Number], p: Optional[int] = None) -> Union[int, float]:
    """Exact p-adic valuation; INFINITY iff s = 0."""
    if isinstance(s, PLocalScalar):
        return s.valuation()
    if p is None:
        raise ValueError("a prime is required for a bare number")
    return fraction_valuation(Fraction(s), p)


@dataclass(frozen=True)
class PMatrix:
    prime: int
    rows: int
    cols: int
    entries: Tuple[Vector, ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Number]], p: int, cols: Optional[int] = None) -> "PMatrix":
        grid = tuple(as_vector(row, p) for row in rows)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        if any(len(row) != cols for row in grid):
            raise DimensionMismatchError("ragged matrix rows")
        return cls(p, len(grid), cols, grid)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Number]], p: int, rows: int) -> "PMatrix":
        if any(len(c) != rows for c in columns):
            raise DimensionMismatchError(f"column length differs from {rows}")
        grid = tuple(tuple(to_local(columns[j][i], p) for j in range(len(columns))) for i in range(rows))
        return cls(p, rows, len(columns), grid)

    @classmethod
    def identity(cls, n: int, p: int) -> "PMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], p, cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "PMatrix":
        return cls.from_rows([[0] * cols for _ in range(rows)], p, cols=cols)

    def entry(self, i: int, j: int) -> PLocalScalar:
        return PLocalScalar(self.entries[i][j], self.prime)

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "PMatrix":
        return PMatrix.from_rows([self.column(j) for j in range(self.cols)], self.prime, cols=self.rows)

    def __matmul__(self, other: "PMatrix") -> "PMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        product = [
            [sum((self.entries[i][k] * other.entries[k][j] for k in range(self.cols)), Fraction(0))
             for j in range(other.cols)]
            for i in range(self.rows)
        ]
        return PMatrix.from_rows(product, self.prime, cols=other.cols)

    def apply(self, v: Sequence[Number]) -> Vector:
        if len(v) != self.cols:
            raise DimensionMismatchError(f"vector of length {len(v)} for a matrix with {self.cols} columns")
        w = as_vector(v, self.prime)
        return tuple(sum((r[k] * w[k] for k in range(self.cols)), Fraction(0)) for r in self.entries)

    def is_diagonal(self) -> bool:
        return all(self.entries[i][j] == 0
                   for i in range(self.rows) for j in range(self.cols) if i != j)

    def tolist(self) -> List[List[Fraction]]:
        return [list(r) for r in self.entries]


@dataclass(frozen=True)
class SmithData:
    left: PMatrix
    right: PMatrix
    exponents: Tuple[Union[int, float], ...]
    diagonal: PMatrix

    @property
    def finite_rank(self) -> int:
        return sum(1 for e in self.exponents if e != INFINITY)


def _swap_rows(a: List[List[Fraction]], i: int, j: int) -> None:
    a[i], a[j] = a[j], a[i]


def _swap_cols(a: List[List[Fraction]], i: int, j: int) -> None:
    for row in a:
        row[i], row[j] = row[j], row[i]


def smith_p_local(M: PMatrix) -> SmithData:
    """Smith normal form over Z_(p).

    Pivots on an entry of minimal valuation in the remaining block, ties
    broken row-major. The pivot is scaled to an exact power of p, so the
    returned diagonal is U·M·V with entries p^e (or 0).
    """
    if M.rows == 0 or M.cols == 0:
        raise DimensionMismatchError("smith_p_local needs a nonempty matrix")
    p = M.prime
    m, n = M.rows, M.cols
    a = M.tolist()
    u = PMatrix.identity(m, p).tolist()
    w = PMatrix.identity(n, p).tolist()
    exponents: List[Union[int, float]] = []

    for k in range(min(m, n)):
        pivot = None
        best = INFINITY
        for i in range(k, m):
            for j in range(k, n):
                if a[i][j] != 0:
                    v = fraction_valuation(a[i][j], p)
                    if v < best:
                        best, pivot = v, (i, j)
            if best == 0:
                break
        if pivot is None:
            exponents.extend([INFINITY] * (min(m, n) - k))
            break
        i, j = pivot
        _swap_rows(a, k, i)
        _swap_rows(u, k, i)
        _swap_cols(a, k, j)
        _swap_cols(w, k, j)

        unit = a[k][k] / Fraction(p) ** best
        a[k] = [x / unit for x in a[k]]
        u[k] = [x / unit for x in u[k]]
        piv = a[k][k]

        for r in range(k + 1, m):
            if a[r][k] != 0:
                f = a[r][k] / piv
                a[r] = [x - f * y for x, y in zip(a[r], a[k])]
                u[r] = [x - f * y for x, y in zip(u[r], u[k])]
        for c in range(k + 1, n):
            if a[k][c] != 0:
                f = a[k][c] / piv
                for row in a:
                    row[c] -= f * row[k]
                for row in w:
                    row[c] -= f * row[k]
        exponents.append(best)

    logger.debug(f"Smith exponents of {m}x{n} matrix at p={p}: {exponents}")
    return SmithData(
        left=PMatrix.from_rows(u, p, cols=m),
        right=PMatrix.from_rows(w, p, cols=n),
        exponents=tuple(exponents),
        diagonal=PMatrix.from_rows(a, p, cols=n),
    )


def rank_mod_p(M: PMatrix) -> int:
    """Rank of the entrywise residue matrix over F_p."""
    p = M.prime
    a = []
    for row in M.entries:
        for x in row:
            if fraction_valuation(x, p) < 0:
                raise NotPIntegralError(f"not p-integral: entry {x}")
        a.append([residue(x, p) for x in row])
    rank = 0
    for c in range(M.cols):
        pivot = next((r for r in range(rank, M.rows) if a[r][c] % p), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        inv = pow(a[rank][c], -1, p)
        a[rank] = [x * inv % p for x in a[rank]]
        for r in range(M.rows):
            if r != rank and a[r][c]:
                f = a[r][c]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def determinant(M: PMatrix) -> PLocalScalar:
    if M.rows != M.cols:
        raise DimensionMismatchError(f"determinant of a non-square {M.rows}x{M.cols} matrix")
    if M.rows == 0:
        return PLocalScalar.of(1, M.prime)
    dm = DomainMatrix(
        [[QQ(x.numerator, x.denominator) for x in row] for row in M.entries],
        (M.rows, M.cols),
        QQ,
    )
    det = dm.det()
    return PLocalScalar(Fraction(int(det.numerator), int(det.denominator)), M.prime)


def kernel_basis(M: PMatrix) -> List[Vector]:
    """Z_(p)-basis of the saturated solution module {x : M x = 0}."""
    p = M.prime
    if M.cols == 0:
        return []
    if M.rows == 0:
        return PMatrix.identity(M.cols, p).columns()
    smith = smith_p_local(M)
    r = smith.finite_rank
    return [smith.right.column(j) for j in range(r, M.cols)]


def solve(M: PMatrix, b: Sequence[Number]) -> Optional[Vector]:
    """One solution x over Z_(p) of M x = b, or None when there is none."""
    p = M.prime
    if len(b) != M.rows:
        raise DimensionMismatchError(f"right-hand side of length {len(b)} for {M.rows} rows")
    target = as_vector(b, p)
    if M.cols == 0:
        return () if all(x == 0 for x in target) else None
    if M.rows == 0:
        return tuple(Fraction(0) for _ in range(M.cols))
    smith = smith_p_local(M)
    ub = smith.left.apply(target)
    y = [Fraction(0)] * M.cols
    for i in range(M.rows):
        e = smith.exponents[i] if i < len(smith.exponents) else INFINITY
        if e == INFINITY:
            if ub[i] != 0:
                return None
            continue
        if fraction_valuation(ub[i], p) < e:
            return None
        y[i] = ub[i] / Fraction(p) ** e
    return smith.right.apply(y)
