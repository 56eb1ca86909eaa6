"""Z_(p)-submodules of Z_(p)^n.

A subgroup of Gal = <γ, x, y[, z]> written multiplicatively, say
<γx^a, xy^{-1}>, is stored additively as the span of its exponent vectors
(1, a, 0) and (0, 1, -1).
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from app.errors import DimensionMismatchError, NotASubLatticeError
from app.services.plocal import (
    INFINITY,
    Number,
    PMatrix,
    Vector,
    as_vector,
    fraction_valuation,
    kernel_basis,
    residue,
    smith_p_local,
)

logger = logging.getLogger(__name__)


class QuotientInvariants(BaseModel):
    """⊕ Z/p^e ⊕ Z_(p)^free_rank, exponents ascending."""

    model_config = {"frozen": True}

    torsion_exponents: List[int] = []
    free_rank: int = 0

    def is_trivial(self) -> bool:
        return not self.torsion_exponents and self.free_rank == 0

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def is_cyclic(self) -> bool:
        return len(self.torsion_exponents) + self.free_rank <= 1

    def minimal_generators(self) -> int:
        """dim over F_p of the quotient tensored with F_p."""
        return len(self.torsion_exponents) + self.free_rank

    def torsion_order(self, p: int) -> int:
        return p ** sum(self.torsion_exponents)


def invariants_from_exponents(exponents: Iterable, extra_free: int = 0) -> QuotientInvariants:
    torsion = sorted(e for e in exponents if e != INFINITY and e > 0)
    free = sum(1 for e in exponents if e == INFINITY) + extra_free
    return QuotientInvariants(torsion_exponents=torsion, free_rank=free)


def _canonical_basis(vectors: Sequence[Vector], n: int, p: int) -> Tuple[Tuple[Vector, ...], Tuple[Tuple[int, int], ...]]:
    pool = [list(v) for v in vectors if any(v)]
    basis: List[List[Fraction]] = []
    pivots: List[Tuple[int, int]] = []
    for i in range(n):
        best, idx = INFINITY, None
        for t, v in enumerate(pool):
            if v[i] != 0:
                val = fraction_valuation(v[i], p)
                if val < best:
                    best, idx = val, t
        if idx is None:
            continue
        piv = pool.pop(idx)
        unit = piv[i] / Fraction(p) ** best
        piv = [x / unit for x in piv]
        for v in pool:
            if v[i] != 0:
                f = v[i] / piv[i]
                for c in range(n):
                    v[c] -= f * piv[c]
        pool = [v for v in pool if any(v)]
        basis.append(piv)
        pivots.append((i, best))

    # reduce each column at the later pivot rows modulo the pivot power
    for j in range(len(basis)):
        for k in range(j + 1, len(basis)):
            row, e = pivots[k]
            x = basis[j][row]
            rep = residue(x, p, e) if e > 0 else 0
            q = (x - rep) / Fraction(p) ** e
            if q != 0:
                basis[j] = [s - q * t for s, t in zip(basis[j], basis[k])]
    return tuple(tuple(col) for col in basis), tuple(pivots)


@dataclass(frozen=True)
class Lattice:
    prime: int
    ambient_rank: int
    basis: Tuple[Vector, ...]
    pivots: Tuple[Tuple[int, int], ...]

    @classmethod
    def from_generators(cls, n: int, vectors: Iterable[Sequence[Number]], p: int) -> "Lattice":
        vecs = []
        for v in vectors:
            if len(v) != n:
                raise DimensionMismatchError(f"generator {tuple(v)} has length {len(v)}, expected {n}")
            vecs.append(as_vector(v, p))
        basis, pivots = _canonical_basis(vecs, n, p)
        return cls(p, n, basis, pivots)

    @classmethod
    def full(cls, n: int, p: int) -> "Lattice":
        return cls.from_generators(n, [[1 if i == j else 0 for j in range(n)] for i in range(n)], p)

    @classmethod
    def zero(cls, n: int, p: int) -> "Lattice":
        return cls(p, n, (), ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def generators(self) -> PMatrix:
        """Canonical generator matrix, one column per generator."""
        return PMatrix.from_columns(self.basis, self.prime, self.ambient_rank)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.rank == self.ambient_rank and all(e == 0 for _, e in self.pivots)

    def _check_compatible(self, other: "Lattice") -> None:
        if self.ambient_rank != other.ambient_rank or self.prime != other.prime:
            raise DimensionMismatchError(
                f"lattices live in different ambients: rank {self.ambient_rank} at p={self.prime} "
                f"vs rank {other.ambient_rank} at p={other.prime}"
            )

    def coordinates(self, v: Sequence[Number]) -> Optional[Vector]:
        """Coefficients of v on the canonical basis, or None if v is not in the span."""
        if len(v) != self.ambient_rank:
            raise DimensionMismatchError(f"vector of length {len(v)} in rank {self.ambient_rank} ambient")
        p = self.prime
        w = list(as_vector(v, p))
        coords = []
        pivot_at = {row: k for k, (row, _) in enumerate(self.pivots)}
        for i in range(self.ambient_rank):
            k = pivot_at.get(i)
            if k is None:
                if w[i] != 0:
                    return None
                continue
            e = self.pivots[k][1]
            if fraction_valuation(w[i], p) < e:
                return None
            c = w[i] / Fraction(p) ** e
            coords.append(c)
            if c != 0:
                col = self.basis[k]
                w = [s - c * t for s, t in zip(w, col)]
        return tuple(coords)

    def contains(self, v: Sequence[Number]) -> bool:
        return self.coordinates(v) is not None

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def is_subset(self, other: "Lattice") -> bool:
        self._check_compatible(other)
        return all(other.contains(col) for col in self.basis)

    def equals(self, other: "Lattice") -> bool:
        """Equality by double inclusion; agrees with canonical identity."""
        return self.is_subset(other) and other.is_subset(self)

    def sum(self, other: "Lattice") -> "Lattice":
        self._check_compatible(other)
        return Lattice.from_generators(self.ambient_rank, self.basis + other.basis, self.prime)

    def __add__(self, other: "Lattice") -> "Lattice":
        return self.sum(other)

    def intersect(self, other: "Lattice") -> "Lattice":
        self._check_compatible(other)
        n, p = self.ambient_rank, self.prime
        if self.is_zero() or other.is_zero():
            return Lattice.zero(n, p)
        k1 = self.rank
        block = PMatrix.from_columns(
            list(self.basis) + [tuple(-x for x in col) for col in other.basis], p, n
        )
        g1 = self.generators
        images = [g1.apply(kv[:k1]) for kv in kernel_basis(block)]
        return Lattice.from_generators(n, images, p)

    def saturate(self) -> "Lattice":
        """Smallest superlattice with torsion-free ambient quotient."""
        n, p = self.ambient_rank, self.prime
        if self.is_zero():
            return self
        left_kernel = kernel_basis(self.generators.transpose())
        if not left_kernel:
            return Lattice.full(n, p)
        equations = PMatrix.from_rows(left_kernel, p, cols=n)
        return Lattice.from_generators(n, kernel_basis(equations), p)

    def scaled(self, factor: Number) -> "Lattice":
        return Lattice.from_generators(
            self.ambient_rank, [[factor * x for x in col] for col in self.basis], self.prime
        )

    def image(self, matrix: PMatrix) -> "Lattice":
        """Image under a linear map acting on exponent vectors."""
        return Lattice.from_generators(self.ambient_rank, [matrix.apply(col) for col in self.basis], self.prime)

    def as_int_rows(self) -> List[List]:
        return [[int(x) if x.denominator == 1 else str(x) for x in col] for col in self.basis]


def from_generators(n: int, vectors: Iterable[Sequence[Number]], p: int) -> Lattice:
    return Lattice.from_generators(n, vectors, p)


def contains(L: Lattice, v: Sequence[Number]) -> bool:
    return L.contains(v)


def is_subset(L1: Lattice, L2: Lattice) -> bool:
    return L1.is_subset(L2)


def lattice_sum(*lattices: Lattice) -> Lattice:
    total = lattices[0]
    for other in lattices[1:]:
        total = total.sum(other)
    return total


def intersect(L1: Lattice, L2: Lattice) -> Lattice:
    return L1.intersect(L2)


def saturate(L: Lattice) -> Lattice:
    return L.saturate()


def quotient_invariants(L_sup: Lattice, L_sub: Lattice) -> QuotientInvariants:
    """Invariant factors of L_sup / L_sub."""
    if not L_sub.is_subset(L_sup):
        raise NotASubLatticeError("quotient requested for a lattice that is not contained in the other")
    if L_sup.is_zero():
        return QuotientInvariants()
    if L_sub.is_zero():
        return QuotientInvariants(free_rank=L_sup.rank)
    coords = [L_sup.coordinates(col) for col in L_sub.basis]
    matrix = PMatrix.from_columns(coords, L_sup.prime, L_sup.rank)
    smith = smith_p_local(matrix)
    extra = L_sup.rank - len(smith.exponents)
    return invariants_from_exponents(smith.exponents, extra_free=extra)


def ambient_quotient(L: Lattice) -> QuotientInvariants:
    return quotient_invariants(Lattice.full(L.ambient_rank, L.prime), L)


def cokernel_invariants(M: PMatrix) -> QuotientInvariants:
    """Z_(p)^cols modulo the span of the rows of M."""
    if M.rows == 0:
        return QuotientInvariants(free_rank=M.cols)
    smith = smith_p_local(M)
    return invariants_from_exponents(smith.exponents, extra_free=M.cols - len(smith.exponents))
