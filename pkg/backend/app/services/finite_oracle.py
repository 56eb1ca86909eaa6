"""Brute-force cross-checks of the lattice module in (Z/p^k)^n.

Spans are enumerated by closing {0} under addition of each generator, with
no reference to echelon forms. Depth choices that keep a comparison exact
are derived from Smith exponents; the enumerated sets themselves are
independent of the lattice code.
"""
import logging
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from app import config
from app.errors import DepthInsufficientError, NotASubLatticeError, OracleBudgetError, UnknownNameError
from app.services.lattice import Lattice, quotient_invariants
from app.services.plocal import INFINITY, PMatrix, residue, smith_p_local

logger = logging.getLogger(__name__)

IntVector = Tuple[int, ...]
OPERATIONS = ("intersect", "sum", "contains-sample", "quotient")


@dataclass(frozen=True)
class FiniteSpan:
    prime: int
    depth: int
    ambient_rank: int
    elements: FrozenSet[IntVector]

    @property
    def modulus(self) -> int:
        return self.prime ** self.depth

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, v) -> bool:
        return tuple(v) in self.elements

    def reduce(self, depth: int) -> "FiniteSpan":
        """Image under (Z/p^k)^n -> (Z/p^depth)^n."""
        if depth > self.depth:
            raise ValueError("cannot lift a span to a deeper level")
        m = self.prime ** depth
        return FiniteSpan(self.prime, depth, self.ambient_rank, frozenset(tuple(x % m for x in v) for v in self.elements))


def reduce_vector(v: Sequence, p: int, depth: int) -> IntVector:
    return tuple(residue(x, p, depth) if not isinstance(x, int) else x % p ** depth for x in v)


def close_span(vectors: Iterable[Sequence], p: int, depth: int, n: int, budget: Optional[int] = None) -> FiniteSpan:
    budget = config.oracle_budget() if budget is None else budget
    modulus = p ** depth
    zero = (0,) * n
    elements = {zero}
    touched = 1
    for v in vectors:
        g = reduce_vector(v, p, depth)
        multiples = [zero]
        current = g
        while current not in elements:
            multiples.append(current)
            current = tuple((s + t) % modulus for s, t in zip(current, g))
        if len(multiples) == 1:
            continue
        touched += len(elements) * len(multiples)
        if touched > budget:
            raise OracleBudgetError(f"enumeration at p={p}, depth={depth}, rank={n} exceeds the budget of {budget}")
        elements = {tuple([(s + t) % modulus for s, t in zip(e, m)]) for e in elements for m in multiples}
    logger.debug(f"Enumerated span of {len(elements)} vectors at p={p}, depth={depth}")
    return FiniteSpan(p, depth, n, frozenset(elements))


def enumerate_span(L: Lattice, depth: int, budget: Optional[int] = None) -> FiniteSpan:
    """Image of L in (Z/p^depth)^n."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    budget = config.oracle_budget() if budget is None else budget
    return _enumerate_cached(L, depth, budget)


# rank-4 spans at p = 3 run to 3^12 vectors; one oracle comparison revisits the same few
@lru_cache(maxsize=4)
def _enumerate_cached(L: Lattice, depth: int, budget: int) -> FiniteSpan:
    return close_span(L.basis, L.prime, depth, L.ambient_rank, budget)


def predicted_span_size(L: Lattice, depth: int) -> int:
    """|L mod p^depth| from the Smith exponents of the generator matrix."""
    if L.is_zero():
        return 1
    exps = smith_p_local(L.generators).exponents
    return L.prime ** sum(max(0, depth - e) for e in exps if e != INFINITY)


def max_exponent(vectors: List[Sequence], p: int, n: int) -> int:
    """Largest finite Smith exponent of the matrix with the given columns."""
    if not vectors:
        return 0
    exps = smith_p_local(PMatrix.from_columns(vectors, p, n)).exponents
    finite = [e for e in exps if e != INFINITY]
    return max(finite) if finite else 0


def _span_ratio(L_sup: Lattice, L_sub: Lattice, depth: int, budget: Optional[int]) -> int:
    return len(enumerate_span(L_sup, depth, budget)) // len(enumerate_span(L_sub, depth, budget))


def oracle_quotient_order(L_sup: Lattice, L_sub: Lattice, depth: int, budget: Optional[int] = None) -> int:
    if not L_sub.is_subset(L_sup):
        raise NotASubLatticeError("oracle quotient of non-nested lattices")
    q = quotient_invariants(L_sup, L_sub)
    if q.torsion_exponents and max(q.torsion_exponents) >= depth:
        raise DepthInsufficientError(f"depth insufficient: torsion exponent {max(q.torsion_exponents)} >= {depth}")
    order = _span_ratio(L_sup, L_sub, depth, budget)
    if q.is_finite() and depth > 1 and _span_ratio(L_sup, L_sub, depth - 1, budget) != order:
        raise DepthInsufficientError(f"depth insufficient: quotient order still grows at depth {depth}")
    return order


def _agree_sum(L1: Lattice, L2: Lattice, depth: int, budget) -> bool:
    combined = close_span(L1.basis + L2.basis, L1.prime, depth, L1.ambient_rank, budget)
    return enumerate_span(L1.sum(L2), depth, budget).elements == combined.elements


def _agree_intersect(L1: Lattice, L2: Lattice, depth: int, budget) -> bool:
    n, p = L1.ambient_rank, L1.prime
    c = max_exponent(list(L1.sum(L2).basis), p, n)
    shallow = depth - c
    if shallow < 1:
        raise DepthInsufficientError(f"depth insufficient: intersection needs depth above {c}")
    finite = enumerate_span(L1, depth, budget).elements & enumerate_span(L2, depth, budget).elements
    projected = FiniteSpan(p, depth, n, frozenset(finite)).reduce(shallow)
    return enumerate_span(L1.intersect(L2), shallow, budget).elements == projected.elements


def sample_vectors(L: Lattice, count: int, rng: random.Random) -> List[IntVector]:
    """Half inside L (integer combinations of its basis), half arbitrary."""
    p, n = L.prime, L.ambient_rank
    bound = p * p
    samples = []
    for i in range(count):
        if i % 2 == 0 and not L.is_zero():
            coeffs = [rng.randint(-bound, bound) for _ in L.basis]
            v = [sum(c * col[j] for c, col in zip(coeffs, L.basis)) for j in range(n)]
            samples.append(tuple(int(x) if x.denominator == 1 else x for x in v))
        else:
            samples.append(tuple(rng.randint(-bound, bound) for _ in range(n)))
    return samples


def _agree_contains(L: Lattice, samples: List, depth: int, budget) -> bool:
    span = enumerate_span(L, depth, budget)
    for v in samples:
        c = max_exponent(list(L.basis) + [v], L.prime, L.ambient_rank)
        if depth <= c:
            raise DepthInsufficientError(f"depth insufficient: membership needs depth above {c}")
        if L.contains(v) != (reduce_vector(v, L.prime, depth) in span):
            return False
    return True


def _agree_quotient(L1: Lattice, L2: Lattice, depth: int, budget) -> bool:
    sup = L2.saturate()
    q = quotient_invariants(sup, L2)
    return oracle_quotient_order(sup, L2, depth, budget) == q.torsion_order(L2.prime)


def oracle_agree(
    L1: Lattice,
    L2: Lattice,
    depth: int,
    op: str,
    samples: Optional[List] = None,
    seed: int = 0,
    budget: Optional[int] = None,
) -> bool:
    """Whether the lattice-module result and the finite computation coincide.

    "quotient" compares saturate(L2)/L2, whose order is always finite.
    """
    if L1.ambient_rank != L2.ambient_rank or L1.prime != L2.prime:
        raise NotASubLatticeError("oracle comparison of lattices in different ambients")
    if op == "sum":
        return _agree_sum(L1, L2, depth, budget)
    if op == "intersect":
        return _agree_intersect(L1, L2, depth, budget)
    if op == "contains-sample":
        rng = random.Random(seed)
        if samples is None:
            samples = sample_vectors(L1, 6, rng) + sample_vectors(L2, 6, rng)
        return _agree_contains(L1, samples, depth, budget) and _agree_contains(L2, samples, depth, budget)
    if op == "quotient":
        return _agree_quotient(L1, L2, depth, budget)
    raise UnknownNameError(f"unknown oracle operation {op!r}; use one of {', '.join(OPERATIONS)}")


def max_oracle_rank(p: int, depth: int, budget: Optional[int] = None, cap: int = 4) -> int:
    """Largest ambient rank n <= cap whose full span p^(depth n) stays well inside the budget."""
    budget = config.oracle_budget() if budget is None else budget
    n = 1
    while n < cap and p ** (depth * (n + 1)) * 10 <= budget:
        n += 1
    return n


def random_lattice_pair(rng: random.Random, p: int, max_rank: int) -> Tuple[Lattice, Lattice]:
    """Two lattices in a common ambient of rank <= max_rank, entries in [-p^2, p^2]."""
    n = rng.randint(1, max_rank)
    bound = p * p

    def draw() -> Lattice:
        count = rng.randint(0, n)
        vectors = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(count)]
        return Lattice.from_generators(n, vectors, p)

    return draw(), draw()
