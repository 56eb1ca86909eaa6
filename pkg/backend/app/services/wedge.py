"""Commutator calculus on exponent vectors and the Scholz knot test.

The commutator [g, h] of two words lands in the second exterior power of
the ambient, so [γx^a y^b, y] = [γ,y][x,y]^a becomes
wedge((1,a,b), (0,0,1)) = (0, 1, a) on the basis ([γ,x], [γ,y], [x,y]).
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Sequence, Tuple

from app.errors import DimensionMismatchError
from app.services.galois_models import GaloisModel
from app.services.lattice import QuotientInvariants, cokernel_invariants
from app.services.plocal import Number, PMatrix, Vector, rank_mod_p

logger = logging.getLogger(__name__)

# (i, j) for each displayed basis element [g_i, g_j]; the rank-4 basis ends
# with [z, x] = -[x, z]
DISPLAY_BASIS = {
    3: ((0, 1), (0, 2), (1, 2)),
    4: ((0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)),
}


def lexicographic_pairs(n: int) -> List[Tuple[int, int]]:
    return list(combinations(range(n), 2))


def wedge_coordinates(u: Sequence, v: Sequence) -> List:
    """u_i v_j - u_j v_i for i < j in lexicographic order; works over any ring."""
    if len(u) != len(v):
        raise DimensionMismatchError(f"wedge of vectors of lengths {len(u)} and {len(v)}")
    return [u[i] * v[j] - u[j] * v[i] for i, j in lexicographic_pairs(len(u))]


@dataclass(frozen=True)
class WedgeVector:
    ambient_rank: int
    coordinates: Vector

    def coordinate(self, i: int, j: int):
        """Coefficient of [g_i, g_j]; antisymmetric in (i, j)."""
        if i == j:
            return Fraction(0)
        if i > j:
            return -self.coordinate(j, i)
        return self.coordinates[lexicographic_pairs(self.ambient_rank).index((i, j))]

    def in_display_basis(self) -> Vector:
        basis = DISPLAY_BASIS.get(self.ambient_rank)
        if basis is None:
            return self.coordinates
        return tuple(self.coordinate(i, j) for i, j in basis)

    def __add__(self, other: "WedgeVector") -> "WedgeVector":
        if other.ambient_rank != self.ambient_rank:
            raise DimensionMismatchError("wedge vectors of different rank")
        return WedgeVector(self.ambient_rank, tuple(s + t for s, t in zip(self.coordinates, other.coordinates)))

    def __neg__(self) -> "WedgeVector":
        return WedgeVector(self.ambient_rank, tuple(-s for s in self.coordinates))

    def is_zero(self) -> bool:
        return not any(self.coordinates)


def wedge(u: Sequence[Number], v: Sequence[Number]) -> WedgeVector:
    coords = wedge_coordinates([Fraction(x) for x in u], [Fraction(x) for x in v])
    return WedgeVector(len(u), tuple(coords))


def basis_labels(generator_labels: Sequence[str]) -> List[str]:
    n = len(generator_labels)
    basis = DISPLAY_BASIS.get(n, tuple(lexicographic_pairs(n)))
    return [f"[{generator_labels[i]},{generator_labels[j]}]" for i, j in basis]


def knot_matrix(model: GaloisModel) -> PMatrix:
    """One row per prime: the commutator of its two decomposition generators."""
    rows = [wedge(pr.inertia_gen, pr.second_gen).in_display_basis() for pr in model.primes]
    return PMatrix.from_rows(rows, model.p)


def knot_invariants(model: GaloisModel) -> Tuple[bool, QuotientInvariants]:
    """Whether the local H_2 images span H_2(G, Z_p), and the cokernel of that map."""
    K = knot_matrix(model)
    n = model.ambient_rank
    dimension = n * (n - 1) // 2
    trivial = rank_mod_p(K) == dimension
    cokernel = cokernel_invariants(K)
    logger.debug(f"Knot matrix rank test for {model.params.values()} at p={model.p}: trivial={trivial}")
    return trivial, cokernel
