import random

import pytest

from app.errors import DimensionMismatchError, NotASubLatticeError
from app.services.constructions import d_bb, named_construction, pair_lattice
from app.services.galois_models import ModelParams, Variant, automorphism_matrix, build_model, decomposition_sum
from app.services.lattice import (
    Lattice,
    QuotientInvariants,
    ambient_quotient,
    cokernel_invariants,
    lattice_sum,
    quotient_invariants,
)
from app.services.plocal import PMatrix


def _random_lattice(rng, n, p):
    count = rng.randint(0, n + 1)
    return Lattice.from_generators(n, [[rng.randint(-p * p, p * p) for _ in range(n)] for _ in range(count)], p)


def test_from_generators_examples():
    """Rank, zero lattice and redundant generators"""
    assert Lattice.from_generators(3, [(1, 0, 0), (0, 1, 0)], 5).rank == 2
    assert Lattice.from_generators(3, [(0, 0, 0)], 5).is_zero()
    assert Lattice.from_generators(3, [(1, 0, 0), (2, 0, 0)], 5) == Lattice.from_generators(3, [(1, 0, 0)], 5)


def test_from_generators_length_mismatch():
    """Generators must have the ambient length"""
    with pytest.raises(DimensionMismatchError):
        Lattice.from_generators(3, [(1, 0)], 5)


def test_canonical_form_is_unique():
    """Different generating sets of one span give identical canonical bases"""
    rng = random.Random(3)
    for _ in range(40):
        p = rng.choice([3, 5])
        n = rng.randint(1, 4)
        L = _random_lattice(rng, n, p)
        mixed = []
        for _ in range(rng.randint(0, 2)):
            coeffs = [rng.randint(-3, 3) for _ in L.basis]
            mixed.append([sum(k * col[j] for k, col in zip(coeffs, L.basis)) for j in range(n)])
        M = Lattice.from_generators(n, list(L.basis) + mixed + [tuple(2 * x for x in col) for col in L.basis], p)
        assert M == L
        assert M.equals(L)


def test_contains_examples():
    """J(γx^a) lies in ⟨γx^a, xy^{-1}⟩ for (a,b)=(1,4) at p=5"""
    model = build_model(ModelParams(variant=Variant.DEG4_NON_GALOIS, p=5, a=1, b=4))
    k_inf = model.lattice((1, 1, 0), (0, 1, -1))
    image = automorphism_matrix(model, "J").apply((1, 1, 0))
    assert image == (1, -4, 5)
    assert k_inf.contains(image)
    assert (0, 0, 0) in k_inf
    assert not Lattice.from_generators(3, [(0, 0, 1)], 5).contains((0, 1, 0))


def test_is_subset_examples():
    """L′_m sits inside R_m^(1) in case (B)"""
    model = build_model(ModelParams(variant=Variant.DEG6, p=5, a=1, b=4, c=0))
    assert named_construction(model, "L_prime_m").is_subset(named_construction(model, "R_m_1"))
    L = model.lattice((1, 0, 0, 0))
    assert L.is_subset(L)
    assert not model.full().is_subset(L)


def test_is_subset_rank_mismatch():
    """Lattices in different ambients cannot be compared"""
    with pytest.raises(DimensionMismatchError):
        Lattice.full(3, 5).is_subset(Lattice.full(4, 5))


def test_sum_examples():
    """The six decomposition groups generate everything"""
    model = build_model(ModelParams(variant=Variant.DEG6, p=5, a=1, b=1, c=1))
    assert decomposition_sum(model).is_full()
    L = model.lattice((1, 2, 3, 4))
    assert L.sum(Lattice.zero(4, 5)) == L
    e1 = Lattice.from_generators(2, [(1, 0)], 5)
    e2 = Lattice.from_generators(2, [(0, 1)], 5)
    assert (e1 + e2).is_full()
    assert lattice_sum(e1, e2, e1) == Lattice.full(2, 5)


def test_intersect_pair_lattices():
    """⟨D1, D̄1⟩ ∩ ⟨D2, D̄2⟩ matches the explicit two-generator form"""
    model = build_model(ModelParams(variant=Variant.DEG6, p=5, a=1, b=1, c=1))
    expected = model.lattice((3, 3, 1, 3), (0, 9, -1, -3))
    assert pair_lattice(model, 1).intersect(pair_lattice(model, 2)).equals(expected)
    assert d_bb(model) == expected


def test_intersect_trivial_cases():
    """Self-intersection, intersection with everything, and e1 ∩ e2"""
    L = Lattice.from_generators(3, [(1, 2, 0), (0, 3, 3)], 3)
    assert L.intersect(L) == L
    assert Lattice.full(3, 3).intersect(L) == L
    e1 = Lattice.from_generators(2, [(1, 0)], 3)
    e2 = Lattice.from_generators(2, [(0, 1)], 3)
    assert e1.intersect(e2).is_zero()


def test_intersect_properties_random():
    """Intersections are contained in both sides and absorb sums"""
    rng = random.Random(5)
    for _ in range(40):
        p = rng.choice([3, 5])
        n = rng.randint(1, 4)
        L1, L2 = _random_lattice(rng, n, p), _random_lattice(rng, n, p)
        meet = L1.intersect(L2)
        assert meet.is_subset(L1) and meet.is_subset(L2)
        assert L1.intersect(L1.sum(L2)) == L1
        for col in L1.basis:
            if L2.contains(col):
                assert meet.contains(col)


def test_quotient_invariants_examples():
    """⟨γ,x,y⟩ over ⟨γ, x, y^3⟩ is cyclic of order 3"""
    full = Lattice.full(3, 3)
    sub = Lattice.from_generators(3, [(1, 0, 0), (0, 1, 0), (0, 0, 3)], 3)
    q = quotient_invariants(full, sub)
    assert q == QuotientInvariants(torsion_exponents=[1], free_rank=0)
    assert q.is_cyclic() and q.torsion_order(3) == 3
    assert quotient_invariants(sub, sub).is_trivial()
    assert ambient_quotient(Lattice.zero(4, 3)) == QuotientInvariants(free_rank=4)


def test_quotient_invariants_requires_inclusion():
    """Quotients of non-nested lattices are rejected"""
    e1 = Lattice.from_generators(2, [(1, 0)], 3)
    with pytest.raises(NotASubLatticeError):
        quotient_invariants(e1, Lattice.full(2, 3))


def test_ambient_quotient_free_rank_counts_generators():
    """free_rank = n - rank and the torsion order comes from the pivots"""
    rng = random.Random(9)
    for _ in range(30):
        p = rng.choice([3, 5])
        n = rng.randint(1, 4)
        L = _random_lattice(rng, n, p)
        q = ambient_quotient(L)
        assert q.free_rank == n - L.rank
        if L.rank == n:
            assert q.torsion_order(p) == p ** sum(e for _, e in L.pivots)


def test_saturate_examples():
    """Saturation divides out the p-content"""
    assert Lattice.from_generators(2, [(5, 0)], 5).saturate() == Lattice.from_generators(2, [(1, 0)], 5)
    assert Lattice.from_generators(2, [(5, 25)], 5).saturate().equals(Lattice.from_generators(2, [(1, 5)], 5))
    L = Lattice.from_generators(3, [(1, 2, 0)], 5)
    assert L.saturate() == L


def test_saturate_quotient_is_torsion_free():
    """The ambient quotient of a saturation has no torsion"""
    rng = random.Random(13)
    for _ in range(30):
        p = rng.choice([3, 5])
        n = rng.randint(1, 4)
        L = _random_lattice(rng, n, p)
        S = L.saturate()
        assert L.is_subset(S)
        assert ambient_quotient(S).torsion_exponents == []
        assert quotient_invariants(S, L).is_finite()


def test_cokernel_invariants():
    """Cokernel of a presentation matrix"""
    M = PMatrix.from_rows([[1, 0, 0], [0, 2, 1], [0, -1, 2]], 5)
    assert cokernel_invariants(M) == QuotientInvariants(torsion_exponents=[1])
    assert cokernel_invariants(PMatrix.from_rows([[1, 0, 0]], 5)).free_rank == 2
