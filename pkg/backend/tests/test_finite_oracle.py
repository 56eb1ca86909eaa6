import random

import pytest

from app.errors import DepthInsufficientError, NotASubLatticeError, OracleBudgetError, UnknownNameError
from app.services.finite_oracle import (
    OPERATIONS,
    close_span,
    enumerate_span,
    max_oracle_rank,
    oracle_agree,
    oracle_quotient_order,
    predicted_span_size,
    random_lattice_pair,
)
from app.services.galois_models import ModelParams, Variant, build_model
from app.services.constructions import named_construction
from app.services.lattice import Lattice


def test_enumerate_span_examples():
    """⟨(1,2)⟩ mod 9, the zero lattice, and (Z/3)^2"""
    assert len(enumerate_span(Lattice.from_generators(2, [(1, 2)], 3), 2)) == 9
    zero = enumerate_span(Lattice.zero(3, 3), 2)
    assert zero.elements == frozenset({(0, 0, 0)})
    assert len(enumerate_span(Lattice.full(2, 3), 1)) == 9


def test_span_is_a_subgroup():
    """Closed under addition and negation"""
    span = enumerate_span(Lattice.from_generators(3, [(1, 2, 0), (0, 3, 3)], 3), 2)
    m = span.modulus
    for u in span.elements:
        assert tuple(-x % m for x in u) in span
        for v in list(span.elements)[:10]:
            assert tuple((s + t) % m for s, t in zip(u, v)) in span


def test_span_size_matches_smith_count():
    """|L mod p^k| = p^(Σ max(0, k - e_i))"""
    rng = random.Random(21)
    for _ in range(30):
        p = rng.choice([3, 5])
        n = rng.randint(1, 3 if p == 3 else 2)
        L1, _ = random_lattice_pair(rng, p, n)
        for depth in (1, 2):
            assert len(enumerate_span(L1, depth)) == predicted_span_size(L1, depth)


def test_budget_exceeded():
    """Enumerations larger than the budget stop early"""
    with pytest.raises(OracleBudgetError):
        enumerate_span(Lattice.full(4, 5), 3, budget=1000)


def test_budget_from_environment(monkeypatch):
    """KNOT_ORACLE_BUDGET caps enumeration"""
    monkeypatch.setenv("KNOT_ORACLE_BUDGET", "50")
    with pytest.raises(OracleBudgetError):
        enumerate_span(Lattice.full(3, 3), 2)


def test_quotient_order_examples():
    """(Z/9)^2 over ⟨(1,2)⟩, L over L, and the ambient over P_n"""
    full = Lattice.full(2, 3)
    line = Lattice.from_generators(2, [(1, 2)], 3)
    assert oracle_quotient_order(full, line, 2) == 9
    assert oracle_quotient_order(line, line, 2) == 1
    model = build_model(ModelParams(variant=Variant.DEG4_NON_GALOIS, p=3, a=1, b=2))
    P_n = named_construction(model, "P_n")
    assert oracle_quotient_order(model.full(), P_n, 2) == 3


def test_quotient_order_depth_insufficient():
    """A Z/9 quotient cannot be seen at depth 2"""
    full = Lattice.full(2, 3)
    sub = Lattice.from_generators(2, [(1, 0), (0, 9)], 3)
    with pytest.raises(DepthInsufficientError, match="depth insufficient"):
        oracle_quotient_order(full, sub, 2)
    assert oracle_quotient_order(full, sub, 3) == 9


def test_quotient_order_requires_inclusion():
    """The oracle quotient also needs nested lattices"""
    with pytest.raises(NotASubLatticeError):
        oracle_quotient_order(Lattice.from_generators(2, [(1, 0)], 3), Lattice.full(2, 3), 2)


def test_agree_on_identical_lattices():
    """L1 = L2 agrees for every operation"""
    L = Lattice.from_generators(3, [(1, 3, 0), (0, 1, 2)], 3)
    samples = [(1, 3, 0), (0, 1, 1), (2, 7, 4), (0, 0, 1)]
    for op in OPERATIONS:
        assert oracle_agree(L, L, 3, op, samples=samples)


def test_agree_coordinate_axes():
    """⟨e1⟩ ∩ ⟨e2⟩ is {0} in both worlds"""
    e1 = Lattice.from_generators(2, [(1, 0)], 5)
    e2 = Lattice.from_generators(2, [(0, 1)], 5)
    assert oracle_agree(e1, e2, 2, "intersect")
    assert oracle_agree(e1, e2, 2, "sum")


def test_unknown_operation():
    """Operations are a closed list"""
    L = Lattice.full(2, 3)
    with pytest.raises(UnknownNameError):
        oracle_agree(L, L, 2, "union")


def test_random_pairs_agree():
    """Depth-3 random pairs at the largest in-budget rank agree with enumeration"""
    rng = random.Random(2024)
    checked = {op: 0 for op in OPERATIONS}
    disagreements = []
    for index in range(1000):
        if min(checked.values()) >= 150:
            break
        p = 3 if index % 2 == 0 else 5
        L1, L2 = random_lattice_pair(rng, p, max_oracle_rank(p, 3))
        for op in OPERATIONS:
            try:
                agree = oracle_agree(L1, L2, 3, op, seed=index)
            except DepthInsufficientError:
                continue
            checked[op] += 1
            if not agree:
                disagreements.append((op, p, L1.basis, L2.basis))
    assert not disagreements, disagreements[:3]
    assert all(count >= 150 for count in checked.values()), checked


def test_max_oracle_rank():
    """The rank cap follows the budget"""
    assert max_oracle_rank(3, 3, budget=10_000_000) == 4
    assert max_oracle_rank(5, 3, budget=10_000_000) == 2
    assert max_oracle_rank(5, 3, budget=10) == 1


def test_close_span_of_generators():
    """Closure of raw generators matches enumeration of their lattice"""
    vectors = [(1, 2, 0), (3, 0, 3)]
    L = Lattice.from_generators(3, vectors, 3)
    assert close_span(vectors, 3, 2, 3).elements == enumerate_span(L, 2).elements
