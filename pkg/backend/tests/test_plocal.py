import random
from fractions import Fraction

import pytest

from app.errors import DimensionMismatchError, InconsistentParametersError, NotPIntegralError
from app.services.plocal import (
    INFINITY,
    PLocalScalar,
    PMatrix,
    check_prime,
    determinant,
    kernel_basis,
    rank_mod_p,
    residue,
    smith_p_local,
    solve,
    valuation,
)


def test_valuation_examples():
    """Valuations of 50, 0 and 3/4 at p=5"""
    assert valuation(50, 5) == 2
    assert valuation(0, 5) == INFINITY
    assert valuation(Fraction(3, 4), 5) == 0
    assert PLocalScalar.of(75, 5).valuation() == 2


def test_scalar_rejects_p_in_denominator():
    """Z_(p) has no elements with p in the denominator"""
    with pytest.raises(NotPIntegralError):
        PLocalScalar.of(Fraction(1, 5), 5)


def test_division_by_non_unit_is_an_error():
    """Dividing by p leaves the ring"""
    five = PLocalScalar.of(5, 5)
    with pytest.raises(NotPIntegralError):
        PLocalScalar.of(1, 5) / five
    assert (PLocalScalar.of(3, 5) / PLocalScalar.of(2, 5)).value == Fraction(3, 2)


def test_residue_of_fraction():
    """3/2 mod 5 is 4 and mod 25 is 14"""
    assert residue(Fraction(3, 2), 5) == 4
    assert residue(Fraction(3, 2), 5, depth=2) == 14


@pytest.mark.parametrize("p", [2, 1, 9, 15])
def test_check_prime_rejects(p):
    """Even and composite moduli are rejected"""
    with pytest.raises(InconsistentParametersError):
        check_prime(p)


def test_smith_presentation_example():
    """The deg-4 A(k) presentation for (a,b)=(2,1) at p=5 has exponents 0,0,1"""
    M = PMatrix.from_rows([[1, 0, 0], [0, 2, 1], [0, -1, 2]], 5)
    assert smith_p_local(M).exponents == (0, 0, 1)


def test_smith_identity_and_zero():
    """Identity gives zeros, the zero matrix gives infinities"""
    assert smith_p_local(PMatrix.identity(3, 7)).exponents == (0, 0, 0)
    assert smith_p_local(PMatrix.zeros(2, 2, 7)).exponents == (INFINITY, INFINITY)


def test_smith_empty_matrix():
    """An empty matrix has no Smith form"""
    with pytest.raises(DimensionMismatchError):
        smith_p_local(PMatrix.from_rows([], 3))


def test_smith_reconstruction_random():
    """U·M·V is diagonal with p-power entries matching the exponents"""
    rng = random.Random(7)
    for _ in range(30):
        p = rng.choice([3, 5, 7])
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        M = PMatrix.from_rows([[rng.randint(-30, 30) for _ in range(cols)] for _ in range(rows)], p)
        smith = smith_p_local(M)
        D = smith.left @ M @ smith.right
        assert D.is_diagonal()
        assert D == smith.diagonal
        for i, e in enumerate(smith.exponents):
            if e == INFINITY:
                assert D.entries[i][i] == 0
            else:
                assert D.entries[i][i] == Fraction(p) ** e
        assert list(smith.exponents) == sorted(smith.exponents)
        assert rank_mod_p(M) == sum(1 for e in smith.exponents if e == 0)


def test_rank_mod_p_knot_examples():
    """The deg-4 knot matrix drops rank exactly when a+b ≡ 0"""
    K12 = PMatrix.from_rows([[1, 0, 0], [0, 1, 1], [-1, 0, 3], [0, -1, 2]], 3)
    K11 = PMatrix.from_rows([[1, 0, 0], [0, 1, 1], [-1, 0, 2], [0, -1, 1]], 3)
    assert rank_mod_p(K12) == 2
    assert rank_mod_p(K11) == 3
    assert rank_mod_p(PMatrix.identity(3, 3)) == 3


def test_rank_mod_p_accepts_local_units():
    """Entries with unit denominators reduce fine"""
    M = PMatrix.from_rows([[Fraction(1, 2), 0], [0, Fraction(5, 4)]], 3)
    assert rank_mod_p(M) == 2
    # 3/4 has valuation 1 at 3
    N = PMatrix.from_rows([[Fraction(1, 2), 0], [0, Fraction(3, 4)]], 3)
    assert rank_mod_p(N) == 1


def test_determinant_examples():
    """det [[a, c], [-b-c, a+b]] at (1,1,1) is 4"""
    assert determinant(PMatrix.from_rows([[1, 1], [-2, 2]], 5)).value == 4
    assert determinant(PMatrix.identity(4, 5)).value == 1
    d = determinant(PMatrix.from_rows([[5]], 5))
    assert d.value == 5 and d.valuation() == 1


def test_determinant_non_square():
    """A 2x3 matrix has no determinant"""
    with pytest.raises(DimensionMismatchError):
        determinant(PMatrix.from_rows([[1, 2, 3], [4, 5, 6]], 3))


def test_determinant_matches_smith_exponents():
    """ord_p(det) is the sum of the finite exponents"""
    rng = random.Random(11)
    for _ in range(20):
        M = PMatrix.from_rows([[rng.randint(-20, 20) for _ in range(3)] for _ in range(3)], 3)
        exps = smith_p_local(M).exponents
        det = determinant(M)
        if INFINITY in exps:
            assert det.is_zero()
        else:
            assert det.valuation() == sum(exps)


def test_kernel_basis_examples():
    """Identity has no kernel; [1, -1] has kernel spanned by (1, 1)"""
    assert kernel_basis(PMatrix.identity(3, 5)) == []
    basis = kernel_basis(PMatrix.from_rows([[1, -1]], 5))
    assert len(basis) == 1
    v = basis[0]
    assert v[0] == v[1] and valuation(v[0], 5) == 0


def test_kernel_basis_is_saturated():
    """The kernel of [5, 0] is spanned by e2, not 5·e2"""
    basis = kernel_basis(PMatrix.from_rows([[5, 0], [0, 0]], 5))
    M = PMatrix.from_rows([[5, 0], [0, 0]], 5)
    assert len(basis) == 1
    assert M.apply(basis[0]) == (0, 0)
    assert valuation(basis[0][1], 5) == 0


def test_solve():
    """Solutions exist only when the right-hand side is in the image"""
    M = PMatrix.from_rows([[3, 0], [0, 1]], 3)
    assert solve(M, [3, 2]) == (1, 2)
    assert solve(M, [1, 0]) is None
    assert solve(PMatrix.from_rows([[1, 1]], 3), [2]) is not None
