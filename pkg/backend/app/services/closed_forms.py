"""Closed-form criteria for A(k) and the knot, numerically and symbolically.

The numeric helpers take exact integers; the symbolic ones build sympy
expressions in a, b, c so identities can be checked by expansion.
"""
import logging
from typing import Optional

import sympy
from sympy import Matrix, symbols

from app.services.galois_models import ModelParams, Variant
from app.services.wedge import DISPLAY_BASIS, lexicographic_pairs, wedge_coordinates

logger = logging.getLogger(__name__)

A, B, C = symbols("a b c", integer=True)


def det_a_value(params: ModelParams) -> int:
    """Determinant of the A(k) presentation (a^2+b^2, 2ab or |A|)."""
    a, b = params.a, params.b
    if params.variant is Variant.DEG4_NON_GALOIS:
        return a * a + b * b
    if params.variant is Variant.DEG4_BIQUADRATIC:
        return 2 * a * b
    c = params.c
    return (a - b + c) * ((a * a + b * c) + (b * b - a * c) + (c * c + a * b))


def det_k_value(params: ModelParams) -> int:
    """Knot criterion value: a+b, a-b, or |K| = (a+b+c)^3 + (a+b-c)^3."""
    a, b = params.a, params.b
    if params.variant is Variant.DEG4_NON_GALOIS:
        return a + b
    if params.variant is Variant.DEG4_BIQUADRATIC:
        return a - b
    c = params.c
    return (a + b + c) ** 3 + (a + b - c) ** 3


def det_k_factored(params: ModelParams) -> int:
    """|K| in the factored form 2(a+b)((a+b)^2+3c^2); sextic models only."""
    if params.variant is not Variant.DEG6:
        raise ValueError(f"the factored |K| is only defined for deg6, not {params.variant.value}")
    a, b, c = params.a, params.b, params.c
    return 2 * (a + b) * ((a + b) ** 2 + 3 * c * c)


def expected_class_group_dim(params: ModelParams) -> Optional[int]:
    """dim_Fp A(k)/p predicted by the closed-form trichotomy; None outside it."""
    p = params.p
    a, b = params.a % p, params.b % p
    if params.variant is Variant.DEG4_NON_GALOIS:
        if (a * a + b * b) % p:
            return 0
        if a and b:
            return 1
        return 2
    if params.variant is Variant.DEG4_BIQUADRATIC:
        if a and b:
            return 0
        if (a - b) % p:
            return 1
        return 2
    c = params.c % p
    if det_a_value(params) % p:
        return 0
    minors = [(a * a + b * c) % p, (b * b - a * c) % p, (c * c + a * b) % p]
    if any(minors):
        return 1
    if a or b or c:
        return 2
    return None


def symbolic_a_matrix(variant: Variant) -> Matrix:
    if variant is Variant.DEG4_NON_GALOIS:
        return Matrix([[1, 0, 0], [0, A, B], [0, -B, A]])
    if variant is Variant.DEG4_BIQUADRATIC:
        return Matrix([[1, 0, 0], [0, A, -A], [0, B, B]])
    return Matrix([[1, 0, 0, 0], [0, A, B, C], [0, -C, A, B], [0, -B, -C, A]])


def symbolic_prime_generators(variant: Variant):
    """(inertia, second) pairs with symbolic parameters, in σ-orbit order."""
    if variant is Variant.DEG4_NON_GALOIS:
        return [
            ((1, 0, 0), (0, 1, 0)),
            ((1, A, B), (0, 0, 1)),
            ((1, A - B, A + B), (0, -1, 0)),
            ((1, -B, A), (0, 0, -1)),
        ]
    if variant is Variant.DEG4_BIQUADRATIC:
        return [
            ((1, 0, 0), (0, 1, 0)),
            ((1, A, -A), (0, 0, 1)),
            ((1, A + B, B - A), (0, -1, 0)),
            ((1, B, B), (0, 0, -1)),
        ]
    return [
        ((1, 0, 0, 0), (0, 1, 0, 0)),
        ((1, A, B, C), (0, 0, 1, 0)),
        ((1, A - C, A + B, B + C), (0, 0, 0, 1)),
        ((1, A - B - C, A + B - C, A + B + C), (0, -1, 0, 0)),
        ((1, -B - C, A - C, A + B), (0, 0, -1, 0)),
        ((1, -B, -C, A), (0, 0, 0, -1)),
    ]


def symbolic_knot_matrix(variant: Variant) -> Matrix:
    rows = []
    for inertia, second in symbolic_prime_generators(variant):
        n = len(inertia)
        lex = dict(zip(lexicographic_pairs(n), wedge_coordinates(inertia, second)))
        row = []
        for i, j in DISPLAY_BASIS[n]:
            row.append(lex[(i, j)] if i < j else -lex[(j, i)])
        rows.append([sympy.expand(e) for e in row])
    return Matrix(rows)


def det_a_expression(variant: Variant):
    if variant is Variant.DEG4_NON_GALOIS:
        return A ** 2 + B ** 2
    if variant is Variant.DEG4_BIQUADRATIC:
        return 2 * A * B
    return (A - B + C) * ((A ** 2 + B * C) + (B ** 2 - A * C) + (C ** 2 + A * B))


def det_k_expression():
    return (A + B + C) ** 3 + (A + B - C) ** 3


def det_k_factored_expression():
    return 2 * (A + B) * ((A + B) ** 2 + 3 * C ** 2)


def knot_identity_holds() -> bool:
    """|K| = 2(a+b)((a+b)^2+3c^2) as polynomials."""
    return sympy.expand(det_k_expression() - det_k_factored_expression()) == 0
