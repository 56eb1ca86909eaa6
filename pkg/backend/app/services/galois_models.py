"""Parametrized models of Gal(k̃/k) for the degree-4 and degree-6 CM-fields.

Every model has ambient basis (γ, x, y[, z]) where γ generates the
cyclotomic direction and x, y[, z] span X(k_cyc). Each prime above p is
recorded by an inertia generator and a second generator of its
decomposition group. The primes are listed in the order the automorphism σ
cycles through them.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, model_validator

from app.errors import DimensionMismatchError, InconsistentParametersError, UnknownNameError
from app.services.lattice import Lattice, lattice_sum
from app.services.plocal import PMatrix, check_prime, determinant

logger = logging.getLogger(__name__)


class Variant(str, Enum):
    DEG4_NON_GALOIS = "deg4ng"
    DEG4_BIQUADRATIC = "deg4bq"
    DEG6 = "deg6"

    @property
    def degree(self) -> int:
        return 6 if self is Variant.DEG6 else 4


class ModelParams(BaseModel):
    model_config = {"frozen": True}

    variant: Variant
    p: int
    a: int
    b: int
    c: Optional[int] = None

    @model_validator(mode="after")
    def _check_shape(self):
        if self.variant is Variant.DEG6 and self.c is None:
            raise ValueError("deg6 models need the parameter c")
        if self.variant is not Variant.DEG6 and self.c is not None:
            raise ValueError(f"{self.variant.value} models take only a and b")
        return self

    def values(self) -> Tuple[int, ...]:
        if self.variant is Variant.DEG6:
            return (self.a, self.b, self.c)
        return (self.a, self.b)


def constraint_failures(params: ModelParams) -> List[str]:
    """Exact (not mod p) conditions without which no CM-field realizes the model."""
    a, b = params.a, params.b
    failures = []
    if params.variant is Variant.DEG4_NON_GALOIS:
        if a == 0:
            failures.append("a = 0")
        if b == 0:
            failures.append("b = 0")
        if a + b == 0:
            failures.append("a + b = 0")
    elif params.variant is Variant.DEG4_BIQUADRATIC:
        if a == 0:
            failures.append("a = 0")
        if b == 0:
            failures.append("b = 0")
        if a - b == 0:
            failures.append("a - b = 0")
    else:
        c = params.c
        if (a * a + b * c) + (c * c + a * b) == 0:
            failures.append("(a^2+bc)+(c^2+ab) = 0")
        if (b * b - a * c) + (c * c + a * b) == 0:
            failures.append("(b^2-ac)+(c^2+ab) = 0")
    return failures


class PrimeLocalData(BaseModel):
    model_config = {"frozen": True}

    label: str
    inertia_gen: Tuple[int, ...]
    second_gen: Tuple[int, ...]


DEG4_LABELS = ("p", "q", "p_bar", "q_bar")
DEG6_LABELS = ("p1", "p2_bar", "p3", "p1_bar", "p2", "p3_bar")

# label -> label of its complex conjugate
CONJUGATES: Dict[str, str] = {
    "p": "p_bar", "p_bar": "p", "q": "q_bar", "q_bar": "q",
    "p1": "p1_bar", "p1_bar": "p1", "p2": "p2_bar", "p2_bar": "p2", "p3": "p3_bar", "p3_bar": "p3",
}


@dataclass(frozen=True)
class AutomorphismMatrix:
    label: str
    matrix: PMatrix

    def apply(self, v):
        return self.matrix.apply(v)

    def compose(self, other: "AutomorphismMatrix", label: Optional[str] = None) -> "AutomorphismMatrix":
        """self after other."""
        return AutomorphismMatrix(label or f"{self.label}{other.label}", self.matrix @ other.matrix)

    def power(self, k: int) -> "AutomorphismMatrix":
        result = PMatrix.identity(self.matrix.rows, self.matrix.prime)
        for _ in range(k):
            result = self.matrix @ result
        return AutomorphismMatrix(f"{self.label}^{k}", result)

    def image(self, L: Lattice) -> Lattice:
        return L.image(self.matrix)


@dataclass(frozen=True)
class GaloisModel:
    params: ModelParams
    ambient_rank: int
    generator_labels: Tuple[str, ...]
    primes: Tuple[PrimeLocalData, ...]
    checked: bool
    constraints_ok: bool

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def variant(self) -> Variant:
        return self.params.variant

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(pr.label for pr in self.primes)

    def prime_data(self, label: str) -> PrimeLocalData:
        for pr in self.primes:
            if pr.label == label:
                return pr
        raise UnknownNameError(f"unknown prime label {label!r}; model has {', '.join(self.labels)}")

    def full(self) -> Lattice:
        return Lattice.full(self.ambient_rank, self.p)

    def lattice(self, *vectors) -> Lattice:
        return Lattice.from_generators(self.ambient_rank, vectors, self.p)

    def unit(self, i: int) -> Tuple[int, ...]:
        return tuple(1 if j == i else 0 for j in range(self.ambient_rank))


def _deg4_non_galois_primes(a: int, b: int) -> List[PrimeLocalData]:
    return [
        PrimeLocalData(label="p", inertia_gen=(1, 0, 0), second_gen=(0, 1, 0)),
        PrimeLocalData(label="q", inertia_gen=(1, a, b), second_gen=(0, 0, 1)),
        PrimeLocalData(label="p_bar", inertia_gen=(1, a - b, a + b), second_gen=(0, -1, 0)),
        PrimeLocalData(label="q_bar", inertia_gen=(1, -b, a), second_gen=(0, 0, -1)),
    ]


def _deg4_biquadratic_primes(a: int, b: int) -> List[PrimeLocalData]:
    return [
        PrimeLocalData(label="p", inertia_gen=(1, 0, 0), second_gen=(0, 1, 0)),
        PrimeLocalData(label="q", inertia_gen=(1, a, -a), second_gen=(0, 0, 1)),
        PrimeLocalData(label="p_bar", inertia_gen=(1, a + b, b - a), second_gen=(0, -1, 0)),
        PrimeLocalData(label="q_bar", inertia_gen=(1, b, b), second_gen=(0, 0, -1)),
    ]


def _deg6_primes(a: int, b: int, c: int) -> List[PrimeLocalData]:
    return [
        PrimeLocalData(label="p1", inertia_gen=(1, 0, 0, 0), second_gen=(0, 1, 0, 0)),
        PrimeLocalData(label="p2_bar", inertia_gen=(1, a, b, c), second_gen=(0, 0, 1, 0)),
        PrimeLocalData(label="p3", inertia_gen=(1, a - c, a + b, b + c), second_gen=(0, 0, 0, 1)),
        PrimeLocalData(label="p1_bar", inertia_gen=(1, a - b - c, a + b - c, a + b + c), second_gen=(0, -1, 0, 0)),
        PrimeLocalData(label="p2", inertia_gen=(1, -b - c, a - c, a + b), second_gen=(0, 0, -1, 0)),
        PrimeLocalData(label="p3_bar", inertia_gen=(1, -b, -c, a), second_gen=(0, 0, 0, -1)),
    ]


def build_model(params: ModelParams, checked: bool = True) -> GaloisModel:
    check_prime(params.p)
    failures = constraint_failures(params)
    if failures and checked:
        raise InconsistentParametersError(
            f"inconsistent parameters: no such CM-field model ({'; '.join(failures)})"
        )
    if failures:
        logger.warning(f"Exploration model {params.variant.value} {params.values()} violates {failures}")

    if params.variant is Variant.DEG6:
        primes = _deg6_primes(params.a, params.b, params.c)
        labels = ("γ", "x", "y", "z")
    elif params.variant is Variant.DEG4_NON_GALOIS:
        primes = _deg4_non_galois_primes(params.a, params.b)
        labels = ("γ", "x", "y")
    else:
        primes = _deg4_biquadratic_primes(params.a, params.b)
        labels = ("γ", "x", "y")

    model = GaloisModel(
        params=params,
        ambient_rank=len(labels),
        generator_labels=labels,
        primes=tuple(primes),
        checked=checked,
        constraints_ok=not failures,
    )
    logger.debug(f"Built {params.variant.value} model at p={params.p} with parameters {params.values()}")
    return model


def decomposition_lattice(model: GaloisModel, label: str) -> Lattice:
    pr = model.prime_data(label)
    return model.lattice(pr.inertia_gen, pr.second_gen)


def inertia_lattice(model: GaloisModel, label: str) -> Lattice:
    return model.lattice(model.prime_data(label).inertia_gen)


def inertia_sum(model: GaloisModel, labels=None) -> Lattice:
    labels = model.labels if labels is None else labels
    return lattice_sum(*(inertia_lattice(model, lb) for lb in labels))


def decomposition_sum(model: GaloisModel, labels=None) -> Lattice:
    labels = model.labels if labels is None else labels
    return lattice_sum(*(decomposition_lattice(model, lb) for lb in labels))


def _columns_to_matrix(images: List[Tuple[int, ...]], p: int) -> PMatrix:
    return PMatrix.from_columns(images, p, len(images))


def automorphism_matrix(model: GaloisModel, which: str) -> AutomorphismMatrix:
    """Action of σ, τ or complex conjugation J on exponent vectors.

    Columns are the images of (γ, x, y[, z]).
    """
    a, b, p = model.params.a, model.params.b, model.p
    variant = model.variant
    if which == "tau" and variant is not Variant.DEG4_BIQUADRATIC:
        raise UnknownNameError("τ exists only for the biquadratic model")

    if variant is Variant.DEG6:
        c = model.params.c
        sigma = [(1, a, b, c), (0, 0, 1, 0), (0, 0, 0, 1), (0, -1, 0, 0)]
    elif variant is Variant.DEG4_NON_GALOIS:
        sigma = [(1, a, b), (0, 0, 1), (0, -1, 0)]
    else:
        sigma = [(1, a, -a), (0, 0, 1), (0, 1, 0)]
    sigma_m = AutomorphismMatrix("σ", _columns_to_matrix(sigma, p))

    if which == "sigma":
        return sigma_m
    if which == "tau":
        return AutomorphismMatrix("τ", _columns_to_matrix([(1, b, b), (0, 0, -1), (0, -1, 0)], p))
    if which == "J":
        if variant is Variant.DEG6:
            j = sigma_m.power(3)
        elif variant is Variant.DEG4_NON_GALOIS:
            j = sigma_m.power(2)
        else:
            j = sigma_m.compose(automorphism_matrix(model, "tau"))
        result = AutomorphismMatrix("J", j.matrix)
        if determinant(result.matrix).valuation() != 0:
            raise DimensionMismatchError("complex conjugation matrix is not invertible over Z_(p)")
        return result
    raise UnknownNameError(f"unknown automorphism {which!r}; use sigma, tau or J")


def a_matrix(model: GaloisModel) -> PMatrix:
    """Presentation matrix of A(k): rows span the sum of all inertia groups."""
    a, b, p = model.params.a, model.params.b, model.p
    if model.variant is Variant.DEG6:
        c = model.params.c
        rows = [[1, 0, 0, 0], [0, a, b, c], [0, -c, a, b], [0, -b, -c, a]]
    elif model.variant is Variant.DEG4_NON_GALOIS:
        rows = [[1, 0, 0], [0, a, b], [0, -b, a]]
    else:
        rows = [[1, 0, 0], [0, a, -a], [0, b, b]]
    return PMatrix.from_rows(rows, p)
