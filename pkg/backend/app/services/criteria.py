"""Decision procedures for X(k̃) = 0.

`classify` collects everything about one parameter tuple into a
ClassificationReport. Closed forms and lattice computations are evaluated
separately so callers can check them against each other.
"""
import logging
import math
from fractions import Fraction
from typing import List, Optional

from pydantic import BaseModel, Field

from app.errors import ActionUndefinedError, InconsistentParametersError, NotASubLatticeError
from app.services import closed_forms
from app.services.constructions import alpha_beta, caseA_sign, choose_d, d_bb
from app.services.galois_models import (
    GaloisModel,
    Variant,
    a_matrix,
    automorphism_matrix,
    decomposition_lattice,
    inertia_lattice,
)
from app.services.lattice import Lattice, QuotientInvariants, cokernel_invariants, quotient_invariants
from app.services.plocal import INFINITY, fraction_valuation
from app.services.wedge import knot_invariants

logger = logging.getLogger(__name__)

CLASS_TAGS = {0: "Trivial", 1: "Cyclic", 2: "TwoGenerated"}
OVERGENERATED = "Overgenerated"


class ClassGroupStructure(BaseModel):
    model_config = {"frozen": True}

    tag: str
    invariants: QuotientInvariants
    dim: int


class ScalarSummary(BaseModel):
    """An exact integer with its residue mod p and p-adic valuation (None = ∞)."""

    model_config = {"frozen": True}

    value: int
    residue: int
    valuation: Optional[int]

    @classmethod
    def of(cls, value: int, p: int) -> "ScalarSummary":
        v = fraction_valuation(Fraction(value), p)
        return cls(value=value, residue=value % p, valuation=None if v == INFINITY else v)

    @property
    def is_unit(self) -> bool:
        return self.residue != 0


class ClosedForms(BaseModel):
    model_config = {"frozen": True}

    det_A: ScalarSummary
    det_K: ScalarSummary


class PrimeBehavior(BaseModel):
    model_config = {"frozen": True}

    label: str
    splits_completely: bool
    non_split: bool
    unramified: bool
    totally_ramified: bool
    image_invariants: QuotientInvariants


class AlphaBetaD(BaseModel):
    model_config = {"frozen": True}

    alpha: str
    beta: str
    d: int
    sign: int

    @property
    def alpha_value(self) -> Fraction:
        return Fraction(self.alpha)

    @property
    def beta_value(self) -> Fraction:
        return Fraction(self.beta)


class ClassificationReport(BaseModel):
    schema_version: int = Field(1, serialization_alias="schema")
    variant: str
    p: int
    a: int
    b: int
    c: Optional[int] = None
    constraints_ok: bool
    class_group: ClassGroupStructure
    det_A: ScalarSummary
    det_K: ScalarSummary
    knot_trivial: bool
    knot_cokernel: QuotientInvariants
    condition_iii: bool
    case: str
    x_tilde_trivial: Optional[bool] = None
    per_prime: List[PrimeBehavior] = []


def class_group_structure(model: GaloisModel) -> ClassGroupStructure:
    """Invariants of A(k) from the Smith form of its presentation matrix."""
    invariants = cokernel_invariants(a_matrix(model))
    dim = invariants.minimal_generators()
    if dim > 2 and model.checked:
        raise InconsistentParametersError(
            f"inconsistent parameters: no such CM-field model (A(k) would need {dim} generators)"
        )
    tag = CLASS_TAGS.get(dim, OVERGENERATED)
    return ClassGroupStructure(tag=tag, invariants=invariants, dim=dim)


def closed_form_values(model: GaloisModel) -> ClosedForms:
    p = model.p
    return ClosedForms(
        det_A=ScalarSummary.of(closed_forms.det_a_value(model.params), p),
        det_K=ScalarSummary.of(closed_forms.det_k_value(model.params), p),
    )


def condition_iii_lattice(model: GaloisModel) -> Lattice:
    """Lattice whose splitting field is the compositum in which 𝔭3 must not split."""
    if model.variant is Variant.DEG6:
        return d_bb(model)
    return decomposition_lattice(model, "p").sum(decomposition_lattice(model, "p_bar"))


def condition_iii(model: GaloisModel) -> bool:
    """Lattice form of condition (iii), with no appeal to closed forms."""
    H = condition_iii_lattice(model)
    if model.variant is Variant.DEG6:
        H = H.sum(decomposition_lattice(model, "p3"))
    return H.is_full()


def prime_behavior(H: Lattice, model: GaloisModel, label: str, base: Optional[Lattice] = None) -> PrimeBehavior:
    """Splitting and ramification of a prime in the field of H over the field of base.

    The decomposition group in Gal(F_H / F_base) = base/H is ((D + H) ∩ base)/H,
    likewise for inertia. base defaults to the full ambient (F_base = k).
    """
    base = model.full() if base is None else base
    if not H.is_subset(base):
        raise NotASubLatticeError("H must be contained in the base lattice")
    D = decomposition_lattice(model, label)
    I = inertia_lattice(model, label)
    d_image = D.sum(H).intersect(base)
    i_image = I.sum(H).intersect(base)
    return PrimeBehavior(
        label=label,
        splits_completely=d_image.is_subset(H),
        non_split=base.is_subset(d_image),
        unramified=i_image.is_subset(H),
        totally_ramified=base.is_subset(i_image),
        image_invariants=quotient_invariants(base, d_image),
    )


def j_inverse_on_quotient(model: GaloisModel, H: Lattice, over: Optional[Lattice] = None) -> bool:
    """Whether complex conjugation acts as -1 on over/H."""
    over = model.full() if over is None else over
    J = automorphism_matrix(model, "J")
    for lat, name in ((H, "H"), (over, "the ambient lattice")):
        if not J.image(lat).equals(lat):
            raise ActionUndefinedError(f"action undefined: {name} is not stable under J")
    if not H.is_subset(over):
        raise NotASubLatticeError("H must be contained in the lattice it is a quotient of")
    for g in over.basis:
        image = J.apply(g)
        if not H.contains(tuple(s + t for s, t in zip(image, g))):
            return False
    return True


def compute_alpha_beta_d(model: GaloisModel) -> AlphaBetaD:
    """(α, β) with I3 ≡ x^α y^β mod 𝔻, plus the twist exponent d and its sign."""
    alpha, beta = alpha_beta(model)
    d = choose_d(model, alpha, beta)
    return AlphaBetaD(alpha=str(alpha), beta=str(beta), d=d, sign=caseA_sign(model))


def genus_bound(r1: int, r2: int, nu: int) -> int:
    """floor((1 + sqrt(1 + 8(r1 + r2 + nu - 1))) / 2), computed exactly."""
    radicand = 1 + 8 * (r1 + r2 + nu - 1)
    if radicand < 0:
        raise ValueError("r1 + r2 + nu must be at least 1")
    # for a non-square radicand the floor still equals (1 + isqrt) // 2
    return (1 + math.isqrt(radicand)) // 2


def case_tag(model: GaloisModel, class_group: ClassGroupStructure, forms: ClosedForms) -> str:
    if model.variant is not Variant.DEG6:
        return "NotApplicable"
    if forms.det_K.is_unit:
        return "Sufficient"
    p = model.p
    a, b, c = model.params.a, model.params.b, model.params.c
    ab = (a + b) % p
    quadratic = ((a + b) ** 2 + 3 * c * c) % p
    if class_group.dim == 2 or (class_group.dim <= 1 and ab != 0 and quadratic == 0):
        return "A"
    if class_group.dim <= 1 and ab == 0:
        return "B"
    return "NotApplicable"


def x_tilde_trivial(forms: ClosedForms) -> bool:
    """Closed-form verdict: a+b, a-b or |K| is a unit at p."""
    return forms.det_K.is_unit


def classify(model: GaloisModel) -> ClassificationReport:
    params = model.params
    class_group = class_group_structure(model)
    forms = closed_form_values(model)
    trivial, cokernel = knot_invariants(model)
    iii = condition_iii(model)
    H = condition_iii_lattice(model)
    per_prime = [prime_behavior(H, model, label) for label in model.labels]
    verdict = None
    if model.constraints_ok and class_group.tag != OVERGENERATED:
        verdict = x_tilde_trivial(forms)
    report = ClassificationReport(
        variant=params.variant.value,
        p=params.p,
        a=params.a,
        b=params.b,
        c=params.c,
        constraints_ok=model.constraints_ok,
        class_group=class_group,
        det_A=forms.det_A,
        det_K=forms.det_K,
        knot_trivial=trivial,
        knot_cokernel=cokernel,
        condition_iii=iii,
        case=case_tag(model, class_group, forms),
        x_tilde_trivial=verdict,
        per_prime=per_prime,
    )
    logger.info(
        f"Classified {params.variant.value} p={params.p} {params.values()}: "
        f"class group {class_group.tag}, knot trivial {trivial}, case {report.case}"
    )
    return report
