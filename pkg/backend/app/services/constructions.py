"""Catalogue of the named subgroups of Gal(k̃/k) used in the classification.

A subextension F of k̃/k corresponds to the lattice of Gal(k̃/F); a larger
field has a smaller lattice. Names are the public contract used by the CLI.
"""
import logging
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from app.errors import ConstructionUndefinedError, UnknownNameError
from app.services.galois_models import (
    GaloisModel,
    Variant,
    decomposition_lattice,
    inertia_lattice,
    inertia_sum,
)
from app.services.lattice import Lattice
from app.services.plocal import INFINITY, PMatrix, fraction_valuation, solve

logger = logging.getLogger(__name__)

DEG4 = (Variant.DEG4_NON_GALOIS, Variant.DEG4_BIQUADRATIC)
DEG6 = (Variant.DEG6,)


def twist_parameter(model: GaloisModel) -> int:
    """a+b for the non-Galois model, a-b for the biquadratic one."""
    a, b = model.params.a, model.params.b
    return a + b if model.variant is Variant.DEG4_NON_GALOIS else a - b


def twist_vector(model: GaloisModel) -> Tuple[int, int, int]:
    """xy^{-1} for the non-Galois model, xy for the biquadratic one."""
    return (0, 1, -1) if model.variant is Variant.DEG4_NON_GALOIS else (0, 1, 1)


def level(model: GaloisModel, value: int, what: str) -> int:
    """ord_p(value), required to be positive and finite."""
    n = fraction_valuation(Fraction(value), model.p)
    if n == 0:
        raise ConstructionUndefinedError(f"construction undefined: {what} = 0 ({value} is a unit at p={model.p})")
    if n == INFINITY:
        raise ConstructionUndefinedError(f"construction undefined: {what} is infinite ({value} = 0)")
    return n


def _scale(v, k):
    return tuple(k * x for x in v)


# --- degree 4 -----------------------------------------------------------

def _k_inf_deg4(model, extras):
    return model.lattice((1, model.params.a, 0), twist_vector(model))


def _pq_inf(model, extras):
    return model.lattice((1, model.params.a, 0))


def _p_n(model, extras):
    u = twist_parameter(model)
    level(model, u, "n")
    return model.lattice((1, 0, 0), (0, 1, 0), (0, 0, u))


def _q_n(model, extras):
    u = twist_parameter(model)
    level(model, u, "n")
    return model.lattice((1, model.params.a, 0), (0, u, 0), (0, 0, 1))


def _l_prime(model, extras):
    u = twist_parameter(model)
    level(model, u, "n")
    return model.lattice((1, model.params.a, 0), _scale(twist_vector(model), u))


def _k1(model, extras):
    return inertia_sum(model, ("p", "q"))


def _k1_bar(model, extras):
    return inertia_sum(model, ("p_bar", "q_bar"))


# --- degree 6 -----------------------------------------------------------

def pair_lattice(model: GaloisModel, i: int) -> Lattice:
    """⟨D_i, D̄_i⟩."""
    return decomposition_lattice(model, f"p{i}").sum(decomposition_lattice(model, f"p{i}_bar"))


def d_bb(model: GaloisModel, extras=None) -> Lattice:
    """𝔻 = ⟨D1, D̄1⟩ ∩ ⟨D2, D̄2⟩."""
    return pair_lattice(model, 1).intersect(pair_lattice(model, 2))


def _d_bb_formula(model, extras):
    a, b, c = model.params.a, model.params.b, model.params.c
    plus, minus = a + b + c, a + b - c
    if fraction_valuation(Fraction(plus), model.p) != 0:
        raise ConstructionUndefinedError(f"construction undefined: a+b+c = {plus} is not a unit")
    return model.lattice((plus, a * plus, c * minus, c * plus), (0, plus * plus, -minus * minus, -plus * minus))


def alpha_beta(model: GaloisModel) -> Tuple[Fraction, Fraction]:
    """Coordinates (α, β) with I3 ≡ x^α y^β modulo 𝔻."""
    a, b, c = model.params.a, model.params.b, model.params.c
    p = model.p
    for name, value in (("c", c), ("a+b+c", a + b + c), ("a+b-c", a + b - c)):
        if value % p == 0:
            raise ConstructionUndefinedError(f"construction undefined: {name} ≡ 0 mod {p}")
    D = d_bb(model)
    columns = list(D.basis) + [(0, 1, 0, 0), (0, 0, 1, 0)]
    system = PMatrix.from_columns(columns, p, 4)
    target = model.prime_data("p3").inertia_gen
    solution = solve(system, target)
    if solution is None:
        raise ConstructionUndefinedError("construction undefined: I3 is not in ⟨𝔻, x, y⟩")
    return solution[-2], solution[-1]


def caseA_sign(model: GaloisModel) -> int:
    return 1 if (model.params.a + model.params.b) % model.p == 0 else -1


def choose_d(model: GaloisModel, alpha: Fraction, beta: Fraction) -> int:
    p = model.p
    if fraction_valuation(alpha, p) != fraction_valuation(beta, p):
        return 0
    if alpha == 0:
        raise ConstructionUndefinedError("construction undefined: I3 lies in 𝔻")
    ratio = beta / alpha
    sign = caseA_sign(model)
    d = 0
    while sign + p * d == ratio:
        d += 1
    return d


def d_is_admissible(model: GaloisModel, alpha: Fraction, beta: Fraction, d: int) -> bool:
    if d < 0:
        return False
    if alpha == 0:
        return beta != 0
    return caseA_sign(model) + model.p * d != beta / alpha


def _k_inf_case_a(model, extras):
    alpha, beta = alpha_beta(model)
    d = extras.get("d") if extras else None
    if d is None:
        d = choose_d(model, alpha, beta)
    elif not d_is_admissible(model, alpha, beta, d):
        raise ConstructionUndefinedError(f"construction undefined: d = {d} gives ±1+pd = β/α")
    s = caseA_sign(model) + model.p * d
    return d_bb(model).sum(model.lattice((0, 1, s, 0)))


def _m(model) -> int:
    return level(model, model.params.a + model.params.b, "m")


def _r_m_1(model, extras):
    ab = model.params.a + model.params.b
    _m(model)
    return model.lattice((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, -1), (0, 0, 0, ab))


def _r_m_2(model, extras):
    a, b, c = model.params.a, model.params.b, model.params.c
    _m(model)
    return model.lattice((1, a - c, 0, 0), (0, 0, 1, 0), (0, 1, 0, 1), (0, a + b, 0, 0))


def _r_m_3(model, extras):
    a, b, c = model.params.a, model.params.b, model.params.c
    _m(model)
    return model.lattice((1, a - c, 0, 0), (0, 1, -1, 0), (0, 0, 0, 1), (0, 0, a + b, 0))


def _l_prime_m(model, extras):
    a, b, c = model.params.a, model.params.b, model.params.c
    _m(model)
    ab = a + b
    return model.lattice((1, a - c, 0, 0), (0, 1, -1, 1), (0, ab, 0, 0), (0, 0, ab, 0), (0, 0, 0, ab))


def _k_m(model, extras):
    return _l_prime_m(model, extras).sum(model.lattice((0, 1, 1, 0)))


def _k_inf_case_b(model, extras):
    a, c = model.params.a, model.params.c
    return model.lattice((1, a - c, 0, 0), (0, 1, -1, 1), (0, 1, 1, 0))


def _p_m_1(model, extras):
    ab = model.params.a + model.params.b
    _m(model)
    return model.lattice((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, ab))


def _q_m_1(model, extras):
    ab = model.params.a + model.params.b
    _m(model)
    return model.lattice((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, ab, 0), (0, 0, 0, 1))


def _n_variant(first: str, second: str, first_kind: str, second_kind: str):
    def build(model, extras):
        pick = {"I": inertia_lattice, "D": decomposition_lattice}
        return pick[first_kind](model, first).sum(pick[second_kind](model, second))
    return build


def _m_cal(model, extras):
    return d_bb(model).sum(inertia_lattice(model, "p3"))


# --- shared -------------------------------------------------------------

def _k_cyc(model, extras):
    return model.lattice(*(model.unit(i) for i in range(1, model.ambient_rank)))


def _full(model, extras):
    return model.full()


def _a_lattice(model, extras):
    return inertia_sum(model)


def _decomposition(label):
    return lambda model, extras: decomposition_lattice(model, label)


def _inertia(label):
    return lambda model, extras: inertia_lattice(model, label)


CATALOGUE: Dict[str, Tuple[Tuple[Variant, ...], Callable, str]] = {
    "full": (DEG4 + DEG6, _full, "k itself"),
    "k_cyc": (DEG4 + DEG6, _k_cyc, "cyclotomic Z_p-extension"),
    "A_lattice": (DEG4 + DEG6, _a_lattice, "maximal subextension unramified over k; quotient is A(k)"),
    "k_inf": (DEG4, _k_inf_deg4, "⟨γx^a, xy^{∓1}⟩"),
    "P_inf": (DEG4, _decomposition("p"), "D_𝔭"),
    "Q_inf": (DEG4, _decomposition("q"), "D_𝔮"),
    "PQ_inf": (DEG4, _pq_inf, "⟨γx^a⟩"),
    "P_n": (DEG4, _p_n, "⟨γ, x, y^u⟩ with u = a±b"),
    "Q_n": (DEG4, _q_n, "⟨γx^a, x^u, y⟩"),
    "L_prime": (DEG4, _l_prime, "⟨γx^a, (xy^{∓1})^u⟩"),
    "k1": (DEG4, _k1, "⟨I_𝔭, I_𝔮⟩"),
    "k2": (DEG4, _inertia("p"), "I_𝔭"),
    "k1_bar": (DEG4, _k1_bar, "⟨I_𝔭̄, I_𝔮̄⟩"),
    "k2_bar": (DEG4, _inertia("p_bar"), "I_𝔭̄"),
    "N_p": (DEG4, _decomposition("p"), "D_𝔭"),
    "N_pbar": (DEG4, _decomposition("p_bar"), "D_𝔭̄"),
    "D_bb": (DEG6, d_bb, "⟨D1, D̄1⟩ ∩ ⟨D2, D̄2⟩"),
    "D_bb_formula": (DEG6, _d_bb_formula, "⟨γ^⊕x^{a⊕}y^{c⊖}z^{c⊕}, x^{⊕²}y^{-⊖²}z^{-⊕⊖}⟩"),
    "Z_1": (DEG6, lambda m, e: pair_lattice(m, 1), "⟨D1, D̄1⟩"),
    "Z_2": (DEG6, lambda m, e: pair_lattice(m, 2), "⟨D2, D̄2⟩"),
    "Z_3": (DEG6, lambda m, e: pair_lattice(m, 3), "⟨D3, D̄3⟩"),
    "k_inf_caseA": (DEG6, _k_inf_case_a, "⟨𝔻, xy^{±1+pd}⟩"),
    "k_inf_caseB": (DEG6, _k_inf_case_b, "⟨γx^{a-c}, xy^{-1}z, xy⟩"),
    "R_m_1": (DEG6, _r_m_1, "⟨γ, x, yz^{-1}, z^{a+b}⟩"),
    "R_m_2": (DEG6, _r_m_2, "⟨γx^{a-c}, y, xz, x^{a+b}⟩"),
    "R_m_3": (DEG6, _r_m_3, "⟨γx^{a-c}, xy^{-1}, z, y^{a+b}⟩"),
    "L_prime_m": (DEG6, _l_prime_m, "⟨γx^{a-c}, xy^{-1}z, x^{a+b}, y^{a+b}, z^{a+b}⟩"),
    "k_m": (DEG6, _k_m, "⟨L′_m, xy⟩"),
    "P_m_1": (DEG6, _p_m_1, "⟨D1, D2⟩ = ⟨γ, x, y, z^{a+b}⟩"),
    "Q_m_1": (DEG6, _q_m_1, "⟨D1, D3⟩ = ⟨γ, x, y^{a+b}, z⟩"),
    "N_variant1": (DEG6, _n_variant("p1", "p2_bar", "I", "D"), "⟨I1, D̄2⟩"),
    "Nbar_variant1": (DEG6, _n_variant("p1_bar", "p2", "I", "D"), "⟨Ī1, D2⟩"),
    "N_variant2": (DEG6, _n_variant("p1", "p2_bar", "D", "I"), "⟨D1, Ī2⟩"),
    "Nbar_variant2": (DEG6, _n_variant("p1_bar", "p2", "D", "I"), "⟨D̄1, I2⟩"),
    "M_cal": (DEG6, _m_cal, "⟨𝔻, I3⟩"),
}


def list_constructions(variant: Optional[Variant] = None) -> List[str]:
    names = [n for n, (variants, _, _) in CATALOGUE.items() if variant is None or variant in variants]
    return names + ["T:<label,label,...>"]


def named_construction(model: GaloisModel, name: str, extras: Optional[dict] = None) -> Lattice:
    """Lattice of the named subgroup with the model's parameters substituted.

    `T:<labels>` is the sum of the listed inertia lattices, for example
    `T:p1,p2_bar,p3`.
    """
    if name.startswith("T:"):
        labels = [lb.strip() for lb in name[2:].split(",") if lb.strip()]
        if not labels:
            raise UnknownNameError("T: needs at least one prime label")
        return inertia_sum(model, labels)
    entry = CATALOGUE.get(name)
    if entry is None:
        raise UnknownNameError(f"unknown construction {name!r}")
    variants, builder, _ = entry
    if model.variant not in variants:
        raise UnknownNameError(f"construction {name!r} is not defined for {model.variant.value}")
    return builder(model, extras or {})
