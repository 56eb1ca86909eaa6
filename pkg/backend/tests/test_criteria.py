import random
from fractions import Fraction

import pytest
import sympy

from app.errors import ActionUndefinedError, InconsistentParametersError, NotASubLatticeError
from app.services.closed_forms import (
    det_a_expression,
    det_k_factored,
    det_k_value,
    expected_class_group_dim,
    knot_identity_holds,
    symbolic_a_matrix,
)
from app.services.constructions import named_construction
from app.services.criteria import (
    OVERGENERATED,
    class_group_structure,
    classify,
    closed_form_values,
    compute_alpha_beta_d,
    condition_iii,
    genus_bound,
    j_inverse_on_quotient,
    prime_behavior,
    x_tilde_trivial,
)
from app.services.galois_models import ModelParams, Variant, build_model
from app.services.wedge import knot_invariants
from app.utils.emit import payload


def _model(variant, p, *values, checked=True):
    return build_model(ModelParams(variant=variant, p=p, **dict(zip("abc", values))), checked=checked)


def _residue_tuples(variant, p):
    arity = 3 if variant is Variant.DEG6 else 2
    if arity == 2:
        return [(a, b) for a in range(p) for b in range(p)]
    return [(a, b, c) for a in range(p) for b in range(p) for c in range(p)]


def test_class_group_examples():
    """a^2+b^2 = 2 is a unit at 5; (2,1) gives a cyclic group"""
    assert class_group_structure(_model(Variant.DEG4_NON_GALOIS, 5, 1, 1)).tag == "Trivial"
    cyclic = class_group_structure(_model(Variant.DEG4_NON_GALOIS, 5, 2, 1))
    assert cyclic.tag == "Cyclic"
    assert cyclic.dim == 1
    assert cyclic.invariants.torsion_order(5) == 5


def test_class_group_deg6_examples():
    """|A| = 4 at (1,1,1) and -63 at (1,4,0), both units at the primes used"""
    assert class_group_structure(_model(Variant.DEG6, 7, 1, 1, 1)).tag == "Trivial"
    assert class_group_structure(_model(Variant.DEG6, 5, 1, 4, 0)).tag == "Trivial"


def test_class_group_overgenerated_in_exploration_mode():
    """All parameters ≡ 0 needs at least three generators"""
    structure = class_group_structure(_model(Variant.DEG6, 5, 5, 10, 5, checked=False))
    assert structure.tag == OVERGENERATED
    assert structure.dim >= 3


@pytest.mark.parametrize("variant,primes", [
    (Variant.DEG4_NON_GALOIS, [3, 5, 7, 11, 13]),
    (Variant.DEG4_BIQUADRATIC, [3, 5, 7, 11, 13]),
    (Variant.DEG6, [3, 5, 7]),
])
def test_class_group_trichotomy_exhaustive(variant, primes):
    """Smith rank of the presentation matches the closed-form trichotomy"""
    for p in primes:
        for values in _residue_tuples(variant, p):
            model = _model(variant, p, *values, checked=False)
            expected = expected_class_group_dim(model.params)
            dim = class_group_structure(model).dim
            if expected is None:
                assert dim >= 3, (p, values)
            else:
                assert dim == expected, (p, values)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_deg6_condition_iii_equivalence(p):
    """Condition (iii), |K| a unit and full-rank knot coincide on every residue triple"""
    for values in _residue_tuples(Variant.DEG6, p):
        model = _model(Variant.DEG6, p, *values, checked=False)
        unit = det_k_value(model.params) % p != 0
        trivial, _ = knot_invariants(model)
        assert condition_iii(model) == unit, values
        assert trivial == unit, values


def test_knot_identity_random_triples():
    """(a+b+c)^3 + (a+b-c)^3 = 2(a+b)((a+b)^2+3c^2)"""
    rng = random.Random(4)
    for _ in range(1000):
        a, b, c = (rng.randint(-10**6, 10**6) for _ in range(3))
        params = ModelParams(variant=Variant.DEG6, p=5, a=a, b=b, c=c)
        assert det_k_value(params) == det_k_factored(params)
    assert knot_identity_holds()


def test_factored_det_k_is_sextic_only():
    """The factored |K| has no quartic meaning"""
    with pytest.raises(ValueError, match="deg6"):
        det_k_factored(ModelParams(variant=Variant.DEG4_NON_GALOIS, p=5, a=1, b=1))
    assert det_k_factored(ModelParams(variant=Variant.DEG6, p=5, a=1, b=1, c=1)) == 28


def test_p3_specialization():
    """At p = 3 the knot criterion reduces to a+b ≢ 0"""
    for a, b, c in _residue_tuples(Variant.DEG6, 3):
        params = ModelParams(variant=Variant.DEG6, p=3, a=a, b=b, c=c)
        assert (det_k_value(params) % 3 != 0) == ((a + b) % 3 != 0)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_cyclic_class_group_makes_condition_iii_redundant(p):
    """Every quartic tuple with cyclic A(k) has a unit knot criterion"""
    for variant in (Variant.DEG4_NON_GALOIS, Variant.DEG4_BIQUADRATIC):
        for values in _residue_tuples(variant, p):
            model = _model(variant, p, *values, checked=False)
            if class_group_structure(model).tag == "Cyclic":
                assert det_k_value(model.params) % p != 0, (variant, p, values)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_two_generated_forces_nontrivial_knot(p):
    """dim 2 never has a trivial knot"""
    seen = 0
    for values in _residue_tuples(Variant.DEG6, p):
        model = _model(Variant.DEG6, p, *values, checked=False)
        if class_group_structure(model).dim == 2:
            seen += 1
            trivial, _ = knot_invariants(model)
            assert not trivial, values
    assert seen > 0


def test_genus_bound_examples():
    """Totally imaginary quartic and sextic fields both stay below 3"""
    assert genus_bound(0, 2, 0) == 2
    assert genus_bound(0, 3, 0) == 2
    assert genus_bound(0, 1, 0) == 1
    with pytest.raises(ValueError):
        genus_bound(0, 0, 0)


def test_x_tilde_trivial_reads_the_closed_forms():
    """The verdict is whether the knot criterion value is a unit"""
    assert x_tilde_trivial(closed_form_values(_model(Variant.DEG6, 5, 1, 1, 1)))
    assert not x_tilde_trivial(closed_form_values(_model(Variant.DEG6, 7, 1, 1, 1)))
    assert not x_tilde_trivial(closed_form_values(_model(Variant.DEG4_NON_GALOIS, 5, 1, 4)))
    assert not x_tilde_trivial(closed_form_values(_model(Variant.DEG4_BIQUADRATIC, 5, 1, 6)))
    assert x_tilde_trivial(closed_form_values(_model(Variant.DEG4_BIQUADRATIC, 5, 2, 1)))


def test_classify_deg6_sufficient():
    """|K| = 28 is a unit at 5"""
    report = classify(_model(Variant.DEG6, 5, 1, 1, 1))
    assert report.case == "Sufficient"
    assert report.x_tilde_trivial is True
    assert report.knot_trivial and report.condition_iii


def test_classify_deg6_case_a():
    """At p = 7, 7 | 28 and (a+b)^2+3c^2 = 7"""
    report = classify(_model(Variant.DEG6, 7, 1, 1, 1))
    assert report.class_group.tag == "Trivial"
    assert report.det_A.value == 4
    assert report.case == "A"
    assert report.x_tilde_trivial is False
    assert report.knot_trivial is False


def test_classify_deg6_case_b():
    """a+b = 5 puts (1,4,0) in case (B) at p = 5"""
    report = classify(_model(Variant.DEG6, 5, 1, 4, 0))
    assert report.det_A.value == -63
    assert report.det_K.value == 250
    assert report.det_K.valuation == 3
    assert report.case == "B"
    assert report.constraints_ok


def test_classify_deg4():
    """Quartic models carry no degree-6 case tag"""
    report = classify(_model(Variant.DEG4_NON_GALOIS, 5, 2, 1))
    assert report.class_group.tag == "Cyclic"
    assert report.case == "NotApplicable"
    assert report.x_tilde_trivial is True
    assert len(report.per_prime) == 4
    assert classify(_model(Variant.DEG4_BIQUADRATIC, 5, 1, 6)).det_K.value == -5


def test_classify_condition_iii_deg4():
    """a+b = 5 breaks condition (iii) at 5"""
    report = classify(_model(Variant.DEG4_NON_GALOIS, 5, 1, 4))
    assert not report.condition_iii
    assert not report.knot_trivial


def test_classify_exploration_has_no_verdict():
    """Unchecked tuples get the lattice data but no verdict"""
    report = classify(_model(Variant.DEG4_NON_GALOIS, 3, 0, 1, checked=False))
    assert not report.constraints_ok
    assert report.x_tilde_trivial is None


def test_classify_checked_rejects_constraints():
    """Checked builds refuse inconsistent tuples"""
    with pytest.raises(InconsistentParametersError):
        _model(Variant.DEG4_NON_GALOIS, 3, 0, 1)


def test_report_payload_has_schema():
    """Serialized reports carry the schema version under its alias"""
    data = payload(classify(_model(Variant.DEG6, 5, 1, 1, 1)))
    assert data["schema"] == 1
    assert data["variant"] == "deg6"
    assert data["c"] == 1
    assert data["det_K"] == {"value": 28, "residue": 3, "valuation": 0}


def test_prime_behavior_examples():
    """p1 splits completely in R_m^(1); every quartic prime is non-split and ramified in k_inf"""
    m6 = _model(Variant.DEG6, 5, 1, 4, 0)
    assert prime_behavior(named_construction(m6, "R_m_1"), m6, "p1").splits_completely
    m4 = _model(Variant.DEG4_NON_GALOIS, 5, 1, 4)
    k_inf = named_construction(m4, "k_inf")
    for label in m4.labels:
        behavior = prime_behavior(k_inf, m4, label)
        assert behavior.non_split
        assert not behavior.unramified


def test_prime_behavior_full_lattice_splits():
    """Every prime splits completely in k/k"""
    model = _model(Variant.DEG6, 7, 3, 1, 2)
    for label in model.labels:
        behavior = prime_behavior(model.full(), model, label)
        assert behavior.splits_completely and behavior.unramified


def test_prime_behavior_base_must_contain_h():
    """Relative behavior needs H inside the base"""
    model = _model(Variant.DEG4_NON_GALOIS, 5, 1, 4)
    with pytest.raises(NotASubLatticeError):
        prime_behavior(model.full(), model, "p", base=named_construction(model, "k_inf"))


def test_j_inverse_examples():
    """J is -1 on the ambient over 𝔻 and on k_inf over L′"""
    m6 = _model(Variant.DEG6, 5, 1, 1, 1)
    assert j_inverse_on_quotient(m6, named_construction(m6, "D_bb"))
    m4 = _model(Variant.DEG4_NON_GALOIS, 5, 1, 4)
    assert j_inverse_on_quotient(m4, named_construction(m4, "L_prime"), over=named_construction(m4, "k_inf"))


def test_j_inverse_needs_stable_lattice():
    """⟨γ⟩ is not J-stable"""
    model = _model(Variant.DEG6, 5, 1, 1, 1)
    with pytest.raises(ActionUndefinedError, match="action undefined"):
        j_inverse_on_quotient(model, model.lattice((1, 0, 0, 0)))


def test_j_inverse_false_on_full_quotient():
    """J is not -1 on the whole ambient"""
    model = _model(Variant.DEG6, 5, 1, 1, 1)
    assert not j_inverse_on_quotient(model, model.lattice())


def test_alpha_beta_d_example():
    """(1,1,1) at p = 7: α = 2, β = 4/3, d = 0"""
    result = compute_alpha_beta_d(_model(Variant.DEG6, 7, 1, 1, 1))
    assert result.alpha_value == 2
    assert result.beta_value == Fraction(4, 3)
    assert result.d == 0
    assert result.sign == -1


@pytest.mark.parametrize("variant", list(Variant))
def test_symbolic_a_matrix_determinant(variant):
    """det of the symbolic presentation equals the closed form"""
    assert sympy.expand(symbolic_a_matrix(variant).det() - det_a_expression(variant)) == 0
