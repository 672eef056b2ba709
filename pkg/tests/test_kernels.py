import numpy as np
import pytest

from vlasov_riesz.kernels import (KernelSpec, multiplier, multiplier_on_moduli,
                                  verify_decay_bound)


def test_multiplier_zero_mode_vanishes():
    spec = KernelSpec(((1.0, 2.0),))
    assert multiplier(spec, 0) == 0.0
    assert multiplier(spec, (0, 0)) == 0.0


def test_single_inverse_square_values():
    spec = KernelSpec(((1.0, 2.0),))
    assert multiplier(spec, 1) == 1.0
    assert multiplier(spec, 2) == 0.25
    assert multiplier(spec, (3, 4)) == pytest.approx(1.0 / 25.0, rel=1e-15)


def test_two_term_sum_hand_value():
    # 1.0 * |k|^-1 + 0.5 * |k|^-0.5 at |k| = 2, summed by hand
    spec = KernelSpec(((1.0, 1.0), (0.5, 0.5)))
    expected = 1.0 / 2.0 + 0.5 / np.sqrt(2.0)
    assert multiplier(spec, 2) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(0.8535533905932737, rel=1e-15)


def test_attractive_sign_folds_into_coefficients():
    rep = KernelSpec(((2.0, 1.0),), "repulsive")
    att = KernelSpec(((2.0, 1.0),), "attractive")
    assert att.sign == -1.0
    assert multiplier(att, 3) == -multiplier(rep, 3)
    assert att.folded_terms == ((-2.0, 1.0),)


def test_multiplier_even_in_k():
    spec = KernelSpec(((1.5, 0.75),))
    for k in (1, 2, 5):
        assert multiplier(spec, k) == multiplier(spec, -k)


def test_multiplier_on_moduli_matches_scalar():
    spec = KernelSpec(((1.0, 1.0), (-0.25, 2.0)))
    ks = np.arange(1, 9, dtype=float)
    vec = multiplier_on_moduli(spec, ks)
    scalar = np.array([multiplier(spec, int(k)) for k in ks])
    np.testing.assert_allclose(vec, scalar, rtol=1e-15)
    # zero modulus slot stays exactly zero
    assert multiplier_on_moduli(spec, np.array([0.0, 1.0]))[0] == 0.0


def test_zero_coefficients_give_zero_field_multiplier():
    spec = KernelSpec(((0.0, 1.0),))
    assert multiplier(spec, 7) == 0.0
    assert np.all(multiplier_on_moduli(spec, np.arange(1.0, 10.0)) == 0.0)


def test_exponent_validation():
    with pytest.raises(ValueError, match="exponent"):
        KernelSpec(((1.0, -1.0),))
    with pytest.raises(ValueError, match="exponent"):
        KernelSpec(((1.0, 0.0),))
    with pytest.raises(ValueError, match="at least one"):
        KernelSpec(())
    with pytest.raises(ValueError, match="sign_convention"):
        KernelSpec(((1.0, 1.0),), "gravitational")
    with pytest.raises(ValueError, match="non-finite"):
        KernelSpec(((np.nan, 1.0),))


def test_decay_bound_single_term():
    # one term: the effective decay exponent is the term's own exponent and
    # the constant is its coefficient
    spec = KernelSpec(((3.0, 1.5),))
    alpha_eff, c = verify_decay_bound(spec)
    assert alpha_eff == pytest.approx(1.5, rel=1e-12)
    assert c == pytest.approx(3.0, rel=1e-9)


def test_decay_bound_mixture_dominated_by_slowest():
    # for large |k| the smallest exponent dominates
    spec = KernelSpec(((1.0, 2.0), (0.5, 0.5)))
    alpha_eff, c = verify_decay_bound(spec)
    assert alpha_eff == pytest.approx(0.5, rel=1e-12)
    ks = np.arange(1.0, 257.0)
    bound = c * ks ** (-alpha_eff)
    vals = np.abs(multiplier_on_moduli(spec, ks))
    assert np.all(vals <= bound * (1 + 1e-12))


def test_terms_are_normalized_to_float_tuples():
    spec = KernelSpec(((1, 2),))
    assert spec.terms == ((1.0, 2.0),)
    assert isinstance(spec.terms[0][0], float)
