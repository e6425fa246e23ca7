import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hilfer_fde.exceptions import DomainError, TruncationError
from hilfer_fde.specfun import (MlSpec, compositions, gamma_fn, layers_needed, ml_eval, ml_scalar,
                                recip_gamma, tail_bound)

from conftest import mp_ml


@pytest.mark.parametrize("x,expected", [(1, 1.0), (5, 24.0), (0.5, 1.7724538509055160)])
def test_gamma_fn_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-14)


@given(st.floats(min_value=1e-3, max_value=160))
def test_gamma_fn_matches_mpmath(x):
    assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-12)


def test_gamma_fn_domain():
    with pytest.raises(DomainError):
        gamma_fn(0.0)
    with pytest.raises(DomainError):
        gamma_fn(-1.5)


@pytest.mark.parametrize("x", [0, -1, -2, -7])
def test_recip_gamma_poles(x):
    assert recip_gamma(x) == 0.0


@given(st.floats(min_value=-20, max_value=150).filter(lambda v: abs(v - round(v)) > 1e-6 or v > 0))
def test_recip_gamma_matches_mpmath(x):
    ref = float(mpmath.rgamma(x))
    assert recip_gamma(x) == pytest.approx(ref, rel=1e-11, abs=1e-300)


def test_recip_gamma_two():
    assert recip_gamma(2) == 1.0


def test_compositions_counts_and_multinomials():
    parts, log_mult = compositions(4, 3)
    assert parts.shape == (math.comb(6, 2), 3)
    assert np.all(parts.sum(axis=1) == 4)
    assert len({tuple(r) for r in parts}) == parts.shape[0]
    assert np.exp(log_mult).sum() == pytest.approx(3 ** 4)
    # colex: last part varies slowest
    assert list(parts[:, -1]) == sorted(parts[:, -1])


def test_mlspec_validation():
    with pytest.raises(DomainError):
        MlSpec((0.5, -1.0), 1.0)
    with pytest.raises(DomainError):
        MlSpec((0.5,), 0.0)
    with pytest.raises(DomainError):
        MlSpec((1.0,) * 7, 1.0)


def test_ml_zero_argument_is_recip_gamma():
    for b in (0.5, 1.0, 2.5):
        assert ml_eval(MlSpec((0.3, 0.7), b), [0.0, 0.0]).value == recip_gamma(b)


def test_ml_known_values():
    assert ml_eval(MlSpec((1.0,), 1.0), [0.0]).value == 1.0
    assert ml_eval(MlSpec((1.0,), 1.0), [1.0]).value == pytest.approx(math.e, abs=1e-10)
    assert ml_eval(MlSpec((1.0, 1.0), 1.0), [1.0, 2.0]).value == pytest.approx(math.exp(3), abs=1e-9)


def test_ml_two_parameter_closed_forms():
    # E_{2,1}(-x^2) = cos x, E_{1/2,1}(-z) = exp(z^2) erfc(z)
    assert ml_scalar(2.0, 1.0, -4.0) == pytest.approx(math.cos(2.0), abs=1e-10)
    assert ml_scalar(0.5, 1.0, -0.8) == pytest.approx(math.exp(0.64) * math.erfc(0.8), abs=1e-10)


def test_truncation_bound_reported():
    r = ml_eval(MlSpec((0.5, 1.0), 1.0), [-1.0, -0.5], tol=1e-12)
    assert 0 <= r.truncation_bound <= 1e-12
    assert r.terms_used > 0


def test_truncation_error_carries_bound():
    with pytest.raises(TruncationError) as info:
        ml_eval(MlSpec((0.001,), 1.0), [-1.0], tol=1e-10)
    assert info.value.bound > 1e-10 or math.isinf(info.value.bound)


def test_argument_guard():
    with pytest.raises(DomainError):
        ml_eval(MlSpec((1.0,), 1.0), [2e4])


def test_tail_bound_rigorous_against_exact_tail():
    # exact tail of sum r^j / Gamma(b + j a) beyond K
    r, b, a, K = 3.0, 1.0, 0.5, 40
    exact = float(mpmath.nsum(lambda j: mpmath.mpf(r) ** j * mpmath.rgamma(b + a * j), [K + 1, mpmath.inf]))
    bound = tail_bound(r, b, a, K)
    assert exact <= bound < 10 * exact


def test_layers_needed_monotone_in_tol():
    k1, _ = layers_needed(2.0, 1.0, 0.5, 1e-6)
    k2, _ = layers_needed(2.0, 1.0, 0.5, 1e-12)
    assert k2 >= k1


# desk-scale domain: small weights with several arguments need millions of terms
weights = st.lists(st.sampled_from([0.5, 0.8, 1.0, 1.5]), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(weights, st.sampled_from([0.5, 1.0, 2.0]), st.data())
def test_permutation_symmetry(ws, b, data):
    z = data.draw(st.lists(st.floats(-1.5, 1.5), min_size=len(ws), max_size=len(ws)))
    perm = data.draw(st.permutations(range(len(ws))))
    v1 = ml_eval(MlSpec(tuple(ws), b), z).value
    v2 = ml_eval(MlSpec(tuple(ws[i] for i in perm), b), [z[i] for i in perm]).value
    assert v2 == pytest.approx(v1, abs=1e-9, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(weights, st.sampled_from([1.0, 1.5, 2.0]), st.data())
def test_monotone_positivity(ws, b, data):
    z = data.draw(st.lists(st.floats(0, 1.5), min_size=len(ws), max_size=len(ws)))
    assert ml_eval(MlSpec(tuple(ws), b), z).value >= recip_gamma(b) - 1e-15


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([0.3, 0.5, 1.0]), st.sampled_from([0.5, 1.0, 2.0]), st.floats(-5, 5))
def test_scalar_reduction_against_mpmath(a, b, z):
    ref = mp_ml(a, b, z)
    tol = 1e-10
    assert abs(ml_scalar(a, b, z, tol) - ref) <= 2 * tol * max(1.0, abs(ref))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=3))
def test_unit_weight_collapse(z):
    n = len(z)
    assert ml_eval(MlSpec((1.0,) * n, 1.0), z).value == pytest.approx(math.exp(sum(z)), abs=1e-9)


def test_vectorized_matches_pointwise():
    from hilfer_fde.specfun import ml_series

    zs = np.array([[-1.0, 0.0, 0.7], [0.2, -0.3, 1.1]])
    values, _, _ = ml_series((0.4, 0.9), 1.3, zs)
    for j in range(3):
        assert values[j] == pytest.approx(ml_eval(MlSpec((0.4, 0.9), 1.3), zs[:, j]).value, abs=1e-12)


@pytest.mark.parametrize("x", [-2.00001, -5.0000001, -1e-9, -29.5])
def test_recip_gamma_near_poles(x):
    assert recip_gamma(x) == pytest.approx(float(mpmath.rgamma(x)), rel=1e-13)
