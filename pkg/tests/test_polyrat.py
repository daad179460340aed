import numpy as np
import pytest

from netred.errors import PoleAtPoint, ZeroFunction
from netred.polyrat import (Polynomial, RationalFunction, integrator, poles, rf_add, rf_eval, rf_mul,
                            rf_reciprocal, rf_simplify)

R = RationalFunction.from_coeffs


def coeffs_close(r: RationalFunction, num, den, tol=1e-12):
    return (r.num.degree == len(num) - 1 and r.den.degree == len(den) - 1
            and np.allclose(r.num.c, num, atol=tol) and np.allclose(r.den.c, den, atol=tol))


class TestPolynomial:
    def test_trailing_zeros_trimmed(self):
        p = Polynomial([1.0, 2.0, 0.0, 0.0])
        assert p.degree == 1

    def test_zero_polynomial_is_single_zero(self):
        z = Polynomial([0.0, 0.0])
        assert z.is_zero() and z.degree == 0 and list(z.c) == [0.0]

    def test_horner(self):
        assert Polynomial([1, 2, 3])(2.0) == 1 + 4 + 12

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Polynomial([])


class TestEval:
    def test_integrator_real_point(self):
        assert rf_eval(integrator(), 2.0) == pytest.approx(0.5)

    def test_dc_ratio(self):
        assert rf_eval(R([1, 1], [2, 1]), 0.0) == pytest.approx(0.5)

    def test_generator_against_direct_complex_arithmetic(self):
        s = 1j
        direct = 1.0 / (0.1 * s + 0.3 + (1.0 / 7.0) / (5.0 * s + 1.0))
        r = R([1.0, 5.0], [0.3 + 1.0 / 7.0, 0.1 + 0.3 * 5.0, 0.1 * 5.0])
        assert abs(rf_eval(r, s) - direct) <= 1e-13 * abs(direct)

    def test_pole_detected(self):
        with pytest.raises(PoleAtPoint):
            rf_eval(integrator(), 0.0)
        with pytest.raises(PoleAtPoint):
            rf_eval(R([1], [2, 1]), -2.0)


class TestAdd:
    def test_identical_terms(self):
        r = rf_add(integrator(), integrator())
        assert coeffs_close(r, [2.0], [0.0, 1.0])

    def test_polynomial_case(self):
        r = rf_add(R([1, 1]), R([2, 1]))
        assert coeffs_close(r, [3.0, 2.0], [1.0])

    def test_common_denominator(self):
        r = rf_add(R([1], [1, 1]), R([1], [2, 1]))
        assert coeffs_close(r, [3.0, 2.0], [2.0, 3.0, 1.0])


class TestMul:
    def test_reciprocal_pair(self):
        r = rf_mul(integrator(), R([0, 1]))
        assert coeffs_close(r, [1.0], [1.0])

    def test_square(self):
        r = rf_mul(R([1], [1, 1]), R([1], [1, 1]))
        assert coeffs_close(r, [1.0], [1.0, 2.0, 1.0])

    def test_cancellation(self):
        r = rf_mul(R([1, 1], [2, 1]), R([2, 1], [3, 1]))
        assert coeffs_close(r, [1.0, 1.0], [3.0, 1.0], tol=1e-9)


class TestReciprocal:
    def test_integrator(self):
        assert coeffs_close(rf_reciprocal(integrator()), [0.0, 1.0], [1.0])

    def test_monic_normalisation(self):
        r = rf_reciprocal(R([3, 2], [2, 3, 1]))
        assert coeffs_close(r, [1.0, 1.5, 0.5], [1.5, 1.0])

    def test_constant(self):
        assert coeffs_close(rf_reciprocal(RationalFunction.const(4.0)), [0.25], [1.0])

    def test_zero_function(self):
        with pytest.raises(ZeroFunction):
            rf_reciprocal(RationalFunction.const(0.0))


class TestSimplify:
    def test_exact_factor(self):
        r = rf_simplify(RationalFunction(Polynomial([-1, 0, 1]), Polynomial([-1, 1])))
        assert coeffs_close(r, [1.0, 1.0], [1.0], tol=1e-9)

    def test_near_cancellation(self):
        r = rf_simplify(RationalFunction(Polynomial([-1.0, 1.0]), Polynomial([-1.0 + 1e-12, 1.0])))
        assert coeffs_close(r, [1.0], [1.0], tol=1e-9)

    def test_monic_rescale(self):
        r = rf_simplify(RationalFunction(Polynomial([1, 1]), Polynomial([4, 2])))
        assert coeffs_close(r, [0.5, 0.5], [2.0, 1.0])

    def test_distinct_close_roots_survive(self):
        # pole/zero 1e-3 apart is a genuine feature, not a cancellation
        r = rf_simplify(RationalFunction(Polynomial([1.0, 1.0]), Polynomial([1.001, 1.0])))
        assert r.num.degree == 1 and r.den.degree == 1

    def test_idempotent(self):
        r = rf_simplify(R([2, 3, 1], [6, 5, 1]))
        assert rf_simplify(r).structurally_equal(r)


def test_json_roundtrip():
    r = R([1.0, 5.0], [0.44, 1.6, 0.5])
    assert RationalFunction.from_json(r.to_json()).structurally_equal(r)


def test_poles_of_integrator():
    assert np.allclose(poles(integrator()), [0.0])
