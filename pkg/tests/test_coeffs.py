import pytest
import mpmath as mp

from thetal.context import DomainError, PrecisionContext
from thetal.theta import CoeffStream, coeffs_convolution, coeffs_lambert, form_f, form_g

from conftest import agrees


def _is_prime(n):
    return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))


def test_f_small_coefficients():
    cs = coeffs_convolution("f", 8)
    assert cs.coeffs == (1, -4, 8, -16, 26, -32, 48, -64)
    assert cs.a(1) == 1 and cs.a(2) == -4


def test_g_small_coefficients():
    cs = coeffs_convolution("g", 10)
    assert cs.coeffs == (1, 0, 0, 0, -6, 0, 0, 0, 9, 0)


def test_lambert_divisor_sum_small():
    cs = coeffs_lambert("f", 4)
    # a_2: only the divisor pair (n,k) = (2,1) contributes, psi(2) 2^2 = -4
    assert cs.coeffs == (1, -4, 8, -16)


def test_convolution_equals_lambert_exactly():
    N = 2000
    assert coeffs_convolution("f", N).coeffs == coeffs_lambert("f", N).coeffs


def test_g_cm_vanishing():
    cs = coeffs_convolution("g", 2000)
    for p in range(3, 2001, 4):
        if _is_prime(p):
            assert cs.a(p) == 0, f"a_{p}(g) should vanish"


def test_coeffs_match_forms_numerically(ctx30):
    # partial q-expansion against the theta-product evaluators
    N = 60
    cf = coeffs_convolution("f", N)
    cg = coeffs_convolution("g", N)
    with ctx30.working():
        q = mp.mpf("0.2")
        pf = sum(cf.a(n) * q**n for n in range(1, N + 1))
        pg = sum(cg.a(n) * q**n for n in range(1, N + 1))
        tail = q ** (N + 1) / (1 - q) * (N + 2) ** 3 * 300
        assert abs(form_f(q, ctx30) - pf) < tail
        assert abs(form_g(q, ctx30) - pg) < tail


def test_bad_arguments():
    with pytest.raises(DomainError):
        coeffs_convolution("h", 10)
    with pytest.raises(DomainError):
        coeffs_convolution("f", 0)
    with pytest.raises(DomainError):
        coeffs_lambert("g", 10)
    with pytest.raises(DomainError):
        CoeffStream("f", (1, -4)).a(3)
