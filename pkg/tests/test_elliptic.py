import cmath
import math

import pytest
from scipy.integrate import quad
from scipy.special import ellipk

from radialorbit.elliptic import carlson_rf, elliptic_K
from radialorbit.errors import EllipticDomainError


def test_K_at_zero_is_pi_over_two():
    assert elliptic_K(0.0) == pytest.approx(math.pi / 2.0, abs=1e-16)


def test_K_half_frozen_value():
    # independently derived by quadrature of the defining integral
    assert elliptic_K(0.5) == pytest.approx(1.8540746773013719, abs=2e-15)


@pytest.mark.parametrize("m", [1e-8, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999999])
def test_K_matches_scipy(m):
    assert elliptic_K(m) == pytest.approx(float(ellipk(m)), rel=1e-14)


@pytest.mark.parametrize("m", [0.3, 0.8])
def test_K_matches_quadrature(m):
    ref, _ = quad(lambda th: 1.0 / math.sqrt(1.0 - m * math.sin(th) ** 2),
                  0.0, math.pi / 2.0, epsabs=1e-14, epsrel=1e-14)
    assert elliptic_K(m) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("m", [-0.1, 1.0, 1.5, math.nan])
def test_K_domain_errors(m):
    with pytest.raises(EllipticDomainError):
        elliptic_K(m)


def test_rf_degenerate_equal_arguments():
    # R_F(x, x, x) = x^(-1/2)
    assert carlson_rf(4.0, 4.0, 4.0) == pytest.approx(0.5, abs=1e-14)


def test_rf_reproduces_complete_integral():
    # R_F(0, 1-m, 1) = K(m)
    for m in (0.2, 0.5, 0.85):
        assert carlson_rf(0.0, 1.0 - m, 1.0) == pytest.approx(
            elliptic_K(m), rel=1e-13
        )


def test_rf_against_quadrature():
    x, y, z = 1.0, 2.0, 4.0
    ref, _ = quad(
        lambda t: 0.5 / math.sqrt((t + x) * (t + y) * (t + z)),
        0.0, math.inf, epsabs=1e-14, epsrel=1e-14,
    )
    assert carlson_rf(x, y, z) == pytest.approx(ref, rel=1e-12)


def test_rf_conjugate_pair_is_real():
    val = carlson_rf(0.0, complex(0.3, 0.4), complex(0.3, -0.4))
    assert abs(val.imag) < 1e-14
    assert val.real > 0.0


def test_rf_homogeneity():
    lam = 2.7
    a = carlson_rf(lam * 1.0, lam * 2.0, lam * 3.0)
    b = carlson_rf(1.0, 2.0, 3.0) / cmath.sqrt(lam)
    assert a == pytest.approx(b, rel=1e-13)


def test_rf_rejects_two_zeros():
    with pytest.raises(ValueError):
        carlson_rf(0.0, 0.0, 1.0)
