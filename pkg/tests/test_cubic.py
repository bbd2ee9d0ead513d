import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radialorbit.cubic import cubic_discriminant, solve_cubic


def test_simple_integer_roots():
    roots, disc, double = solve_cubic(1.0, -6.0, 11.0, -6.0)
    assert [z.real for z in roots] == pytest.approx([3.0, 2.0, 1.0], abs=1e-13)
    assert disc > 0.0
    assert not double


def test_descending_order_three_real():
    roots, _, _ = solve_cubic(4.0, 0.0, -4.0, 0.0)  # 4s^3 - 4s
    assert [z.real for z in roots] == pytest.approx([1.0, 0.0, -1.0], abs=1e-14)
    assert all(z.imag == 0.0 for z in roots)


def test_complex_pair_convention():
    # one real root, conjugate pair: order is (a+ib, real, a-ib)
    roots, disc, _ = solve_cubic(4.0, 0.0, -0.12, 0.016)
    assert disc < 0.0
    assert roots[0].imag > 0.0
    assert roots[1].imag == 0.0
    assert roots[2] == roots[0].conjugate()
    expect = sorted(np.roots([4.0, 0.0, -0.12, 0.016]), key=lambda z: -z.imag)
    for got, ref in zip(roots, expect):
        assert got == pytest.approx(ref, abs=1e-12)


def test_exact_double_root():
    # 0.25 (r-2)^2 (r-1): the homoclinic cubic of the circular family
    roots, _, double = solve_cubic(0.25, -1.25, 2.0, -1.0)
    assert double
    assert roots[0].real == pytest.approx(2.0, abs=1e-10)
    assert roots[1].real == pytest.approx(2.0, abs=1e-10)
    assert roots[2].real == pytest.approx(1.0, abs=1e-10)


def test_leading_zero_rejected():
    with pytest.raises(ValueError):
        solve_cubic(0.0, 1.0, 1.0, 1.0)


@settings(max_examples=150, deadline=None)
@given(
    a=st.floats(-3.0, 3.0).filter(lambda x: abs(x) > 1e-3),
    b=st.floats(-3.0, 3.0),
    c=st.floats(-3.0, 3.0),
    d=st.floats(-3.0, 3.0),
)
def test_residuals_and_vieta(a, b, c, d):
    roots, disc, _ = solve_cubic(a, b, c, d)
    scale = max(abs(a), abs(b), abs(c), abs(d))
    rmax = max(abs(z) for z in roots) + 1.0
    for z in roots:
        res = ((a * z + b) * z + c) * z + d
        assert abs(res) <= 1e-11 * scale * rmax**3
    # near-multiple roots cost half the digits; generic cases do far better
    s1 = sum(roots)
    s2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2]
    s3 = roots[0] * roots[1] * roots[2]
    assert s1 == pytest.approx(-b / a, abs=1e-7 * rmax)
    assert s2 == pytest.approx(c / a, abs=1e-7 * rmax**2)
    assert s3 == pytest.approx(-d / a, abs=1e-7 * rmax**3)
    # discriminant sign consistent with root reality
    if disc > 1e-10 * scale**4:
        assert all(z.imag == 0.0 for z in roots)
    if disc < -1e-10 * scale**4:
        assert roots[0].imag > 0.0 > roots[2].imag


def test_discriminant_formula():
    # matches the expanded product over root differences
    a, b, c, d = 2.0, -3.0, -4.0, 5.0
    roots, disc, _ = solve_cubic(a, b, c, d)
    prod = (roots[0] - roots[1]) ** 2 * (roots[0] - roots[2]) ** 2 \
        * (roots[1] - roots[2]) ** 2
    assert disc == pytest.approx((a**4 * prod).real, rel=1e-10)
    assert cubic_discriminant(a, b, c, d) == disc
