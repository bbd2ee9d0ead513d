"""Complete elliptic integral of the first kind and Carlson's R_F.

K(m) uses the arithmetic-geometric mean (quadratic convergence, full
double precision).  R_F follows Carlson's duplication algorithm with the
fifth-order series tail (Carlson 1995, Numerical Algorithms 10) and
principal-branch square roots, which is what the half-period and inverse-p
computations need for real invariants.
"""

from __future__ import annotations

import cmath
import math

from .errors import EllipticDomainError

_RF_TOL = 1e-4  # spread tolerance before the series tail; error ~ spread^6


def elliptic_K(m: float) -> float:
    """K(m) with the parameter convention K(m) = F(pi/2 | m)."""
    if not (0.0 <= m < 1.0) or math.isnan(m):
        raise EllipticDomainError(f"parameter m={m!r} outside [0, 1)")
    a = 1.0
    b = math.sqrt(1.0 - m)
    for _ in range(200):
        if abs(a - b) <= 2e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    # final mean squeezes the remaining O((a-b)^2) error below 1 ulp
    return math.pi / (a + b)


def carlson_rf(x: complex, y: complex, z: complex) -> complex:
    """Symmetric elliptic integral R_F(x, y, z), principal branches.

    At most one argument may be zero.  Arguments on the negative real
    axis take the +i0 side of the cut (cmath.sqrt convention).
    """
    x, y, z = complex(x), complex(y), complex(z)
    if sum(1 for v in (x, y, z) if v == 0) > 1:
        raise ValueError("at most one argument of R_F may be zero")
    scale = 1.0
    for _ in range(120):
        mu = (x + y + z) / 3.0
        denom = abs(mu) + 1e-300
        spread = max(abs(x - mu), abs(y - mu), abs(z - mu)) / denom
        if spread < _RF_TOL:
            break
        sx, sy, sz = cmath.sqrt(x), cmath.sqrt(y), cmath.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    mu = (x + y + z) / 3.0
    dx = (mu - x) / mu
    dy = (mu - y) / mu
    dz = (mu - z) / mu
    e2 = dx * dy + dy * dz + dz * dx
    e3 = dx * dy * dz
    series = (
        1.0
        - e2 / 10.0
        + e3 / 14.0
        + e2 * e2 / 24.0
        - 3.0 * e2 * e3 / 44.0
    )
    return series / cmath.sqrt(mu)
