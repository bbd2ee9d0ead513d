"""Weierstrass elliptic functions for real invariants (g2, g3).

Evaluation strategy: the Laurent/Taylor series of p, p', zeta and sigma
about the origin, combined with argument reduction into the fundamental
cell and the duplication formulas

    p(2z)  = (p''/p')^2 / 4 - 2 p,          p'' = 6 p^2 - g2/2
    p'(2z) = D (12 p - D^2) / 4 - p',       D = p''/p'
    z(2z)  = 2 zeta(z) + p''/(2 p'),
    s(2z)  = -sigma(z)^4 p'(z),

so a reduced argument is halved until the series converges to machine
precision and then doubled back.  Values outside the cell follow from
periodicity of p, p' and the quasi-periodicity of zeta and sigma.

Half-periods come from K(m) for a positive discriminant (rectangular
lattice, A&S 18.9) and from the conjugate-pair construction via Carlson
R_F for a negative one (rhombic lattice).  Conventions follow A&S ch. 18:
omega1 = omega, omega2 = omega + omega', omega3 = omega', p(omega_k) = e_k,
with the roots e1, e2, e3 ordered by descending imaginary then real part.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

from .cubic import solve_cubic
from .elliptic import carlson_rf, elliptic_K
from .errors import (
    DegenerateLatticeError,
    PoleProximityError,
    WpInverseError,
)

_SERIES_TERMS = 24          # Laurent coefficients c_2..c_{TERMS}
_HALVE_RATIO = 0.29         # halve until |z| <= ratio * (nearest lattice distance)
_DEFAULT_POLE_GUARD = 1e-12


@dataclass(frozen=True)
class Invariants:
    """Real lattice invariants; the cubic is 4 s^3 - g2 s - g3."""

    g2: float
    g3: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.g2) and math.isfinite(self.g3)):
            raise ValueError("invariants must be finite")

    @property
    def discriminant(self) -> float:
        return self.g2**3 - 27.0 * self.g3**2

    def is_degenerate(self, rtol: float = 1e-14) -> bool:
        scale = max(abs(self.g2) ** 3, 27.0 * self.g3**2, 1e-300)
        return abs(self.discriminant) <= rtol * scale


@dataclass(frozen=True)
class GRoots:
    """Roots of 4 s^3 - g2 s - g3 in descending (Im, Re) order."""

    e_tilde: tuple[complex, complex, complex]
    discriminant: float

    @property
    def e1(self) -> complex:
        return self.e_tilde[0]

    @property
    def e2(self) -> complex:
        return self.e_tilde[1]

    @property
    def e3(self) -> complex:
        return self.e_tilde[2]

    def real_roots(self, atol: float = 0.0) -> list[float]:
        scale = max(abs(z) for z in self.e_tilde) + 1e-300
        return [z.real for z in self.e_tilde if abs(z.imag) <= atol + 1e-12 * scale]

    @property
    def max_real_root(self) -> float:
        return max(self.real_roots())


@dataclass(frozen=True)
class HalfPeriods:
    """Half-period data of the lattice generated by (2 omega, 2 omega')."""

    omega: complex
    omega_prime: complex
    eta: complex          # zeta(omega)
    eta_prime: complex    # zeta(omega')
    m: float              # elliptic parameter of the K-reduction

    @property
    def omega1(self) -> complex:
        return self.omega

    @property
    def omega2(self) -> complex:
        return self.omega + self.omega_prime

    @property
    def omega3(self) -> complex:
        return self.omega_prime

    @property
    def eta2(self) -> complex:
        return self.eta + self.eta_prime

    def eta_k(self, k: int) -> complex:
        if k == 1:
            return self.eta
        if k == 2:
            return self.eta + self.eta_prime
        if k == 3:
            return self.eta_prime
        raise ValueError(f"half-period index must be 1, 2 or 3, got {k}")

    def omega_k(self, k: int) -> complex:
        return (self.omega1, self.omega2, self.omega3)[k - 1]


def g_roots(inv: Invariants) -> GRoots:
    """Ordered roots of the lattice cubic 4 s^3 - g2 s - g3."""
    if inv.is_degenerate():
        raise DegenerateLatticeError(
            f"g2^3 - 27 g3^2 = {inv.discriminant:.3e} vanishes; "
            "the lattice degenerates (alpha = 0 / double-root boundary)"
        )
    roots, _, _ = solve_cubic(4.0, 0.0, -inv.g2, -inv.g3)
    return GRoots(e_tilde=(roots[0], roots[1], roots[2]),
                  discriminant=inv.discriminant)


class Lattice:
    """Immutable evaluation context for one pair of invariants.

    Construction computes the cubic roots, half-periods, eta values and
    the series coefficients; all evaluation methods are pure.
    """

    def __init__(self, inv: Invariants, roots: GRoots | None = None,
                 pole_guard: float = _DEFAULT_POLE_GUARD) -> None:
        self.inv = inv
        self.roots = g_roots(inv) if roots is None else roots
        self.pole_guard = pole_guard
        self._coeffs = _series_coefficients(inv.g2, inv.g3)
        self.periods = self._build_periods()
        self._dmin = self._min_lattice_distance()
        self._finish_periods()
        self._check_root_values()

    @classmethod
    def from_invariants(cls, g2: float, g3: float,
                        pole_guard: float = _DEFAULT_POLE_GUARD) -> "Lattice":
        return cls(Invariants(g2, g3), pole_guard=pole_guard)

    # -- construction ----------------------------------------------------

    def _build_periods(self) -> HalfPeriods:
        e1, e2, e3 = self.roots.e_tilde
        if self.roots.discriminant > 0.0:
            # Rectangular: three real roots e1 > e2 > e3.
            a = math.sqrt(e1.real - e3.real)
            m = (e2.real - e3.real) / (e1.real - e3.real)
            omega = complex(elliptic_K(m) / a, 0.0)
            omega_p = complex(0.0, elliptic_K(1.0 - m) / a)
        else:
            # Rhombic: e2 real, e1/e3 a conjugate pair.  Real half period
            # from R_F at the real root for (g2, g3); the imaginary one is
            # the same object for (g2, -g3), by p(iz; g2, -g3) = -p(z; g2, g3).
            om_r = carlson_rf(0.0, e2 - e1, e2 - e3)
            om_i = carlson_rf(0.0, e1 - e2, e3 - e2)
            big_h = abs(e2 - e1)
            m = 0.5 + 3.0 * e2.real / (4.0 * big_h)
            omega = 0.5 * complex(abs(om_r), abs(om_i))
            omega_p = 0.5 * complex(-abs(om_r), abs(om_i))
        return HalfPeriods(omega=omega, omega_prime=omega_p,
                           eta=0j, eta_prime=0j, m=m)

    def _min_lattice_distance(self) -> float:
        w1 = 2.0 * self.periods.omega
        w2 = 2.0 * self.periods.omega_prime
        return min(
            abs(m * w1 + n * w2)
            for m in range(-2, 3)
            for n in range(-2, 3)
            if (m, n) != (0, 0)
        )

    def _finish_periods(self) -> None:
        p = self.periods
        omega, omega_p = p.omega, p.omega_prime
        # Conjugate-pair labelling: pick the representative with p(omega) = e1
        # (for a rhombic lattice the R_F construction may land on e3 = conj e1).
        p1 = self._eval_raw(omega)[0]
        if abs(p1 - self.roots.e1) > abs(p1 - self.roots.e3):
            omega, omega_p = omega.conjugate(), omega_p.conjugate()
        eta = self._eval_raw(omega)[2]
        eta_p = self._eval_raw(omega_p)[2]
        # Normalize orientation so the Legendre relation reads +i pi/2.
        legendre = eta * omega_p - eta_p * omega
        if legendre.imag < 0.0:
            omega_p, eta_p = -omega_p, -eta_p
            legendre = -legendre
        if abs(legendre - 1j * math.pi / 2.0) > 1e-10 * (1.0 + abs(legendre)):
            raise DegenerateLatticeError(
                f"Legendre relation violated ({legendre!r}); "
                "invariants too close to the degenerate boundary"
            )
        self.periods = HalfPeriods(omega=omega, omega_prime=omega_p,
                                   eta=eta, eta_prime=eta_p, m=p.m)

    def _check_root_values(self) -> None:
        scale = max(abs(z) for z in self.roots.e_tilde) + 1.0
        for k in (1, 2, 3):
            val = self._eval_raw(self.periods.omega_k(k))[0]
            if abs(val - self.roots.e_tilde[k - 1]) > 1e-6 * scale:
                raise DegenerateLatticeError(
                    f"p(omega_{k}) does not reproduce root {k}; "
                    "lattice construction failed (near-degenerate invariants?)"
                )

    @cached_property
    def real_half_period(self) -> float:
        """Half the smallest positive real lattice vector (period of p on R)."""
        w1, w2 = 2.0 * self.periods.omega, 2.0 * self.periods.omega_prime
        best = math.inf
        for m in range(-2, 3):
            for n in range(-2, 3):
                vec = m * w1 + n * w2
                if vec.real > 0.0 and abs(vec.imag) <= 1e-12 * abs(vec):
                    best = min(best, vec.real)
        if not math.isfinite(best):  # pragma: no cover - real invariants
            raise DegenerateLatticeError("no real period found")
        return 0.5 * best

    # -- reduction and series ---------------------------------------------

    def reduce(self, z: complex) -> tuple[complex, int, int]:
        """Translate z by lattice vectors into the centered fundamental cell."""
        w1, w2 = 2.0 * self.periods.omega, 2.0 * self.periods.omega_prime
        det = w1.real * w2.imag - w1.imag * w2.real
        x = (z.real * w2.imag - z.imag * w2.real) / det
        y = (-z.real * w1.imag + z.imag * w1.real) / det
        m = math.floor(x + 0.5)
        n = math.floor(y + 0.5)
        return z - m * w1 - n * w2, m, n

    def _eval_raw(self, z: complex) -> tuple[complex, complex, complex, complex]:
        """(p, p', zeta, sigma) at z, assumed inside (or near) the cell."""
        r = abs(z)
        if r == 0.0:
            raise PoleProximityError("evaluation at a lattice point")
        halvings = 0
        target = _HALVE_RATIO * self._dmin
        if r > target:
            halvings = max(0, math.ceil(math.log2(r / target)))
        zs = z / (2**halvings)

        g2 = self.inv.g2
        c = self._coeffs
        z2 = zs * zs
        # p = 1/z^2 + sum c_k z^(2k-2); zeta = 1/z - sum c_k z^(2k-1)/(2k-1)
        # p' = -2/z^3 + sum (2k-2) c_k z^(2k-3); log(sigma/z) = -sum c_k z^(2k)/((2k-1)2k)
        p = 0j
        pp = 0j
        zt = 0j
        ls = 0j
        zpow = z2  # z^(2k-2) for k=2 -> z^2
        for k in range(2, len(c)):
            ck = c[k]
            p += ck * zpow
            pp += (2 * k - 2) * ck * zpow / zs
            zt += ck * zpow * zs / (2 * k - 1)
            ls += ck * zpow * z2 / ((2 * k - 1) * (2 * k))
            zpow *= z2
        p += 1.0 / z2
        pp += -2.0 / (z2 * zs)
        zt = 1.0 / zs - zt
        sg = zs * cmath.exp(-ls)

        for _ in range(halvings):
            ppp = 6.0 * p * p - 0.5 * g2
            d = ppp / pp
            sg = -(sg**4) * pp
            zt = 2.0 * zt + 0.5 * d
            p_new = 0.25 * d * d - 2.0 * p
            pp = 0.25 * d * (12.0 * p - d * d) - pp
            p = p_new
        return p, pp, zt, sg

    # -- public evaluation -------------------------------------------------

    def wp_all(self, z: complex) -> tuple[complex, complex, complex, complex]:
        """(p, p', zeta, sigma) at arbitrary z via quasi-periodic extension."""
        zr, m, n = self.reduce(complex(z))
        if abs(zr) < self.pole_guard:
            raise PoleProximityError(
                f"|z - lattice| = {abs(zr):.2e} below pole guard {self.pole_guard:.1e}"
            )
        p, pp, zt, sg = self._eval_raw(zr)
        if m or n:
            per = self.periods
            eta_mn = 2.0 * (m * per.eta + n * per.eta_prime)
            zt = zt + eta_mn
            sign = -1.0 if (m + n + m * n) % 2 else 1.0
            sg = sg * sign * cmath.exp(
                eta_mn * (zr + m * per.omega + n * per.omega_prime)
            )
        return p, pp, zt, sg

    def wp(self, z: complex) -> complex:
        return self.wp_all(z)[0]

    def wp_prime(self, z: complex) -> complex:
        return self.wp_all(z)[1]

    def zeta(self, z: complex) -> complex:
        return self.wp_all(z)[2]

    def sigma(self, z: complex) -> complex:
        zr, m, n = self.reduce(complex(z))
        if abs(zr) < 1e-300:
            return 0j
        if abs(zr) < self.pole_guard:
            # sigma is entire; only the shared evaluator guard is bypassed.
            sg = zr
        else:
            sg = self._eval_raw(zr)[3]
        if m or n:
            per = self.periods
            eta_mn = 2.0 * (m * per.eta + n * per.eta_prime)
            sign = -1.0 if (m + n + m * n) % 2 else 1.0
            sg = sg * sign * cmath.exp(
                eta_mn * (zr + m * per.omega + n * per.omega_prime)
            )
        return sg

    # -- inversion ----------------------------------------------------------

    @cached_property
    def _real_contours(self):
        """Monotone contours covering all real values of p (for real targets).

        Each entry is (lo_value, hi_value, start, direction, length) with p
        monotone along start + t*direction, t in (0, length].
        """
        per = self.periods
        e = self.roots.e_tilde
        if self.roots.discriminant > 0.0:
            om, omp = per.omega.real, per.omega_prime.imag
            return [
                # p: +inf -> e1 along (0, omega]
                (e[0].real, math.inf, 0j, complex(1.0, 0.0), om),
                # e1 -> e2 along omega + i(0, |omega'|]
                (e[1].real, e[0].real, complex(om, 0.0), 1j, omp),
                # e2 -> e3 descending along omega' + (omega -> 0]
                (e[2].real, e[1].real, complex(om, omp), complex(-1.0, 0.0), om),
                # e3 -> -inf along omega' - i(0, |omega'|) toward 0
                (-math.inf, e[2].real, complex(0.0, omp), -1j, omp),
            ]
        om_r = (per.omega - per.omega_prime).real  # real half period
        om_i = (per.omega + per.omega_prime).imag  # imaginary half period / i
        return [
            (e[1].real, math.inf, 0j, complex(1.0, 0.0), om_r),
            (-math.inf, e[1].real, complex(0.0, om_i), -1j, om_i),
        ]

    def _invert_real(self, w: float) -> complex:
        for lo, hi, start, direction, length in self._real_contours:
            if lo <= w <= hi:
                t_lo, t_hi = 1e-14 * length, length
                f_hi = (self.wp(start + t_hi * direction) - w).real
                for _ in range(200):
                    t_mid = 0.5 * (t_lo + t_hi)
                    f_mid = (self.wp(start + t_mid * direction) - w).real
                    if f_mid == 0.0 or (t_hi - t_lo) < 1e-17 * length:
                        break
                    # p decreases away from the pole on every contour here,
                    # except the descending top edge where it also decreases.
                    if (f_mid > 0.0) == (f_hi > 0.0):
                        t_hi, f_hi = t_mid, f_mid
                    else:
                        t_lo = t_mid
                return start + 0.5 * (t_lo + t_hi) * direction
        raise WpInverseError(f"value {w!r} not attained on the real contours")

    def wp_inverse(self, w: complex, branch: int = -1) -> complex:
        """z with p(z) = w and the sign of p'(z) matching ``branch``.

        ``branch`` selects the sign of the dominant component (real or
        imaginary, whichever is larger in magnitude) of p'(z).  The result
        lies in the fundamental cell spanned by (2 omega, 2 omega'); real
        results land in [0, 2 omega).  At the half periods (w a lattice
        root) the branch is immaterial since p' vanishes there.
        """
        w = complex(w)
        if branch not in (-1, 1):
            raise ValueError("branch must be +1 or -1")
        e1, e2, e3 = self.roots.e_tilde
        z = carlson_rf(w - e1, w - e2, w - e3)
        z = self._polish_inverse(z, w)
        if z is None and abs(w.imag) <= 1e-12 * (1.0 + abs(w)):
            z = self._polish_inverse(self._invert_real(w.real), w)
        if z is None:
            raise WpInverseError(f"inversion failed for w={w!r}")
        return self._select_branch(z, branch)

    def _polish_inverse(self, z: complex, w: complex) -> complex | None:
        tol = 1e-11 * (1.0 + abs(w))
        best, best_res = z, math.inf
        for _ in range(60):
            zr, _, _ = self.reduce(z)
            if abs(zr) < 10.0 * self.pole_guard:
                break
            p, pp, _, _ = self.wp_all(z)
            res = abs(p - w)
            if res < best_res:
                best, best_res = z, res
            if res <= 1e-13 * (1.0 + abs(w)):
                break
            if abs(pp) < 1e-13 * (1.0 + abs(p)) ** 1.5:
                break  # half-period target; Carlson seed is already exact
            step = (p - w) / pp
            lim = 0.25 * self._dmin
            if abs(step) > lim:
                step *= lim / abs(step)
            z = z - step
        return best if best_res <= tol else None

    def _select_branch(self, z: complex, branch: int) -> complex:
        z = self._canonical(z)
        p, pp, _, _ = self.wp_all(z)
        scale = (1.0 + abs(p)) ** 1.5
        if abs(pp) <= 1e-10 * scale:
            return z
        comp = pp.real if abs(pp.real) >= abs(pp.imag) else pp.imag
        if comp * branch < 0.0:
            z = self._canonical(-z)
        return z

    def _canonical(self, z: complex) -> complex:
        """Representative with cell coordinates in [0, 1); real input -> [0, 2w)."""
        w1, w2 = 2.0 * self.periods.omega, 2.0 * self.periods.omega_prime
        det = w1.real * w2.imag - w1.imag * w2.real
        x = (z.real * w2.imag - z.imag * w2.real) / det
        y = (-z.real * w1.imag + z.imag * w1.real) / det
        z = z - math.floor(x + 1e-13) * w1 - math.floor(y + 1e-13) * w2
        if abs(z.imag) <= 1e-12 * (1.0 + abs(z.real)):
            z = complex(z.real, 0.0)
        return z


def half_periods(inv: Invariants, roots: GRoots | None = None) -> HalfPeriods:
    """Half periods, eta values and elliptic parameter for the invariants."""
    return Lattice(inv, roots=roots).periods


def _series_coefficients(g2: float, g3: float, terms: int = _SERIES_TERMS) -> list[float]:
    # c_2 = g2/20, c_3 = g3/28, c_k = 3 sum(c_m c_{k-m}) / ((2k+1)(k-3)).
    c = [0.0, 0.0, g2 / 20.0, g3 / 28.0]
    for k in range(4, terms + 1):
        acc = math.fsum(c[m] * c[k - m] for m in range(2, k - 1))
        c.append(3.0 * acc / ((2 * k + 1) * (k - 3)))
    return c
