"""Closed-form state propagation in pseudo-time and physical time.

With pseudo-time tau defined by dt = r dtau (Sundmann change of variable)
and the epoch at pericenter passage, the radius, polar angle and time read

    r(tau)  = r_m + f'(r_m) / (4 (p(tau) - ek)),        ek = f''(r_m)/24
    exp(i (v_m tau - theta)) = sigma(v - tau)/sigma(v + tau) * exp(2 tau zeta(v))
    t(tau)  = r_m tau - ek f'(r_m) / (2 g3 + 16 ek^3)
              * [2 ek tau + zeta(tau - w_k) + zeta(tau + w_k)]

where p, zeta, sigma live on the lattice with invariants g2 = E^2/3 - a,
g3 = a^2 h^2/4 + a E/6 - E^3/27, ek is always a root of 4 s^3 - g2 s - g3,
w_k is the half-period with p(w_k) = ek, and p(v) = ek - f'(r_m)/(4 r_m)
with p'(v) on the +i branch.  t(tau) is the radial Kepler equation; its
numerical inversion recovers the state as a function of physical time.

Equivalent affine route used for cross-checks and the degenerate Kepler
coefficient: r(tau) = (2/a) p(tau + w_k) - E/(3a), whence
t(tau) = -(2/a) [zeta(tau + w_k) - zeta(w_k)] - E tau/(3a).
"""

from __future__ import annotations

import cmath
import dataclasses
import math

from . import dynamics
from .dynamics import CubicF, InitialState, MotionClass
from .errors import (
    ConvergenceError,
    NonMonotoneArcError,
    NoPericenterError,
    OutOfIntervalError,
    PoleProximityError,
    RadialOrbitError,
)
from .weierstrass import Invariants, Lattice

_PERI_TAU_GUARD = 1e-6     # below this |tau| the Laurent expansion takes over
_REAL_SNAP = 1e-9


@dataclasses.dataclass(frozen=True)
class SolutionContext:
    """Everything needed to evaluate the closed form for one instance.

    Immutable after construction; safe to share across threads.
    """

    state: InitialState
    energy: float
    momentum: float
    f: CubicF
    region: MotionClass
    r_m: float
    v_m: float
    lattice: Lattice
    k: int                      # index with e_tilde_k = f''(r_m)/24
    e_k: float
    bounded: bool
    margin: float               # max real g-root minus e_k (0 when unbounded)
    v: complex                  # theta pole location, p(v) = e_k - f'(r_m)/(4 r_m)
    zeta_v: complex
    kepler_coeff: float         # ek f'(r_m) / (2 g3 + 16 ek^3); nan -> affine route
    tau0: float
    t0: float
    T_tau: float | None
    T_t: float | None
    dtheta_period: float | None


@dataclasses.dataclass(frozen=True)
class TrajectorySample:
    tau: float
    t: float
    r: float
    theta: float
    r_prime: float


@dataclasses.dataclass(frozen=True)
class PropagatedState:
    r: float
    theta: float
    v: float
    gamma: float
    tau: float
    t: float


def invariants_from_conserved(alpha: float, energy: float, momentum: float) -> Invariants:
    g2 = energy**2 / 3.0 - alpha
    g3 = alpha**2 * momentum**2 / 4.0 + alpha * energy / 6.0 - energy**3 / 27.0
    return Invariants(g2, g3)


def _kepler_time(lat: Lattice, r_m: float, e_k: float, coeff: float, k: int,
                 alpha: float, energy: float, tau: float) -> float:
    if tau == 0.0:
        return 0.0
    w_k = lat.periods.omega_k(k)
    if math.isfinite(coeff):
        zsum = lat.zeta(tau - w_k) + lat.zeta(tau + w_k)
        return (r_m * tau - coeff * (2.0 * e_k * tau + zsum)).real
    eta_k = lat.periods.eta_k(k)
    return (-(2.0 / alpha) * (lat.zeta(tau + w_k) - eta_k)
            - energy * tau / (3.0 * alpha)).real


def build_context(state: InitialState) -> SolutionContext:
    """Assemble the closed-form evaluation context for one initial state."""
    e = state.energy
    h = state.momentum
    if h <= 0.0:
        raise NoPericenterError("closed-form solution requires h > 0")
    f = dynamics.build_f(state)
    region = dynamics.classify_region(f, state.r0)
    r_m, v_m = dynamics.pericenter(f, state.r0)
    lat = Lattice(invariants_from_conserved(state.alpha, e, h))

    e_k = 0.5 * state.alpha * r_m + e / 6.0  # f''(r_m)/24
    g2, g3 = lat.inv.g2, lat.inv.g3
    scale = max(1.0, abs(g2), abs(g3))
    if abs(4.0 * e_k**3 - g2 * e_k - g3) > 1e-9 * scale:
        raise RadialOrbitError(
            "f''(r_m)/24 fails to be a root of the lattice cubic; "
            "inconsistent pericenter"
        )
    k = min((1, 2, 3), key=lambda i: abs(lat.roots.e_tilde[i - 1] - e_k))
    margin = lat.roots.max_real_root - e_k
    bounded = region.bounded

    fp_m = f.df(r_m)
    w_v = e_k - 0.25 * fp_m / r_m          # p(v) = -delta/gamma
    v = lat.wp_inverse(w_v, branch=+1)
    target = 0.25 * v_m * fp_m / r_m       # p'(v) must equal +i * target
    pv = lat.wp_prime(v)
    if abs(pv - 1j * target) > 1e-7 * (1.0 + abs(target)):
        raise RadialOrbitError(
            f"theta branch selection failed: p'(v) = {pv!r}, expected {1j * target!r}"
        )
    zeta_v = lat.zeta(v)

    denom = 2.0 * g3 + 16.0 * e_k**3
    coeff = (e_k * fp_m / denom) if abs(denom) > 1e-13 * scale else math.nan

    if bounded:
        t_tau = 2.0 * lat.real_half_period
        t_t = _kepler_time(lat, r_m, e_k, coeff, k, state.alpha, e, t_tau)
    else:
        t_tau = t_t = None

    ctx = SolutionContext(
        state=state, energy=e, momentum=h, f=f, region=region,
        r_m=r_m, v_m=v_m, lattice=lat, k=k, e_k=e_k,
        bounded=bounded, margin=margin,
        v=v, zeta_v=zeta_v, kepler_coeff=coeff,
        tau0=0.0, t0=0.0, T_tau=t_tau, T_t=t_t, dtheta_period=None,
    )
    if bounded:
        # The quasi-periodicity increment 4 Im[(T/2) zeta(v) - v zeta(T/2)]
        # fixes the per-period angle advance only modulo 2 pi; the stepped
        # phase pins the winding integer once, here.
        formula = v_m * t_tau - 4.0 * (0.5 * t_tau * zeta_v
                                       - v * lat.periods.eta).imag
        stepped = v_m * t_tau - _phase_arg(ctx, t_tau)
        dtheta = formula - 2.0 * math.pi * round((formula - stepped)
                                                 / (2.0 * math.pi))
        if abs(dtheta - stepped) > 1e-9 * (1.0 + abs(dtheta)):
            raise RadialOrbitError(
                "per-period angle increment: closed form and stepped phase "
                f"disagree ({dtheta} vs {stepped})"
            )
        ctx = dataclasses.replace(ctx, dtheta_period=dtheta)
    if abs(state.r0 - r_m) > 1e-12 * max(1.0, r_m):
        sign = 1 if state.rdot0 >= 0.0 else -1
        tau0 = tau0_from_r0(ctx, state.r0, sign)
        ctx = dataclasses.replace(
            ctx, tau0=tau0, t0=radial_kepler(ctx, tau0)
        )
    return ctx


def _tau_centered(ctx: SolutionContext, tau: float) -> float:
    # r and dr/dtau share the real period of p; fold tau to the pericenter-
    # centered representative so period multiples hit the series expansion
    # instead of the lattice pole.
    period = 2.0 * ctx.lattice.real_half_period
    return tau - period * round(tau / period)


def r_of_tau(ctx: SolutionContext, tau: float) -> float:
    """Radius at pseudo-time tau measured from pericenter passage (even in tau)."""
    tau_c = _tau_centered(ctx, tau)
    if abs(tau_c) < _PERI_TAU_GUARD:
        return ctx.r_m + 0.25 * ctx.f.df(ctx.r_m) * tau_c * tau_c
    p = ctx.lattice.wp(complex(tau_c)).real
    return ctx.r_m + 0.25 * ctx.f.df(ctx.r_m) / (p - ctx.e_k)


def r_prime_of_tau(ctx: SolutionContext, tau: float) -> float:
    """dr/dtau; equals +/- sqrt(f(r)) along the trajectory."""
    tau_c = _tau_centered(ctx, tau)
    if abs(tau_c) < _PERI_TAU_GUARD:
        return 0.5 * ctx.f.df(ctx.r_m) * tau_c
    p, pp, _, _ = ctx.lattice.wp_all(complex(tau_c))
    return (-0.25 * ctx.f.df(ctx.r_m) * pp / (p - ctx.e_k) ** 2).real


def sample(ctx: SolutionContext, tau: float) -> TrajectorySample:
    return TrajectorySample(
        tau=tau,
        t=radial_kepler(ctx, tau),
        r=r_of_tau(ctx, tau),
        theta=theta_of_tau(ctx, tau),
        r_prime=r_prime_of_tau(ctx, tau),
    )


def r_of_tau_general(state: InitialState, tau: float) -> float:
    """Radius from an arbitrary epoch radius via the general inversion formula.

    Works directly from r0 (no pericenter shift): with F = f(r0) and the
    branch of sqrt(F) tied to the sign of the initial radial velocity,
    r(tau) solves (dr/dtau)^2 = f(r) with r(0) = r0.  Agrees with the
    pericenter form shifted by tau0 wherever both are defined.
    """
    f = dynamics.build_f(state)
    lat = Lattice(invariants_from_conserved(state.alpha, state.energy,
                                            state.momentum))
    r0 = state.r0
    big_f = max(f(r0), 0.0)
    s = 1.0 if state.rdot0 >= 0.0 else -1.0
    if abs(tau) < _PERI_TAU_GUARD:
        return r0 + s * math.sqrt(big_f) * tau + 0.25 * f.df(r0) * tau * tau
    p, pp, _, _ = lat.wp_all(complex(tau))
    gk = f.d2f(r0) / 24.0
    num = (-s * math.sqrt(big_f) * pp
           + big_f * f.d3f / 24.0
           + 0.5 * f.df(r0) * (p - gk))
    den = 2.0 * (p - gk) ** 2
    return (r0 + num / den).real


def tau0_from_r0(ctx: SolutionContext, r0: float, sign_rdot: int) -> float:
    """Pseudo-time at radius r0 on the branch with sign(dr/dtau) = sign_rdot.

    Bounded motion returns tau0 in [0, T_tau); an inbound unbounded state
    returns a negative tau0 (pericenter passage lies ahead at tau = 0).
    """
    if sign_rdot not in (-1, 1):
        raise ValueError("sign_rdot must be +1 or -1")
    if not ctx.region.contains(r0):
        raise OutOfIntervalError(
            f"r0 = {r0} outside allowed interval "
            f"[{ctx.region.r_lo}, {ctx.region.r_hi}]"
        )
    if abs(r0 - ctx.r_m) <= 1e-12 * max(1.0, ctx.r_m):
        return 0.0
    if ctx.bounded and abs(r0 - ctx.region.r_hi) <= 1e-12 * max(1.0, ctx.region.r_hi):
        return 0.5 * ctx.T_tau  # apocenter: both branches meet at the half period
    w = ctx.e_k + 0.25 * ctx.f.df(ctx.r_m) / (r0 - ctx.r_m)
    z = ctx.lattice.wp_inverse(w, branch=-1)   # ascending branch: p' <= 0
    if abs(z.imag) > _REAL_SNAP * (1.0 + abs(z)):
        raise RadialOrbitError(f"pseudo-time inversion left the real axis: {z!r}")
    z = abs(z.real)
    if sign_rdot > 0:
        return z
    return ctx.T_tau - z if ctx.bounded else -z


# -- polar angle ---------------------------------------------------------

def theta_phase(ctx: SolutionContext, tau: float) -> complex:
    """Unimodular factor z = sigma(v - tau)/sigma(v + tau) exp(2 tau zeta(v))."""
    lat = ctx.lattice
    return (lat.sigma(ctx.v - tau) / lat.sigma(ctx.v + tau)
            * cmath.exp(2.0 * tau * ctx.zeta_v))


def theta_of_tau(ctx: SolutionContext, tau: float) -> float:
    """Continuous polar angle with theta(0) = 0 at pericenter.

    theta = v_m tau - arg z(tau) with the winding of z tracked: whole
    pseudo-periods advance by the closed-form increment, the remainder is
    unwrapped stepwise (the phase speed v_m - h/r lies in [0, v_m), so
    steps of pi/(2 v_m) can never alias).
    """
    base = 0.0
    tau_r = tau
    if ctx.bounded and ctx.T_tau is not None:
        n_per = math.floor(tau / ctx.T_tau)
        if n_per:
            base = n_per * ctx.dtheta_period
            tau_r = tau - n_per * ctx.T_tau
    return base + ctx.v_m * tau_r - _phase_arg(ctx, tau_r)


def _phase_arg(ctx: SolutionContext, tau: float) -> float:
    """Continuous arg of the phase factor from 0 to tau, unwrapped stepwise."""
    steps = max(1, math.ceil(abs(tau) * ctx.v_m / (0.5 * math.pi)))
    arg_acc = 0.0
    z_prev = 1.0 + 0j
    for j in range(1, steps + 1):
        z_j = theta_phase(ctx, tau * j / steps)
        arg_acc += cmath.phase(z_j / z_prev)
        z_prev = z_j
    return arg_acc


# -- radial Kepler equation ----------------------------------------------

def radial_kepler(ctx: SolutionContext, tau: float) -> float:
    """Physical time since pericenter passage, t(0) = 0, odd and increasing."""
    return _kepler_time(ctx.lattice, ctx.r_m, ctx.e_k, ctx.kepler_coeff,
                        ctx.k, ctx.state.alpha, ctx.energy, tau)


def invert_kepler(ctx: SolutionContext, t: float) -> float:
    """Solve t(tau) = t for tau; safeguarded Newton on the monotone branch."""
    if t == 0.0:
        return 0.0
    if ctx.bounded:
        n_per = math.floor(t / ctx.T_t)
        t_r = t - n_per * ctx.T_t
        guess = t_r / ctx.T_t * ctx.T_tau
        tau = _newton_bisect(ctx, t_r, 0.0, ctx.T_tau, guess)
        return tau + n_per * ctx.T_tau
    if t < 0.0:
        return -invert_kepler(ctx, -t)
    # unbounded: escape as tau -> real half period; bracket from below
    asymptote = ctx.lattice.real_half_period
    hi = 0.5 * asymptote
    for _ in range(200):
        try:
            if radial_kepler(ctx, hi) >= t:
                break
        except PoleProximityError:
            hi = 0.5 * (hi + asymptote * (1.0 - 1e-9))
            break
        hi = 0.5 * (hi + asymptote)
    else:
        raise ConvergenceError("failed to bracket the escape asymptote")
    return _newton_bisect(ctx, t, 0.0, hi, min(t / ctx.r_m, hi))


def _newton_bisect(ctx: SolutionContext, t: float, lo: float, hi: float,
                   guess: float) -> float:
    tol = 1e-13 * max(1.0, abs(t))
    tau = min(max(guess, lo), hi)
    for _ in range(100):
        err = radial_kepler(ctx, tau) - t
        if abs(err) <= tol:
            return tau
        if err > 0.0:
            hi = tau
        else:
            lo = tau
        step = err / r_of_tau(ctx, tau)   # dt/dtau = r > 0
        tau_new = tau - step
        if not (lo < tau_new < hi):
            tau_new = 0.5 * (lo + hi)
        if tau_new == tau:
            return tau
        tau = tau_new
    raise ConvergenceError(
        f"radial Kepler inversion failed to reach {tol:.1e} for t={t!r}"
    )


def time_of_flight_implicit(ctx: SolutionContext, r_start: float, r_end: float,
                            ascending: bool = True) -> float:
    """Time of flight along a monotone radial arc via the zeta quadrature.

    dt integrates to (2/a)(zeta(rho_a) - zeta(rho_b)) + E/(3a) (rho_a - rho_b)
    with rho = tau + w_k the p-preimage of f''(r)/24; independent of the
    radial Kepler route, which it must reproduce on every monotone arc.
    """
    if r_start == r_end:
        return 0.0
    if (ascending and r_start > r_end) or (not ascending and r_start < r_end):
        raise NonMonotoneArcError(
            f"arc {r_start} -> {r_end} is not monotone "
            f"{'ascending' if ascending else 'descending'}"
        )
    for r in (r_start, r_end):
        if not ctx.region.contains(r):
            raise OutOfIntervalError(f"radius {r} outside the allowed interval")
    sign = 1 if ascending else -1
    tau_a = tau0_from_r0(ctx, r_start, sign)
    tau_b = tau0_from_r0(ctx, r_end, sign)
    if tau_b < tau_a:
        raise NonMonotoneArcError("arc endpoints straddle a turning point")
    a, e = ctx.state.alpha, ctx.energy
    w_k = ctx.lattice.periods.omega_k(ctx.k)
    rho_a, rho_b = tau_a + w_k, tau_b + w_k
    val = ((2.0 / a) * (ctx.lattice.zeta(rho_a) - ctx.lattice.zeta(rho_b))
           + e / (3.0 * a) * (rho_a - rho_b))
    return val.real


def propagate(state: InitialState, dt: float) -> PropagatedState:
    """Full state at epoch + dt; theta is measured from the epoch position."""
    return propagate_ctx(build_context(state), dt)


def propagate_ctx(ctx: SolutionContext, dt: float) -> PropagatedState:
    tau = invert_kepler(ctx, ctx.t0 + dt) if dt != 0.0 else ctx.tau0
    r = r_of_tau(ctx, tau)
    rp = r_prime_of_tau(ctx, tau)
    theta = theta_of_tau(ctx, tau) - theta_of_tau(ctx, ctx.tau0)
    v_sq = 2.0 * ctx.energy + 2.0 / r + 2.0 * ctx.state.alpha * r
    v = math.sqrt(max(v_sq, 0.0))
    gamma = math.atan2(rp, ctx.momentum)
    return PropagatedState(r=r, theta=theta, v=v, gamma=gamma,
                           tau=tau, t=ctx.t0 + dt)
