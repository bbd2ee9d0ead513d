"""Periods, boundedness conditions and periodic-orbit search.

Bounded radial motion has pseudo-period T_tau = 2 K(m) / sqrt(e1 - e3)
(the real period of the lattice) and physical period T_t obtained by
pushing T_tau through the radial Kepler equation.  Boundedness itself is
a pure root comparison: the motion is bounded iff the largest real root
of 4 s^3 - g2 s - g3 strictly exceeds f''(r_m)/24.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import dynamics, propagation
from .dynamics import InitialState
from .elliptic import elliptic_K
from .errors import (
    BracketError,
    DegenerateLatticeError,
    NoCrossingError,
    UnboundedMotionError,
)
from .propagation import SolutionContext, build_context
from .weierstrass import g_roots

_MARGINAL_BAND = 1e-9


@dataclass(frozen=True)
class PeriodInfo:
    T_tau: float
    T_t: float


@dataclass(frozen=True)
class BoundednessReport:
    bounded: bool
    marginal: bool
    e_tilde_max: float     # largest real root = minimum of p on the real axis
    threshold: float       # f''(r_m)/24
    margin: float          # e_tilde_max - threshold


def pseudo_period(ctx: SolutionContext) -> float:
    """Radial period in pseudo-time, from the K(m) form of the real period."""
    _require_bounded(ctx)
    e = ctx.lattice.roots.e_tilde
    e1, e2, e3 = (z.real for z in e)
    m = (e2 - e3) / (e1 - e3)
    return 2.0 * elliptic_K(m) / math.sqrt(e1 - e3)


def true_period(ctx: SolutionContext) -> float:
    """Radial period in physical time via the zeta(T_tau/2) closed form."""
    _require_bounded(ctx)
    t_tau = pseudo_period(ctx)
    eta = ctx.lattice.periods.eta.real   # zeta at the real half period
    if math.isfinite(ctx.kepler_coeff):
        return (ctx.r_m * t_tau
                - ctx.kepler_coeff * (2.0 * ctx.e_k * t_tau + 4.0 * eta))
    return propagation.radial_kepler(ctx, t_tau)


def period_info(ctx: SolutionContext) -> PeriodInfo:
    return PeriodInfo(T_tau=pseudo_period(ctx), T_t=true_period(ctx))


def true_period_implicit(ctx: SolutionContext) -> float:
    """T_t as twice the pericenter-to-apocenter implicit time of flight."""
    _require_bounded(ctx)
    return 2.0 * propagation.time_of_flight_implicit(
        ctx, ctx.region.r_lo, ctx.region.r_hi, ascending=True
    )


def bounded_condition(ctx: SolutionContext) -> BoundednessReport:
    """Boundedness from the root comparison e_tilde_max > f''(r_m)/24."""
    margin = ctx.margin
    marginal = abs(margin) < _MARGINAL_BAND
    return BoundednessReport(
        bounded=margin > 0.0 and not marginal,
        marginal=marginal,
        e_tilde_max=ctx.lattice.roots.max_real_root,
        threshold=ctx.e_k,
        margin=margin,
    )


def boundedness_from_state(state: InitialState) -> BoundednessReport:
    """Boundedness without building the full solution context.

    Only the two cubics are solved; usable arbitrarily close to the
    degenerate boundary where the lattice itself cannot be constructed.
    """
    f = dynamics.build_f(state)
    r_m, _ = dynamics.pericenter(f, state.r0)
    threshold = 0.5 * state.alpha * r_m + state.energy / 6.0
    inv = propagation.invariants_from_conserved(
        state.alpha, state.energy, state.momentum
    )
    try:
        e_max = g_roots(inv).max_real_root
    except DegenerateLatticeError:
        # exactly on the double-root boundary: margin is identically zero
        e_max = threshold
    margin = e_max - threshold
    marginal = abs(margin) < _MARGINAL_BAND
    return BoundednessReport(
        bounded=margin > 0.0 and not marginal,
        marginal=marginal,
        e_tilde_max=e_max,
        threshold=threshold,
        margin=margin,
    )


def pericenter_start_conditions(r0: float, v0: float) -> dict:
    """Escape threshold in alpha for a state given at pericenter.

    With u = r0 v0^2 the three regimes are
        u < 2/3:       alpha* = min((1 - u)/r0^2, (2 - u)^2 / (8 r0^3 v0^2))
        2/3 <= u <= 2: alpha* = (2 - u)^2 / (8 r0^3 v0^2)
        u > 2:         alpha* = 0
    and the motion is bounded iff alpha < alpha*.  Returns the regime, the
    threshold and the root expressions w1, w23 discriminant for reporting.
    """
    if r0 <= 0.0 or v0 < 0.0:
        raise ValueError("need r0 > 0 and v0 >= 0")
    u = r0 * v0 * v0
    a1 = (1.0 - u) / r0**2
    a3 = (2.0 - u) ** 2 / (8.0 * r0**3 * v0**2) if v0 > 0.0 else math.inf
    if u < 2.0 / 3.0:
        regime, threshold = "low-speed", min(a1, a3)
    elif u <= 2.0:
        regime, threshold = "mid-speed", a3
    else:
        regime, threshold = "high-speed", 0.0
    return {
        "u": u,
        "regime": regime,
        "alpha_threshold": threshold,
        "alpha_double_root": a3,
        "alpha_w1_crossing": a1,
    }


def w_roots_pericenter(r0: float, v0: float, alpha: float) -> tuple[float, complex, complex]:
    """Lattice-cubic roots for a pericenter start in closed form.

    w1 = alpha r0/2 + E/6; w2/w3 = -w1/2 +/- sqrt((2 - u)^2 - 8 a r0^3 v0^2)/(8 r0).
    """
    energy = 0.5 * v0 * v0 - 1.0 / r0 - alpha * r0
    w1 = 0.5 * alpha * r0 + energy / 6.0
    disc = (2.0 - r0 * v0 * v0) ** 2 - 8.0 * alpha * r0**3 * v0**2
    s = math.sqrt(abs(disc)) / (8.0 * r0)
    if disc >= 0.0:
        return w1, complex(-0.5 * w1 + s), complex(-0.5 * w1 - s)
    return w1, complex(-0.5 * w1, s), complex(-0.5 * w1, -s)


def escape_alpha(family: Callable[[float], InitialState],
                 alpha_lo: float, alpha_hi: float,
                 tol: float = 1e-10) -> float:
    """Bisect the boundedness margin over a one-parameter alpha family.

    ``family(alpha)`` must produce a valid state; the bracket must be
    bounded at alpha_lo and unbounded at alpha_hi.
    """
    def is_bounded(alpha: float) -> bool:
        state = family(alpha)
        if state.alpha < 0.0:
            return True
        if abs(state.rdot0) <= 1e-14 * max(1.0, state.v0):
            # apse start: the root comparison has an exact closed form,
            # immune to the near-double-root noise at crossing thresholds
            w1, w2, w3 = w_roots_pericenter(state.r0, state.v0, alpha)
            if w2.imag != 0.0:
                return False
            return max(w2.real, w3.real) - w1 > 0.0
        rep = boundedness_from_state(state)
        # root-solver noise band: well under the bisection tolerance, well
        # over the ~1e-16 rounding of an exactly-zero margin
        return rep.margin > 1e-13 * max(1.0, abs(rep.e_tilde_max))

    if not is_bounded(alpha_lo) or is_bounded(alpha_hi):
        raise BracketError(
            f"need bounded at alpha={alpha_lo} and unbounded at alpha={alpha_hi}"
        )
    lo, hi = alpha_lo, alpha_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_bounded(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def winding_increment(ctx: SolutionContext, n_periods: int) -> float:
    """Angle advance over n_periods full radial librations (exact linearity)."""
    _require_bounded(ctx)
    if n_periods == 0:
        return 0.0
    return n_periods * ctx.dtheta_period


def find_periodic_v(r_m: float, alpha: float, q: tuple[int, int],
                    bracket: tuple[float, float],
                    tol: float = 1e-12) -> float:
    """Pericenter speed closing the orbit after N radial periods.

    ``q = (M, N)`` requests a per-period angle advance congruent to
    +/- 2 pi M / N, so the trajectory repeats after N radial librations
    (an advance of 2 pi (n - M/N) describes the same closed orbit as a
    regression of 2 pi M/N past n full turns).  The winding ratio is
    smooth and monotone enough in v_m for plain bisection on the bracket.
    """
    m_turns, n_periods = q
    if n_periods <= 0:
        raise ValueError("q = (M, N) needs N >= 1")

    def ratio(v_m: float) -> float:
        ctx = build_context(InitialState(r_m, v_m, 0.0, alpha))
        if not ctx.bounded:
            raise UnboundedMotionError(f"v_m = {v_m} gives unbounded motion")
        return ctx.dtheta_period / (2.0 * math.pi)

    lo, hi = bracket
    d_lo, d_hi = ratio(lo), ratio(hi)
    d_min, d_max = min(d_lo, d_hi), max(d_lo, d_hi)
    frac = (m_turns / n_periods) % 1.0
    targets = sorted(
        n + s * frac
        for n in range(math.floor(d_min) - 1, math.ceil(d_max) + 2)
        for s in (1.0, -1.0)
        if d_min <= n + s * frac <= d_max
    )
    if not targets:
        raise NoCrossingError(
            f"winding ratio stays in [{d_min:.6f}, {d_max:.6f}] on the "
            f"bracket; no advance congruent to {m_turns}/{n_periods} crossed"
        )
    target = targets[0]
    f_lo, f_hi = d_lo - target, d_hi - target
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = ratio(mid) - target
        if f_mid == 0.0 or hi - lo < tol * max(1.0, abs(mid)):
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return 0.5 * (lo + hi)


def _require_bounded(ctx: SolutionContext) -> None:
    if not ctx.bounded:
        raise UnboundedMotionError(
            "operation requires bounded motion "
            f"(margin = {ctx.margin:.3e})"
        )
