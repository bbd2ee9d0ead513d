"""Command-line front end: propagation, classification, periods, searches.

All core math runs in canonical units (mu = 1).  The CLI optionally
accepts a gravitational parameter and a length unit and converts on the
way in and out: with DU the length unit and TU = sqrt(DU^3 / mu), inputs
scale as r/DU, v * TU/DU, alpha * TU^2/DU, t/TU.

Exit codes: 0 success, 2 invalid input or domain error, 3 internal
numerical failure.  Domain errors emit a one-line JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import analysis, dynamics, propagation
from .dynamics import InitialState
from .errors import (
    ConvergenceError,
    RadialOrbitError,
    StepUnderflowError,
    WpInverseError,
)

_SAMPLE_COLUMNS = ("t", "tau", "r", "theta", "v", "gamma")


class _Units:
    """Canonical-unit conversion defined by mu and a length unit."""

    def __init__(self, mu: float, du: float) -> None:
        if mu <= 0.0 or du <= 0.0:
            raise ValueError("mu and du must be positive")
        self.du = du
        self.tu = math.sqrt(du**3 / mu)

    def state(self, r0, v0, gamma0_deg, alpha) -> InitialState:
        return InitialState(
            r0=r0 / self.du,
            v0=v0 * self.tu / self.du,
            gamma0=math.radians(gamma0_deg),
            alpha=alpha * self.tu**2 / self.du,
        )

    def time_in(self, t: float) -> float:
        return t / self.tu

    def time_out(self, t: float) -> float:
        return t * self.tu

    def length_out(self, r: float) -> float:
        return r * self.du

    def speed_out(self, v: float) -> float:
        return v * self.du / self.tu


def _add_state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r0", type=float, required=True, help="epoch radius")
    p.add_argument("--v0", type=float, required=True, help="epoch speed")
    p.add_argument("--gamma0-deg", type=float, default=0.0,
                   help="flight-path angle in degrees (default 0)")
    p.add_argument("--alpha", type=float, required=True,
                   help="radial acceleration (negative = inward)")
    p.add_argument("--mu", type=float, default=1.0,
                   help="gravitational parameter (default 1, canonical)")
    p.add_argument("--du", type=float, default=1.0,
                   help="length unit for non-dimensionalization (default 1)")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _meta_block(ctx, units: _Units) -> dict:
    lat = ctx.lattice
    meta = {
        "energy": ctx.energy,
        "momentum": ctx.momentum,
        "r_pericenter": units.length_out(ctx.r_m),
        "v_pericenter": units.speed_out(ctx.v_m),
        "bounded": ctx.bounded,
        "f_roots": [[z.real, z.imag] for z in ctx.f.roots],
        "g_roots": [[z.real, z.imag] for z in lat.roots.e_tilde],
        "g2": lat.inv.g2,
        "g3": lat.inv.g3,
    }
    if ctx.bounded:
        meta["T_tau"] = ctx.T_tau
        meta["T_t"] = units.time_out(ctx.T_t)
        meta["dtheta_period"] = ctx.dtheta_period
    return meta


def _format_samples(rows: list[dict], meta: dict, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(_SAMPLE_COLUMNS)]
        lines += [
            ",".join(repr(row[c]) for c in _SAMPLE_COLUMNS) for row in rows
        ]
        return "\n".join(lines) + "\n"
    return json.dumps({"meta": meta, "samples": rows}, indent=1) + "\n"


def cmd_propagate(args) -> int:
    units = _Units(args.mu, args.du)
    state = units.state(args.r0, args.v0, args.gamma0_deg, args.alpha)
    ctx = propagation.build_context(state)
    n = args.samples
    if n < 1 or (n < 2 and args.t_span != 0.0):
        raise ValueError("need at least 2 samples for a nonzero span")

    rows = []
    if args.tau_span is not None:
        taus = [ctx.tau0 + args.tau_span * i / max(n - 1, 1) for i in range(n)]
        for tau in taus:
            rows.append(_row_at_tau(ctx, units, tau))
    else:
        t0 = units.time_in(args.t0)
        span = units.time_in(args.t_span)
        for i in range(n):
            dt = t0 + span * i / max(n - 1, 1)
            ps = propagation.propagate_ctx(ctx, dt)
            rows.append({
                "t": units.time_out(ps.t - ctx.t0),
                "tau": ps.tau,
                "r": units.length_out(ps.r),
                "theta": ps.theta,
                "v": units.speed_out(ps.v),
                "gamma": ps.gamma,
            })
    _emit(_format_samples(rows, _meta_block(ctx, units), args.format), args.out)
    return 0


def _row_at_tau(ctx, units: _Units, tau: float) -> dict:
    smp = propagation.sample(ctx, tau)
    v_sq = 2.0 * ctx.energy + 2.0 / smp.r + 2.0 * ctx.state.alpha * smp.r
    v = math.sqrt(max(v_sq, 0.0))
    return {
        "t": units.time_out(smp.t - ctx.t0),
        "tau": tau,
        "r": units.length_out(smp.r),
        "theta": smp.theta,
        "v": units.speed_out(v),
        "gamma": math.atan2(smp.r_prime, ctx.momentum),
    }


def cmd_classify(args) -> int:
    units = _Units(args.mu, args.du)
    state = units.state(args.r0, args.v0, args.gamma0_deg, args.alpha)
    report = analysis.boundedness_from_state(state)
    f = dynamics.build_f(state)
    region = dynamics.classify_region(f, state.r0)
    verdict = ("marginal" if report.marginal
               else "bounded" if report.bounded else "unbounded")
    payload = {
        "verdict": verdict,
        "tag": region.tag.value,
        "energy": state.energy,
        "momentum": state.momentum,
        "allowed_interval": [units.length_out(region.r_lo),
                             None if math.isinf(region.r_hi)
                             else units.length_out(region.r_hi)],
        "f_roots": [[z.real, z.imag] for z in f.roots],
        "e_tilde_max": report.e_tilde_max,
        "threshold": report.threshold,
        "margin": report.margin,
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=1) + "\n", args.out)
    else:
        lines = [f"verdict: {verdict}", f"tag: {region.tag.value}"]
        lines.append(f"E = {state.energy!r}, h = {state.momentum!r}")
        lines.append(f"f roots: {', '.join(format(z, '.12g') for z in f.roots)}")
        lines.append(
            "e_tilde_max = {:.12g}, threshold = {:.12g}, margin = {:.12g}"
            .format(report.e_tilde_max, report.threshold, report.margin)
        )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_period(args) -> int:
    units = _Units(args.mu, args.du)
    state = units.state(args.r0, args.v0, args.gamma0_deg, args.alpha)
    ctx = propagation.build_context(state)
    if not ctx.bounded:
        raise RadialOrbitError("no period: motion is unbounded")
    info = analysis.period_info(ctx)
    payload: dict = {
        "T_tau": info.T_tau,
        "T_t": units.time_out(info.T_t),
        "T_t_implicit": units.time_out(analysis.true_period_implicit(ctx)),
    }
    if args.kepler_curve:
        n = args.samples
        payload["kepler_curve"] = [
            {"tau": info.T_tau * i / (n - 1),
             "t": units.time_out(
                 propagation.radial_kepler(ctx, info.T_tau * i / (n - 1)))}
            for i in range(n)
        ]
    if args.format == "json":
        _emit(json.dumps(payload, indent=1) + "\n", args.out)
    else:
        lines = [f"T_tau = {payload['T_tau']!r}", f"T_t = {payload['T_t']!r}"]
        if args.kepler_curve:
            lines.append("tau,t")
            lines += [f"{row['tau']!r},{row['t']!r}"
                      for row in payload["kepler_curve"]]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_period_sweep(args) -> int:
    units = _Units(args.mu, args.du)
    lines = ["v0,alpha,T_tau"]
    n_v, n_a = args.v0_samples, args.alpha_samples
    for i in range(n_v):
        v0 = args.v0_lo + (args.v0_hi - args.v0_lo) * i / max(n_v - 1, 1)
        for j in range(n_a):
            alpha = (args.alpha_lo
                     + (args.alpha_hi - args.alpha_lo) * j / max(n_a - 1, 1))
            try:
                state = units.state(args.r0, v0, 0.0, alpha)
                ctx = propagation.build_context(state)
                if not ctx.bounded:
                    continue
                t_tau = analysis.pseudo_period(ctx)
            except RadialOrbitError:
                continue
            lines.append(f"{v0!r},{alpha!r},{t_tau!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_find_periodic(args) -> int:
    units = _Units(args.mu, args.du)
    r_m = args.r_m / units.du
    alpha = args.alpha * units.tu**2 / units.du
    v_m = analysis.find_periodic_v(
        r_m, alpha, (args.M, args.N), (args.bracket_lo, args.bracket_hi)
    )
    ctx = propagation.build_context(InitialState(r_m, v_m, 0.0, alpha))
    payload = {
        "v_m": units.speed_out(v_m),
        "winding_ratio": ctx.dtheta_period / (2.0 * math.pi),
        "T_t": units.time_out(ctx.T_t),
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=1) + "\n", args.out)
    else:
        _emit(f"v_m = {payload['v_m']!r}\n"
              f"winding_ratio = {payload['winding_ratio']!r}\n"
              f"T_t = {payload['T_t']!r}\n", args.out)
    return 0


def cmd_escape_alpha(args) -> int:
    units = _Units(args.mu, args.du)

    def family(alpha: float) -> InitialState:
        return InitialState(args.r0 / units.du,
                            args.v0 * units.tu / units.du,
                            math.radians(args.gamma0_deg), alpha)

    a_lo = args.alpha_lo * units.tu**2 / units.du
    a_hi = args.alpha_hi * units.tu**2 / units.du
    alpha_star = analysis.escape_alpha(family, a_lo, a_hi, tol=args.tol)
    out = alpha_star * units.du / units.tu**2
    if args.format == "json":
        _emit(json.dumps({"alpha_star": out}) + "\n", args.out)
    else:
        _emit(f"alpha_star = {out!r}\n", args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="radialorbit",
        description="Constant radial acceleration orbits in closed form",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", help="sample the trajectory over a span")
    _add_state_args(p)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--t-span", type=float, default=0.0,
                     help="physical-time span from the epoch")
    grp.add_argument("--tau-span", type=float, default=None,
                     help="pseudo-time span from the epoch")
    p.add_argument("--t0", type=float, default=0.0,
                   help="offset of the first sample from the epoch")
    p.add_argument("--samples", type=int, default=100)
    _add_output_args(p)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("classify", help="boundedness and root taxonomy")
    _add_state_args(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("period", help="radial periods of bounded motion")
    _add_state_args(p)
    p.add_argument("--kepler-curve", action="store_true",
                   help="emit t(tau) samples over one pseudo-period")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_period)

    p = sub.add_parser("period-sweep",
                       help="T_tau over an alpha grid for several v0")
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--v0-lo", type=float, default=0.5)
    p.add_argument("--v0-hi", type=float, default=1.5)
    p.add_argument("--v0-samples", type=int, default=5)
    p.add_argument("--alpha-lo", type=float, required=True)
    p.add_argument("--alpha-hi", type=float, required=True)
    p.add_argument("--alpha-samples", type=int, default=21)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--du", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_period_sweep)

    p = sub.add_parser("find-periodic",
                       help="pericenter speed closing the orbit (q = M/N)")
    p.add_argument("--r-m", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--bracket-lo", type=float, required=True)
    p.add_argument("--bracket-hi", type=float, required=True)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--du", type=float, default=1.0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_find_periodic)

    p = sub.add_parser("escape-alpha",
                       help="bisect the boundedness threshold in alpha")
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--v0", type=float, required=True)
    p.add_argument("--gamma0-deg", type=float, default=0.0)
    p.add_argument("--alpha-lo", type=float, required=True)
    p.add_argument("--alpha-hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--du", type=float, default=1.0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_escape_alpha)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConvergenceError, StepUnderflowError, WpInverseError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 3
    except (RadialOrbitError, ValueError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
