"""Closed-form propagation of constant radial acceleration orbits.

A point mass under inverse-square gravity plus a constant radial
acceleration admits an exact solution in terms of the Weierstrass
elliptic functions.  This package evaluates that solution (radius, polar
angle and the radial Kepler equation relating pseudo-time to time),
classifies bounded/unbounded motion, computes radial periods and searches
for closed orbits, with an independent Runge-Kutta/quadrature oracle used
by the test suite.
"""

from .analysis import (
    BoundednessReport,
    PeriodInfo,
    bounded_condition,
    boundedness_from_state,
    escape_alpha,
    find_periodic_v,
    pericenter_start_conditions,
    period_info,
    pseudo_period,
    true_period,
    true_period_implicit,
    winding_increment,
)
from .dynamics import (
    ConservedQuantities,
    CubicF,
    InitialState,
    MotionClass,
    MotionTag,
    build_f,
    classify_region,
    conserved,
    pericenter,
)
from .elliptic import carlson_rf, elliptic_K
from .propagation import (
    PropagatedState,
    SolutionContext,
    TrajectorySample,
    build_context,
    invert_kepler,
    propagate,
    propagate_ctx,
    r_of_tau,
    r_of_tau_general,
    r_prime_of_tau,
    radial_kepler,
    tau0_from_r0,
    theta_of_tau,
    theta_phase,
    time_of_flight_implicit,
)
from .weierstrass import GRoots, HalfPeriods, Invariants, Lattice, g_roots, half_periods

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
