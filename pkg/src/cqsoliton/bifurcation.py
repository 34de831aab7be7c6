"""Masses, exact slopes and the full bifurcation curve S = S- u {fold} u S+.

The squared L2 norm has a closed form sqrt(3) log(phi_eps(k)) on the lower
branch for k < 3/4; elsewhere it is computed by adaptive quadrature of the
profile with an analytic exponential-tail bound.  The slope d||u||^2/dk is
available in closed form on both sides of k = 3/4 and is strictly positive
on the lower branch, strictly negative on the upper one, which makes the
mass -> k inversion a bracketed monotone root-finding problem.
"""

import math
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import brentq

from .closed_form import (
    SQRT3,
    K_FRONT,
    FRONT_TOL,
    Branch,
    SolitonSpec,
    check_epsilon,
    eval_profile,
    fold_point,
    fold_spec,
    integration_constant_c,
)

# Relative endpoint guard for curve tracing: slopes diverge at kbar and
# masses diverge at 3/4+, so the singular points are never sampled.
ENDPOINT_GUARD = 1e-6


@dataclass(frozen=True)
class BifurcationSample:
    """One point (k, ||u||_L2, d||u||^2/dk, branch) on the solution curve."""

    k: float
    mass: float
    mass_sq_slope: float
    branch: Branch


@dataclass(frozen=True)
class CurveTrace:
    epsilon: float
    samples: tuple


def phi(epsilon, k):
    """Mass generator phi_eps(k) for k < 3/4: ||u||^2 = sqrt(3) log phi."""
    eps = check_epsilon(epsilon) if epsilon > 0 else float(epsilon)
    sk = math.sqrt(k)
    r = math.sqrt(3.0 * eps**2 + (4.0 * k - eps**2) * (3.0 - 4.0 * k))
    num = SQRT3 * eps + r + (SQRT3 + 2.0 * sk) * (2.0 * sk - eps)
    den = SQRT3 * eps + r + (SQRT3 - 2.0 * sk) * (2.0 * sk - eps)
    return num / den


def phi_prime(epsilon, k):
    """d(phi_eps)/dk, positive on (eps^2/4, 3/4)."""
    eps = float(epsilon)
    sk = math.sqrt(k)
    r = math.sqrt(3.0 * eps**2 + (4.0 * k - eps**2) * (3.0 - 4.0 * k))
    den_inner = SQRT3 * eps + r + (SQRT3 - 2.0 * sk) * (2.0 * sk - eps)
    num = SQRT3 * r + 2.0 * sk * (3.0 + eps**2 - 2.0 * eps * sk)
    return 8.0 * sk * num / (r * den_inner**2)


def _quadrature_mass_squared(spec):
    """2 * integral of u^2 over (0, inf), tail bounded via e^{-2 sqrt(k) x}."""
    sk = math.sqrt(spec.k)
    cutoff = 40.0 / sk
    if spec.branch in (Branch.LOWER, Branch.UPPER) and spec.k > K_FRONT:
        # regime-B profiles carry a plateau out to |x| ~ c
        c = integration_constant_c(spec.epsilon, spec.k, spec.branch)
        cutoff += max(c, 0.0)
    val, _ = quad(lambda x: eval_profile(spec, x) ** 2, 0.0, cutoff,
                  epsabs=1e-13, epsrel=1e-12, limit=200)
    tail = eval_profile(spec, cutoff) ** 2 / (2.0 * sk)
    return 2.0 * (val + tail)


def mass_squared(spec):
    """Squared L2 norm of the profile.

    Closed form sqrt(3) log(phi) on the lower branch for k < 3/4;
    quadrature with certified truncation below 1e-12 otherwise (no
    tractable closed norm is known for k >= 3/4).
    """
    if spec.branch is Branch.LOWER and spec.k < K_FRONT:
        return SQRT3 * math.log(phi(spec.epsilon, spec.k))
    return _quadrature_mass_squared(spec)


def mass(spec):
    """L2 norm ||u||."""
    return math.sqrt(mass_squared(spec))


def mass_sq_slope(spec):
    """Exact d||u||^2/dk; diverges at k = 3/4 (upper) and k = kbar (both)."""
    k, eps = spec.k, spec.epsilon
    kbar = fold_point(eps)
    if abs(k - K_FRONT) <= FRONT_TOL or abs(k - kbar) <= FRONT_TOL * kbar:
        raise ValueError(
            f"slope is singular at k = 3/4 and k = kbar; got k={k!r}")
    if spec.branch is Branch.FOLD:
        raise ValueError("slope diverges at the fold")
    if k < K_FRONT:
        return SQRT3 * phi_prime(eps, k) / phi(eps, k)
    s4 = math.sqrt(3.0 + eps**2 - 4.0 * k)
    if spec.branch is Branch.LOWER:
        return (2.0 * SQRT3 * eps / s4 - 3.0 / math.sqrt(k)) / (4.0 * k - 3.0)
    return -(2.0 * SQRT3 * eps / s4 + 3.0 / math.sqrt(k)) / (4.0 * k - 3.0)


def slope_limit_at_three_quarters(epsilon):
    """Common two-sided limit sqrt(3)(1/eps^2 + 1/3) of the lower slope at k=3/4."""
    eps = check_epsilon(epsilon)
    return SQRT3 * (1.0 / eps**2 + 1.0 / 3.0)


def trace_curve(epsilon, n_samples):
    """Sample the whole curve: lower branch (k increasing), fold, upper
    branch (k decreasing toward 3/4).  Masses increase strictly along the
    curve parameter.
    """
    eps = check_epsilon(epsilon)
    if n_samples < 8:
        raise ValueError(f"n_samples must be >= 8; got {n_samples!r}")
    k_min = 0.25 * eps**2
    kbar = fold_point(eps)
    delta = ENDPOINT_GUARD * (kbar - k_min)

    n_lower = n_samples // 2
    n_upper = n_samples - n_lower - 1

    samples = []
    for i in range(n_lower):
        t = i / (n_lower - 1)
        k = (k_min + delta) + t * ((kbar - delta) - (k_min + delta))
        if abs(k - K_FRONT) <= FRONT_TOL:
            k += 2.0 * FRONT_TOL
        spec = SolitonSpec(eps, k, Branch.LOWER)
        samples.append(BifurcationSample(
            k, mass(spec), mass_sq_slope(spec), Branch.LOWER))

    fspec = fold_spec(eps)
    samples.append(BifurcationSample(
        kbar, mass(fspec), math.nan, Branch.FOLD))

    for i in range(n_upper):
        t = i / (n_upper - 1)
        k = (kbar - delta) + t * ((K_FRONT + delta) - (kbar - delta))
        spec = SolitonSpec(eps, k, Branch.UPPER)
        samples.append(BifurcationSample(
            k, mass(spec), mass_sq_slope(spec), Branch.UPPER))

    return CurveTrace(eps, tuple(samples))


def solve_k_for_mass(epsilon, target_mass, branch):
    """Invert mass -> k on one branch by bracketed root-finding.

    Monotone on each branch; |mass(k) - target| is driven below 1e-10
    (away from the singular endpoints) by Brent iteration on the squared
    masses followed by a Newton polish with the exact slope.
    """
    eps = check_epsilon(epsilon)
    branch = Branch(branch)
    if branch not in (Branch.LOWER, Branch.UPPER):
        raise ValueError(f"branch must be lower or upper; got {branch!r}")
    if target_mass <= 0.0:
        raise ValueError(f"target_mass must be positive; got {target_mass!r}")
    kbar = fold_point(eps)
    k_min = 0.25 * eps**2
    fold_mass = mass(fold_spec(eps))
    target_sq = target_mass**2

    def f(k):
        return mass_squared(SolitonSpec(eps, k, branch)) - target_sq

    if branch is Branch.LOWER:
        if target_mass >= fold_mass:
            raise ValueError(
                f"target_mass {target_mass!r} is outside the lower branch "
                f"range (0, {fold_mass!r}) (fold mass)")
        lo = k_min * (1.0 + 1e-13) + 1e-300
        # widen toward the bifurcation point until the target is bracketed
        while f(lo) > 0.0:
            lo = k_min + 0.1 * (lo - k_min)
            if lo - k_min < 1e-15 * max(k_min, 1.0):
                raise ValueError(
                    f"target_mass {target_mass!r} below attainable range")
        hi = kbar
    else:
        if target_mass <= fold_mass:
            raise ValueError(
                f"target_mass {target_mass!r} is outside the upper branch "
                f"range ({fold_mass!r}, inf) (fold mass)")
        lo = K_FRONT + ENDPOINT_GUARD * (kbar - k_min)
        while f(lo) < 0.0:
            lo = K_FRONT + 0.1 * (lo - K_FRONT)
            if lo - K_FRONT < 1e-14:
                raise ValueError(
                    f"target_mass {target_mass!r} too large to bracket")
        hi = kbar

    k = brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16)

    # one Newton step with the exact slope, when it is defined
    if (abs(k - K_FRONT) > 1e-9 and kbar - k > 1e-9):
        spec = SolitonSpec(eps, k, branch)
        slope = mass_sq_slope(spec)
        if slope != 0.0:
            k_new = k - (mass_squared(spec) - target_sq) / slope
            if lo < k_new < hi and abs(k_new - K_FRONT) > FRONT_TOL:
                k = k_new
    return k
