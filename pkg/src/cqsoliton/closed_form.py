"""Exact bound-state profiles of u'' - k u + eps*delta(x) u + 2u^3 - u^5 = 0.

All positive, decaying solutions are available in elementary closed form.
For eps in (0, sqrt(3)) the admissible propagation constants split into two
regimes separated by k = 3/4:

  regime A  (eps^2/4 < k < 3/4):  a single pinned soliton (lower branch),
            obtained by shifting the free-space soliton by xi > 0;
  regime B  (3/4 < k < kbar):     two coexisting solitons (lower/upper),
            kbar = 3/4 + eps^2/4, parametrized by an integration constant c.

The k = 3/4 separatrix (front) and the k = kbar turning point (fold) have
their own, simpler expressions.
"""

import math
from dataclasses import dataclass
from enum import Enum

SQRT3 = math.sqrt(3.0)
K_FRONT = 0.75

# |k - 3/4| below this is treated as the front case: both regime formulas
# have a removable singularity there.
FRONT_TOL = 1e-12

# Radicands in [-RADICAND_TOL, 0) are floating-point noise at branch
# endpoints and get clamped to zero.
RADICAND_TOL = 1e-12


class Branch(str, Enum):
    LOWER = "lower"
    UPPER = "upper"
    FRONT = "front"
    FOLD = "fold"


def check_epsilon(epsilon):
    """Validate the delta-potential coupling strength."""
    if not (0.0 < epsilon < SQRT3):
        raise ValueError(
            f"epsilon must lie in (0, sqrt(3)); got {epsilon!r}")
    return float(epsilon)


def fold_point(epsilon):
    """Turning point kbar = 3/4 + eps^2/4 where the two branches merge."""
    epsilon = check_epsilon(epsilon)
    return 0.75 + 0.25 * epsilon**2


def _clamped_sqrt(r, what="radicand"):
    if r < -RADICAND_TOL:
        raise ValueError(f"negative {what}: {r!r}")
    return math.sqrt(max(r, 0.0))


@dataclass(frozen=True)
class SolitonSpec:
    """One exact bound state: coupling, propagation constant, branch tag."""

    epsilon: float
    k: float
    branch: Branch

    def __post_init__(self):
        eps = check_epsilon(self.epsilon)
        branch = Branch(self.branch)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "branch", branch)
        object.__setattr__(self, "k", float(self.k))
        kbar = 0.75 + 0.25 * eps**2
        k = self.k
        if branch is Branch.FRONT:
            if abs(k - K_FRONT) > FRONT_TOL:
                raise ValueError(
                    f"front branch fixes k = 3/4; got k={k!r}")
            object.__setattr__(self, "k", K_FRONT)
        elif branch is Branch.FOLD:
            if abs(k - kbar) > 1e-9 * kbar:
                raise ValueError(
                    f"fold branch fixes k = kbar = {kbar!r}; got k={k!r}")
            object.__setattr__(self, "k", kbar)
        elif branch is Branch.LOWER:
            if not (0.25 * eps**2 < k <= kbar):
                raise ValueError(
                    f"k must lie in (eps^2/4, kbar] = "
                    f"({0.25 * eps**2!r}, {kbar!r}] for branch lower; got k={k!r}")
            if abs(k - K_FRONT) <= FRONT_TOL:
                raise ValueError(
                    "lower branch is singular at k = 3/4; use branch front")
        elif branch is Branch.UPPER:
            if not (K_FRONT < k <= kbar):
                raise ValueError(
                    f"k must lie in (3/4, kbar] = (0.75, {kbar!r}] "
                    f"for branch upper; got k={k!r}")

    @property
    def kbar(self):
        return 0.75 + 0.25 * self.epsilon**2


def front_spec(epsilon):
    return SolitonSpec(epsilon, K_FRONT, Branch.FRONT)


def fold_spec(epsilon):
    return SolitonSpec(epsilon, fold_point(epsilon), Branch.FOLD)


def peak_amplitude_squared(spec):
    """Peak value u(0)^2 = (3/2)(1 -/+ sqrt(1 - (4/3)(k - eps^2/4))).

    '-' on the lower branch (and front), '+' on the upper branch; both
    signs give 3/2 at the fold.
    """
    k, eps = spec.k, spec.epsilon
    s = _clamped_sqrt(1.0 - (4.0 / 3.0) * (k - 0.25 * eps**2),
                      "peak amplitude discriminant")
    if spec.branch in (Branch.UPPER, Branch.FOLD):
        return 1.5 * (1.0 + s)
    return 1.5 * (1.0 - s)


def tilde_bounds(k):
    """Positivity bounds (u~_-^2, u~_+^2) = (3/2)(1 -/+ sqrt(1-4k/3)).

    Decaying profiles with k < 3/4 must satisfy u(x)^2 <= u~_-^2; the two
    bounds merge at k = 3/4 and cease to be real beyond it.
    """
    if not (0.0 < k <= K_FRONT):
        raise ValueError(f"k must lie in (0, 3/4]; got {k!r}")
    s = _clamped_sqrt(1.0 - 4.0 * k / 3.0)
    return 1.5 * (1.0 - s), 1.5 * (1.0 + s)


def shift_xi(epsilon, k):
    """Pinning shift xi of the regime-A soliton, from the jump condition.

    exp(2 sqrt(k) xi) = [eps + eps*sqrt(1 + (4k/eps^2 - 1)(1 - 4k/3))]
                        / [2 (sqrt(k) - eps/2) sqrt(1 - 4k/3)].
    """
    eps = check_epsilon(epsilon)
    if not (0.25 * eps**2 < k < K_FRONT):
        raise ValueError(
            f"k must lie in (eps^2/4, 3/4) = ({0.25 * eps**2!r}, 0.75); "
            f"got k={k!r}")
    sk = math.sqrt(k)
    s = math.sqrt(1.0 - 4.0 * k / 3.0)
    num = eps + eps * math.sqrt(1.0 + (4.0 * k / eps**2 - 1.0) * (1.0 - 4.0 * k / 3.0))
    den = 2.0 * (sk - 0.5 * eps) * s
    return math.log(num / den) / (2.0 * sk)


def integration_constant_c(epsilon, k, branch):
    """Integration constant c of the regime-B profile, matched to u(0)^2.

    Evaluated through log of the closed-form expression for exp(sqrt(k) c)
    to avoid cancellation near the fold.  Valid for 3/4 < k <= kbar.
    """
    eps = check_epsilon(epsilon)
    branch = Branch(branch)
    kbar = 0.75 + 0.25 * eps**2
    if not (K_FRONT < k <= kbar):
        raise ValueError(
            f"k must lie in (3/4, kbar] = (0.75, {kbar!r}]; got k={k!r}")
    if branch not in (Branch.LOWER, Branch.UPPER):
        raise ValueError(f"branch must be lower or upper; got {branch!r}")
    sk = math.sqrt(k)
    s4 = _clamped_sqrt(3.0 + eps**2 - 4.0 * k, "fold-distance radicand")
    if branch is Branch.LOWER:
        num = 3.0 - SQRT3 * s4 + 2.0 * eps * sk - 4.0 * k
        den = -3.0 + SQRT3 * s4 + 2.0 * SQRT3 * sk - 2.0 * sk * s4
    else:
        num = -3.0 - SQRT3 * s4 - 2.0 * eps * sk + 4.0 * k
        den = 3.0 + SQRT3 * s4 - 2.0 * SQRT3 * sk - 2.0 * sk * s4
    ratio = num / den
    if not ratio > 0.0:
        raise ValueError(
            f"non-positive radicand in integration constant at "
            f"(eps={eps!r}, k={k!r}, branch={branch.value}): {ratio!r}")
    # e^{sqrt(k) c} = sqrt(num/den)
    return math.log(ratio) / (2.0 * sk)


def free_space_profile(k, x):
    """Free-space (eps = 0) soliton sqrt(2k / (1 + sqrt(1-4k/3) cosh(2 sqrt(k) x)))."""
    if not (0.0 < k < K_FRONT):
        raise ValueError(f"k must lie in (0, 3/4); got {k!r}")
    s = math.sqrt(1.0 - 4.0 * k / 3.0)
    return math.sqrt(2.0 * k / (1.0 + s * math.cosh(2.0 * math.sqrt(k) * abs(x))))


def _eval_regime_a(eps, k, ax):
    s = math.sqrt(1.0 - 4.0 * k / 3.0)
    xi = shift_xi(eps, k)
    return math.sqrt(2.0 * k / (1.0 + s * math.cosh(2.0 * math.sqrt(k) * (ax + xi))))


def _eval_regime_b(eps, k, branch, ax):
    c = integration_constant_c(eps, k, branch)
    sk = math.sqrt(k)
    theta = sk * (ax - c)
    ep, em = math.exp(theta), math.exp(-theta)
    q = 2.0 * math.sqrt(k / 3.0)
    denom = (ep + em) * ((q + 1.0) * ep - (q - 1.0) * em)
    if denom <= 0.0:
        raise ValueError(
            f"profile undefined at |x|={ax!r} for (eps={eps!r}, k={k!r}, "
            f"branch={branch})")
    return 2.0 * math.sqrt(k / denom)


def _eval_front(eps, ax):
    return math.sqrt(1.5) / math.sqrt(
        1.0 + eps / (SQRT3 - eps) * math.exp(SQRT3 * ax))


def _eval_fold(eps, ax):
    r = math.sqrt(3.0 + eps**2)
    denom = 3.0 + eps**2 * math.cosh(r * ax) + eps * r * math.sinh(r * ax)
    return math.sqrt(1.5) * math.sqrt((3.0 + eps**2) / denom)


def eval_profile(spec, x):
    """Profile value u(x) > 0; evaluated via |x| so evenness is exact."""
    ax = abs(x)
    eps, k, branch = spec.epsilon, spec.k, spec.branch
    if branch is Branch.FRONT:
        return _eval_front(eps, ax)
    if branch is Branch.FOLD:
        return _eval_fold(eps, ax)
    if k < K_FRONT:
        return _eval_regime_a(eps, k, ax)
    return _eval_regime_b(eps, k, branch, ax)


def eval_derivative(spec, x, side=0):
    """u'(x) = -sgn(x) u sqrt(u^4/3 - u^2 + k) for x != 0.

    The two-sided derivative does not exist at x = 0; pass side=+1 or -1
    for the one-sided limit u'(0+-) = -/+ (eps/2) u(0).
    """
    if x == 0.0:
        if side == 0:
            raise ValueError("u' is discontinuous at x=0; pass side=+1 or -1")
        sgn = 1.0 if side > 0 else -1.0
    else:
        sgn = math.copysign(1.0, x)
    u = eval_profile(spec, x)
    rad = u**4 / 3.0 - u**2 + spec.k
    return -sgn * u * _clamped_sqrt(rad, "derivative radicand")


def first_integral_residual(spec, x):
    """Defect of (u')^2 - k u^2 + u^4 - u^6/3; vanishes on exact profiles."""
    if x == 0.0:
        raise ValueError("first integral holds only away from x=0")
    u = eval_profile(spec, x)
    du = eval_derivative(spec, x)
    return du**2 - spec.k * u**2 + u**4 - u**6 / 3.0
