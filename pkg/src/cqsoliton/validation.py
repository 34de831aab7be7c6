"""Cross-checks of the module invariants, runnable from the CLI.

Each check measures a residual against its tolerance and reports both, so
a failing check shows how badly it failed.  Grids are kept small enough
for the whole suite to run in seconds.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bifurcation as bf
from . import closed_form as cf
from . import gradient_flow as gf
from . import spectrum as sp

THREADS_ENV = "CQ_SOLITON_THREADS"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _sample_specs():
    specs = []
    for eps in (0.1 * cf.SQRT3, 0.5 * cf.SQRT3, 0.9 * cf.SQRT3):
        kbar = cf.fold_point(eps)
        kmin = 0.25 * eps**2
        specs.append(cf.SolitonSpec(eps, kmin + 0.5 * (0.75 - kmin), cf.Branch.LOWER))
        specs.append(cf.SolitonSpec(eps, 0.75 + 0.5 * (kbar - 0.75), cf.Branch.LOWER))
        specs.append(cf.SolitonSpec(eps, 0.75 + 0.5 * (kbar - 0.75), cf.Branch.UPPER))
        specs.append(cf.front_spec(eps))
        specs.append(cf.fold_spec(eps))
    return specs


def check_jump_condition(derivative_fn=cf.eval_derivative):
    """u'(0+) = -(eps/2) u(0) on all sampled specs."""
    worst = 0.0
    for spec in _sample_specs():
        u0 = cf.eval_profile(spec, 0.0)
        worst = max(worst, abs(derivative_fn(spec, 0.0, side=+1) + 0.5 * spec.epsilon * u0))
        worst = max(worst, abs(derivative_fn(spec, 0.0, side=-1) - 0.5 * spec.epsilon * u0))
    return CheckResult("jump_condition", worst < 1e-9, worst, 1e-9)


def check_jump_fd_consistency(derivative_fn=cf.eval_derivative):
    """One-sided FD of the profile at +-h matches u'(0+-) to O(h)."""
    worst = 0.0
    for spec in _sample_specs():
        u0 = cf.eval_profile(spec, 0.0)
        for h in (1e-3, 1e-4):
            fd = (cf.eval_profile(spec, h) - u0) / h
            # FD of a one-sided limit differs by ~ (h/2) u''
            worst = max(worst, abs(fd - derivative_fn(spec, 0.0, side=+1)) / h)
    return CheckResult("jump_fd_consistency", worst < 5.0, worst, 5.0,
                       "O(h) constant of the one-sided difference")


def check_ode_residual():
    """u'' - k u + 2u^3 - u^5 = 0 away from x=0 with FD second derivative."""
    h = 1e-4
    worst = 0.0
    for spec in _sample_specs():
        for x in (0.3, 1.0, 3.0):
            u = cf.eval_profile(spec, x)
            d2 = (cf.eval_profile(spec, x + h) - 2.0 * u + cf.eval_profile(spec, x - h)) / h**2
            worst = max(worst, abs(d2 - spec.k * u + 2.0 * u**3 - u**5))
    return CheckResult("ode_residual", worst < 1e-7, worst, 1e-7)


def check_evenness():
    worst = 0.0
    for spec in _sample_specs():
        for x in (0.17, 1.3, 7.9):
            worst = max(worst, abs(cf.eval_profile(spec, x) - cf.eval_profile(spec, -x)))
    return CheckResult("evenness", worst == 0.0, worst, 0.0,
                       "exact: profiles evaluated via |x|")


def check_branch_merging():
    worst = 0.0
    for eps in (0.3, 0.5 * cf.SQRT3, 1.5):
        kbar = cf.fold_point(eps)
        fold = cf.fold_spec(eps)
        for br in (cf.Branch.LOWER, cf.Branch.UPPER):
            spec = cf.SolitonSpec(eps, kbar, br)
            for x in (0.0, 0.5, 2.0, 10.0):
                worst = max(worst, abs(cf.eval_profile(spec, x) - cf.eval_profile(fold, x)))
    return CheckResult("branch_merging", worst < 1e-8, worst, 1e-8)


def check_range_discipline():
    """Lower profiles with k < 3/4 stay below the positivity bound."""
    worst = -math.inf
    for eps in (0.3, 0.8):
        for k in (0.3, 0.5, 0.7):
            if k <= 0.25 * eps**2:
                continue
            bound = cf.tilde_bounds(k)[0]
            spec = cf.SolitonSpec(eps, k, cf.Branch.LOWER)
            for x in np.linspace(0.0, 20.0, 81):
                worst = max(worst, cf.eval_profile(spec, x) ** 2 - bound)
    return CheckResult("range_discipline", worst <= 1e-12, worst, 1e-12,
                       "max of u^2 - tilde_minus^2 over samples")


def check_mass_monotonicity():
    worst_violation = 0.0
    for eps in (0.3, 0.5 * cf.SQRT3):
        kbar = cf.fold_point(eps)
        kmin = 0.25 * eps**2
        ks = np.linspace(kmin + 1e-4, kbar - 1e-6, 100)
        masses = [bf.mass_squared(cf.SolitonSpec(eps, k, cf.Branch.LOWER))
                  for k in ks if abs(k - 0.75) > 1e-9]
        diffs = np.diff(masses)
        worst_violation = max(worst_violation, float(-np.min(diffs)))
        ks = np.linspace(0.75 + 1e-4, kbar - 1e-6, 100)
        masses = [bf.mass_squared(cf.SolitonSpec(eps, k, cf.Branch.UPPER)) for k in ks]
        diffs = -np.diff(masses)
        worst_violation = max(worst_violation, float(-np.min(diffs)))
    return CheckResult("mass_monotonicity", worst_violation <= 0.0,
                       worst_violation, 0.0, "largest wrong-way step")


def check_slope_consistency():
    """Exact slope vs centered finite differences of the mass."""
    worst = 0.0
    h = 1e-5
    for eps in (0.5 * cf.SQRT3,):
        kbar = cf.fold_point(eps)
        cases = [(0.4, cf.Branch.LOWER), (0.6, cf.Branch.LOWER),
                 (0.75 + 0.3 * (kbar - 0.75), cf.Branch.LOWER),
                 (0.75 + 0.3 * (kbar - 0.75), cf.Branch.UPPER),
                 (0.75 + 0.7 * (kbar - 0.75), cf.Branch.UPPER)]
        for k, br in cases:
            exact = bf.mass_sq_slope(cf.SolitonSpec(eps, k, br))
            fd = (bf._quadrature_mass_squared(cf.SolitonSpec(eps, k + h, br))
                  - bf._quadrature_mass_squared(cf.SolitonSpec(eps, k - h, br))) / (2.0 * h)
            worst = max(worst, abs(exact - fd) / abs(exact))
    return CheckResult("slope_fd_consistency", worst < 1e-5, worst, 1e-5)


def check_slope_matching():
    worst = 0.0
    for eps in (0.3, 0.8, 1.5):
        lim = bf.slope_limit_at_three_quarters(eps)
        for k in (0.75 - 1e-4, 0.75 + 1e-4):
            s = bf.mass_sq_slope(cf.SolitonSpec(eps, k, cf.Branch.LOWER))
            worst = max(worst, abs(s - lim) / lim)
    return CheckResult("slope_matching_at_3_4", worst < 0.01, worst, 0.01)


def check_bistability_window():
    ok = True
    for eps in (0.3, 0.5 * cf.SQRT3, 1.5):
        kbar = cf.fold_point(eps)
        for t in (0.2, 0.5, 0.8):
            k = 0.75 + t * (kbar - 0.75)
            ml = bf.mass(cf.SolitonSpec(eps, k, cf.Branch.LOWER))
            mu = bf.mass(cf.SolitonSpec(eps, k, cf.Branch.UPPER))
            ok = ok and mu > ml
    return CheckResult("bistability_window", ok, float(ok), 1.0,
                       "upper mass exceeds lower mass at shared k")


def _small_flow_setup():
    grid = gf.build_grid(-20.0, 20.0, 800)
    eps = 0.5 * cf.SQRT3
    spec = cf.SolitonSpec(eps, 0.5, cf.Branch.LOWER)
    exact = gf.sample_profile(grid, lambda x: cf.eval_profile(spec, x))
    return grid, eps, spec, exact


def check_renormalization():
    grid, eps, spec, exact = _small_flow_setup()
    cfg = gf.CngfConfig(dt=1e-3, mass_a=1.1)
    u = gf.default_initial_guess(grid, cfg.mass_a)
    worst = 0.0
    for _ in range(20):
        u = gf.cngf_step(u, cfg, eps)
        worst = max(worst, abs(u.mass() - cfg.mass_a))
    return CheckResult("mass_renormalization", worst < 1e-12, worst, 1e-12)


def check_energy_descent():
    grid, eps, spec, exact = _small_flow_setup()
    cfg = gf.CngfConfig(dt=1e-3, mass_a=exact.mass())
    u = gf.default_initial_guess(grid, cfg.mass_a)
    prev = gf.energy(u, eps)
    worst = -math.inf
    for _ in range(300):
        u = gf.cngf_step(u, cfg, eps)
        e = gf.energy(u, eps)
        worst = max(worst, e - prev)
        prev = e
    return CheckResult("energy_descent", worst <= 1e-10, worst, 1e-10,
                       "largest per-step energy increase")


def check_symmetry_preservation():
    grid, eps, spec, exact = _small_flow_setup()
    cfg = gf.CngfConfig(dt=1e-3, mass_a=1.0)
    u = gf.default_initial_guess(grid, cfg.mass_a)
    for _ in range(50):
        u = gf.cngf_step(u, cfg, eps)
    v = u.values
    worst = float(np.max(np.abs(v - v[::-1])))
    return CheckResult("symmetry_preservation", worst == 0.0, worst, 0.0,
                       "even init stays exactly even")


def check_discrete_jump_at_convergence():
    grid, eps, spec, exact = _small_flow_setup()
    cfg = gf.CngfConfig(dt=1e-3, mass_a=exact.mass(),
                        max_steps=30000, conv_tol=1e-7)
    res = gf.run_cngf(exact, cfg, eps)
    v, h, j0 = res.profile.values, grid.h, grid.j0
    jump = (v[j0 + 1] - v[j0]) / h - (v[j0] - v[j0 - 1]) / h
    resid = abs(jump + eps * v[j0])
    tol = 10.0 * h * eps * v[j0]
    return CheckResult("discrete_jump_condition", resid < tol, resid, tol,
                       "O(h) consistency of the converged kink")


def check_eigensolver_oracle():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(5):
        n = 50
        d = rng.standard_normal(n) * 3.0
        e = rng.standard_normal(n - 1)
        op = sp.LinearizedOperator(None, d, e)
        ours = sp.lowest_eigenvalues(op, 10)
        dense = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))
        worst = max(worst, float(np.max(np.abs(np.array(ours) - dense[:10]))))
    return CheckResult("eigensolver_vs_dense", worst < 1e-10, worst, 1e-10)


def check_sturm_count_consistency():
    grid = gf.build_grid(-30.0, 30.0, 1200)
    eps = 0.5 * cf.SQRT3
    ok = True
    for spec in (cf.SolitonSpec(eps, 0.5, cf.Branch.LOWER),
                 cf.SolitonSpec(eps, 0.9, cf.Branch.UPPER)):
        op = sp.assemble_operator(spec, grid)
        eigs = sp.lowest_eigenvalues(op, 5)
        counted = sum(1 for l in eigs if l < -op.tol_zero)
        ok = ok and counted == sp.sturm_count(op.diagonal, op.off_diagonal, -op.tol_zero)
    return CheckResult("sturm_count_consistency", ok, float(ok), 1.0)


def check_morse_constancy():
    grid = gf.build_grid(-30.0, 30.0, 1200)
    ok = True
    for eps in (0.5 * cf.SQRT3,):
        kbar = cf.fold_point(eps)
        kmin = 0.25 * eps**2
        for t in np.linspace(0.05, 0.95, 20):
            k = kmin + t * (kbar - 1e-3 - kmin)
            if abs(k - 0.75) < 1e-6:
                continue
            ok = ok and sp.morse_index(cf.SolitonSpec(eps, k, cf.Branch.LOWER), grid) == 1
        for t in np.linspace(0.05, 0.95, 20):
            k = 0.75 + t * (kbar - 1e-3 - 0.75)
            ok = ok and sp.morse_index(cf.SolitonSpec(eps, k, cf.Branch.UPPER), grid) == 0
    return CheckResult("morse_index_constancy", ok, float(ok), 1.0,
                       "20 interior k per branch, no spurious crossings")


ALL_CHECKS = [
    check_jump_condition,
    check_jump_fd_consistency,
    check_ode_residual,
    check_evenness,
    check_branch_merging,
    check_range_discipline,
    check_mass_monotonicity,
    check_slope_consistency,
    check_slope_matching,
    check_bistability_window,
    check_renormalization,
    check_energy_descent,
    check_symmetry_preservation,
    check_discrete_jump_at_convergence,
    check_eigensolver_oracle,
    check_sturm_count_consistency,
    check_morse_constancy,
]


def thread_count():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_all(checks=None):
    checks = ALL_CHECKS if checks is None else checks
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda c: c(), checks))
    return [c() for c in checks]
