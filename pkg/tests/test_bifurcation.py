import math

import numpy as np
import pytest

from cqsoliton import bifurcation as bf
from cqsoliton import closed_form as cf


def test_closed_form_mass_matches_quadrature():
    for eps in (0.3, 0.5 * cf.SQRT3, 1.5):
        for k in (0.3, 0.5, 0.7):
            if k <= 0.25 * eps**2:
                continue
            spec = cf.SolitonSpec(eps, k, cf.Branch.LOWER)
            closed = cf.SQRT3 * math.log(bf.phi(eps, k))
            quad = bf._quadrature_mass_squared(spec)
            assert abs(closed - quad) < 1e-8


def test_mass_positive_and_finite():
    eps = 0.5 * cf.SQRT3
    kbar = cf.fold_point(eps)
    for spec in (cf.SolitonSpec(eps, 0.4, cf.Branch.LOWER),
                 cf.SolitonSpec(eps, 0.8, cf.Branch.UPPER),
                 cf.front_spec(eps),
                 cf.fold_spec(eps),
                 cf.SolitonSpec(eps, kbar, cf.Branch.LOWER)):
        m = bf.mass(spec)
        assert math.isfinite(m) and m > 0.0


def test_slope_matches_finite_differences():
    eps = 0.5 * cf.SQRT3
    kbar = cf.fold_point(eps)
    h = 1e-5
    cases = [(0.45, cf.Branch.LOWER),
             (0.75 + 0.4 * (kbar - 0.75), cf.Branch.LOWER),
             (0.75 + 0.4 * (kbar - 0.75), cf.Branch.UPPER)]
    for k, br in cases:
        exact = bf.mass_sq_slope(cf.SolitonSpec(eps, k, br))
        fd = (bf.mass_squared(cf.SolitonSpec(eps, k + h, br))
              - bf.mass_squared(cf.SolitonSpec(eps, k - h, br))) / (2.0 * h)
        assert abs(exact - fd) / abs(exact) < 1e-5


def test_slope_signs():
    eps = 0.8
    kbar = cf.fold_point(eps)
    assert bf.mass_sq_slope(cf.SolitonSpec(eps, 0.5, cf.Branch.LOWER)) > 0.0
    k = 0.75 + 0.5 * (kbar - 0.75)
    assert bf.mass_sq_slope(cf.SolitonSpec(eps, k, cf.Branch.LOWER)) > 0.0
    assert bf.mass_sq_slope(cf.SolitonSpec(eps, k, cf.Branch.UPPER)) < 0.0


def test_slope_rejects_singular_points():
    eps = 0.8
    with pytest.raises(ValueError):
        bf.mass_sq_slope(cf.fold_spec(eps))
    with pytest.raises(ValueError):
        bf.mass_sq_slope(cf.SolitonSpec(eps, cf.fold_point(eps), cf.Branch.LOWER))


def test_two_sided_slope_limit_at_front():
    for eps in (0.3, 0.8, 1.5):
        lim = bf.slope_limit_at_three_quarters(eps)
        assert math.isclose(lim, cf.SQRT3 * (1.0 / eps**2 + 1.0 / 3.0))
        for k in (0.75 - 1e-4, 0.75 + 1e-4):
            s = bf.mass_sq_slope(cf.SolitonSpec(eps, k, cf.Branch.LOWER))
            assert abs(s - lim) / lim < 0.01


def test_trace_curve_structure():
    eps = 0.5 * cf.SQRT3
    trace = bf.trace_curve(eps, 41)
    branches = [s.branch for s in trace.samples]
    n_fold = branches.count(cf.Branch.FOLD)
    assert n_fold == 1
    i_fold = branches.index(cf.Branch.FOLD)
    assert all(b is cf.Branch.LOWER for b in branches[:i_fold])
    assert all(b is cf.Branch.UPPER for b in branches[i_fold + 1:])
    assert math.isnan(trace.samples[i_fold].mass_sq_slope)
    # k up the lower branch, then down the upper one
    ks = [s.k for s in trace.samples]
    assert all(np.diff(ks[:i_fold + 1]) > 0)
    assert all(np.diff(ks[i_fold:]) < 0)
    # mass strictly increases along the whole curve parameter
    masses = [s.mass for s in trace.samples]
    assert all(np.diff(masses) > 0)


def test_trace_curve_rejects_tiny_sample_counts():
    with pytest.raises(ValueError):
        bf.trace_curve(0.5, 4)


def test_solve_k_for_mass_round_trip():
    eps = 0.8
    kbar = cf.fold_point(eps)
    for k, br in ((0.4, cf.Branch.LOWER), (0.72, cf.Branch.LOWER),
                  (0.75 + 0.3 * (kbar - 0.75), cf.Branch.LOWER),
                  (0.75 + 0.3 * (kbar - 0.75), cf.Branch.UPPER)):
        target = bf.mass(cf.SolitonSpec(eps, k, br))
        k_rec = bf.solve_k_for_mass(eps, target, br)
        assert abs(bf.mass(cf.SolitonSpec(eps, k_rec, br)) - target) < 1e-10


def test_solve_k_for_mass_range_errors():
    eps = 0.8
    fold_mass = bf.mass(cf.fold_spec(eps))
    with pytest.raises(ValueError, match="fold mass"):
        bf.solve_k_for_mass(eps, fold_mass + 0.5, cf.Branch.LOWER)
    with pytest.raises(ValueError, match="fold mass"):
        bf.solve_k_for_mass(eps, fold_mass - 0.5, cf.Branch.UPPER)
    with pytest.raises(ValueError):
        bf.solve_k_for_mass(eps, -1.0, cf.Branch.LOWER)
    with pytest.raises(ValueError):
        bf.solve_k_for_mass(eps, 1.0, cf.Branch.FOLD)


def test_branch_mass_ranges_are_disjoint():
    """Lower masses fill (0, fold mass); upper masses exceed it, so a mass
    value determines the solution uniquely."""
    eps = 0.5 * cf.SQRT3
    kbar = cf.fold_point(eps)
    fold_mass = bf.mass(cf.fold_spec(eps))
    k = 0.75 + 0.5 * (kbar - 0.75)
    assert bf.mass(cf.SolitonSpec(eps, k, cf.Branch.LOWER)) < fold_mass
    assert bf.mass(cf.SolitonSpec(eps, k, cf.Branch.UPPER)) > fold_mass


def test_upper_mass_diverges_toward_front():
    eps = 0.8
    m1 = bf.mass(cf.SolitonSpec(eps, 0.75 + 1e-3, cf.Branch.UPPER))
    m2 = bf.mass(cf.SolitonSpec(eps, 0.75 + 1e-5, cf.Branch.UPPER))
    assert m2 > m1 > bf.mass(cf.fold_spec(eps))
