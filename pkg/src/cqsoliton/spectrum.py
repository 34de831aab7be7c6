"""Linearized operator T = -d^2/dx^2 + k - (6 - 5u^2)u^2 - eps*delta(x).

Discretized as a symmetric tridiagonal matrix on the interior nodes with
Dirichlet ends; the delta is lumped as -eps/h on the diagonal at the node
x = 0, which keeps the matrix symmetric (required for Sturm counting) and
is second-order accurate in the eigenvalues.  Eigenvalues come from
Sturm-sequence bisection, eigenvectors from inverse iteration.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .closed_form import (
    Branch,
    SolitonSpec,
    check_epsilon,
    eval_derivative,
    eval_profile,
    fold_point,
    fold_spec,
)
from .bifurcation import mass_sq_slope, slope_limit_at_three_quarters

MAX_EIGENVALUES = 10


@dataclass(frozen=True)
class LinearizedOperator:
    """Symmetric tridiagonal representation on the interior grid nodes."""

    grid: object
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    spec: SolitonSpec | None = None

    @property
    def tol_zero(self):
        # matches the discretization error of near-zero eigenvalues
        return 10.0 * self.grid.h**2


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple
    morse_index: int
    zero_mode_gap: float
    kernel_overlap: float = math.nan


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    mechanism: str | None
    details: dict = field(default_factory=dict)


def assemble_tridiagonal(grid, k, epsilon, u_values):
    """Operator matrix for an arbitrary profile sampled on the grid nodes."""
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be non-negative; got {epsilon!r}")
    u = np.asarray(u_values, dtype=float)
    if u.shape != (grid.J + 1,):
        raise ValueError(
            f"profile must have length J+1 = {grid.J + 1}; got {u.shape}")
    h = grid.h
    usq = u[1:-1] ** 2
    diag = 2.0 / h**2 + k - (6.0 - 5.0 * usq) * usq
    diag[grid.j0 - 1] -= epsilon / h
    off = np.full(grid.J - 2, -1.0 / h**2)
    return LinearizedOperator(grid, diag, off, None)


def assemble_operator(spec, grid, profile_override=None):
    """Operator linearized around the exact profile of ``spec``.

    ``profile_override`` substitutes an arbitrary sampled profile (e.g.
    zero) while keeping (k, eps) from the spec.
    """
    if profile_override is None:
        u = np.array([eval_profile(spec, x) for x in grid.nodes()])
    else:
        u = np.asarray(profile_override, dtype=float)
    op = assemble_tridiagonal(grid, spec.k, spec.epsilon, u)
    return LinearizedOperator(grid, op.diagonal, op.off_diagonal, spec)


def sturm_count(diagonal, off_diagonal, lam):
    """Number of eigenvalues strictly below ``lam``.

    Counts sign changes of the leading-principal-minor recurrence of
    T - lam*I (LDL^T pivots).
    """
    d = diagonal
    e = off_diagonal
    n = len(d)
    count = 0
    t = d[0] - lam
    if t < 0.0:
        count += 1
    for i in range(1, n):
        if t == 0.0:
            t = 1e-300
        t = (d[i] - lam) - e[i - 1] ** 2 / t
        if t < 0.0:
            count += 1
    return count


def lowest_eigenvalues(op, m):
    """The m smallest eigenvalues, each to absolute accuracy 1e-10, by
    Sturm-sequence bisection."""
    if not (1 <= m <= MAX_EIGENVALUES):
        raise ValueError(f"m must lie in [1, {MAX_EIGENVALUES}]; got {m!r}")
    d, e = op.diagonal, op.off_diagonal
    n = len(d)
    if m > n:
        raise ValueError(f"matrix has only {n} eigenvalues; requested {m}")
    radius = np.zeros(n)
    radius[0] = abs(e[0]) if n > 1 else 0.0
    if n > 1:
        radius[-1] = abs(e[-1])
        radius[1:-1] = np.abs(e[:-1]) + np.abs(e[1:])
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    out = []
    for i in range(1, m + 1):
        a, b = lo, hi
        while b - a > 1e-11:
            mid = 0.5 * (a + b)
            if sturm_count(d, e, mid) >= i:
                b = mid
            else:
                a = mid
        lam = 0.5 * (a + b)
        out.append(lam)
        lo = a  # eigenvalues are returned in ascending order
    return out


def eigenvector(op, lam, iterations=4, seed=0):
    """Inverse iteration for the eigenvector at (an approximation of) lam."""
    d, e = op.diagonal, op.off_diagonal
    n = len(d)
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[2, :-1] = e
    shift = lam + 1e-10 * max(1.0, abs(lam))
    ab[1, :] = d - shift
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(iterations):
        v = solve_banded((1, 1), ab, v, check_finite=False)
        v /= np.linalg.norm(v)
    # sign-fix: non-negative at the point of largest magnitude
    if v[int(np.argmax(np.abs(v)))] < 0.0:
        v = -v
    return v


def morse_index(spec, grid):
    """Count of eigenvalues below -tol_zero (tol_zero = 10 h^2)."""
    op = assemble_operator(spec, grid)
    return sturm_count(op.diagonal, op.off_diagonal, -op.tol_zero)


def fold_kernel_check(epsilon, grid, m=3):
    """Verify the fold kernel: smallest eigenvalue O(h^2) close to zero,
    eigenvector aligned with |u'| of the fold profile."""
    eps = check_epsilon(epsilon)
    spec = fold_spec(eps)
    op = assemble_operator(spec, grid)
    eigs = lowest_eigenvalues(op, m)
    lam0 = eigs[0]
    v = eigenvector(op, lam0)
    x = grid.nodes()[1:-1]
    eta = np.array([
        abs(eval_derivative(spec, xi)) if xi != 0.0
        else 0.5 * eps * eval_profile(spec, 0.0)
        for xi in x])
    overlap = abs(float(np.dot(v, eta))) / (np.linalg.norm(v) * np.linalg.norm(eta))
    return SpectrumReport(
        eigenvalues=tuple(eigs),
        morse_index=sturm_count(op.diagonal, op.off_diagonal, -op.tol_zero),
        zero_mode_gap=min(abs(l) for l in eigs),
        kernel_overlap=overlap,
    )


def spectrum_report(spec, grid, m=5):
    op = assemble_operator(spec, grid)
    eigs = lowest_eigenvalues(op, m)
    return SpectrumReport(
        eigenvalues=tuple(eigs),
        morse_index=sturm_count(op.diagonal, op.off_diagonal, -op.tol_zero),
        zero_mode_gap=min(abs(l) for l in eigs),
    )


def f_integral(epsilon, cutoff_scale=1.0):
    """Fold-direction eigenvalue-crossing integral
    f(eps) = 2 * int_0^inf (5 u^2 - 3) u |u'|^3 dx at the fold profile;
    positivity makes the principal eigenvalue cross zero transversally."""
    from scipy.integrate import quad

    eps = check_epsilon(epsilon)
    spec = fold_spec(eps)
    sk = math.sqrt(spec.k)

    def integrand(x):
        u = eval_profile(spec, x)
        du = abs(eval_derivative(spec, x))
        return (5.0 * u**2 - 3.0) * u * du**3

    cutoff = cutoff_scale * 30.0 / sk
    val, _ = quad(integrand, 0.0, cutoff, epsabs=1e-14, epsrel=1e-13, limit=200)
    # integrand decays like e^{-4 sqrt(k) x}
    tail = abs(integrand(cutoff)) / (4.0 * sk)
    if tail > 1e-12:
        raise RuntimeError(f"tail bound not met: {tail!r}")
    return 2.0 * val


def classify_stability(spec, grid):
    """Orbital-stability verdict from the Morse index and the mass slope."""
    if spec.branch is Branch.FOLD:
        report = fold_kernel_check(spec.epsilon, grid)
        return StabilityVerdict(
            stable=True,
            mechanism="FoldNeighborhood",
            details={
                "zero_mode_gap": report.zero_mode_gap,
                "kernel_overlap": report.kernel_overlap,
            },
        )
    n = morse_index(spec, grid)
    if n == 0:
        return StabilityVerdict(True, "PositiveSpectrum", {"morse_index": 0})
    if n == 1:
        if spec.branch is Branch.FRONT:
            slope = slope_limit_at_three_quarters(spec.epsilon)
        else:
            slope = mass_sq_slope(spec)
        details = {"morse_index": 1, "mass_sq_slope": slope}
        if slope > 0.0:
            return StabilityVerdict(True, "VKSlope", details)
        return StabilityVerdict(False, "VKSlope", details)
    return StabilityVerdict(False, None, {"morse_index": n})
