"""Penalized least-squares reconstruction of induced magnetizations from exterior data.

The candidate susceptibility is expanded in Abel-Poisson kernels,
Qbar = sum_n gamma_n K(. , xi_n), and gamma minimizes

    F[Qbar] = || V[Qbar] - V ||^2_{L2(data sphere)} + alpha * || Qbar v ||^2_{l2(outside Gamma)}.

Both integrals are evaluated by quadrature (the data rule carries the radius^2
surface factor), so the normal equations M gamma = g are the exact optimality
conditions of the discretized functional.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .forward import (
    AbelPoissonBasis,
    PotentialSamples,
    abel_poisson,
    default_kernel_grid,
    kernel_potential_field,
    kernel_truncation,
)
from .sphere import CapRegion, QuadratureGrid

PENALTY_GRID_CAP = 600


@dataclass(frozen=True)
class ReconstructionProblem:
    """Data potential, inducing field, kernel basis, support region and penalty weight."""

    data: PotentialSamples
    v_fn: object  # callable (N,3) unit vectors -> (N,3) field samples
    basis: AbelPoissonBasis
    region: CapRegion
    alpha: float
    src_grid: QuadratureGrid | None = None
    penalty_grid: QuadratureGrid | None = None
    ridge: float = 1e-12
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.alpha < 0.0:
            raise ValueError("penalty weight alpha must be >= 0")
        if self.basis.count < 1:
            raise ValueError("kernel basis must contain at least one center")


@dataclass(frozen=True)
class ReconstructionResult:
    """Solution coefficients with the quadrature-evaluated functional split."""

    gamma: np.ndarray
    alpha: float
    misfit: float
    leakage: float
    functional: float
    diagnostics: dict

    def __post_init__(self):
        if self.misfit < 0 or self.leakage < 0:
            raise ValueError("misfit and leakage are squared norms and must be >= 0")


class AssembledOperator:
    """Shared assembly for one (data, basis, v, region) tuple across penalty weights."""

    def __init__(self, problem: ReconstructionProblem):
        data, basis = problem.data, problem.basis
        src_grid = problem.src_grid or default_kernel_grid(basis.h, data.radius)
        v_src = np.asarray(problem.v_fn(src_grid.nodes), dtype=float)
        self.vmat = kernel_potential_field(basis, v_src, src_grid, data.radius, data.grid)
        aw = data.area_weights
        self.gram_data = (self.vmat * aw) @ self.vmat.T
        self.g = self.vmat @ (aw * data.values)
        if problem.region.threshold >= 1.0:  # region covers the sphere: nothing to penalize
            self.gram_penalty = np.zeros((basis.count, basis.count))
        else:
            pen_grid = problem.penalty_grid or _default_penalty_grid(problem.region, basis.h)
            kpen = abel_poisson(pen_grid.nodes @ basis.centers.centers.T, basis.h)
            v_pen = np.asarray(problem.v_fn(pen_grid.nodes), dtype=float)
            pen_w = pen_grid.weights * np.sum(v_pen**2, axis=1)
            self.gram_penalty = (kpen * pen_w[:, None]).T @ kpen
        self.data_norm_sq = data.norm_squared()
        self.area_weights = aw
        self.data_values = data.values

    def system(self, alpha: float):
        return self.gram_data + alpha * self.gram_penalty, self.g

    def misfit(self, gamma: np.ndarray) -> float:
        resid = self.vmat.T @ gamma - self.data_values
        return float((resid**2) @ self.area_weights)

    def leakage(self, gamma: np.ndarray) -> float:
        return float(gamma @ self.gram_penalty @ gamma)


def _default_penalty_grid(region: CapRegion, h: float) -> QuadratureGrid:
    degree = min(kernel_truncation(h, 1e-12) * 2, PENALTY_GRID_CAP)
    n_polar = (degree + 2) // 2
    return region.complement_grid(n_polar, degree + 1)


def assemble_operator(problem: ReconstructionProblem) -> AssembledOperator:
    """Build (or fetch from the problem's cache) the shared assembly."""
    op = problem._cache.get("operator")
    if op is None:
        op = AssembledOperator(problem)
        problem._cache["operator"] = op
    return op


_operator = assemble_operator


def assemble_system(problem: ReconstructionProblem):
    """Normal-equation matrix and right-hand side (M, g) for the problem's alpha."""
    return _operator(problem).system(problem.alpha)


def solve_spd(M: np.ndarray, g: np.ndarray, ridge: float = 1e-12):
    """Solve (M + ridge * mean-diagonal * I) gamma = g for symmetric psd M.

    Cholesky first; if the shifted matrix is still not numerically positive
    definite, fall back to conjugate gradients (tol 1e-10 relative, at most 10N
    iterations; non-convergence is reported, not fatal).  Returns
    (gamma, diagnostics).
    """
    M = np.asarray(M, dtype=float)
    g = np.asarray(g, dtype=float)
    n = M.shape[0]
    if M.shape != (n, n) or g.shape != (n,):
        raise ValueError("shape mismatch in linear system")
    asym = np.max(np.abs(M - M.T)) if n else 0.0
    scale = np.max(np.abs(M)) if n else 0.0
    if asym > 1e-8 * max(scale, 1.0):
        raise ValueError("matrix must be symmetric")
    if ridge < 0.0:
        raise ValueError("ridge must be >= 0")
    Ms = 0.5 * (M + M.T)
    shift = ridge * np.trace(Ms) / n if n else 0.0
    A = Ms + shift * np.eye(n)
    diagnostics = {"ridge": ridge, "ridge_shift": float(shift)}
    try:
        L = np.linalg.cholesky(A)
        y = np.linalg.solve(L, g)
        gamma = np.linalg.solve(L.T, y)
        pivots = np.diag(L) ** 2
        diagnostics.update(method="cholesky",
                           min_pivot=float(np.min(pivots)) if n else 0.0,
                           max_pivot=float(np.max(pivots)) if n else 0.0)
    except np.linalg.LinAlgError:
        gamma, iters, converged = _conjugate_gradient(A, g, tol=1e-10, maxiter=10 * n)
        diagnostics.update(method="cg", iterations=iters, converged=converged)
    resid = float(np.linalg.norm(A @ gamma - g))
    diagnostics["residual_rel"] = resid / max(float(np.linalg.norm(g)), 1e-300)
    return gamma, diagnostics


def _conjugate_gradient(A, g, tol, maxiter):
    x = np.zeros_like(g)
    r = g.copy()
    p = r.copy()
    rs = float(r @ r)
    target = tol * np.sqrt(float(g @ g))
    if np.sqrt(rs) <= target:
        return x, 0, True
    for it in range(1, maxiter + 1):
        Ap = A @ p
        denom = float(p @ Ap)
        if denom <= 0.0:  # numerical loss of definiteness; stop at best iterate
            return x, it, False
        a = rs / denom
        x = x + a * p
        r = r - a * Ap
        rs_new = float(r @ r)
        if np.sqrt(rs_new) <= target:
            return x, it, True
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, maxiter, False


def evaluate_functional(problem: ReconstructionProblem, gamma):
    """Quadrature values (functional, misfit, leakage) for given coefficients."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (problem.basis.count,):
        raise ValueError(f"expected {problem.basis.count} coefficients")
    op = _operator(problem)
    misfit = op.misfit(gamma)
    leakage = op.leakage(gamma)
    return misfit + problem.alpha * leakage, misfit, leakage


def reconstruct(problem: ReconstructionProblem) -> ReconstructionResult:
    """Assemble and solve the normal equations, then report the functional split."""
    op = _operator(problem)
    M, g = op.system(problem.alpha)
    gamma, diagnostics = solve_spd(M, g, problem.ridge)
    misfit = op.misfit(gamma)
    leakage = op.leakage(gamma)
    return ReconstructionResult(
        gamma=gamma,
        alpha=problem.alpha,
        misfit=misfit,
        leakage=leakage,
        functional=misfit + problem.alpha * leakage,
        diagnostics=diagnostics,
    )


def evaluate_candidate(basis: AbelPoissonBasis, gamma, points) -> np.ndarray:
    """Susceptibility Qbar(xi) = sum_n gamma_n K(xi . xi_n) at the given points."""
    gamma = np.asarray(gamma, dtype=float)
    kmat = abel_poisson(np.asarray(points, dtype=float) @ basis.centers.centers.T, basis.h)
    return kmat @ gamma
