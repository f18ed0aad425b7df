"""Silent-magnetization constructions, silence diagnostics and the induced-equivalent solver.

A magnetization built from families 1 and 3 only is invisible from outside; one
built from families 2 and 3 is invisible from inside.  A compactly supported
purely toroidal field (family 3) is silent from both sides, which is what the
unidirectional counterexample produces.  The existence solver inverts the
truncated coefficient system that matches a target's exterior potential with an
induced magnetization Q*v for an admissible inducing field v.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .forward import potential_direct
from .harmonics import (
    ScalarCoeffs,
    VectorCoeffs,
    basis_matrix,
    coeff_size,
    degrees_flat,
    grad_basis_matrices,
    mu1,
    mu2,
    mu3,
    scalar_synthesis,
    vector_synthesis,
    vsht_forward,
)
from .sphere import QuadratureGrid, fibonacci_points, grid_norm


@dataclass(frozen=True)
class InducedModel:
    """Susceptibility times inducing field; m = Q v is stored alongside its factors."""

    Q: np.ndarray
    v: np.ndarray
    m: np.ndarray = None
    Q_coeffs: ScalarCoeffs | None = None
    diagnostics: dict | None = None

    def __post_init__(self):
        Q = np.ascontiguousarray(self.Q, dtype=float)
        v = np.ascontiguousarray(self.v, dtype=float)
        m = Q[:, None] * v if self.m is None else np.ascontiguousarray(self.m, dtype=float)
        if np.max(np.abs(m - Q[:, None] * v)) > 1e-10 * max(1.0, np.max(np.abs(m))):
            raise ValueError("magnetization samples must equal Q * v pointwise")
        for name, a in (("Q", Q), ("v", v), ("m", m)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)


def bump_profile(a: float = -0.9, b: float = -0.1):
    """C^3 bump ((t-a)(b-t))^4 on [a, b], exactly zero outside, peak value 1."""
    if not -1.0 < a < b < 1.0:
        raise ValueError("support must be a subinterval of (-1, 1)")
    peak = ((b - a) / 2.0) ** 8

    def profile(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= a) & (t <= b)
        out = np.zeros_like(t)
        ti = t[inside]
        out[inside] = ((ti - a) * (b - ti)) ** 4 / peak
        return out

    return profile


@dataclass(frozen=True)
class UnidirectionalSpec:
    """Zonal profile, symmetry axis and strength of the tangential counterexample."""

    profile: object = None  # callable on [-1, 1], C^2, vanishing outside (a, b)
    zeta: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    v3: float = 1.0
    support: tuple = (-0.9, -0.1)

    def __post_init__(self):
        a, b = self.support
        if not -1.0 < a < b < 1.0:
            raise ValueError("profile support must stay away from the poles")
        if self.profile is None:
            object.__setattr__(self, "profile", bump_profile(a, b))
        object.__setattr__(self, "zeta", np.ascontiguousarray(self.zeta, dtype=float))


def make_silent_exterior(S1: ScalarCoeffs, S3: ScalarCoeffs, points) -> np.ndarray:
    """Field with vanishing family-2 part: exterior-silent by construction.

    The degree-0 slot of S3 is inert (curl* of a constant vanishes) and ignored.
    """
    L = max(S1.L, S3.L)
    c1 = np.zeros(coeff_size(L))
    c3 = np.zeros(coeff_size(L))
    c1[: S1.values.size] = np.sqrt(mu1(degrees_flat(S1.L))) * S1.values
    s3 = S3.values.copy()
    s3[0] = 0.0
    c3[: s3.size] = np.sqrt(mu3(degrees_flat(S3.L))) * s3
    return vector_synthesis(VectorCoeffs(L, c1, np.zeros(coeff_size(L)), c3), points)


def unidirectional_silent(spec: UnidirectionalSpec, points) -> np.ndarray:
    """Tangential field v3 * profile(xi . zeta) * (xi x zeta); silent from both sides."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    q = spec.profile(pts @ spec.zeta)
    return spec.v3 * q[:, None] * np.cross(pts, spec.zeta[None, :])


def silence_score(m_samples, R_eval: float, grid: QuadratureGrid, n_eval: int = 100) -> float:
    """max |V| over a deterministic point set on the radius-R_eval sphere, per unit ||m||.

    Zero magnetization scores 0 by convention.
    """
    if R_eval == 1.0:
        raise ValueError("evaluation radius must differ from 1")
    norm = grid_norm(m_samples, grid)
    if norm == 0.0:
        return 0.0
    pts = fibonacci_points(n_eval).centers * R_eval
    vals = potential_direct(m_samples, grid, pts)
    return float(np.max(np.abs(vals)) / norm)


def hardy_hodge_energy(m_samples, grid: QuadratureGrid, L: int):
    """Squared l2 norms (e1, e2, e3) of the three parts of a band-limited field."""
    return vsht_forward(m_samples, grid, L).energies()


@dataclass(frozen=True)
class AdmissibilityTensor:
    """Coupling coefficients <Y_{m,l} v/(eta.v), grad* Y_{n,k}> for n, m <= L."""

    L: int
    entries: np.ndarray  # (P, P), rows (n,k), columns (m,l)
    radial_bound: float

    def __post_init__(self):
        P = coeff_size(self.L)
        e = np.ascontiguousarray(self.entries, dtype=float)
        if e.shape != (P, P):
            raise ValueError(f"entries must be ({P}, {P})")
        if not np.all(np.isfinite(e)):
            raise ValueError("tensor entries must be finite")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)


def admissibility_coeffs(v_samples, L: int, grid: QuadratureGrid) -> AdmissibilityTensor:
    """Quadrature values of the admissibility coupling tensor.

    Requires the radial part of v to be bounded away from zero on the grid; a
    violation names the admissibility clause.  For band-limited v the grid
    exactness should be at least 2L + 1 + deg(v).
    """
    v = np.asarray(v_samples, dtype=float)
    if v.shape != (grid.n_nodes, 3):
        raise ValueError("v samples must align with the grid")
    radial = np.sum(grid.nodes * v, axis=1)
    bound = float(np.min(np.abs(radial)))
    vmax = float(np.max(np.linalg.norm(v, axis=1)))
    if bound < 1e-6 * vmax:
        raise ValueError(
            "inducing field violates the admissibility clause |xi . v(xi)| >= C: "
            f"min |xi . v| = {bound:.3e} against max |v| = {vmax:.3e}")
    w = v / radial[:, None]
    ymat = basis_matrix(L, grid.nodes)          # (P, N)
    gmat = grad_basis_matrices(L, grid.nodes)   # (P, N, 3)
    wdotg = np.einsum("pnc,nc->pn", gmat, w)
    entries = (wdotg * grid.weights) @ ymat.T
    return AdmissibilityTensor(L=L, entries=entries, radial_bound=bound)


def variant2_scalar2(target: VectorCoeffs) -> np.ndarray:
    """Flat coefficients of the target's variant-II second scalar."""
    deg = degrees_flat(target.L)
    pos = deg > 0
    s2 = np.empty_like(target.c2)
    s2[pos] = target.c2[pos] / np.sqrt(mu2(deg[pos]))
    s2[0] = target.c1[0] / np.sqrt(mu1(0))
    return s2


def solve_existence_truncated(target: VectorCoeffs, v_samples, L: int,
                              grid: QuadratureGrid) -> InducedModel:
    """Truncated solve for an induced magnetization equivalent from outside to the target.

    Rows n >= 1 read  [v_{n,k,m,l}/(n(n+1/2)) + delta/(n+1/2)] <M1, Y_{m,l}> = 2 <S2, Y_{n,k}>;
    the n = 0 row degenerates (grad* Y_{0,1} = 0 kills the coupling term) to
    2 <M1, Y_{0,1}> = 2 <S2, Y_{0,1}>.  Q = M1 / (xi . v); the second Helmholtz
    scalar of the solution follows from the coupling tensor.  Conditioning and
    residual are reported in the returned model's diagnostics.
    """
    tensor = admissibility_coeffs(v_samples, L, grid)
    deg = degrees_flat(L).astype(float)
    P = coeff_size(L)
    rhs = 2.0 * _pad(variant2_scalar2(target), P)
    row_scale = np.zeros(P)
    row_scale[1:] = 1.0 / (deg[1:] * (deg[1:] + 0.5))
    system = row_scale[:, None] * tensor.entries
    system[np.arange(P), np.arange(P)] += 1.0 / (deg + 0.5)
    svals = np.linalg.svd(system, compute_uv=False)
    m1 = np.linalg.solve(system, rhs)
    residual = float(np.linalg.norm(system @ m1 - rhs) / max(np.linalg.norm(rhs), 1e-300))

    v = np.asarray(v_samples, dtype=float)
    radial = np.sum(grid.nodes * v, axis=1)
    m1_samples = scalar_synthesis(m1, L, grid.nodes)
    q = m1_samples / radial
    m2 = np.zeros(P)
    m2[1:] = (tensor.entries[1:] @ m1) / (deg[1:] * (deg[1:] + 1.0))
    diagnostics = {
        "residual_rel": residual,
        "sigma_min": float(svals[-1]),
        "sigma_max": float(svals[0]),
        "m1_coeffs": m1,
        "m2_coeffs": m2,
        "radial_bound": tensor.radial_bound,
    }
    return InducedModel(Q=q, v=v, diagnostics=diagnostics)


def _pad(values: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size)
    out[: values.size] = values[:size] if values.size > size else values
    return out
