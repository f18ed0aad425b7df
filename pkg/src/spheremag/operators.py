"""Degree-diagonal multiplier calculus, Helmholtz decomposition and Hardy-Hodge forms.

The central multiplier is D = (-Beltrami + 1/4)^(1/2), acting as (n + 1/2) on
degree-n harmonics.  D - 1/2 annihilates constants, so its inverse is defined
only on mean-free input.  All operators act on coefficient containers; the
spectral action is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harmonics import (
    ScalarCoeffs,
    VectorCoeffs,
    assemble_vector_coeffs,
    degrees_flat,
    mu1,
    mu2,
    mu3,
    vector_analysis,
    vector_synthesis,
)
from .sphere import QuadratureGrid

MULTIPLIER_KINDS = (
    "D", "D_inv", "D_plus_half", "D_minus_half",
    "D_plus_half_inv", "D_minus_half_inv", "neg_beltrami",
)


def _multiplier(kind: str, n: np.ndarray) -> np.ndarray:
    n = n.astype(float)
    if kind == "D":
        return n + 0.5
    if kind == "D_inv":
        return 1.0 / (n + 0.5)
    if kind == "D_plus_half":
        return n + 1.0
    if kind == "D_minus_half":
        return n
    if kind == "D_plus_half_inv":
        return 1.0 / (n + 1.0)
    if kind == "D_minus_half_inv":
        with np.errstate(divide="ignore"):
            return np.where(n > 0, 1.0 / np.where(n > 0, n, 1.0), 0.0)
    if kind == "neg_beltrami":
        return n * (n + 1.0)
    raise ValueError(f"unknown multiplier kind {kind!r}; choose from {MULTIPLIER_KINDS}")


def apply_multiplier(c: ScalarCoeffs, kind: str) -> ScalarCoeffs:
    """Apply a degree-diagonal pseudo-differential operator to scalar coefficients."""
    deg = degrees_flat(c.L)
    if kind == "D_minus_half_inv":
        scale = max(c.norm(), 1.0)
        if abs(c.values[0]) > 1e-12 * scale:
            raise ValueError(
                "inverse of D - 1/2 needs mean-free input (constants are its nullspace)")
    return ScalarCoeffs(c.L, _multiplier(kind, deg) * c.values)


@dataclass(frozen=True)
class HelmholtzScalars:
    """Scalars (F1, F2, F3) of f = xi F1 + grad* F2 + curl* F3; F2, F3 mean-free."""

    F1: ScalarCoeffs
    F2: ScalarCoeffs
    F3: ScalarCoeffs

    def __post_init__(self):
        if self.F2.values[0] != 0.0 or self.F3.values[0] != 0.0:
            raise ValueError("tangential Helmholtz scalars must be mean-free")


@dataclass(frozen=True)
class HardyHodgeScalars:
    """Potential scalars of the three Hardy-Hodge parts.

    variant "II" carries the scalars driven through the first-order operator set
    (degree-0 entries of S1 and S2 coincide; S3 mean-free); variant "III" carries
    the zeroth-order set (S2 and S3 mean-free).
    """

    variant: str
    S1: ScalarCoeffs
    S2: ScalarCoeffs
    S3: ScalarCoeffs

    def __post_init__(self):
        if self.variant not in ("II", "III"):
            raise ValueError("variant must be 'II' or 'III'")
        if self.variant == "II":
            if self.S1.values[0] != self.S2.values[0] or self.S3.values[0] != 0.0:
                raise ValueError("variant II needs S1[0]=S2[0] and mean-free S3")
        else:
            if self.S2.values[0] != 0.0 or self.S3.values[0] != 0.0:
                raise ValueError("variant III needs mean-free S2 and S3")


def helmholtz_decompose(samples, grid: QuadratureGrid, L: int) -> HelmholtzScalars:
    """Helmholtz scalars of vector samples: radial projection plus tangential potentials."""
    a, b, d = vector_analysis(samples, grid, L)
    deg = degrees_flat(L)
    pos = deg > 0
    lam = np.where(pos, deg * (deg + 1.0), 1.0)
    f2 = np.where(pos, b / lam, 0.0)
    f3 = np.where(pos, d / lam, 0.0)
    return HelmholtzScalars(ScalarCoeffs(L, a), ScalarCoeffs(L, f2), ScalarCoeffs(L, f3))


def helmholtz_synthesize(h: HelmholtzScalars, points) -> np.ndarray:
    """Reassemble xi F1 + grad* F2 + curl* F3 at the given points."""
    L = h.F1.L
    deg = degrees_flat(L)
    # express o1/o2/o3 through the families: o1 Y = (y1*(n+1) + y2*n)... invert instead
    # via the raw combination used in vector_synthesis: radial = F1, grad pot = F2, curl = F3.
    c1, c2, c3 = assemble_vector_coeffs(
        h.F1.values,
        deg * (deg + 1.0) * h.F2.values,
        deg * (deg + 1.0) * h.F3.values,
        L,
    )
    return vector_synthesis(VectorCoeffs(L, c1, c2, c3), points)


def hardy_hodge_from_helmholtz(h: HelmholtzScalars) -> HardyHodgeScalars:
    """Variant-II scalars from Helmholtz scalars (degree-diagonal formulas)."""
    dinv_f1 = apply_multiplier(h.F1, "D_inv").values
    f2 = h.F2.values
    dinv_f2 = apply_multiplier(h.F2, "D_inv").values
    L = h.F1.L
    s1 = 0.5 * (dinv_f1 - f2 + 0.5 * dinv_f2)
    s2 = 0.5 * (dinv_f1 + f2 + 0.5 * dinv_f2)
    return HardyHodgeScalars("II", ScalarCoeffs(L, s1), ScalarCoeffs(L, s2), h.F3)


def hh3_scalars(h: HelmholtzScalars) -> HardyHodgeScalars:
    """Variant-III scalars from Helmholtz scalars."""
    L = h.F1.L
    f1 = h.F1.values
    dinv_f1 = apply_multiplier(h.F1, "D_inv").values
    d_f2 = apply_multiplier(h.F2, "D").values
    dinv_f2 = apply_multiplier(h.F2, "D_inv").values
    s1 = 0.5 * (f1 + 0.5 * dinv_f1 - d_f2 + 0.25 * dinv_f2)
    s2 = 0.5 * (f1 - 0.5 * dinv_f1 + d_f2 - 0.25 * dinv_f2)
    s3 = apply_multiplier(h.F3, "D").values - 0.5 * h.F3.values
    return HardyHodgeScalars("III", ScalarCoeffs(L, s1), ScalarCoeffs(L, s2),
                             ScalarCoeffs(L, s3))


def hardy_hodge_spectral(samples, grid: QuadratureGrid, L: int):
    """Project onto the three families directly; also return the variant-II scalars.

    Returns (VectorCoeffs, HardyHodgeScalars).  The scalar of family i at degree
    n is c_i[n,k] / sqrt(mu_i(n)); the degree-0 slot of S2 is tied to S1 per the
    variant-II normalization.
    """
    a, b, d = vector_analysis(samples, grid, L)
    c1, c2, c3 = assemble_vector_coeffs(a, b, d, L)
    coeffs = VectorCoeffs(L, c1, c2, c3)
    deg = degrees_flat(L)
    pos = deg > 0
    s1 = c1 / np.sqrt(mu1(deg))
    s2 = np.empty_like(s1)
    s2[pos] = c2[pos] / np.sqrt(mu2(deg[pos]))
    s2[0] = s1[0]
    s3 = np.zeros_like(s1)
    s3[pos] = c3[pos] / np.sqrt(mu3(deg[pos]))
    scalars = HardyHodgeScalars("II", ScalarCoeffs(L, s1), ScalarCoeffs(L, s2),
                                ScalarCoeffs(L, s3))
    return coeffs, scalars


def scalars_to_coeffs(s: HardyHodgeScalars) -> VectorCoeffs:
    """Family coefficients of the field encoded by variant-II scalars."""
    if s.variant != "II":
        raise ValueError("only variant II scalars encode family coefficients directly")
    L = s.S1.L
    deg = degrees_flat(L)
    c1 = np.sqrt(mu1(deg)) * s.S1.values
    c2 = np.sqrt(mu2(deg)) * s.S2.values
    c3 = np.sqrt(mu3(deg)) * s.S3.values
    return VectorCoeffs(L, c1, c2, c3)


def hardy_hodge_parts(coeffs: VectorCoeffs, points):
    """Evaluate the three parts separately at points; their sum is the field."""
    L = coeffs.L
    zeros = np.zeros_like(coeffs.c1)
    p1 = vector_synthesis(VectorCoeffs(L, coeffs.c1, zeros, zeros), points)
    p2 = vector_synthesis(VectorCoeffs(L, zeros, coeffs.c2, zeros), points)
    p3 = vector_synthesis(VectorCoeffs(L, zeros, zeros, coeffs.c3), points)
    return p1, p2, p3
