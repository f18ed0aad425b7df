"""Geometry, quadrature grids, quasi-uniform point sets and region masks on the unit sphere.

Grids are Gauss-Legendre x equispaced-longitude product rules.  Node ordering is
polar-major: all longitudes of the first polar node, then the next polar node, etc.
All containers are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FOUR_PI = 4.0 * np.pi
Z_AXIS = np.array([0.0, 0.0, 1.0])


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def check_unit(xi, tol: float = 1e-12) -> np.ndarray:
    """Validate that ``xi`` (shape (3,) or (N,3)) consists of unit vectors."""
    xi = np.asarray(xi, dtype=float)
    norms = np.linalg.norm(xi, axis=-1)
    if not np.all(np.abs(norms - 1.0) <= tol):
        raise ValueError(f"not a unit vector: |norm - 1| up to {np.max(np.abs(norms - 1.0)):.3e}")
    return xi


def rotation_from_z(axis) -> np.ndarray:
    """Rotation matrix mapping (0,0,1) onto ``axis`` (deterministic choice)."""
    axis = check_unit(axis)
    c = axis[2]
    if c > 1.0 - 1e-14:
        return np.eye(3)
    if c < -1.0 + 1e-14:
        # rotate by pi about the x-axis
        return np.diag([1.0, -1.0, -1.0])
    v = np.cross(Z_AXIS, axis)
    s2 = v @ v
    vx = np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])
    return np.eye(3) + vx + vx @ vx * ((1.0 - c) / s2)


@dataclass(frozen=True)
class QuadratureGrid:
    """Product quadrature rule on (a piece of) the unit sphere.

    ``nodes`` has shape (N, 3); ``weights`` (N,) are surface-element weights
    (they sum to 4*pi for a full-sphere grid).  ``t_nodes``/``t_weights`` hold the
    Gauss rule in the polar variable t = cos(theta) on ``t_range``; longitudes are
    the ``n_lon`` equispaced angles 2*pi*j/n_lon.  ``exactness_degree`` d means the
    rule integrates products of spherical polynomials of total degree <= d exactly
    (full-range grids), respectively polynomials in t of degree <= d on the
    subinterval (cap grids).
    """

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    t_nodes: np.ndarray
    t_weights: np.ndarray
    n_lon: int
    t_range: tuple = (-1.0, 1.0)
    axis: np.ndarray = field(default_factory=lambda: Z_AXIS.copy())
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", _freeze(self.nodes))
        object.__setattr__(self, "weights", _freeze(self.weights))
        object.__setattr__(self, "t_nodes", _freeze(self.t_nodes))
        object.__setattr__(self, "t_weights", _freeze(self.t_weights))
        object.__setattr__(self, "axis", _freeze(self.axis))
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_polar(self) -> int:
        return self.t_nodes.shape[0]

    @property
    def is_full_sphere(self) -> bool:
        return self.t_range == (-1.0, 1.0) and bool(np.allclose(self.axis, Z_AXIS))

    def longitudes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_lon) / self.n_lon


def build_gauss_grid(n_polar: int, n_lon: int) -> QuadratureGrid:
    """Full-sphere Gauss-Legendre x equispaced-longitude product rule.

    Exactness degree is min(2*n_polar - 1, n_lon - 1).
    """
    if n_polar < 1 or n_lon < 1:
        raise ValueError("grid sizes must be >= 1")
    t, wt = np.polynomial.legendre.leggauss(n_polar)
    order = np.argsort(t)  # ascending t, deterministic
    t, wt = t[order], wt[order]
    phi = 2.0 * np.pi * np.arange(n_lon) / n_lon
    sin_th = np.sqrt(1.0 - t**2)
    nodes = np.empty((n_polar * n_lon, 3))
    nodes[:, 0] = np.repeat(sin_th, n_lon) * np.tile(np.cos(phi), n_polar)
    nodes[:, 1] = np.repeat(sin_th, n_lon) * np.tile(np.sin(phi), n_polar)
    nodes[:, 2] = np.repeat(t, n_lon)
    weights = np.repeat(wt, n_lon) * (2.0 * np.pi / n_lon)
    return QuadratureGrid(
        nodes=nodes,
        weights=weights,
        exactness_degree=min(2 * n_polar - 1, n_lon - 1),
        t_nodes=t,
        t_weights=wt,
        n_lon=n_lon,
    )


def gauss_grid_for_degree(degree: int) -> QuadratureGrid:
    """Smallest product grid with exactness_degree >= ``degree``."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    n_polar = (degree + 2) // 2  # 2*n_polar - 1 >= degree
    return build_gauss_grid(max(n_polar, 1), degree + 1)


def build_cap_gauss_grid(n_polar: int, n_lon: int, t_min: float, t_max: float = 1.0,
                         axis=Z_AXIS) -> QuadratureGrid:
    """Gauss product rule on the spherical band t in (t_min, t_max) about ``axis``.

    Used for integrals over cap complements whose boundary t = t_min would
    otherwise cut through cells of a full-range rule.
    """
    if n_polar < 1 or n_lon < 1:
        raise ValueError("grid sizes must be >= 1")
    if not -1.0 <= t_min < t_max <= 1.0:
        raise ValueError("need -1 <= t_min < t_max <= 1")
    x, wx = np.polynomial.legendre.leggauss(n_polar)
    order = np.argsort(x)
    x, wx = x[order], wx[order]
    half = 0.5 * (t_max - t_min)
    t = t_min + half * (x + 1.0)
    wt = wx * half
    phi = 2.0 * np.pi * np.arange(n_lon) / n_lon
    sin_th = np.sqrt(np.maximum(1.0 - t**2, 0.0))
    nodes = np.empty((n_polar * n_lon, 3))
    nodes[:, 0] = np.repeat(sin_th, n_lon) * np.tile(np.cos(phi), n_polar)
    nodes[:, 1] = np.repeat(sin_th, n_lon) * np.tile(np.sin(phi), n_polar)
    nodes[:, 2] = np.repeat(t, n_lon)
    rot = rotation_from_z(axis)
    nodes = nodes @ rot.T
    weights = np.repeat(wt, n_lon) * (2.0 * np.pi / n_lon)
    return QuadratureGrid(
        nodes=nodes,
        weights=weights,
        exactness_degree=min(2 * n_polar - 1, n_lon - 1),
        t_nodes=t,
        t_weights=wt,
        n_lon=n_lon,
        t_range=(t_min, t_max),
        axis=np.asarray(axis, dtype=float),
    )


@dataclass(frozen=True)
class CapRegion:
    """Region Gamma = {xi : xi . axis <= threshold}; the complement is the strict > side."""

    axis: np.ndarray
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "axis", _freeze(check_unit(self.axis)))
        if not -1.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [-1, 1]")

    def contains(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return points @ self.axis <= self.threshold

    def complement_grid(self, n_polar: int, n_lon: int) -> QuadratureGrid:
        """Band rule covering the complement Omega \\ Gamma exactly."""
        return build_cap_gauss_grid(n_polar, n_lon, self.threshold, 1.0, self.axis)


LOWER_HEMISPHERE = CapRegion(axis=Z_AXIS, threshold=0.0)


@dataclass(frozen=True)
class PointSet:
    """A finite set of pairwise-distinct kernel centers on the unit sphere."""

    centers: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "centers", _freeze(check_unit(self.centers)))
        if self.centers.ndim != 2 or self.centers.shape[1] != 3:
            raise ValueError("centers must have shape (N, 3)")

    @property
    def count(self) -> int:
        return self.centers.shape[0]

    def min_pairwise_angle(self) -> float:
        g = np.clip(self.centers @ self.centers.T, -1.0, 1.0)
        np.fill_diagonal(g, -1.0)
        return float(np.arccos(np.max(g)))


def fibonacci_points(n: int) -> PointSet:
    """Golden-angle spiral point set; deterministic and quasi-uniform."""
    if n < 1:
        raise ValueError("need at least one point")
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    phi = i * (np.pi * (3.0 - np.sqrt(5.0)))
    rho = np.sqrt(np.maximum(1.0 - z**2, 0.0))
    pts = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    return PointSet(centers=pts)


def integrate(samples, grid: QuadratureGrid) -> float:
    """Quadrature sum over all grid nodes."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != grid.n_nodes:
        raise ValueError(f"expected {grid.n_nodes} samples, got {samples.shape[-1]}")
    return float(samples @ grid.weights) if samples.ndim == 1 else samples @ grid.weights


def masked_integrate(samples, grid: QuadratureGrid, region: CapRegion) -> float:
    """Quadrature sum over the nodes outside ``region`` (the penalty domain).

    For boundary-accurate hemisphere integrals, pass a dedicated band grid from
    :meth:`CapRegion.complement_grid`, whose nodes all lie outside the region.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != grid.n_nodes:
        raise ValueError(f"expected {grid.n_nodes} samples, got {samples.shape[-1]}")
    mask = ~region.contains(grid.nodes)
    return float(samples[..., mask] @ grid.weights[mask])


def grid_norm(samples, grid: QuadratureGrid) -> float:
    """l2(Omega) norm of scalar (N,) or vector (N,3) samples."""
    samples = np.asarray(samples, dtype=float)
    sq = samples**2 if samples.ndim == 1 else np.sum(samples**2, axis=1)
    return float(np.sqrt(sq @ grid.weights))
