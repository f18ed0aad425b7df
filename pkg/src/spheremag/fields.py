"""Synthetic susceptibility and inducing-field test cases.

Case 1: Q(xi) = (xi . zeta)^4 on the lower hemisphere (0 elsewhere) with
v(xi) = xi + zeta - (zeta . xi) xi.  Case 2: an oscillatory susceptibility
1000 (1/2 + xi.zeta)^4 cos(2 pi xi.zeta) sin(2 pi xi.zbar) confined to
{xi.zeta <= -1/2, xi.zbar >= 1/2} with v(xi) = (zbar . xi) xi + zeta - (zeta.xi) xi.
Both magnetizations are supported in the lower hemisphere.
"""

from __future__ import annotations

import numpy as np

ZETA = np.array([0.0, 0.0, 1.0])
ZETA_BAR = np.array([0.0, np.sqrt(15.0) / 4.0, -0.25])


def example_susceptibility(example: int, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tz = pts @ ZETA
    if example == 1:
        return np.where(tz <= 0.0, tz**4, 0.0)
    if example == 2:
        tb = pts @ ZETA_BAR
        inside = (tz <= -0.5) & (tb >= 0.5)
        vals = 1000.0 * (0.5 + tz) ** 4 * np.cos(2 * np.pi * tz) * np.sin(2 * np.pi * tb)
        return np.where(inside, vals, 0.0)
    raise ValueError("example must be 1 or 2")


def example_inducing_field(example: int, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tz = (pts @ ZETA)[:, None]
    if example == 1:
        return pts + ZETA[None, :] - tz * pts
    if example == 2:
        tb = (pts @ ZETA_BAR)[:, None]
        return tb * pts + ZETA[None, :] - tz * pts
    raise ValueError("example must be 1 or 2")


def example_magnetization(example: int, points) -> np.ndarray:
    q = example_susceptibility(example, points)
    return q[:, None] * example_inducing_field(example, points)


def display_grid(n_lat: int = 181, n_lon: int = 360):
    """Equiangular plotting grid; returns (lat_deg, lon_deg, points) with lat-major points."""
    lat = np.linspace(-90.0, 90.0, n_lat)
    lon = np.arange(n_lon, dtype=float) * (360.0 / n_lon)
    lat_r = np.repeat(np.deg2rad(lat), n_lon)
    lon_r = np.tile(np.deg2rad(lon), n_lat)
    pts = np.column_stack([
        np.cos(lat_r) * np.cos(lon_r),
        np.cos(lat_r) * np.sin(lon_r),
        np.sin(lat_r),
    ])
    return lat, lon, pts
