"""Canonical serialization for result documents and plot tables.

Documents must be byte-reproducible: JSON is emitted with sorted keys and
shortest round-trip float formatting, CSV tables use '.' decimals, ','
separators, LF line endings and a header row.
"""

from __future__ import annotations

import json

import numpy as np


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def fnum(x) -> float:
    """Plain Python float (JSON serializers reject numpy scalars)."""
    return float(x)


def flist(a) -> list:
    return [float(v) for v in np.asarray(a).ravel()]


def field_table(lon_deg, lat_deg, values) -> str:
    """CSV with columns lon_deg, lat_deg, value; one row per sample."""
    lon = np.asarray(lon_deg, dtype=float).ravel()
    lat = np.asarray(lat_deg, dtype=float).ravel()
    val = np.asarray(values, dtype=float).ravel()
    if not lon.size == lat.size == val.size:
        raise ValueError("column length mismatch")
    lines = ["lon_deg,lat_deg,value"]
    for x, y, v in zip(lon.tolist(), lat.tolist(), val.tolist()):
        lines.append(f"{x!r},{y!r},{v!r}")
    return "\n".join(lines) + "\n"


def grid_lon_lat(grid) -> tuple:
    """Longitude/latitude in degrees of a quadrature grid's nodes."""
    lon = np.degrees(np.arctan2(grid.nodes[:, 1], grid.nodes[:, 0])) % 360.0
    lat = np.degrees(np.arcsin(np.clip(grid.nodes[:, 2], -1.0, 1.0)))
    return lon, lat


def display_lon_lat(lat_axis, lon_axis) -> tuple:
    """Lat-major flattened coordinate columns for the display grid."""
    n_lat, n_lon = lat_axis.size, lon_axis.size
    return np.tile(lon_axis, n_lat), np.repeat(lat_axis, n_lon)
