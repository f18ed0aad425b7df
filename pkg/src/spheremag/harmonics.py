"""Real scalar and vector spherical harmonics and quadrature-exact transforms.

Conventions
-----------
Harmonics are real and orthonormal for the plain surface integral over the unit
sphere (no 1/4pi weight).  Within degree n the index k = 1..2n+1 maps to the
order m = k - n - 1; positive m carries cos(m*phi), negative m carries
sin(|m|*phi).  Flat coefficient storage is degree-major: index(n, k) = n^2 + k - 1,
total size (L+1)^2.

The three vector families are

    y1_{n,k} = mu1(n)^{-1/2} [ (n+1) xi Y_{n,k} - grad* Y_{n,k} ],   n >= 0,
    y2_{n,k} = mu2(n)^{-1/2} [  n    xi Y_{n,k} + grad* Y_{n,k} ],   n >= 1,
    y3_{n,k} = mu3(n)^{-1/2} curl* Y_{n,k},                          n >= 1,

with mu1 = (n+1)(2n+1), mu2 = n(2n+1), mu3 = n(n+1).  Family 1 spans boundary
values of exterior-harmonic gradients, family 2 those of interior-harmonic
gradients, family 3 the surface-curl fields.

Transforms use the separable structure of the product grids: an FFT in
longitude followed by per-order Gauss sums in the polar variable.  They are
exact for band-limited input whenever the grid's exactness degree covers the
integrand (2L for scalar fields, 2L+2 for vector fields).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .legendre import LegendreTables
from .sphere import QuadratureGrid

SQRT_PI = np.sqrt(np.pi)
SQRT_2PI = np.sqrt(2.0 * np.pi)


def mu1(n):
    return (np.asarray(n) + 1.0) * (2.0 * np.asarray(n) + 1.0)


def mu2(n):
    return np.asarray(n) * (2.0 * np.asarray(n) + 1.0)


def mu3(n):
    return np.asarray(n) * (np.asarray(n) + 1.0)


def coeff_size(L: int) -> int:
    return (L + 1) ** 2


def flat_index(n: int, k: int) -> int:
    if not 1 <= k <= 2 * n + 1:
        raise ValueError(f"index k={k} out of range for degree n={n}")
    return n * n + k - 1


def degrees_flat(L: int) -> np.ndarray:
    """Degree n of every flat coefficient slot, shape ((L+1)^2,)."""
    return np.repeat(np.arange(L + 1), 2 * np.arange(L + 1) + 1)


@dataclass(frozen=True)
class ScalarCoeffs:
    """Band-limited scalar field in spectral form; see module docstring for layout."""

    L: int
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if v.shape != (coeff_size(self.L),):
            raise ValueError(f"expected {coeff_size(self.L)} coefficients for L={self.L}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, L: int) -> "ScalarCoeffs":
        return cls(L, np.zeros(coeff_size(L)))

    @classmethod
    def unit(cls, L: int, n: int, k: int) -> "ScalarCoeffs":
        v = np.zeros(coeff_size(L))
        v[flat_index(n, k)] = 1.0
        return cls(L, v)

    def get(self, n: int, k: int) -> float:
        return float(self.values[flat_index(n, k)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass(frozen=True)
class VectorCoeffs:
    """Vector field in the three-family spectral form; families 2 and 3 start at n=1."""

    L: int
    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray

    def __post_init__(self):
        size = coeff_size(self.L)
        for name in ("c1", "c2", "c3"):
            v = np.ascontiguousarray(getattr(self, name), dtype=float)
            if v.shape != (size,):
                raise ValueError(f"{name} must have {size} entries for L={self.L}")
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if self.c2[0] != 0.0 or self.c3[0] != 0.0:
            raise ValueError("families 2 and 3 have no degree-0 coefficient")

    @classmethod
    def zeros(cls, L: int) -> "VectorCoeffs":
        z = np.zeros(coeff_size(L))
        return cls(L, z.copy(), z.copy(), z.copy())

    @classmethod
    def unit(cls, L: int, family: int, n: int, k: int) -> "VectorCoeffs":
        _check_family(family, n)
        arrays = [np.zeros(coeff_size(L)) for _ in range(3)]
        arrays[family - 1][flat_index(n, k)] = 1.0
        return cls(L, *arrays)

    def family(self, i: int) -> np.ndarray:
        return (self.c1, self.c2, self.c3)[i - 1]

    def energies(self) -> tuple:
        return (float(self.c1 @ self.c1), float(self.c2 @ self.c2), float(self.c3 @ self.c3))

    def norm(self) -> float:
        return float(np.sqrt(sum(self.energies())))


def _check_family(family: int, n: int):
    if family not in (1, 2, 3):
        raise ValueError("family must be 1, 2 or 3")
    if n < 0 or (family in (2, 3) and n < 1):
        raise ValueError(f"family {family} has no degree n={n}")


# --------------------------------------------------------------------------- frames

def local_frame(points):
    """Polar data and local tangent frame at each point.

    Returns (t, sin_theta, phi, e_theta, e_phi); at the poles the frame of the
    phi = 0 meridian is used, which yields the correct limits of all synthesized
    fields (the cos/sin factors compensate the frame rotation).
    """
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    t = np.clip(pts[:, 2], -1.0, 1.0)
    sin_th = np.hypot(pts[:, 0], pts[:, 1])
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    cos_phi, sin_phi = np.cos(phi), np.sin(phi)
    e_theta = np.column_stack([t * cos_phi, t * sin_phi, -sin_th])
    e_phi = np.column_stack([-sin_phi, cos_phi, np.zeros_like(phi)])
    return t, sin_th, phi, e_theta, e_phi, single


def _grid_tables(grid: QuadratureGrid, L: int, derivatives: bool) -> LegendreTables:
    key = ("legendre", L, derivatives)
    tab = grid._cache.get(key)
    if tab is None:
        sin_th = np.sqrt(np.maximum(1.0 - grid.t_nodes**2, 0.0))
        tab = LegendreTables(L, grid.t_nodes, sin_th, derivatives=derivatives)
        grid._cache[key] = tab
    return tab


def _pos_neg_indices(L: int, m: int):
    n = np.arange(m, L + 1)
    return n * n + n + m, n * n + n - m


# --------------------------------------------------------------------------- analysis

def _fourier_lon(F: np.ndarray):
    """Cos/sin longitude sums of F (B, nlat, nlon): returns (C, S)."""
    Fh = np.fft.rfft(F, axis=-1)
    return Fh.real, -Fh.imag


def _accumulate_analysis(out, C, S, grid, tables, L, kind, dphi):
    """Add quadrature projections of one angular component onto the packed basis.

    kind selects the latitude table; dphi=False projects against Phi_m, dphi=True
    against dPhi_m/dphi (used for the 1/sin * d/dphi parts of grad*/curl*).
    """
    lon_w = 2.0 * np.pi / grid.n_lon
    tw = grid.t_weights
    mmax = min(L, C.shape[-1] - 1)
    for m in range(0, mmax + 1):
        block = tables.block(kind, m)
        ipos, ineg = _pos_neg_indices(L, m)
        if not dphi:
            norm = 1.0 / SQRT_2PI if m == 0 else 1.0 / SQRT_PI
            gc = (lon_w * norm) * C[..., m]
            out[:, ipos] += (block @ (tw * gc).T).T
            if m >= 1:
                gs = (lon_w / SQRT_PI) * S[..., m]
                out[:, ineg] += (block @ (tw * gs).T).T
        elif m >= 1:
            gs = (lon_w / SQRT_PI) * S[..., m]
            gc = (lon_w / SQRT_PI) * C[..., m]
            out[:, ipos] += (-m) * (block @ (tw * gs).T).T
            out[:, ineg] += m * (block @ (tw * gc).T).T
    return out


def _require_transform_grid(grid: QuadratureGrid, needed: int):
    if not grid.is_full_sphere:
        raise ValueError("transforms need a full-sphere product grid about the z-axis")
    if grid.exactness_degree < needed:
        raise ValueError(
            f"grid exactness {grid.exactness_degree} insufficient, need >= {needed}")


def scalar_analysis(samples: np.ndarray, grid: QuadratureGrid, L: int) -> np.ndarray:
    """Batched forward scalar transform; samples (..., n_nodes) -> (..., (L+1)^2)."""
    _require_transform_grid(grid, 2 * L)
    samples = np.asarray(samples, dtype=float)
    single = samples.ndim == 1
    F = np.atleast_2d(samples).reshape(-1, grid.n_polar, grid.n_lon)
    C, S = _fourier_lon(F)
    tables = _grid_tables(grid, L, derivatives=False)
    out = np.zeros((F.shape[0], coeff_size(L)))
    _accumulate_analysis(out, C, S, grid, tables, L, "plm", dphi=False)
    return out[0] if single else out


def vector_analysis(samples: np.ndarray, grid: QuadratureGrid, L: int):
    """Raw vector projections a = <f, xi Y>, b = <f, grad* Y>, d = <f, curl* Y>.

    samples has shape (..., n_nodes, 3); each returned array has shape
    (..., (L+1)^2).  Building block for the vector transform and the Helmholtz
    decomposition.
    """
    _require_transform_grid(grid, 2 * L + 2)
    samples = np.asarray(samples, dtype=float)
    single = samples.ndim == 2
    f = samples.reshape(-1, grid.n_polar, grid.n_lon, 3)
    t = grid.t_nodes[:, None]
    sin_th = np.sqrt(np.maximum(1.0 - grid.t_nodes**2, 0.0))[:, None]
    phi = grid.longitudes()
    cos_phi, sin_phi = np.cos(phi)[None, :], np.sin(phi)[None, :]
    fr = f[..., 0] * (sin_th * cos_phi) + f[..., 1] * (sin_th * sin_phi) + f[..., 2] * t
    fth = f[..., 0] * (t * cos_phi) + f[..., 1] * (t * sin_phi) - f[..., 2] * sin_th
    fph = -f[..., 0] * sin_phi + f[..., 1] * cos_phi

    tables = _grid_tables(grid, L, derivatives=True)
    B = f.shape[0]
    a = np.zeros((B, coeff_size(L)))
    b = np.zeros_like(a)
    d = np.zeros_like(a)
    Cr, Sr = _fourier_lon(fr)
    _accumulate_analysis(a, Cr, Sr, grid, tables, L, "plm", dphi=False)
    Cth, Sth = _fourier_lon(fth)
    Cph, Sph = _fourier_lon(fph)
    _accumulate_analysis(b, Cth, Sth, grid, tables, L, "dtheta", dphi=False)
    _accumulate_analysis(b, Cph, Sph, grid, tables, L, "over_sin", dphi=True)
    _accumulate_analysis(d, Cph, Sph, grid, tables, L, "dtheta", dphi=False)
    tmp = np.zeros_like(d)
    _accumulate_analysis(tmp, Cth, Sth, grid, tables, L, "over_sin", dphi=True)
    d -= tmp
    if single:
        return a[0], b[0], d[0]
    return a, b, d


# --------------------------------------------------------------------------- synthesis

def _synth_points(coeffs2d: np.ndarray, L: int, tables: LegendreTables, phi, kind: str,
                  dphi: bool) -> np.ndarray:
    """Sum_{n,k} coeff[n,k] * T_n^{|m|}(t_p) * Phi-or-dPhi(phi_p); coeffs2d (B, P)."""
    out = np.zeros((coeffs2d.shape[0], phi.shape[0]))
    for m in range(0, L + 1):
        block = tables.block(kind, m)
        ipos, ineg = _pos_neg_indices(L, m)
        if not dphi:
            norm = 1.0 / SQRT_2PI if m == 0 else 1.0 / SQRT_PI
            out += (coeffs2d[:, ipos] @ block) * (norm * np.cos(m * phi))
            if m >= 1:
                out += (coeffs2d[:, ineg] @ block) * (np.sin(m * phi) / SQRT_PI)
        elif m >= 1:
            out += (coeffs2d[:, ipos] @ block) * (-m / SQRT_PI * np.sin(m * phi))
            out += (coeffs2d[:, ineg] @ block) * (m / SQRT_PI * np.cos(m * phi))
    return out


def scalar_synthesis(coeffs: np.ndarray, L: int, points) -> np.ndarray:
    """Evaluate band-limited scalar fields at arbitrary unit vectors (batched)."""
    coeffs = np.asarray(coeffs, dtype=float)
    single = coeffs.ndim == 1
    c2d = np.atleast_2d(coeffs)
    t, sin_th, phi, _, _, single_pt = local_frame(points)
    tables = LegendreTables(L, t, sin_th, derivatives=False)
    out = _synth_points(c2d, L, tables, phi, "plm", dphi=False)
    if single_pt:
        out = out[..., 0]
    return out[0] if single else out


def scalar_synthesis_grid(coeffs: np.ndarray, L: int, grid: QuadratureGrid) -> np.ndarray:
    """Fast synthesis on a product grid; exact for any L (orders fold mod n_lon)."""
    coeffs = np.asarray(coeffs, dtype=float)
    single = coeffs.ndim == 1
    c2d = np.atleast_2d(coeffs)
    tables = _grid_tables(grid, L, derivatives=False)
    nlon = grid.n_lon
    nyq = nlon // 2
    Z = np.zeros((c2d.shape[0], grid.n_polar, nyq + 1), dtype=complex)
    for m in range(0, L + 1):
        block = tables.block("plm", m)
        ipos, ineg = _pos_neg_indices(L, m)
        norm = 1.0 / SQRT_2PI if m == 0 else 1.0 / SQRT_PI
        A = norm * (c2d[:, ipos] @ block)
        Bm = (c2d[:, ineg] @ block) / SQRT_PI if m >= 1 else None
        r = m % nlon
        if r == 0:
            Z[..., 0] += nlon * A
        elif 2 * r == nlon:
            Z[..., nyq] += nlon * A
        elif r < nyq or (r == nyq and nlon % 2 == 1):
            Z[..., r] += (nlon / 2.0) * (A - 1j * Bm if Bm is not None else A)
        else:
            rr = nlon - r
            Z[..., rr] += (nlon / 2.0) * (A + 1j * Bm if Bm is not None else A)
    F = np.fft.irfft(Z, n=nlon, axis=-1).reshape(c2d.shape[0], -1)
    return F[0] if single else F


def vector_synthesis(coeffs: VectorCoeffs, points) -> np.ndarray:
    """Evaluate sum_i sum_{n,k} c_i[n,k] y^(i)_{n,k} at arbitrary unit vectors."""
    L = coeffs.L
    deg = degrees_flat(L)
    with np.errstate(divide="ignore", invalid="ignore"):
        w1 = 1.0 / np.sqrt(mu1(deg))
        w2 = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, mu2(deg), 1.0)), 0.0)
        w3 = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, mu3(deg), 1.0)), 0.0)
    radial = w1 * (deg + 1) * coeffs.c1 + w2 * deg * coeffs.c2
    grad_pot = -w1 * coeffs.c1 + w2 * coeffs.c2
    curl_pot = w3 * coeffs.c3

    t, sin_th, phi, e_theta, e_phi, single_pt = local_frame(points)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tables = LegendreTables(L, t, sin_th, derivatives=True)
    stack = np.vstack([radial, grad_pot, curl_pot])
    vals = _synth_points(stack, L, tables, phi, "plm", dphi=False)
    R = vals[0]
    g_dth = _synth_points(stack[1:], L, tables, phi, "dtheta", dphi=False)
    g_dph = _synth_points(stack[1:], L, tables, phi, "over_sin", dphi=True)
    f_theta = g_dth[0] - g_dph[1]
    f_phi = g_dph[0] + g_dth[1]
    out = R[:, None] * pts + f_theta[:, None] * e_theta + f_phi[:, None] * e_phi
    return out[0] if single_pt else out


# --------------------------------------------------------------------------- point evaluation

def sph_harm(n: int, k: int, xi) -> float | np.ndarray:
    """Real orthonormal spherical harmonic Y_{n,k}; xi is a unit vector or (N,3)."""
    c = ScalarCoeffs.unit(n, n, k)
    return scalar_synthesis(c.values, n, xi)


def vector_harm(family: int, n: int, k: int, xi):
    """Vector spherical harmonic y^(family)_{n,k} at unit vectors xi."""
    _check_family(family, n)
    c = VectorCoeffs.unit(n, family, n, k)
    return vector_synthesis(c, xi)


def inner_harmonic(n: int, k: int, x) -> float | np.ndarray:
    """Interior harmonic extension |x|^n Y_{n,k}(x/|x|)."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        if x.ndim == 1:
            return 1.0 / np.sqrt(4.0 * np.pi) if n == 0 else 0.0
        raise ValueError("batched evaluation requires x != 0")
    return r**n * sph_harm(n, k, x / r[..., None] if x.ndim > 1 else x / r)


def outer_harmonic(n: int, k: int, x) -> float | np.ndarray:
    """Exterior harmonic extension |x|^{-(n+1)} Y_{n,k}(x/|x|)."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise ValueError("outer harmonic undefined at x = 0")
    return r ** (-(n + 1)) * sph_harm(n, k, x / r[..., None] if x.ndim > 1 else x / r)


# --------------------------------------------------------------------------- transforms

def sht_forward(samples, grid: QuadratureGrid, L: int) -> ScalarCoeffs:
    """Forward scalar transform; exact for band-limited samples (exactness >= 2L)."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.n_nodes,):
        raise ValueError(f"expected {grid.n_nodes} samples")
    return ScalarCoeffs(L, scalar_analysis(samples, grid, L))


def sht_inverse(coeffs: ScalarCoeffs, points) -> np.ndarray:
    """Evaluate a coefficient set at arbitrary points on the unit sphere."""
    return scalar_synthesis(coeffs.values, coeffs.L, points)


def vsht_forward(samples, grid: QuadratureGrid, L: int) -> VectorCoeffs:
    """Forward vector transform onto the three families (exactness >= 2L+2)."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.n_nodes, 3):
        raise ValueError(f"expected samples of shape ({grid.n_nodes}, 3)")
    a, b, d = vector_analysis(samples, grid, L)
    c1, c2, c3 = assemble_vector_coeffs(a, b, d, L)
    return VectorCoeffs(L, c1, c2, c3)


def assemble_vector_coeffs(a, b, d, L: int):
    """Combine raw projections into family coefficient arrays (batched allowed)."""
    deg = degrees_flat(L)
    pos = deg > 0
    c1 = ((deg + 1) * a - b) / np.sqrt(mu1(deg))
    c2 = np.zeros_like(a)
    c3 = np.zeros_like(a)
    c2[..., pos] = (deg[pos] * a[..., pos] + b[..., pos]) / np.sqrt(mu2(deg[pos]))
    c3[..., pos] = d[..., pos] / np.sqrt(mu3(deg[pos]))
    return c1, c2, c3


def vsht_inverse(coeffs: VectorCoeffs, points) -> np.ndarray:
    """Synthesize a vector coefficient set at arbitrary points."""
    return vector_synthesis(coeffs, points)


def basis_matrix(L: int, points) -> np.ndarray:
    """All Y_{n,k}, n <= L, evaluated at points; shape ((L+1)^2, N)."""
    return scalar_synthesis(np.eye(coeff_size(L)), L, points)


def grad_basis_matrices(L: int, points):
    """grad* Y_{n,k} at points as Cartesian components; shape ((L+1)^2, N, 3)."""
    t, sin_th, phi, e_theta, e_phi, _ = local_frame(points)
    tables = LegendreTables(L, t, sin_th, derivatives=True)
    eye = np.eye(coeff_size(L))
    dth = _synth_points(eye, L, tables, phi, "dtheta", dphi=False)
    dph = _synth_points(eye, L, tables, phi, "over_sin", dphi=True)
    return dth[..., None] * e_theta[None, :, :] + dph[..., None] * e_phi[None, :, :]
