"""Legendre polynomials and orthonormalized associated Legendre tables.

The associated functions are fully normalized for the latitude integral,
int_{-1}^{1} Theta_n^m(t)^2 dt = 1, carry no Condon-Shortley phase, and are
generated by the standard normalized three-term recurrence, which is stable to
degrees far beyond anything used here.
"""

from __future__ import annotations

import numpy as np


def legendre(n: int, t):
    """Legendre polynomial P_n(t) by three-term recurrence; P_n(1) = 1."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-14):
        raise ValueError("argument must lie in [-1, 1]")
    p_prev = np.ones_like(t)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = t.copy()
    for k in range(2, n + 1):
        p, p_prev = ((2 * k - 1) * t * p - (k - 1) * p_prev) / k, p
    return p if p.ndim else float(p)


def legendre_all(nmax: int, t) -> np.ndarray:
    """Stack of P_0..P_nmax at ``t``; shape (nmax+1,) + t.shape."""
    t = np.asarray(t, dtype=float)
    out = np.empty((nmax + 1,) + t.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = t
    for k in range(2, nmax + 1):
        out[k] = ((2 * k - 1) * t * out[k - 1] - (k - 1) * out[k - 2]) / k
    return out


def packed_size(L: int) -> int:
    return (L + 1) * (L + 2) // 2


def block_start(L: int, m: int) -> int:
    """Row offset of the order-m block (rows n = m..L) in the packed layout."""
    return m * (L + 1) - m * (m - 1) // 2


class LegendreTables:
    """Normalized associated Legendre values at fixed latitudes.

    Rows are packed m-major: for each order m = 0..L the degrees n = m..L.
    ``plm`` holds Theta_n^m(t); with ``derivatives=True`` the object also holds
    ``plm_over_sin`` = Theta_n^m / sin(theta) (orders m >= 1 only; stable at the
    poles) and ``dplm_dtheta`` = d Theta_n^m(cos theta) / d theta.
    """

    def __init__(self, L: int, t, sin_theta=None, derivatives: bool = False):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if sin_theta is None:
            sin_theta = np.sqrt(np.maximum(1.0 - t**2, 0.0))
        else:
            sin_theta = np.atleast_1d(np.asarray(sin_theta, dtype=float))
        self.L = L
        self.t = t
        self.sin_theta = sin_theta
        self.plm = self._recurrence(L, t, sin_theta, seed=np.sqrt(0.5), seed_m=0)
        self.plm_over_sin = None
        self.dplm_dtheta = None
        if derivatives:
            self._build_derivatives()

    @staticmethod
    def _recurrence(L, t, s, seed, seed_m):
        """Run the normalized recurrence with the given sectoral seed at order seed_m."""
        npts = t.shape[0]
        out = np.zeros((packed_size(L), npts))
        sect = np.full(npts, seed)
        for m in range(seed_m, L + 1):
            base = block_start(L, m)
            out[base] = sect
            prev2 = None
            prev1 = sect
            for n in range(m + 1, L + 1):
                alpha = np.sqrt((2 * n - 1) * (2 * n + 1) / ((n - m) * (n + m)))
                cur = alpha * t * prev1
                if prev2 is not None:
                    beta = np.sqrt(
                        (2 * n + 1) * (n + m - 1) * (n - m - 1)
                        / ((2 * n - 3) * (n - m) * (n + m))
                    )
                    cur -= beta * prev2
                out[base + n - m] = cur
                prev2, prev1 = prev1, cur
            if m < L:
                sect = np.sqrt((2 * m + 3) / (2 * m + 2)) * s * sect
        return out

    def _build_derivatives(self):
        L, t, s = self.L, self.t, self.sin_theta
        # Theta/sin: same recurrence, seeded at m=1 with Theta_1^1/sin = sqrt(3)/2.
        self.plm_over_sin = self._recurrence(L, t, s, seed=np.sqrt(3.0) / 2.0, seed_m=1) \
            if L >= 1 else np.zeros_like(self.plm)
        dp = np.zeros_like(self.plm)
        for m in range(0, L + 1):
            base = block_start(L, m)
            for n in range(max(m, 1), L + 1):
                i = base + n - m
                if m == 0:
                    dp[i] = -np.sqrt(n * (n + 1.0)) * self.plm[block_start(L, 1) + n - 1]
                else:
                    j = block_start(L, m) + n - m
                    dp[i] = m * t * self.plm_over_sin[j]
                    if m < n:
                        dp[i] -= np.sqrt((n - m) * (n + m + 1.0)) \
                            * self.plm[block_start(L, m + 1) + n - m - 1]
        self.dplm_dtheta = dp

    def block(self, kind: str, m: int) -> np.ndarray:
        """View of rows n = m..L of the requested table at order m."""
        table = {"plm": self.plm, "over_sin": self.plm_over_sin,
                 "dtheta": self.dplm_dtheta}[kind]
        if table is None:
            raise ValueError("tables were built without derivatives")
        base = block_start(self.L, m)
        return table[base:base + self.L + 1 - m]
