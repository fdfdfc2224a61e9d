"""Biaxial orientational elasticity on a periodic grid.

The twelve-constant energy density is evaluated in two equivalent forms:
the literal twelve-bulk + three-surface form, and the rewritten form
(1/2) sum_i gamma_i |grad n_i|^2 + W with W built from the nonnegative
splay/twist remainders.  The variational forces, the distortion stress and
the elastic body force all derive from the rewritten form, with every
derivative spectral.
"""

from dataclasses import dataclass

import numpy as np

from .frame_algebra import validate_frame
from .spectral import DimensionError, Grid2D


class ParameterError(ValueError):
    """Elastic constants violate positivity."""


# K_4..K_12 feed the twist coefficients k_{ij}; (i, j) indexes
# (n_i . curl n_j) and the subtracted gamma follows j (1-based).
_K_TO_KK = {4: (1, 1), 5: (2, 2), 6: (3, 3),
            7: (3, 1), 8: (1, 2), 9: (2, 3),
            10: (2, 1), 11: (3, 2), 12: (1, 3)}


@dataclass(frozen=True)
class ElasticParams:
    K: np.ndarray          # 12 positive constants
    gamma: np.ndarray      # 3 surface / one-constant coefficients
    k: np.ndarray          # 3 splay remainders
    kk: np.ndarray         # 3x3 twist remainders, kk[i-1, j-1] = k_{ij}

    @property
    def is_one_constant(self):
        return bool(np.all(self.k == 0.0) and np.all(self.kk == 0.0))


def split_constants(K):
    """Split the twelve constants into (gamma_i, k_i, k_ij)."""
    K = np.asarray(K, dtype=float)
    if K.shape != (12,):
        raise ParameterError(f"expected 12 elastic constants, got shape {K.shape}")
    if np.any(K <= 0.0):
        bad = [f"K{i + 1}={K[i]}" for i in np.flatnonzero(K <= 0.0)]
        raise ParameterError("elastic constants must be positive: " + ", ".join(bad))
    gamma = np.array([min(K[0], K[3], K[6], K[9]),
                      min(K[1], K[4], K[7], K[10]),
                      min(K[2], K[5], K[8], K[11])])
    k = K[:3] - gamma
    kk = np.zeros((3, 3))
    for kn, (i, j) in _K_TO_KK.items():
        kk[i - 1, j - 1] = K[kn - 1] - gamma[j - 1]
    return ElasticParams(K=K, gamma=gamma, k=k, kk=kk)


# -- differential building blocks -------------------------------------------


def frame_gradients(frame, grid: Grid2D, fh=None):
    """All first derivatives of the frame: returns (gx, gy, div, curl).

    gx, gy have shape (3, 3, N, N) (d n_alpha / dx|dy componentwise);
    div has shape (3, N, N); curl has shape (3, 3, N, N) with d/dz = 0.
    One batched transform each way.
    """
    if frame.shape != (3, 3, grid.n, grid.n):
        raise DimensionError(
            f"frame field shape {frame.shape} does not match grid n={grid.n}")
    if fh is None:
        fh = grid.fft(frame)
    g = grid.ifft(np.stack([grid.ikx * fh, grid.iky * fh]))
    gx, gy = g[0], g[1]
    div = gx[:, 0] + gy[:, 1]
    curl = np.stack([gy[:, 2], -gx[:, 2], gx[:, 1] - gy[:, 0]], axis=1)
    return gx, gy, div, curl


def _dot(a, b):
    return np.einsum("k...,k...->...", a, b)


# -- energy densities --------------------------------------------------------


def elastic_density_direct(frame, grid: Grid2D, params: ElasticParams):
    """Literal twelve-bulk + three-surface density with surface weights gamma_i."""
    gx, gy, div, curl = frame_gradients(frame, grid)
    K = params.K
    out = K[0] * div[0] ** 2 + K[1] * div[1] ** 2 + K[2] * div[2] ** 2
    for kn, (i, j) in _K_TO_KK.items():
        out = out + K[kn - 1] * _dot(frame[i - 1], curl[j - 1]) ** 2
    # surface terms: div[(n_i . grad) n_i - (div n_i) n_i].  The second
    # derivatives cancel in the expansion, leaving the pointwise form
    # sum_{jk} d_j n_k d_k n_j - (div n)^2 in the same first-derivative data.
    for i in range(3):
        cross = (gx[i, 0] ** 2 + 2.0 * gx[i, 1] * gy[i, 0] + gy[i, 1] ** 2)
        out = out + params.gamma[i] * (cross - div[i] ** 2)
    return 0.5 * out


def elastic_density_split(frame, grid: Grid2D, params: ElasticParams):
    """Rewritten density (1/2) sum gamma_i |grad n_i|^2 + W(p, grad p)."""
    gx, gy, div, curl = frame_gradients(frame, grid)
    g = params.gamma
    out = (g[0] * (np.sum(gx[0] ** 2 + gy[0] ** 2, axis=0))
           + g[1] * (np.sum(gx[1] ** 2 + gy[1] ** 2, axis=0))
           + g[2] * (np.sum(gx[2] ** 2 + gy[2] ** 2, axis=0)))
    out = out + np.einsum("i,i...->...", params.k, div ** 2)
    for i in range(3):
        for j in range(3):
            if params.kk[i, j] != 0.0:
                out = out + params.kk[i, j] * _dot(frame[i], curl[j]) ** 2
    return 0.5 * out


def elastic_energy(frame, grid: Grid2D, params: ElasticParams):
    return grid.integrate(elastic_density_split(frame, grid, params))


# -- variational forces ------------------------------------------------------


@dataclass
class VariationalForces:
    h: np.ndarray   # (3, 3, N, N): unconstrained -dF/dn_alpha
    ml: np.ndarray  # (3, N, N): rotational forces L_k F


def _ml_from_h(frame, h):
    """Rotational forces L_k F from the frame and h = -dF/dp."""
    return np.stack([
        _dot(frame[1], h[2]) - _dot(frame[2], h[1]),
        _dot(frame[2], h[0]) - _dot(frame[0], h[2]),
        _dot(frame[0], h[1]) - _dot(frame[1], h[0]),
    ])


def variational_forces(frame, grid: Grid2D, params: ElasticParams, grads=None):
    """Unconstrained variational forces h_i and the rotational forces L_k F.

    h_i = gamma_i lap n_i + k_i grad(div n_i)
          - sum_j k_{ji} curl[(curl n_i . n_j) n_j]
          - sum_j k_{ij} (n_i . curl n_j) curl n_j
    This is the exact gradient of the discrete quadrature energy of the
    split density, so finite differences of the energy converge to it.
    Pass grads=(gx, gy, div, curl) to reuse precomputed derivatives.
    """
    fh = grid.fft(frame)
    # linear part assembled in spectral space: gamma_i lap + k_i grad div
    divh = grid.ikx * fh[:, 0] + grid.iky * fh[:, 1]
    hh = -grid.d_k_sq * fh * params.gamma[:, None, None, None]
    hh[:, 0] += params.k[:, None, None] * (grid.ikx * divh)
    hh[:, 1] += params.k[:, None, None] * (grid.iky * divh)
    h = grid.ifft(hh)

    if not params.is_one_constant:
        if grads is None:
            grads = frame_gradients(frame, grid, fh=fh)
        curl = grads[3]
        # curl is linear: sum the projected fields first, one transform pair
        proj = np.zeros_like(frame)
        for i in range(3):
            for j in range(3):
                if params.kk[j, i] != 0.0:
                    proj[i] += (params.kk[j, i]
                                * _dot(curl[i], frame[j])[None] * frame[j])
                if params.kk[i, j] != 0.0:
                    h[i] -= params.kk[i, j] * (_dot(frame[i], curl[j])[None]
                                               * curl[j])
        ph = grid.fft(proj)
        ch = np.empty_like(ph)
        ch[:, 0] = grid.iky * ph[:, 2]
        ch[:, 1] = -grid.ikx * ph[:, 2]
        ch[:, 2] = grid.ikx * ph[:, 1] - grid.iky * ph[:, 0]
        h -= grid.ifft(ch)
    return VariationalForces(h=h, ml=_ml_from_h(frame, h))


# -- distortion stress and body force ----------------------------------------


def distortion_stress(frame, grid: Grid2D, params: ElasticParams, grads=None):
    """Ericksen distortion stress sigma^d_{ij} = -df/d(d_j p) . d_i p.

    Returned as (3, 3, N, N); rows/columns touching z vanish identically
    since d/dz = 0 and the velocity is in-plane.
    """
    if grads is None:
        grads = frame_gradients(frame, grid)
    gx, gy, div, curl = grads
    grads = (gx, gy)  # index j: derivative direction
    n = grid.n
    sig = np.zeros((3, 3, n, n))
    gdot = np.zeros((3, 3, n, n))  # gdot[i, j] = n_i . curl n_j
    for i in range(3):
        for j in range(3):
            gdot[i, j] = _dot(frame[i], curl[j])
    for i in range(2):
        di = grads[i]
        for j in range(2):
            dj = grads[j]
            acc = np.zeros((n, n))
            for a in range(3):
                acc += params.gamma[a] * np.sum(dj[a] * di[a], axis=0)
                acc += params.k[a] * div[a] * di[a, j]
                for b in range(3):
                    if params.kk[b, a] != 0.0:
                        # (d_i n_a x n_b)_j
                        dxb = (di[a, (j + 1) % 3] * frame[b, (j + 2) % 3]
                               - di[a, (j + 2) % 3] * frame[b, (j + 1) % 3])
                        acc += params.kk[b, a] * gdot[b, a] * dxb
            sig[i, j] = -acc
    return sig


def body_force(frame, grid: Grid2D, vf: VariationalForces, grads=None):
    """Elastic body force F_i from the rotational forces.

    F_i = (d_i n1 . n2) L3 F + (d_i n3 . n1) L2 F + (d_i n2 . n3) L1 F.
    Equals div sigma^d up to a discrete gradient, which the Leray
    projection removes.
    """
    if grads is None:
        grads = frame_gradients(frame, grid)
    gx, gy = grads[0], grads[1]
    ml = vf.ml
    out = np.empty((2, grid.n, grid.n))
    for i, g in enumerate((gx, gy)):
        out[i] = (_dot(g[0], frame[1]) * ml[2]
                  + _dot(g[2], frame[0]) * ml[1]
                  + _dot(g[1], frame[2]) * ml[0])
    return out


def check_frame_field(frame, grid: Grid2D, tol=1e-12):
    if frame.shape != (3, 3, grid.n, grid.n):
        raise DimensionError(
            f"frame field shape {frame.shape} does not match grid n={grid.n}")
    validate_frame(frame, tol=tol)
