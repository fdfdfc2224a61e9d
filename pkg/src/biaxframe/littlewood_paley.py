"""Numerical dyadic frequency analysis and weak twin-run metrics.

The dyadic variable is the integer-mode magnitude xi = |k| L / (2 pi), so the
low-pass profile chi lives on {xi <= 4/3} and the annulus profile phi on
{3/4 <= xi <= 8/3} regardless of the physical box size.  phi is built by
telescoping a smooth bump-based low-pass, which makes the partition of unity
exact (to roundoff) on every mode kept by the 2/3 dealiasing rule.
"""

from dataclasses import dataclass

import numpy as np

from .elasticity import ElasticParams, frame_gradients
from .spectral import Grid2D

# chi equals 1 below this radius; 2 sqrt(2) / 3 < 0.95 < 1 guarantees the
# telescoped sum reaches 1 on the whole dealiased band at j_max
_CHI_FLAT = 0.95
_CHI_SUPP = 4.0 / 3.0


class ConfigurationError(ValueError):
    pass


class UndefinedRatioError(ArithmeticError):
    """Requested a Bernstein ratio on an empty dyadic block."""


def _bump_step(t):
    """Smooth transition: 1 for t <= 0, 0 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        lo = np.where(t < 1.0, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
        hi = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
    return lo / (lo + hi)


def lowpass_profile(r):
    """Radial low-pass: 1 on r <= 0.95, 0 on r >= 4/3, smooth between."""
    r = np.asarray(r, dtype=float)
    return _bump_step((r - _CHI_FLAT) / (_CHI_SUPP - _CHI_FLAT))


def annulus_profile(r):
    """phi(r) = lowpass(r/2) - lowpass(r); supported in [0.95, 8/3]."""
    return lowpass_profile(np.asarray(r, dtype=float) / 2.0) - lowpass_profile(r)


@dataclass
class DyadicPartition:
    grid: Grid2D
    j_max: int
    xi: np.ndarray            # integer-mode radius per rfft mode
    chi: np.ndarray           # multiplier of Delta_{-1} = S_0
    phi: np.ndarray           # (j_max + 1, ...) multipliers of Delta_j, j >= 0

    @property
    def j_range(self):
        return range(-1, self.j_max + 1)

    def multiplier(self, j):
        if j == -1:
            return self.chi
        if 0 <= j <= self.j_max:
            return self.phi[j]
        raise IndexError(f"block index {j} outside [-1, {self.j_max}]")

    def lowpass_multiplier(self, j):
        """Multiplier of S_j = sum_{k <= j-1} Delta_k."""
        return lowpass_profile(self.xi / 2.0 ** j)


def build_partition(grid: Grid2D):
    j_max = int(np.floor(np.log2(grid.n // 2))) - 1
    if j_max < 1:
        raise ConfigurationError(
            f"grid n={grid.n} too small for a dyadic partition (j_max={j_max})")
    xi = np.sqrt(grid.k_sq) * grid.L / (2.0 * np.pi)
    chi = lowpass_profile(xi)
    phi = np.stack([annulus_profile(xi / 2.0 ** j) for j in range(j_max + 1)])
    return DyadicPartition(grid=grid, j_max=j_max, xi=xi, chi=chi, phi=phi)


def delta_j(f, j, part: DyadicPartition):
    g = part.grid
    return g.ifft(part.multiplier(j) * g.fft(f))


def s_j(f, j, part: DyadicPartition):
    g = part.grid
    return g.ifft(part.lowpass_multiplier(j) * g.fft(f))


def _l2(f, grid):
    return np.sqrt(grid.l2_norm_sq(f))


def besov_norm(f, s, q, grid: Grid2D, part: DyadicPartition):
    """Nonhomogeneous Besov norm B^s_{2,q} with q in {2, inf}."""
    if q not in (2, np.inf, "inf"):
        raise ConfigurationError(f"unsupported Besov q={q!r} (use 2 or inf)")
    fh = grid.fft(f)
    vals = np.array([2.0 ** (j * s) * _l2(grid.ifft(part.multiplier(j) * fh), grid)
                     for j in part.j_range])
    if q == 2:
        return float(np.sqrt(np.sum(vals ** 2)))
    return float(np.max(vals))


def bernstein_ratio(f, j, grid: Grid2D, part: DyadicPartition):
    """Diagnostic ratio 2^{-j} ||grad Delta_j f|| / ||Delta_j f||."""
    block = delta_j(f, j, part)
    denom = _l2(block, grid)
    if denom == 0.0:
        raise UndefinedRatioError(f"block j={j} carries no energy")
    gx, gy = grid.grad(block)
    num = np.sqrt(grid.l2_norm_sq(gx) + grid.l2_norm_sq(gy))
    return 2.0 ** (-j) * num / denom


# -- weak twin-run metrics ----------------------------------------------------


@dataclass
class TwinDiff:
    """Difference fields of a twin pair: dv (2,N,N), dframe (3,3,N,N)."""
    dv: np.ndarray
    dframe: np.ndarray


def weak_metrics(d: TwinDiff, s, grid: Grid2D, part: DyadicPartition):
    """The weak metrics (V, U, Phi) at Besov index s in (0, 1/2)."""
    if not 0.0 < s < 0.5:
        raise ConfigurationError(f"Besov index s must lie in (0, 1/2), got {s}")
    dvh = grid.fft(d.dv)
    dfh = grid.fft(d.dframe)
    V = 0.0
    U = 0.0
    for j in part.j_range:
        m = part.multiplier(j)
        V = max(V, 2.0 ** (-2 * s * j) * grid.l2_norm_sq(grid.ifft(m * dvh)))
        U = max(U, 2.0 ** (2 * (1 - s) * j) * grid.l2_norm_sq(grid.ifft(m * dfh)))
    return V, U, V + U


def wj_functional(d: TwinDiff, frame1, ep: ElasticParams, j,
                  grid: Grid2D, part: DyadicPartition):
    """Block elastic quadratic form: integral of W^j over the domain."""
    block = delta_j(d.dframe, j, part)
    gx, gy, div, curl = frame_gradients(block, grid)
    out = 0.0
    for i in range(3):
        out += ep.gamma[i] * (grid.l2_norm_sq(gx[i]) + grid.l2_norm_sq(gy[i]))
        out += ep.k[i] * grid.l2_norm_sq(div[i])
    for i in range(3):
        for l in range(3):
            if ep.kk[i, l] != 0.0:
                proj = np.einsum("k...,k...->...", frame1[i], curl[l])
                out += ep.kk[i, l] * grid.l2_norm_sq(proj)
    return 0.5 * out


def wj_lower_bound_constant(d: TwinDiff, frame1, ep: ElasticParams,
                            grid: Grid2D, part: DyadicPartition):
    """Measured constant c in  int W^j + ||Delta_{-1} dp||^2 >= c 4^j ||Delta_j dp||^2.

    Returns the minimum ratio over blocks j >= 0 with nonvanishing energy.
    """
    low = grid.l2_norm_sq(delta_j(d.dframe, -1, part))
    c = np.inf
    for j in range(part.j_max + 1):
        blk = grid.l2_norm_sq(delta_j(d.dframe, j, part))
        if blk <= 0.0:
            continue
        wj = wj_functional(d, frame1, ep, j, grid, part)
        c = min(c, (wj + low) / (4.0 ** j * blk))
    return float(c)


def h_delta_diag(frame1, dh, j, grid: Grid2D, part: DyadicPartition):
    """L2 norms of the rotational difference-force blocks H^{Delta_j}_k."""
    blk = delta_j(dh, j, part)

    def dot(a, b):
        return np.einsum("k...,k...->...", a, b)

    H1 = dot(frame1[1], blk[2]) - dot(frame1[2], blk[1])
    H2 = dot(frame1[2], blk[0]) - dot(frame1[0], blk[2])
    H3 = dot(frame1[0], blk[1]) - dot(frame1[1], blk[0])
    return np.array([_l2(H1, grid), _l2(H2, grid), _l2(H3, grid)])


def regularity_functional(grid: Grid2D, frame1, v1, frame2, v2, dt_frame1):
    """The run-regularity functional F(t) >= 1 controlling the Gronwall bound."""
    out = 1.0
    for vx, vy in (v1, v2):
        kxx, kxy = grid.grad(vx)
        kyx, kyy = grid.grad(vy)
        out += (grid.l2_norm_sq(kxx) + grid.l2_norm_sq(kxy)
                + grid.l2_norm_sq(kyx) + grid.l2_norm_sq(kyy))
        out += grid.integrate((vx ** 2 + vy ** 2) ** 2)
    for frame in (frame1, frame2):
        fh = grid.fft(frame)
        gx = grid.ifft(grid.ikx * fh)
        gy = grid.ifft(grid.iky * fh)
        gsq = np.sum(gx ** 2 + gy ** 2, axis=(0, 1))
        out += grid.integrate(gsq ** 2)          # ||grad p||_{L4}^4
        grad_l2 = grid.integrate(gsq)
        hxx = grid.ifft(grid.ikx * grid.ikx * fh)
        hxy = grid.ifft(grid.ikx * grid.iky * fh)
        hyy = grid.ifft(grid.iky * grid.iky * fh)
        hess = (grid.l2_norm_sq(hxx) + 2.0 * grid.l2_norm_sq(hxy)
                + grid.l2_norm_sq(hyy))
        out += grad_l2 + 2.0 * hess               # H^1 seminorm + L2 Hessian
    out += grid.l2_norm_sq(dt_frame1)
    return float(out)
