"""Built-in initial data: band-limited random fields, rotated frame fields,
Taylor-Green vortices."""

import numpy as np

from .spectral import Grid2D


def band_limited_scalar(grid: Grid2D, rng, k_band=4, amplitude=1.0):
    """Smooth random scalar field with integer modes |xi_x|,|xi_y| <= k_band,
    zero mean, sup-norm scaled to `amplitude`."""
    n = grid.n
    fh = np.zeros((n, n // 2 + 1), dtype=complex)
    mx = np.arange(n // 2 + 1)
    my = np.fft.fftfreq(n, 1.0 / n)
    keep = (np.abs(my)[:, None] <= k_band) & (mx[None, :] <= k_band)
    coef = rng.standard_normal(keep.shape) + 1j * rng.standard_normal(keep.shape)
    fh[keep] = coef[keep]
    fh[0, 0] = 0.0
    f = grid.ifft(fh)
    peak = np.max(np.abs(f))
    if peak > 0:
        f *= amplitude / peak
    return f


def rotation_apply(omega, frame):
    """Rotate a frame field by the axis-angle field omega (3, N, N)."""
    theta = np.sqrt(np.sum(omega ** 2, axis=0))
    small = theta < 1e-30
    th = np.where(small, 1.0, theta)
    u = omega / th
    s = np.sin(theta)
    c1 = 1.0 - np.cos(theta)
    out = np.empty_like(frame)
    for a in range(3):
        v = frame[a]
        uxv = np.stack([u[1] * v[2] - u[2] * v[1],
                        u[2] * v[0] - u[0] * v[2],
                        u[0] * v[1] - u[1] * v[0]])
        udv = np.sum(u * v, axis=0)
        rot = v + s * uxv + c1 * (udv * u - v)
        out[a] = np.where(small, v, rot)
    return out


def uniform_frame(grid: Grid2D):
    """Identity frame at every grid point."""
    frame = np.zeros((3, 3, grid.n, grid.n))
    for a in range(3):
        frame[a, a] = 1.0
    return frame


def random_smooth_frame(grid: Grid2D, rng, angle=0.5, k_band=4, base=None):
    """Uniform frame twisted by a band-limited random rotation field."""
    if base is None:
        base = uniform_frame(grid)
    omega = np.stack([band_limited_scalar(grid, rng, k_band, angle)
                      for _ in range(3)])
    return rotation_apply(omega, base)


def taylor_green_velocity(grid: Grid2D, amplitude=1.0, mode=1):
    """Divergence-free Taylor-Green vortex; decays as exp(-2 eta k^2 t)."""
    k = 2.0 * np.pi * mode / grid.L
    vx = amplitude * np.sin(k * grid.x) * np.cos(k * grid.y)
    vy = -amplitude * np.cos(k * grid.x) * np.sin(k * grid.y)
    return vx, vy, k


def random_solenoidal_velocity(grid: Grid2D, rng, k_band=4, amplitude=1.0):
    """Band-limited divergence-free random velocity."""
    vx = band_limited_scalar(grid, rng, k_band, 1.0)
    vy = band_limited_scalar(grid, rng, k_band, 1.0)
    vx, vy = grid.leray_project(vx, vy)
    peak = max(np.max(np.abs(vx)), np.max(np.abs(vy)))
    if peak > 0:
        vx *= amplitude / peak
        vy *= amplitude / peak
    return vx, vy
