"""Periodic-grid fields and Fourier-space calculus.

All fields live on an N x N periodic grid of physical side L and are stored
as real arrays of shape (..., N, N); the last two axes are y and x.  Every
derivative is spectral (exact for band-limited data), computed with real
transforms over the trailing axes so component stacks batch through a single
FFT call.
"""

import os

import numpy as np
from scipy import fft as sfft


def _workers():
    try:
        return max(1, int(os.environ.get("BIAXFRAME_THREADS", "1")))
    except ValueError:
        return 1


class DimensionError(ValueError):
    """Field shape does not match the grid."""


class Grid2D:
    """Square periodic grid [0, L)^2 with N points per side.

    Precomputes physical wavenumbers for the half-complex rfft2 layout, the
    2/3-rule dealiasing mask and the Leray projector coefficients.
    """

    def __init__(self, n, L=2.0 * np.pi):
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 16, got {n}")
        if L <= 0:
            raise ValueError(f"grid side length must be positive, got {L}")
        self.n = n
        self.L = float(L)
        self.dx = self.L / n

        k1 = 2.0 * np.pi / self.L
        ky = k1 * np.fft.fftfreq(n, 1.0 / n)          # full axis (rows)
        kx = k1 * np.arange(n // 2 + 1)               # rfft axis (cols)
        self.ky = ky[:, None]
        self.kx = kx[None, :]
        self.k_sq = self.kx ** 2 + self.ky ** 2
        self.k_max = k1 * (n // 2)

        # odd-derivative multipliers: Nyquist modes zeroed to keep results
        # real and antisymmetric
        dky = ky.copy()
        dky[n // 2] = 0.0
        dkx = kx.copy()
        dkx[-1] = 0.0
        self.ikx = (1j * dkx)[None, :]
        self.iky = (1j * dky)[:, None]
        self.dkx = dkx[None, :]
        self.dky = dky[:, None]
        # |k|^2 consistent with the odd-derivative multipliers (Nyquist
        # zeroed), so that -d_k_sq is exactly grad-adjoint-grad on the grid
        self.d_k_sq = self.dkx ** 2 + self.dky ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            self.inv_d_k_sq = np.where(self.d_k_sq > 0, 1.0 / self.d_k_sq, 0.0)

        cutoff = (2.0 / 3.0) * (n // 2)
        mx = np.abs(np.arange(n // 2 + 1)) <= cutoff
        my = np.abs(np.fft.fftfreq(n, 1.0 / n)) <= cutoff
        self.dealias_mask = my[:, None] & mx[None, :]

        with np.errstate(divide="ignore", invalid="ignore"):
            self.inv_k_sq = np.where(self.k_sq > 0, 1.0 / self.k_sq, 0.0)

        x = np.arange(n) * self.dx
        self.x, self.y = np.meshgrid(x, x)

    # -- transforms ---------------------------------------------------------

    def fft(self, f):
        self._check(f)
        return sfft.rfft2(f, axes=(-2, -1), workers=_workers())

    def ifft(self, fh):
        return sfft.irfft2(fh, s=(self.n, self.n), axes=(-2, -1),
                           workers=_workers())

    def _check(self, f):
        if f.shape[-2:] != (self.n, self.n):
            raise DimensionError(
                f"expected trailing shape {(self.n, self.n)}, got {f.shape[-2:]}")

    # -- calculus ------------------------------------------------------------

    def grad(self, f):
        """Gradient of a scalar (or stacked) field: returns (df/dx, df/dy)."""
        fh = self.fft(f)
        return self.ifft(self.ikx * fh), self.ifft(self.iky * fh)

    def div2(self, fx, fy):
        """Divergence of an in-plane vector field."""
        return self.ifft(self.ikx * self.fft(fx) + self.iky * self.fft(fy))

    def div3(self, f):
        """Divergence of a 3-vector field with d/dz = 0; f has shape (3,N,N)."""
        self._check(f)
        fh = self.fft(f)
        return self.ifft(self.ikx * fh[0] + self.iky * fh[1])

    def curl3(self, f):
        """Curl of a 3-vector field depending on (x, y) only.

        (curl f)_x = df_z/dy, (curl f)_y = -df_z/dx,
        (curl f)_z = df_y/dx - df_x/dy.
        """
        self._check(f)
        fh = self.fft(f)
        out = np.empty_like(fh)
        out[0] = self.iky * fh[2]
        out[1] = -self.ikx * fh[2]
        out[2] = self.ikx * fh[1] - self.iky * fh[0]
        return self.ifft(out)

    def laplacian(self, f):
        return self.ifft(-self.k_sq * self.fft(f))

    def dealias(self, f):
        """Zero all modes outside the 2/3 band; idempotent."""
        return self.ifft(self.dealias_mask * self.fft(f))

    def leray_project(self, vx, vy):
        """Project an in-plane vector field onto divergence-free fields.

        Uses the same Nyquist-zeroed wavenumbers as the derivative operators,
        so div2 of the result vanishes identically.
        """
        vxh = self.fft(vx)
        vyh = self.fft(vy)
        kdv = (self.dkx * vxh + self.dky * vyh) * self.inv_d_k_sq
        return self.ifft(vxh - self.dkx * kdv), self.ifft(vyh - self.dky * kdv)

    def integrate(self, f):
        """Uniform-grid quadrature; exact for band-limited integrands."""
        self._check(f)
        return float(np.sum(f)) * self.dx * self.dx

    def l2_norm_sq(self, f):
        """Integral of |f|^2, summing all leading component axes."""
        self._check(f)
        return float(np.sum(f * f)) * self.dx * self.dx
