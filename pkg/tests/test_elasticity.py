"""Elastic energy, variational forces and stresses against hand oracles."""

import numpy as np
import pytest

from biaxframe import (Grid2D, ParameterError, body_force, distortion_stress,
                       elastic_density_direct, elastic_density_split,
                       elastic_energy, split_constants, variational_forces)
from biaxframe import initial
from biaxframe.spectral import DimensionError


def twist_frame(grid, q):
    """In-plane twist about e3 with integer wavenumber q."""
    frame = np.zeros((3, 3, grid.n, grid.n))
    frame[0, 0] = np.cos(q * grid.x)
    frame[0, 1] = np.sin(q * grid.x)
    frame[1, 0] = -np.sin(q * grid.x)
    frame[1, 1] = np.cos(q * grid.x)
    frame[2, 2] = 1.0
    return frame


def test_split_constants_examples():
    p = split_constants(np.ones(12))
    assert np.allclose(p.gamma, 1.0)
    assert np.allclose(p.k, 0.0)
    assert np.allclose(p.kk, 0.0)
    assert p.is_one_constant

    K = np.ones(12)
    K[0], K[3], K[6], K[9] = 2.0, 1.0, 3.0, 1.5
    p = split_constants(K)
    assert p.gamma[0] == 1.0
    assert p.k[0] == 1.0          # k1 = K1 - gamma1
    assert p.kk[0, 0] == 0.0      # k11 = K4 - gamma1
    assert p.kk[2, 0] == 2.0      # k31 = K7 - gamma1
    assert p.kk[1, 0] == 0.5      # k21 = K10 - gamma1

    bad = np.ones(12)
    bad[1] = 0.0
    with pytest.raises(ParameterError):
        split_constants(bad)
    with pytest.raises(ParameterError):
        split_constants(np.ones(11))


def test_constant_frame_zero_everything():
    grid = Grid2D(32)
    frame = initial.uniform_frame(grid)
    p = split_constants(np.full(12, 0.8))
    assert np.max(np.abs(elastic_density_direct(frame, grid, p))) < 1e-15
    assert np.max(np.abs(elastic_density_split(frame, grid, p))) < 1e-15
    vf = variational_forces(frame, grid, p)
    assert np.max(np.abs(vf.h)) < 1e-14
    assert np.max(np.abs(vf.ml)) < 1e-14
    assert np.max(np.abs(body_force(frame, grid, vf))) < 1e-14


def test_twist_field_oracles():
    grid = Grid2D(64)
    q, K = 2.0, 0.7
    frame = twist_frame(grid, q)
    p = split_constants(np.full(12, K))
    fd = elastic_density_direct(frame, grid, p)
    fs = elastic_density_split(frame, grid, p)
    assert np.max(np.abs(fd - K * q * q)) < 1e-12
    assert np.max(np.abs(fs - K * q * q)) < 1e-12
    # one-constant forces are gamma * laplacian exactly
    vf = variational_forces(frame, grid, p)
    lap = grid.ifft(-grid.d_k_sq * grid.fft(frame))
    assert np.max(np.abs(vf.h - K * lap)) < 1e-12
    # distortion stress: sigma_xx = -2 gamma q^2, other in-plane entries 0
    sd = distortion_stress(frame, grid, p)
    assert np.max(np.abs(sd[0, 0] + 2 * K * q * q)) < 1e-12
    assert np.max(np.abs(sd[0, 1])) < 1e-12
    assert np.max(np.abs(sd[1, 0])) < 1e-12
    assert np.max(np.abs(sd[1, 1])) < 1e-12


def test_one_constant_rotation_invariance():
    grid = Grid2D(32)
    rng = np.random.default_rng(5)
    frame = initial.random_smooth_frame(grid, rng, angle=0.4)
    p = split_constants(np.full(12, 1.3))
    f0 = elastic_density_split(frame, grid, p)
    # constant global rotation applied to every frame
    w = rng.standard_normal(3)
    omega = np.broadcast_to(w[:, None, None], (3, 32, 32)).copy()
    rotated = initial.rotation_apply(omega, frame)
    f1 = elastic_density_split(rotated, grid, p)
    assert np.max(np.abs(f0 - f1)) < 1e-11 * max(1.0, np.max(np.abs(f0)))


def test_split_density_nonnegative():
    grid = Grid2D(32)
    rng = np.random.default_rng(6)
    for _ in range(5):
        frame = initial.random_smooth_frame(grid, rng, angle=0.5)
        p = split_constants(rng.uniform(0.05, 3.0, 12))
        f = elastic_density_split(frame, grid, p)
        assert np.min(f) > -1e-12 * max(1.0, np.max(np.abs(f)))


def test_rotational_force_fd_consistency():
    """ml_k against the difference quotient of the energy under L_k rotation."""
    grid = Grid2D(32)
    rng = np.random.default_rng(7)
    frame = initial.random_smooth_frame(grid, rng, angle=0.3)
    p = split_constants(rng.uniform(0.2, 1.5, 12))
    vf = variational_forces(frame, grid, p)
    for k in range(3):
        w = initial.band_limited_scalar(grid, rng, 4, 1.0)
        omega = w[None] * frame[k]      # rotation about n_k
        pred = grid.integrate(w * vf.ml[k])
        errs = []
        for eps in (2e-4, 1e-4):
            ep_ = (elastic_energy(initial.rotation_apply(eps * omega, frame), grid, p)
                   - elastic_energy(initial.rotation_apply(-eps * omega, frame),
                                    grid, p)) / (2 * eps)
            errs.append(abs(ep_ - pred) / max(abs(pred), 1e-30))
        assert errs[-1] < 1e-6
        assert errs[0] / errs[1] > 3.0    # second order


def test_shape_errors():
    grid = Grid2D(32)
    p = split_constants(np.ones(12))
    with pytest.raises(DimensionError):
        elastic_density_direct(np.zeros((3, 3, 16, 16)), grid, p)
    with pytest.raises(DimensionError):
        variational_forces(np.zeros((3, 3, 16, 16)), grid, p)
