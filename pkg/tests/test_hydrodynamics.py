"""Kinematics, co-rotational rates, viscous stress and the energy ledger."""

import numpy as np
import pytest

from biaxframe import (CoefficientError, Grid2D, HydroParams, EnergyLedger,
                       corotational_rates, energy_report, frame_rhs,
                       kinematics, momentum_rhs, split_constants,
                       variational_forces, viscous_stress)
from biaxframe.elasticity import VariationalForces, distortion_stress
from biaxframe import hydrodynamics as hydro
from biaxframe import initial
from biaxframe.simulation import SimState, rhs


def default_params(**kw):
    p = dict(eta=0.25, beta=np.array([0.1, 0.5, 0.5, 0.4, 0.4, 0.4]),
             chi=np.ones(3), eta_rot=np.full(3, 0.3))
    p.update(kw)
    return HydroParams(**p)


def test_validate_lists_each_violation():
    ok = default_params()
    assert hydro.validate(ok) == []
    bad = default_params(eta=-1.0, beta=np.array([1.0, 0.5, 0.5, -0.1, 0.4, 0.4]),
                         chi=np.array([1.0, -2.0, 1.0]))
    msgs = "; ".join(hydro.validate(bad))
    assert "eta > 0" in msgs
    assert "beta3 >= 0" in msgs
    assert "chi2 > 0" in msgs
    assert "beta0^2 <= beta1*beta2" in msgs
    with pytest.raises(CoefficientError):
        hydro.require_valid(bad)


def test_shear_kinematics():
    grid = Grid2D(32)
    vx = np.sin(grid.y)
    vy = np.zeros_like(vx)
    kin = kinematics(vx, vy, grid)
    c = np.cos(grid.y)
    assert np.max(np.abs(kin.kappa[0, 1] - c)) < 1e-12
    assert np.max(np.abs(kin.A[0, 1] - 0.5 * c)) < 1e-12
    assert np.max(np.abs(kin.A[1, 0] - 0.5 * c)) < 1e-12
    assert np.max(np.abs(kin.Omega[0, 1] - 0.5 * c)) < 1e-12
    assert np.max(np.abs(kin.Omega[1, 0] + 0.5 * c)) < 1e-12
    assert np.max(np.abs(kin.kappa[2])) == 0.0


def test_rigid_rotation_frame_indifference():
    """With ml = 0 and A = 0 the frame co-rotates with the flow exactly."""
    grid = Grid2D(32)
    rng = np.random.default_rng(0)
    frame = initial.random_smooth_frame(grid, rng, angle=0.4)
    n = grid.n
    w = initial.band_limited_scalar(grid, rng, 4, 1.0)
    kappa = np.zeros((3, 3, n, n))
    kappa[0, 1] = -w
    kappa[1, 0] = w
    kin = hydro.Kinematics(kappa=kappa, A=np.zeros_like(kappa), Omega=kappa)
    vf0 = VariationalForces(h=np.zeros((3, 3, n, n)), ml=np.zeros((3, n, n)))
    rates = corotational_rates(frame, kin, vf0, default_params())
    zeros = np.zeros((n, n))
    dfr = frame_rhs(frame, rates, zeros, zeros, grid)
    target = np.einsum("ij...,aj...->ai...", kin.Omega, frame)
    assert np.max(np.abs(dfr - target)) < 1e-12


def test_uniform_frame_statics():
    grid = Grid2D(32)
    frame = initial.uniform_frame(grid)
    ep = split_constants(np.full(12, 0.5))
    hp = default_params()
    vf = variational_forces(frame, grid, ep)
    zeros = np.zeros((grid.n, grid.n))
    kin = kinematics(zeros, zeros, grid)
    rates = corotational_rates(frame, kin, vf, hp)
    assert np.max(np.abs(frame_rhs(frame, rates, zeros, zeros, grid))) == 0.0
    led = energy_report(frame, zeros, zeros, grid, ep, hp, vf)
    assert led.total_energy == 0.0
    assert led.total_dissipation == 0.0


def test_frame_rhs_is_tangent():
    """dn/dt must be pointwise skew: d/dt (n_a . n_b) = advection only."""
    grid = Grid2D(32)
    rng = np.random.default_rng(1)
    frame = initial.random_smooth_frame(grid, rng, angle=0.3, k_band=3)
    ep = split_constants(rng.uniform(0.1, 0.4, 12))
    hp = default_params()
    vf = variational_forces(frame, grid, ep)
    kin = kinematics(*initial.random_solenoidal_velocity(grid, rng, 3, 0.3),
                     grid)
    rates = corotational_rates(frame, kin, vf, hp)
    zeros = np.zeros((grid.n, grid.n))
    rot = frame_rhs(frame, rates, zeros, zeros, grid)   # rotation part only
    sym = np.einsum("ai...,bi...->ab...", rot, frame)
    assert np.max(np.abs(sym + np.swapaxes(sym, 0, 1))) < 1e-12


def test_energy_balance_against_euler_probe():
    """-dE/dt from a centered Euler probe matches the dissipation ledger."""
    grid = Grid2D(32)
    rng = np.random.default_rng(2)
    frame = initial.random_smooth_frame(grid, rng, angle=0.3, k_band=3)
    vx, vy = initial.random_solenoidal_velocity(grid, rng, 3, 0.3)
    ep = split_constants(rng.uniform(0.1, 0.4, 12))
    hp = default_params()
    state = SimState(frame=frame, vx=vx, vy=vy)
    df, dvx, dvy = rhs(state, grid, ep, hp)
    vf = variational_forces(frame, grid, ep)
    led = energy_report(frame, vx, vy, grid, ep, hp, vf)
    t = 1e-6

    def energy(sign):
        f2 = frame + sign * t * df
        vf2 = variational_forces(f2, grid, ep)
        return energy_report(f2, vx + sign * t * dvx, vy + sign * t * dvy,
                             grid, ep, hp, vf2).total_energy

    dEdt = (energy(+1) - energy(-1)) / (2 * t)
    rel = abs(dEdt + led.total_dissipation) / led.total_dissipation
    assert rel < 1e-7


def test_dissipation_channels_nonnegative():
    grid = Grid2D(32)
    rng = np.random.default_rng(3)
    frame = initial.random_smooth_frame(grid, rng, angle=0.4)
    vx, vy = initial.random_solenoidal_velocity(grid, rng, 4, 0.5)
    ep = split_constants(rng.uniform(0.1, 1.0, 12))
    hp = default_params()
    vf = variational_forces(frame, grid, ep)
    led = energy_report(frame, vx, vy, grid, ep, hp, vf)
    assert led.d_visc > 0
    assert np.all(led.d_rot >= 0)
    assert led.d_s3 >= 0 and led.d_s4 >= 0 and led.d_s5 >= 0
    # beta quadratic form is nonnegative whenever beta0^2 <= beta1 beta2
    assert led.d_beta12 >= -1e-12 * led.total_dissipation
    assert led.total_dissipation > 0


def test_momentum_rhs_divergence_free():
    grid = Grid2D(32)
    rng = np.random.default_rng(4)
    frame = initial.random_smooth_frame(grid, rng, angle=0.3)
    vx, vy = initial.random_solenoidal_velocity(grid, rng, 4, 0.5)
    ep = split_constants(rng.uniform(0.1, 0.5, 12))
    hp = default_params()
    vf = variational_forces(frame, grid, ep)
    kin = kinematics(vx, vy, grid)
    rates = corotational_rates(frame, kin, vf, hp)
    sigma = viscous_stress(frame, kin, rates, vf, hp)
    sigma_d = distortion_stress(frame, grid, ep)
    dvx, dvy = momentum_rhs(vx, vy, frame, sigma, sigma_d, grid, hp)
    assert np.max(np.abs(grid.div2(dvx, dvy))) < 1e-9


def test_ledger_csv_channels_complete():
    led = EnergyLedger(t=0.0, kinetic=1.0, elastic=2.0, d_visc=0.1,
                       d_rot=np.array([0.1, 0.2, 0.3]), d_beta12=0.4,
                       d_s3=0.5, d_s4=0.6, d_s5=0.7)
    ch = led.channels()
    assert led.total_energy == 3.0
    assert abs(led.total_dissipation - 2.9) < 1e-14
    assert set(ch) == {"kinetic", "elastic", "d_visc", "d_rot1", "d_rot2",
                       "d_rot3", "d_beta12", "d_s3", "d_s4", "d_s5",
                       "total_dissipation", "residual"}
