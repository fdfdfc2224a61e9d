"""Stepper guards, projection, determinism and snapshot round-trips."""

import numpy as np
import pytest

from biaxframe import (DegeneracyError, Grid2D, HydroParams, SimState,
                       SnapshotError, StabilityError, cfl_dt,
                       orthonormality_defect, read_snapshot, reorthonormalize,
                       run, split_constants, step, write_snapshot)
from biaxframe import initial


def setup(n=32, seed=0):
    grid = Grid2D(n)
    rng = np.random.default_rng(seed)
    frame = initial.random_smooth_frame(grid, rng, angle=0.3, k_band=3)
    vx, vy = initial.random_solenoidal_velocity(grid, rng, 3, 0.3)
    ep = split_constants(rng.uniform(0.1, 0.4, 12))
    hp = HydroParams(eta=0.25, beta=np.array([0.1, 0.5, 0.5, 0.4, 0.4, 0.4]),
                     chi=np.ones(3), eta_rot=np.full(3, 0.3))
    return grid, SimState(frame=frame, vx=vx, vy=vy), ep, hp


def test_cfl_guard():
    grid, state, ep, hp = setup()
    bound = cfl_dt(state, grid, ep, hp, safety=1.0)
    with pytest.raises(StabilityError):
        step(state, 2.0 * bound, grid, ep, hp)
    step(state, 0.5 * bound, grid, ep, hp)   # inside the bound: fine


def test_reorthonormalize_matches_svd_polar():
    rng = np.random.default_rng(1)
    from scipy.stats import special_ortho_group
    mats = special_ortho_group.rvs(3, size=64, random_state=rng)
    pert = mats + 1e-4 * rng.standard_normal(mats.shape)
    frame = np.moveaxis(pert, 0, -1).reshape(3, 3, 8, 8)
    out = reorthonormalize(frame)
    assert orthonormality_defect(out) < 1e-14
    # oracle: nearest rotation via SVD
    u, _, vt = np.linalg.svd(np.moveaxis(frame, (0, 1), (-2, -1)))
    polar = np.moveaxis(u @ vt, (-2, -1), (0, 1))
    assert np.max(np.abs(out - polar)) < 1e-10


def test_reorthonormalize_degeneracy_errors():
    frame = initial.uniform_frame(Grid2D(16))
    far = 0.4 * frame                     # Gram defect far beyond the guard
    with pytest.raises(DegeneracyError):
        reorthonormalize(far)
    reflected = frame.copy()
    reflected[2] = -reflected[2]          # det = -1
    with pytest.raises(DegeneracyError):
        reorthonormalize(reflected)


def test_step_keeps_frame_on_so3():
    grid, state, ep, hp = setup()
    dt = 0.5 * cfl_dt(state, grid, ep, hp, safety=1.0)
    s = state
    for _ in range(5):
        s = step(s, dt, grid, ep, hp)
        assert orthonormality_defect(s.frame) < 1e-14
    assert s.step == 5
    assert abs(s.t - 5 * dt) < 1e-15


def test_run_is_deterministic():
    grid, state, ep, hp = setup()
    dt = 0.5 * cfl_dt(state, grid, ep, hp, safety=1.0)
    f1, r1 = run(state.copy(), grid, ep, hp, t_end=10 * dt, dt=dt)
    f2, r2 = run(state.copy(), grid, ep, hp, t_end=10 * dt, dt=dt)
    assert np.array_equal(f1.frame, f2.frame)
    assert np.array_equal(f1.vx, f2.vx)
    assert r1.ledgers[-1].total_energy == r2.ledgers[-1].total_energy


def test_run_sampling_and_snapshots():
    grid, state, ep, hp = setup()
    dt = 0.5 * cfl_dt(state, grid, ep, hp, safety=1.0)
    final, res = run(state, grid, ep, hp, t_end=8 * dt, dt=dt,
                     sample_every=2, snapshot_every=4)
    assert len(res.ledgers) == 5            # t=0 plus every other step
    assert len(res.snapshots) == 3          # initial, step 4, step 8
    assert all(np.isfinite(l.residual) for l in res.ledgers)


def test_snapshot_roundtrip_bitexact(tmp_path):
    grid, state, ep, hp = setup()
    state.t, state.step = 1.25, 17
    path = tmp_path / "s.bin"
    write_snapshot(state, grid, path, params={"note": 1})
    back, grid2, params = read_snapshot(path)
    assert np.array_equal(back.frame, state.frame)
    assert np.array_equal(back.vx, state.vx)
    assert np.array_equal(back.vy, state.vy)
    assert back.t == state.t and back.step == state.step
    assert grid2.n == grid.n and grid2.L == grid.L
    assert params == {"note": 1}


def test_snapshot_error_paths(tmp_path):
    grid, state, ep, hp = setup()
    path = tmp_path / "s.bin"
    write_snapshot(state, grid, path)
    raw = path.read_bytes()

    trunc = tmp_path / "t.bin"
    trunc.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(SnapshotError):
        read_snapshot(trunc)

    corrupt = tmp_path / "c.bin"
    corrupt.write_bytes(raw[:8] + b"\xff" * 32 + raw[40:])
    with pytest.raises(SnapshotError):
        read_snapshot(corrupt)

    import json, struct
    header = json.loads(raw[8:8 + struct.unpack("<Q", raw[:8])[0]])
    header["version"] = 99
    blob = json.dumps(header).encode()
    vers = tmp_path / "v.bin"
    vers.write_bytes(struct.pack("<Q", len(blob)) + blob
                     + raw[8 + struct.unpack("<Q", raw[:8])[0]:])
    with pytest.raises(SnapshotError):
        read_snapshot(vers)
