"""Command-line front end: coefficient checks, runs, twin experiments and
offline dyadic analysis.

Exit codes: 0 ok, 2 configuration error, 3 runtime divergence, 4 I/O error.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import hydrodynamics as hydro
from . import initial, littlewood_paley as lp, report
from .config import ConfigError, parse_config
from .elasticity import ParameterError
from .simulation import (DegeneracyError, DivergenceError, SimState,
                         StabilityError, cfl_dt, rhs, run, twin_metrics,
                         twin_run)
from .snapshot import SnapshotError, read_snapshot, write_snapshot
from .spectral import Grid2D

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4


def build_initial_state(cfg):
    grid = Grid2D(cfg.n, cfg.L)
    rng = np.random.default_rng(cfg.seed)
    ini = cfg.initial
    kind = ini.get("type", "random_smooth")
    if kind == "snapshot":
        state, snap_grid, _ = read_snapshot(ini["path"])
        if snap_grid.n != cfg.n:
            raise ConfigError(
                [f"initial.path: snapshot grid n={snap_grid.n} != config n={cfg.n}"])
        return grid, state
    frame = initial.uniform_frame(grid)
    angle = float(ini.get("frame_angle", 0.0))
    if angle > 0.0:
        frame = initial.random_smooth_frame(grid, rng, angle=angle,
                                            k_band=int(ini.get("k_band", 4)))
    amp = float(ini.get("velocity_amplitude", 0.0))
    if kind == "taylor_green":
        vx, vy, _ = initial.taylor_green_velocity(grid, amplitude=amp)
    elif kind == "random_smooth":
        vx, vy = initial.random_solenoidal_velocity(
            grid, rng, k_band=int(ini.get("k_band", 4)), amplitude=amp)
    else:
        raise ConfigError([f"initial.type: unknown kind {kind!r}"])
    return grid, SimState(frame=frame, vx=vx, vy=vy)


def perturb_state(state, grid, cfg, eps):
    """Twin-run perturbation: a fixed-shape rotation and velocity bump
    scaled by eps, so different amplitudes share the same direction."""
    if eps == 0.0:
        return state.copy()
    rng = np.random.default_rng(cfg.seed + 777)
    omega = np.stack([initial.band_limited_scalar(grid, rng, 4, 1.0)
                      for _ in range(3)])
    dvx, dvy = initial.random_solenoidal_velocity(grid, rng, 4, 1.0)
    out = state.copy()
    out.frame = initial.rotation_apply(eps * omega, out.frame)
    out.vx = out.vx + eps * dvx
    out.vy = out.vy + eps * dvy
    return out


def _prepare(cfg):
    grid, state = build_initial_state(cfg)
    ep = cfg.elastic_params()
    hp = cfg.hydro_params()
    dt = cfg.dt_fraction * cfl_dt(state, grid, ep, hp, safety=cfg.safety)
    return grid, state, ep, hp, dt


def _outdir(cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.json").write_text(json.dumps(cfg.resolved, indent=2))
    return out


def cmd_check_coeffs(args):
    cfg = parse_config(args.config)
    hp = cfg.hydro_params()
    cfg.elastic_params()  # raises on bad K
    violations = hydro.validate(hp)
    if violations:
        for v in violations:
            print(f"VIOLATED: {v}", file=sys.stderr)
        return EXIT_CONFIG
    b, c, e = hp.beta, hp.chi, hp.eta_rot
    print("all coefficient conditions hold:")
    print(f"  beta_i >= 0 (i=1..5), chi_j > 0, eta = {hp.eta} > 0")
    print(f"  beta0^2 = {b[0] ** 2:g} <= beta1*beta2 = {b[1] * b[2]:g}")
    print(f"  eta1^2 = {e[0] ** 2:g} <= beta5*chi1 = {b[5] * c[0]:g}")
    print(f"  eta2^2 = {e[1] ** 2:g} <= beta4*chi2 = {b[4] * c[1]:g}")
    print(f"  eta3^2 = {e[2] ** 2:g} <= beta3*chi3 = {b[3] * c[2]:g}")
    print("elastic constants positive; split coefficients nonnegative")
    return EXIT_OK


def cmd_run(args):
    cfg = parse_config(args.config)
    grid, state, ep, hp, dt = _prepare(cfg)
    out = _outdir(cfg)
    part = lp.build_partition(grid)
    metric_rows = []

    def on_sample(s, led):
        v, u, phi, f = twin_metrics(s, s, grid, ep, hp, cfg.besov_s, part)
        metric_rows.append((s.t, phi, u, v, f))

    final, result = run(state, grid, ep, hp, cfg.t_end, dt,
                        sample_every=cfg.sample_every,
                        snapshot_every=cfg.snapshot_every,
                        on_sample=on_sample)
    report.write_energy_csv(out / "energy.csv", result.ledgers)
    times, phi, u, v, f = zip(*metric_rows)
    report.write_metrics_csv(out / "metrics.csv", times, phi, u, v, f)
    report.render_energy_figure(out / "energy.png", result.ledgers)
    report.render_metrics_figure(out / "metrics.png", times, phi, u, v)
    for t, snap in result.snapshots:
        write_snapshot(snap, grid, out / f"snapshot_{snap.step:06d}.bin",
                       params=cfg.resolved)
    write_snapshot(final, grid, out / "snapshot_final.bin", params=cfg.resolved)
    print(f"run complete: t={final.t:g}, {final.step} steps, dt={dt:g}")
    print(f"artifacts in {out}")
    return EXIT_OK


def cmd_twin(args):
    cfg = parse_config(args.config)
    grid, state, ep, hp, dt = _prepare(cfg)
    out = _outdir(cfg)
    b = perturb_state(state, grid, cfg, args.eps)
    ledgers = []

    def on_sample(sa, sb):
        from .elasticity import variational_forces
        vf = variational_forces(sa.frame, grid, ep)
        ledgers.append(hydro.energy_report(sa.frame, sa.vx, sa.vy, grid,
                                           ep, hp, vf, t=sa.t))

    fa, fb, res = twin_run(state, b, grid, ep, hp, cfg.t_end, dt,
                           besov_s=cfg.besov_s,
                           sample_every=cfg.sample_every,
                           on_sample=on_sample)
    import numpy as _np
    E = _np.array([l.total_energy for l in ledgers])
    t = _np.array([l.t for l in ledgers])
    if len(E) >= 3:
        for l, d in zip(ledgers, _np.gradient(E, t, edge_order=2)):
            l.residual = float(d + l.total_dissipation)
    report.write_energy_csv(out / "energy.csv", ledgers)
    report.write_metrics_csv(out / "metrics.csv", res.times, res.phi,
                             res.u, res.v, res.f_reg)
    report.render_energy_figure(out / "energy.png", ledgers)
    report.render_metrics_figure(out / "metrics.png", res.times, res.phi,
                                 res.u, res.v)
    write_snapshot(fa, grid, out / "snapshot_final_a.bin", params=cfg.resolved)
    write_snapshot(fb, grid, out / "snapshot_final_b.bin", params=cfg.resolved)
    print(f"twin run complete: eps={args.eps:g}, Phi(0)={res.phi[0]:.6e}, "
          f"Phi(end)={res.phi[-1]:.6e}")
    print(f"artifacts in {out}")
    return EXIT_OK


def cmd_lp_analyze(args):
    state_a, grid_a, params_a = read_snapshot(args.snapshot_a)
    state_b, grid_b, _ = read_snapshot(args.snapshot_b)
    if grid_a.n != grid_b.n or grid_a.L != grid_b.L:
        raise ConfigError(["snapshots live on different grids"])
    grid = grid_a
    part = lp.build_partition(grid)
    s = args.s
    diff = lp.TwinDiff(dv=np.stack([state_a.vx - state_b.vx,
                                    state_a.vy - state_b.vy]),
                       dframe=state_a.frame - state_b.frame)
    V, U, Phi = lp.weak_metrics(diff, s, grid, part)
    print(f"Phi = {Phi:.17g}")
    print(f"U   = {U:.17g}")
    print(f"V   = {V:.17g}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dvh = grid.fft(diff.dv)
    dfh = grid.fft(diff.dframe)
    rows = []
    for j in part.j_range:
        m = part.multiplier(j)
        bv = np.sqrt(grid.l2_norm_sq(grid.ifft(m * dvh)))
        bf = np.sqrt(grid.l2_norm_sq(grid.ifft(m * dfh)))
        rows.append((j, bv, bf, 2.0 ** (-2 * s * j) * bv ** 2,
                     2.0 ** (2 * (1 - s) * j) * bf ** 2))
    import csv
    with open(out / "lp_blocks.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "dv_block_l2", "dframe_block_l2",
                    "v_contribution", "u_contribution"])
        for row in rows:
            w.writerow([row[0]] + [format(x, ".17g") for x in row[1:]])
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(7, 4.5))
    js = [r[0] for r in rows]
    ax.semilogy(js, [max(r[3], 1e-300) for r in rows], "o-", label="V per block")
    ax.semilogy(js, [max(r[4], 1e-300) for r in rows], "s-", label="U per block")
    ax.set_xlabel("dyadic block j")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out / "lp_blocks.png", dpi=150)
    plt.close(fig)
    return EXIT_OK


def make_parser():
    p = argparse.ArgumentParser(
        prog="biaxframe",
        description="Biaxial nematic frame hydrodynamics on a periodic grid")
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check-coeffs", help="validate coefficient inequalities")
    pc.add_argument("config")
    pc.set_defaults(fn=cmd_check_coeffs)

    pr = sub.add_parser("run", help="single simulation run")
    pr.add_argument("config")
    pr.set_defaults(fn=cmd_run)

    pt = sub.add_parser("twin", help="twin-run uniqueness experiment")
    pt.add_argument("config")
    pt.add_argument("--eps", type=float, default=0.0,
                    help="initial-data perturbation amplitude")
    pt.set_defaults(fn=cmd_twin)

    pl = sub.add_parser("lp-analyze", help="offline weak metrics of two snapshots")
    pl.add_argument("snapshot_a")
    pl.add_argument("snapshot_b")
    pl.add_argument("--s", type=float, default=0.25, help="Besov index")
    pl.add_argument("--out", default=".", help="output directory")
    pl.set_defaults(fn=cmd_lp_analyze)
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ParameterError, hydro.CoefficientError,
            lp.ConfigurationError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, DegeneracyError, StabilityError) as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except (SnapshotError, OSError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
