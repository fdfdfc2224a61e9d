"""Run configuration: JSON schema, defaults, and aggregated validation."""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hydrodynamics as hydro
from .elasticity import ParameterError, split_constants

DEFAULTS = {
    "grid": {"n": 64, "L": 2.0 * np.pi},
    "stepper": {"safety": 0.4, "dt_fraction": 1.0, "t_end": 1.0,
                "sample_every": 1, "snapshot_every": 0},
    "initial": {"type": "random_smooth", "frame_angle": 0.5,
                "velocity_amplitude": 0.5, "k_band": 4},
    "seed": 0,
    "besov_s": 0.25,
    "output_dir": "out",
}


class ConfigError(ValueError):
    """One or more configuration problems; message lists all of them."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class RunConfig:
    n: int
    L: float
    K: np.ndarray
    eta: float
    beta: np.ndarray
    chi: np.ndarray
    eta_rot: np.ndarray
    safety: float
    dt_fraction: float
    t_end: float
    sample_every: int
    snapshot_every: int
    initial: dict
    seed: int
    besov_s: float
    output_dir: str
    resolved: dict = field(repr=False, default_factory=dict)

    def hydro_params(self):
        return hydro.HydroParams(eta=self.eta, beta=self.beta, chi=self.chi,
                                 eta_rot=self.eta_rot)

    def elastic_params(self):
        return split_constants(self.K)


def _get(d, path, errors, expect=None, default=None, required=True):
    cur = d
    for key in path.split("."):
        if not isinstance(cur, dict) or key not in cur:
            if default is not None or not required:
                return default
            errors.append(f"{path}: missing required key")
            return None
        cur = cur[key]
    if expect is not None:
        try:
            return expect(cur)
        except (TypeError, ValueError):
            errors.append(f"{path}: cannot interpret {cur!r}")
            return default
    return cur


def _vector(d, path, length, errors):
    raw = _get(d, path, errors)
    if raw is None:
        return None
    arr = np.asarray(raw, dtype=float)
    if arr.shape != (length,):
        errors.append(f"{path}: expected {length} entries, got shape {arr.shape}")
        return None
    return arr


def resolve_config(data):
    """Validate a config dict; returns RunConfig or raises ConfigError
    listing every problem found."""
    errors = []
    n = _get(data, "grid.n", errors, int, DEFAULTS["grid"]["n"], required=False)
    L = _get(data, "grid.L", errors, float, DEFAULTS["grid"]["L"], required=False)
    if n is not None and (n < 16 or (n & (n - 1)) != 0):
        errors.append(f"grid.n: must be a power of two >= 16, got {n}")
    if L is not None and L <= 0:
        errors.append(f"grid.L: must be positive, got {L}")

    K = _vector(data, "elastic.K", 12, errors)
    if K is not None:
        try:
            split_constants(K)
        except ParameterError as e:
            errors.append(f"elastic.K: {e}")

    eta = _get(data, "hydro.eta", errors, float)
    beta = _vector(data, "hydro.beta", 6, errors)
    chi = _vector(data, "hydro.chi", 3, errors)
    eta_rot = _vector(data, "hydro.eta_rot", 3, errors)
    if all(x is not None for x in (eta, beta, chi, eta_rot)):
        hp = hydro.HydroParams(eta=eta, beta=beta, chi=chi, eta_rot=eta_rot)
        for v in hydro.validate(hp):
            errors.append(f"hydro: violated {v}")

    sd = DEFAULTS["stepper"]
    safety = _get(data, "stepper.safety", errors, float, sd["safety"], False)
    dt_fraction = _get(data, "stepper.dt_fraction", errors, float,
                       sd["dt_fraction"], False)
    t_end = _get(data, "stepper.t_end", errors, float, sd["t_end"], False)
    sample_every = _get(data, "stepper.sample_every", errors, int,
                        sd["sample_every"], False)
    snapshot_every = _get(data, "stepper.snapshot_every", errors, int,
                          sd["snapshot_every"], False)
    initial = dict(DEFAULTS["initial"])
    initial.update(data.get("initial", {}) or {})
    seed = _get(data, "seed", errors, int, DEFAULTS["seed"], False)
    besov_s = _get(data, "besov_s", errors, float, DEFAULTS["besov_s"], False)
    output_dir = _get(data, "output_dir", errors, str,
                      DEFAULTS["output_dir"], False)
    if besov_s is not None and not 0.0 < besov_s < 0.5:
        errors.append(f"besov_s: must lie in (0, 1/2), got {besov_s}")
    for name, val in (("stepper.safety", safety),
                      ("stepper.dt_fraction", dt_fraction),
                      ("stepper.t_end", t_end)):
        if val is not None and val <= 0:
            errors.append(f"{name}: must be positive, got {val}")

    if errors:
        raise ConfigError(errors)

    resolved = {
        "grid": {"n": n, "L": L},
        "elastic": {"K": list(map(float, K))},
        "hydro": {"eta": eta, "beta": list(map(float, beta)),
                  "chi": list(map(float, chi)),
                  "eta_rot": list(map(float, eta_rot))},
        "stepper": {"safety": safety, "dt_fraction": dt_fraction,
                    "t_end": t_end, "sample_every": sample_every,
                    "snapshot_every": snapshot_every},
        "initial": initial,
        "seed": seed,
        "besov_s": besov_s,
        "output_dir": output_dir,
    }
    return RunConfig(n=n, L=L, K=K, eta=eta, beta=beta, chi=chi,
                     eta_rot=eta_rot, safety=safety, dt_fraction=dt_fraction,
                     t_end=t_end, sample_every=sample_every,
                     snapshot_every=snapshot_every, initial=initial,
                     seed=seed, besov_s=besov_s, output_dir=output_dir,
                     resolved=resolved)


def parse_config(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError([f"{path}: file not found"])
    except json.JSONDecodeError as e:
        raise ConfigError([f"{path}: invalid JSON ({e})"])
    if not isinstance(data, dict):
        raise ConfigError([f"{path}: top level must be a JSON object"])
    return resolve_config(data)
