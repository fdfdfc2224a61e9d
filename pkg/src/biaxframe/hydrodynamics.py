"""Coupled frame-flow kinematics, stresses and energy accounting.

Channel conventions (fixed so that rigid co-rotation and the energy
dissipation law both hold exactly): the rotation rate about n_k pairs the
antisymmetric tensor a_k, the strain channel s_{(5,4,3)[k-1]}, the
coefficients (eta_k, chi_k), and the rotational force L_k F.  The bracket
rates are

    N_k = -(1/2) Omega . a_k + (eta_k / chi_k) A . s_ch(k) - (1/chi_k) L_k F

and the frame evolves by dn1/dt = N3 n2 - N2 n3 (cyclic), which is skew and
therefore transports orthonormality.
"""

from dataclasses import dataclass

import numpy as np

from .elasticity import ElasticParams, VariationalForces, elastic_energy
from .frame_algebra import local_basis
from .spectral import DimensionError, Grid2D

# strain channel for rotation axis k (0-based): s5, s4, s3
_S_CHANNEL = (4, 3, 2)


class CoefficientError(ValueError):
    """Viscous coefficients violate the dissipation inequalities."""


@dataclass(frozen=True)
class HydroParams:
    eta: float               # solvent viscosity
    beta: np.ndarray         # beta_0 .. beta_5
    chi: np.ndarray          # chi_1 .. chi_3
    eta_rot: np.ndarray      # eta_1 .. eta_3

    def __post_init__(self):
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float))
        object.__setattr__(self, "chi", np.asarray(self.chi, dtype=float))
        object.__setattr__(self, "eta_rot", np.asarray(self.eta_rot, dtype=float))


def validate(p: HydroParams):
    """Return the list of violated coefficient inequalities (empty if ok)."""
    v = []
    if p.eta <= 0:
        v.append(f"eta > 0 (eta={p.eta})")
    if p.beta.shape != (6,):
        v.append(f"beta must have 6 entries, got {p.beta.shape}")
        return v
    if p.chi.shape != (3,) or p.eta_rot.shape != (3,):
        v.append("chi and eta_rot must each have 3 entries")
        return v
    for i in range(1, 6):
        if p.beta[i] < 0:
            v.append(f"beta{i} >= 0 (beta{i}={p.beta[i]})")
    for j in range(3):
        if p.chi[j] <= 0:
            v.append(f"chi{j + 1} > 0 (chi{j + 1}={p.chi[j]})")
    if p.beta[0] ** 2 > p.beta[1] * p.beta[2]:
        v.append(f"beta0^2 <= beta1*beta2 ({p.beta[0] ** 2} > {p.beta[1] * p.beta[2]})")
    pair = ((1, 5, 1), (2, 4, 2), (3, 3, 3))  # (eta_k, beta index, chi_k)
    for ek, bi, ck in pair:
        if p.eta_rot[ek - 1] ** 2 > p.beta[bi] * p.chi[ck - 1]:
            v.append(f"eta{ek}^2 <= beta{bi}*chi{ck} "
                     f"({p.eta_rot[ek - 1] ** 2} > {p.beta[bi] * p.chi[ck - 1]})")
    return v


def require_valid(p: HydroParams):
    v = validate(p)
    if v:
        raise CoefficientError("; ".join(v))


@dataclass
class Kinematics:
    kappa: np.ndarray   # (3, 3, N, N), kappa_ij = d_j v_i, z row/col zero
    A: np.ndarray       # symmetric part
    Omega: np.ndarray   # antisymmetric part


def kinematics(vx, vy, grid: Grid2D):
    n = grid.n
    gxx, gxy = grid.grad(vx)   # d vx / dx, d vx / dy
    gyx, gyy = grid.grad(vy)
    kappa = np.zeros((3, 3, n, n))
    kappa[0, 0] = gxx
    kappa[0, 1] = gxy
    kappa[1, 0] = gyx
    kappa[1, 1] = gyy
    A = 0.5 * (kappa + np.swapaxes(kappa, 0, 1))
    Omega = 0.5 * (kappa - np.swapaxes(kappa, 0, 1))
    return Kinematics(kappa=kappa, A=A, Omega=Omega)


def _contract(T, B):
    """Full contraction T . B over the two tensor axes."""
    return np.einsum("ij...,ij...->...", T, B)


def _contract_inplane(T, B):
    """Contraction T . B when T is supported on the in-plane 2x2 block
    (true of A and Omega for 2D velocity fields)."""
    return (T[0, 0] * B[0, 0] + T[0, 1] * B[0, 1]
            + T[1, 0] * B[1, 0] + T[1, 1] * B[1, 1])


def corotational_rates(frame, kin: Kinematics, vf: VariationalForces,
                       p: HydroParams, basis=None):
    """Bracket rotation rates N_1..N_3, shape (3, N, N)."""
    s, a = basis if basis is not None else local_basis(frame, check=False)
    N = np.empty((3,) + frame.shape[2:])
    for k in range(3):
        N[k] = (-0.5 * _contract_inplane(kin.Omega, a[k])
                + (p.eta_rot[k] / p.chi[k])
                * _contract_inplane(kin.A, s[_S_CHANNEL[k]])
                - vf.ml[k] / p.chi[k])
    return N


def advect_frame(frame, vx, vy, grid: Grid2D, grads=None):
    """Dealiased convective derivative (v . grad) n_alpha."""
    if grads is None:
        fh = grid.fft(frame)
        g = grid.ifft(np.stack([grid.ikx * fh, grid.iky * fh]))
        gx, gy = g[0], g[1]
    else:
        gx, gy = grads[0], grads[1]
    return grid.dealias(vx * gx + vy * gy)


def frame_rhs(frame, rates, vx, vy, grid: Grid2D, grads=None):
    """Time derivative of the frame: co-rotation minus advection."""
    if rates.shape[0] != 3 or frame.shape[0] != 3:
        raise DimensionError("frame must be (3,3,N,N) and rates (3,N,N)")
    N1, N2, N3 = rates
    rot = np.stack([
        N3[None] * frame[1] - N2[None] * frame[2],
        -N3[None] * frame[0] + N1[None] * frame[2],
        N2[None] * frame[0] - N1[None] * frame[1],
    ])
    return rot - advect_frame(frame, vx, vy, grid, grads=grads)


def viscous_stress(frame, kin: Kinematics, rates, vf: VariationalForces,
                   p: HydroParams, basis=None):
    """Orientation-dependent viscous stress sigma(p, v), shape (3, 3, N, N)."""
    s, a = basis if basis is not None else local_basis(frame, check=False)
    A = kin.A
    As = [_contract_inplane(A, s[i]) for i in range(5)]
    sig = ((p.beta[1] * As[0] + p.beta[0] * As[1])[None, None] * s[0]
           + (p.beta[0] * As[0] + p.beta[2] * As[1])[None, None] * s[1])
    for k in range(3):
        ch = _S_CHANNEL[k]
        # dissipative part of the bracket (co-rotation removed)
        M = rates[k] + 0.5 * _contract_inplane(kin.Omega, a[k])
        bk = p.beta[(5, 4, 3)[k]]
        sig += (bk * As[ch] - p.eta_rot[k] * M)[None, None] * s[ch]
        sig += (0.5 * p.chi[k] * M
                - 0.5 * p.eta_rot[k] * As[ch])[None, None] * a[k]
    return sig


def momentum_rhs(vx, vy, frame, sigma, sigma_d, grid: Grid2D, p: HydroParams,
                 kin: Kinematics = None):
    """Leray-projected velocity right-hand side (pressure eliminated).

    Assembled fully in spectral space: one transform of the stress block and
    the convective products, Leray projection and viscous term applied to
    the combined force, one inverse transform.
    """
    if kin is None:
        kin = kinematics(vx, vy, grid)
    kp = kin.kappa
    # convective term (v . grad)v, dealiased in spectral space
    conv_h = grid.dealias_mask * grid.fft(
        np.stack([vx * kp[0, 0] + vy * kp[0, 1],
                  vx * kp[1, 0] + vy * kp[1, 1]]))
    # divergence of the total stress, in-plane block only
    tot_h = grid.fft(np.ascontiguousarray(sigma[:2, :2] + sigma_d[:2, :2]))
    fh = np.stack([grid.ikx * tot_h[0, 0] + grid.iky * tot_h[0, 1],
                   grid.ikx * tot_h[1, 0] + grid.iky * tot_h[1, 1]])
    fh -= conv_h
    # Leray projection and solvent viscosity
    kdv = (grid.dkx * fh[0] + grid.dky * fh[1]) * grid.inv_d_k_sq
    fh[0] -= grid.dkx * kdv
    fh[1] -= grid.dky * kdv
    vh = grid.fft(np.stack([vx, vy]))
    # d_k_sq matches the gradient multipliers, so eta * ||grad v||^2 is the
    # exact quadrature dissipation of this term
    fh -= p.eta * grid.d_k_sq * vh
    out = grid.ifft(fh)
    return out[0], out[1]


@dataclass
class EnergyLedger:
    t: float
    kinetic: float
    elastic: float
    d_visc: float
    d_rot: np.ndarray      # (1/chi_k) ||L_k F||^2, k = 1..3
    d_beta12: float        # coupled beta0/beta1/beta2 quadratic form
    d_s3: float
    d_s4: float
    d_s5: float
    residual: float = float("nan")

    @property
    def total_energy(self):
        return self.kinetic + self.elastic

    @property
    def total_dissipation(self):
        return (self.d_visc + float(np.sum(self.d_rot)) + self.d_beta12
                + self.d_s3 + self.d_s4 + self.d_s5)

    def channels(self):
        return {
            "kinetic": self.kinetic, "elastic": self.elastic,
            "d_visc": self.d_visc,
            "d_rot1": float(self.d_rot[0]), "d_rot2": float(self.d_rot[1]),
            "d_rot3": float(self.d_rot[2]),
            "d_beta12": self.d_beta12, "d_s3": self.d_s3,
            "d_s4": self.d_s4, "d_s5": self.d_s5,
            "total_dissipation": self.total_dissipation,
            "residual": self.residual,
        }


def energy_report(frame, vx, vy, grid: Grid2D, ep: ElasticParams,
                  hp: HydroParams, vf: VariationalForces, t=0.0):
    """Evaluate every channel of the energy dissipation law by quadrature."""
    kin = kinematics(vx, vy, grid)
    s, _ = local_basis(frame, check=False)
    As = [_contract_inplane(kin.A, s[i]) for i in range(5)]
    grad_v_sq = grid.l2_norm_sq(kin.kappa)
    d_rot = np.array([grid.l2_norm_sq(vf.ml[k]) / hp.chi[k] for k in range(3)])
    d_beta12 = (hp.beta[1] * grid.l2_norm_sq(As[0])
                + 2.0 * hp.beta[0] * grid.integrate(As[0] * As[1])
                + hp.beta[2] * grid.l2_norm_sq(As[1]))
    coef = [hp.beta[3] - hp.eta_rot[2] ** 2 / hp.chi[2],
            hp.beta[4] - hp.eta_rot[1] ** 2 / hp.chi[1],
            hp.beta[5] - hp.eta_rot[0] ** 2 / hp.chi[0]]
    return EnergyLedger(
        t=t,
        kinetic=0.5 * (grid.l2_norm_sq(vx) + grid.l2_norm_sq(vy)),
        elastic=elastic_energy(frame, grid, ep),
        d_visc=hp.eta * grad_v_sq,
        d_rot=d_rot,
        d_beta12=d_beta12,
        d_s3=coef[0] * grid.l2_norm_sq(As[2]),
        d_s4=coef[1] * grid.l2_norm_sq(As[3]),
        d_s5=coef[2] * grid.l2_norm_sq(As[4]),
    )
