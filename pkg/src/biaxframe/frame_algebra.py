"""Pointwise SO(3) calculus for orthonormal frame triples.

A frame is stored as a 3x3 matrix whose rows are the unit vectors
(n1, n2, n3); a frame field is an array of shape (3, 3, N, N) with the two
matrix axes leading.  All operations broadcast over trailing axes, so the
same code serves a single frame and a full grid of frames.
"""

import numpy as np

ORTHO_TOL = 1e-12
DET_TOL = 1e-10
DRIFT_TOL = 1e-8  # runtime monitoring threshold, looser than construction

# squared Frobenius norms of the tangent / complement basis elements
V_NORM_SQ = np.array([2.0, 2.0, 2.0])
W_NORM_SQ = np.array([2.0, 2.0, 2.0, 1.0, 1.0, 1.0])

_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS[_i, _j, _k] = 1.0
    _EPS[_i, _k, _j] = -1.0


class InvalidFrameError(ValueError):
    """Frame rows are not a right-handed orthonormal triple."""


def orthonormality_defect(frame):
    """Max-abs entry of F F^T - I over all points."""
    g = np.einsum("ak...,bk...->ab...", frame, frame)
    g[0, 0] -= 1.0
    g[1, 1] -= 1.0
    g[2, 2] -= 1.0
    return float(np.max(np.abs(g)))


def frame_determinant(frame):
    """det[n1 n2 n3] at every point."""
    n1, n2, n3 = frame[0], frame[1], frame[2]
    cross = np.stack([n2[1] * n3[2] - n2[2] * n3[1],
                      n2[2] * n3[0] - n2[0] * n3[2],
                      n2[0] * n3[1] - n2[1] * n3[0]])
    return np.einsum("k...,k...->...", n1, cross)


def validate_frame(frame, tol=ORTHO_TOL, det_tol=DET_TOL):
    frame = np.asarray(frame, dtype=float)
    if frame.shape[:2] != (3, 3):
        raise InvalidFrameError(f"expected leading shape (3, 3), got {frame.shape}")
    defect = orthonormality_defect(frame)
    if defect > tol:
        raise InvalidFrameError(f"orthonormality defect {defect:.3e} exceeds {tol:.1e}")
    det_err = float(np.max(np.abs(frame_determinant(frame) - 1.0)))
    if det_err > det_tol:
        raise InvalidFrameError(f"determinant deviates from +1 by {det_err:.3e}")
    return frame


def tangent_bases(frame, check=True):
    """Orthogonal bases of T_p SO(3) and its complement.

    Returns (V, W): V has leading shape (3, 3, 3) with V[k] a triple of
    3-vectors, W has leading shape (6, 3, 3).  Conventions:
      V1=(0,n3,-n2), V2=(-n3,0,n1), V3=(n2,-n1,0);
      W1=(0,n3,n2), W2=(n3,0,n1), W3=(n2,n1,0),
      W4=(n1,0,0), W5=(0,n2,0), W6=(0,0,n3).
    """
    if check:
        frame = validate_frame(frame)
    n1, n2, n3 = frame[0], frame[1], frame[2]
    z = np.zeros_like(n1)
    V = np.stack([np.stack([z, n3, -n2]),
                  np.stack([-n3, z, n1]),
                  np.stack([n2, -n1, z])])
    W = np.stack([np.stack([z, n3, n2]),
                  np.stack([n3, z, n1]),
                  np.stack([n2, n1, z]),
                  np.stack([n1, z, z]),
                  np.stack([z, n2, z]),
                  np.stack([z, z, n3])])
    return V, W


def lk_apply(k, frame, check=True):
    """Rotational derivative of the frame about n_k: L_k n_l = eps^{klp} n_p."""
    if k not in (1, 2, 3):
        raise IndexError(f"rotation axis index must be 1, 2 or 3, got {k}")
    if check:
        frame = validate_frame(frame)
    return np.einsum("lp,pi...->li...", _EPS[k - 1], frame)


def local_basis(frame, check=True):
    """Symmetric traceless tensors s1..s5 and antisymmetric a1..a3.

    Returns (s, a) with leading shapes (5, 3, 3) and (3, 3, 3).  Mixed
    monomials n_a n_b are symmetrized: (n_a x n_b + n_b x n_a) / 2.
    """
    if check:
        frame = validate_frame(frame)
    n1, n2, n3 = frame[0], frame[1], frame[2]

    def outer(a, b):
        return np.einsum("i...,j...->ij...", a, b)

    eye = np.zeros(outer(n1, n1).shape, dtype=float)
    for i in range(3):
        eye[i, i] = 1.0
    s = np.stack([
        outer(n1, n1) - eye / 3.0,
        outer(n2, n2) - outer(n3, n3),
        0.5 * (outer(n1, n2) + outer(n2, n1)),
        0.5 * (outer(n1, n3) + outer(n3, n1)),
        0.5 * (outer(n2, n3) + outer(n3, n2)),
    ])
    a = np.stack([
        outer(n2, n3) - outer(n3, n2),
        outer(n3, n1) - outer(n1, n3),
        outer(n1, n2) - outer(n2, n1),
    ])
    return s, a


def decompose(A, frame, check=True):
    """Coefficients of a 3x3 matrix in the tangent/complement bases.

    Returns (c, d): c[k] = (A . V_k)/|V_k|^2 for k=0..2 and
    d[k] = (A . W_k)/|W_k|^2 for k=0..5.
    """
    V, W = tangent_bases(frame, check=check)
    A = np.asarray(A, dtype=float)
    c = np.einsum("ij...,kij...->k...", A, V)
    d = np.einsum("ij...,kij...->k...", A, W)
    c = c / V_NORM_SQ.reshape((3,) + (1,) * (c.ndim - 1))
    d = d / W_NORM_SQ.reshape((6,) + (1,) * (d.ndim - 1))
    return c, d


def reconstruct(c, d, frame, check=True):
    """Inverse of decompose: sum c_k V_k + sum d_k W_k."""
    V, W = tangent_bases(frame, check=check)
    return (np.einsum("k...,kij...->ij...", np.asarray(c), V)
            + np.einsum("k...,kij...->ij...", np.asarray(d), W))
