"""Negative-curvature directions from the stage-1 factor.

When the Schur complement S is nonempty its largest-magnitude entry
certifies negative curvature of H_F + (1/mu) J_F.T J_F: pick the unit
(or two-index) vector h with h.T S h <= -|S|_max, lift sqrt(rho) h
through the transposed triangular factor, and keep the primal part. The
lifted vector automatically satisfies the dual stationarity rows, which
is what makes the full-space quadratic form collapse onto the free
primal block.
"""

from dataclasses import dataclass, replace

import numpy as np

from .workset import embed


@dataclass(frozen=True)
class CurvatureDirection:
    """Candidate direction (u_hat, w_hat) with its curvature certificates.

    u_hat is a full primal vector, zero on the active set; w_hat is the
    matching dual displacement -(1/mu) J u_hat. curvature_B is
    u.T (H + (1/mu) J.T J) u computed by explicit multiplication and
    rayleigh divides it by |u|^2. rho is the magnitude of the S entry the
    direction came from, pivot_indices its (row, col) inside S.
    """

    exists: bool
    u_hat: np.ndarray
    w_hat: np.ndarray
    curvature_B: float
    rayleigh: float
    rho: float
    pivot_indices: tuple = None


def no_direction(n, m):
    return CurvatureDirection(
        exists=False,
        u_hat=np.zeros(n),
        w_hat=np.zeros(m),
        curvature_B=0.0,
        rayleigh=0.0,
        rho=0.0,
    )


def curvature_form(u, H, J, mu):
    """u.T (H + (1/mu) J.T J) u by explicit multiplication."""
    val = float(u @ (H @ u))
    if J.shape[0]:
        Ju = J @ u
        val += float(Ju @ Ju) / mu
    return val


def extract_direction(factor, ws, H=None, J=None):
    """Pull a negative-curvature direction out of a stage-1 factor.

    H and J are the full-space matrices used to report curvature_B; they
    default to zero-padded versions of the factor's free blocks and must
    agree with them on the free set. Returns a non-direction when S is
    empty or its largest entry is below the noise floor.
    """
    kkt = factor.kkt
    n, m = ws.n, kkt.m
    S = factor.S
    h_scale = float(np.max(np.abs(kkt.H_F), initial=0.0))
    floor = 1e-10 * (1.0 + h_scale)
    if S.shape[0] == 0:
        return no_direction(n, m)
    q, r = np.unravel_index(np.argmax(np.abs(S)), S.shape)
    rho = float(abs(S[q, r]))
    if rho <= floor:
        return no_direction(n, m)
    if r < q:
        q, r = r, q
    ns = S.shape[0]
    h = np.zeros(ns)
    if q == r:
        h[q] = 1.0
    else:
        h[q] = 1.0 / np.sqrt(2.0)
        h[r] = -np.sign(S[q, r]) / np.sqrt(2.0)
    w_S = np.sqrt(rho) * h

    # solve L.T d = (0, w_S); the unit upper-triangular solve needs only
    # the pivoted leading block since the trailing part of L is identity
    N = factor.perm.shape[0]
    k = factor.n_piv
    d = np.zeros(N)
    d[k:] = w_S
    if k:
        rhs = -(factor.L[k:, :k].T @ w_S)
        d[:k] = np.linalg.solve(factor.L[:k, :k].T, rhs)

    # un-permute, keep the free primal components, embed on the active set
    z = np.zeros(N)
    z[factor.perm] = d
    u_free = z[:kkt.n_free]
    u_hat = embed(u_free, ws, part="free")

    if H is None or J is None:
        H_full = np.zeros((n, n))
        H_full[np.ix_(ws.free, ws.free)] = kkt.H_F
        J_full = np.zeros((m, n))
        J_full[:, ws.free] = kkt.J_F
    else:
        H_full, J_full = H, J
    curv = curvature_form(u_hat, H_full, J_full, kkt.mu)
    w_hat = -(J_full @ u_hat) / kkt.mu if m else np.zeros(0)
    nrm2 = float(u_hat @ u_hat)
    return CurvatureDirection(
        exists=True,
        u_hat=u_hat,
        w_hat=w_hat,
        curvature_B=curv,
        rayleigh=curv / nrm2,
        rho=rho,
        pivot_indices=(int(q), int(r)),
    )


def refresh_direction(direction, H, J, mu, floor=0.0):
    """Re-evaluate a direction's certificates for a new penalty value.

    Shrinking mu strengthens the (1/mu) J.T J term, so a direction that
    was negative can stop being one; it is then dropped.
    """
    if not direction.exists:
        return direction
    u = direction.u_hat
    curv = curvature_form(u, H, J, mu)
    if curv >= -floor:
        return no_direction(u.shape[0], J.shape[0])
    w = -(J @ u) / mu if J.shape[0] else np.zeros(0)
    return replace(
        direction,
        w_hat=w,
        curvature_B=curv,
        rayleigh=curv / float(u @ u),
    )


def orient(direction, grad_merit):
    """Flip the direction if needed so it is non-ascent for the merit.

    grad_merit is the stacked (x, y) merit gradient; the flipped pair
    keeps w = -(1/mu) J u intact because both components negate together.
    """
    if not direction.exists:
        return direction
    slope = float(grad_merit[:direction.u_hat.shape[0]] @ direction.u_hat)
    if direction.w_hat.shape[0]:
        slope += float(grad_merit[direction.u_hat.shape[0]:] @ direction.w_hat)
    if slope > 0.0:
        return replace(direction, u_hat=-direction.u_hat, w_hat=-direction.w_hat)
    return direction


@dataclass(frozen=True)
class ScaledStep:
    """Curvature step after the feasibility and norm caps."""

    u: np.ndarray
    w: np.ndarray
    beta: float


def scale(direction, x, p, u_max=1.0):
    """Largest multiple of the direction that stays usable.

    beta is capped so that x + p + beta*u_hat >= 0 and
    |beta*u_hat| <= max(u_max, 2|p|). A component already at its bound
    with u_hat pointing outward forces beta = 0.
    """
    m = direction.w_hat.shape[0]
    if not direction.exists:
        return ScaledStep(u=np.zeros(x.shape[0]), w=np.zeros(m), beta=0.0)
    u_hat = direction.u_hat
    slack = x + p
    beta = max(float(u_max), 2.0 * float(np.linalg.norm(p))) / float(np.linalg.norm(u_hat))
    neg = u_hat < 0.0
    if np.any(neg):
        beta = min(beta, float(np.min(slack[neg] / (-u_hat[neg]))))
    beta = max(beta, 0.0)
    return ScaledStep(u=beta * u_hat, w=beta * direction.w_hat, beta=beta)
