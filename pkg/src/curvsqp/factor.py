"""Stage-1 restricted-pivot factorization of the free KKT matrix.

The matrix is K = [[H_F, J_F.T], [J_F, -mu*I]]. Elimination is allowed
to pivot only on a positive diagonal of the H block ("H+"), a negative
diagonal of the dual block ("D-"), or a 2x2 cross block with one row
from each side and mixed eigenvalues ("HD"). When it stops, every dual
row has been consumed, the trailing Schur complement S lives entirely on
H rows and has no diagonal above the pivot threshold, and the pivot
counts certify the inertia of the factored part. Adding a diagonal shift
larger than the size of S to the unpivoted H rows then makes the whole
KKT matrix second-order-correct: exactly |F| positive and m negative
eigenvalues.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import stage1_kernel
from .errors import FactorizationBreakdown

PIVOT_TAGS = ("H+", "D-", "HD")


@dataclass(frozen=True)
class KktSystem:
    """Free-variable KKT matrix and the pieces it was assembled from."""

    H_F: np.ndarray
    J_F: np.ndarray
    mu: float
    K: np.ndarray
    n_free: int
    m: int
    norm_max: float


def build_kkt(H_F, J_F, mu):
    """Assemble [[H_F, J_F.T], [J_F, -mu*I]]. mu must be positive."""
    H_F = np.asarray(H_F, dtype=float)
    J_F = np.asarray(J_F, dtype=float)
    mu = float(mu)
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    nf = H_F.shape[0]
    if H_F.shape != (nf, nf):
        raise ValueError("H_F must be square")
    m = J_F.shape[0]
    if J_F.shape != (m, nf):
        raise ValueError("J_F must have one column per free variable")
    N = nf + m
    K = np.zeros((N, N))
    K[:nf, :nf] = 0.5 * (H_F + H_F.T)
    K[:nf, nf:] = J_F.T
    K[nf:, :nf] = J_F
    K[nf:, nf:] = -mu * np.eye(m)
    return KktSystem(
        H_F=H_F,
        J_F=J_F,
        mu=mu,
        K=K,
        n_free=nf,
        m=m,
        norm_max=float(np.max(np.abs(K), initial=0.0)),
    )


@dataclass(frozen=True)
class PivotBlock:
    """One elimination pivot: its values, provenance tag, and position."""

    values: np.ndarray
    tag: str
    offset: int


@dataclass(frozen=True)
class Stage1Factor:
    """Result of the restricted elimination: perm @ K @ perm.T = L diag(B, S) L.T.

    perm[i] is the original row now in position i; positions < n_piv are
    pivoted (B holds their block diagonal), the rest carry the Schur
    complement S. counts maps pivot tags to how often they fired.
    """

    kkt: KktSystem
    perm: np.ndarray
    L: np.ndarray
    blocks: tuple
    B: np.ndarray
    S: np.ndarray
    n_piv: int
    counts: dict
    tiny: float
    unpivoted_h: np.ndarray = field(default=None)

    @property
    def inertia_so_far(self):
        """Inertia of the factored block B, read off the pivot tags."""
        pos = self.counts["H+"] + self.counts["HD"]
        neg = self.counts["D-"] + self.counts["HD"]
        return (pos, neg, 0)

    def permutation_matrix(self):
        N = self.perm.shape[0]
        P = np.zeros((N, N))
        P[np.arange(N), self.perm] = 1.0
        return P

    def reconstruction_error(self):
        """Max-norm of perm(K)perm.T - L diag(B, S) L.T, for diagnostics."""
        N = self.perm.shape[0]
        D = np.zeros((N, N))
        k = self.n_piv
        D[:k, :k] = self.B
        D[k:, k:] = self.S
        P = self.permutation_matrix()
        return float(np.max(np.abs(P @ self.kkt.K @ P.T - self.L @ D @ self.L.T), initial=0.0))


def stage1_factorize(kkt):
    """Run the restricted elimination on a KKT system.

    Raises FactorizationBreakdown (carrying the partial factor) if dual
    rows remain when no admissible pivot is left; with a positive mu this
    indicates data so degenerate that the pivot threshold swallowed a
    whole dual row.
    """
    N = kkt.n_free + kkt.m
    A = kkt.K.copy()
    L = np.eye(N)
    perm = np.arange(N, dtype=np.int64)
    ptype = np.zeros(N, dtype=np.int64)
    psize = np.zeros(N, dtype=np.int64)
    tiny = 1e-12 * (1.0 + kkt.norm_max)
    n_piv, n_blocks, status = stage1_kernel(A, L, perm, ptype, psize, kkt.n_free, tiny)

    blocks = []
    counts = {"H+": 0, "D-": 0, "HD": 0}
    off = 0
    for b in range(n_blocks):
        size = int(psize[b])
        tag = PIVOT_TAGS[int(ptype[b])]
        counts[tag] += 1
        blocks.append(PivotBlock(values=A[off:off + size, off:off + size].copy(), tag=tag, offset=off))
        off += size
    B = np.zeros((n_piv, n_piv))
    for blk in blocks:
        s = blk.values.shape[0]
        B[blk.offset:blk.offset + s, blk.offset:blk.offset + s] = blk.values
    S = A[n_piv:, n_piv:]
    S = 0.5 * (S + S.T)
    factor = Stage1Factor(
        kkt=kkt,
        perm=perm,
        L=L,
        blocks=tuple(blocks),
        B=B,
        S=S,
        n_piv=n_piv,
        counts=counts,
        tiny=tiny,
        unpivoted_h=perm[n_piv:].copy(),
    )
    if status != 0:
        raise FactorizationBreakdown(
            "dual rows left unpivoted at the stage-1 stopping point",
            partial=factor,
        )
    return factor


@dataclass(frozen=True)
class Convexification:
    """Diagonal shift restoring second-order-correct inertia.

    delta is added to the H diagonal at shifted_rows (free-local indices,
    exactly the rows the elimination left in S).
    """

    delta: float
    shifted_rows: np.ndarray
    margin: float


def convexify(factor, margin=0.5):
    """Choose the diagonal shift for the unpivoted H rows.

    An empty S needs no shift. Otherwise delta = (1 + margin) times the
    max-absolute-row-sum norm of S, which strictly dominates |lambda_min|;
    a small floor keeps a nonempty but numerically zero S from producing
    a singular shifted matrix.
    """
    S = factor.S
    rows = np.sort(factor.unpivoted_h)
    if S.shape[0] == 0:
        return Convexification(delta=0.0, shifted_rows=rows, margin=float(margin))
    norm_inf = float(np.max(np.sum(np.abs(S), axis=1)))
    h_scale = float(np.max(np.abs(factor.kkt.H_F), initial=0.0))
    delta = max((1.0 + float(margin)) * norm_inf, 1e-8 * (1.0 + h_scale))
    return Convexification(delta=delta, shifted_rows=rows, margin=float(margin))


def apply_shift(H_F, conv):
    """Return H_F with the convexification shift added on its diagonal."""
    H = np.array(H_F, dtype=float, copy=True)
    if conv.delta:
        H[conv.shifted_rows, conv.shifted_rows] += conv.delta
    return H


def inertia(A, zero_tol_factor=1e-10):
    """(positive, negative, zero) eigenvalue counts of a symmetric matrix.

    Uses the LAPACK symmetric eigensolver; the test suite cross-checks it
    against the independent Jacobi route. Eigenvalues within
    zero_tol_factor times the largest magnitude count as zero.
    """
    A = np.asarray(A, dtype=float)
    if A.shape[0] == 0:
        return (0, 0, 0)
    vals = np.linalg.eigvalsh(0.5 * (A + A.T))
    tol = zero_tol_factor * float(np.max(np.abs(vals), initial=0.0))
    n_zero = int(np.sum(np.abs(vals) <= tol))
    n_pos = int(np.sum(vals > tol))
    n_neg = int(np.sum(vals < -tol))
    return (n_pos, n_neg, n_zero)
