"""Working-set estimation from bound proximity."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WorkingSet:
    """Partition of the primal indices into active (near a bound) and free."""

    active: np.ndarray
    free: np.ndarray
    n: int
    epsilon_a: float
    threshold: float


def estimate(x, mu, epsilon_a=1e-2):
    """Indices with x_i <= min(mu, epsilon_a) are taken as active.

    Shrinking mu can only shrink the active set.
    """
    x = np.asarray(x, dtype=float)
    threshold = min(float(mu), float(epsilon_a))
    mask = x <= threshold
    idx = np.arange(x.shape[0])
    return WorkingSet(
        active=idx[mask],
        free=idx[~mask],
        n=x.shape[0],
        epsilon_a=float(epsilon_a),
        threshold=threshold,
    )


def restrict(obj, ws, part="free", kind="auto"):
    """Restrict a vector or matrix to one part of the working set.

    Vectors keep the selected entries. Square matrices are cut to the
    principal submatrix on the selected indices; rectangular ones keep the
    selected columns (constraint Jacobians). Pass kind="columns" or
    kind="principal" to override the shape-based dispatch, which matters
    only for a square Jacobian.
    """
    obj = np.asarray(obj)
    idx = ws.free if part == "free" else ws.active
    if obj.ndim == 1:
        return obj[idx]
    if obj.ndim == 2:
        if kind == "principal" or (kind == "auto" and obj.shape[0] == obj.shape[1]):
            return obj[np.ix_(idx, idx)]
        return obj[:, idx]
    raise ValueError("restrict handles 1-d and 2-d arrays only")


def embed(values, ws, part="free"):
    """Scatter values for one part back to a full-length vector of zeros.

    Inverse of restrict on vectors: restrict(embed(v)) == v.
    """
    values = np.asarray(values, dtype=float)
    idx = ws.free if part == "free" else ws.active
    out = np.zeros(ws.n)
    out[idx] = values
    return out
