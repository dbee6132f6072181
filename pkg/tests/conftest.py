"""Shared random instance families.

Every generator takes an explicit seed so failures reproduce exactly.
Hessian kinds rotate through indefinite, positive definite, negative
definite, and rank-deficient to keep the factorization paths honest.
"""

import numpy as np


def kkt_instances(seed, count):
    """Yield (H_F, J_F, mu) triples; |F| <= 12, m <= 6, mu in [1e-3, 1]."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        nf = int(rng.integers(1, 13))
        m = int(rng.integers(0, 7))
        mu = float(10.0 ** rng.uniform(-3.0, 0.0))
        A = rng.normal(size=(nf, nf))
        kind = i % 4
        if kind == 0:
            H = 0.5 * (A + A.T)
        elif kind == 1:
            H = A @ A.T + 0.1 * np.eye(nf)
        elif kind == 2:
            H = -(A @ A.T) - 0.1 * np.eye(nf)
        else:
            r = max(1, nf // 2)
            B = rng.normal(size=(nf, r))
            H = B @ B.T - 2.0 * np.outer(B[:, 0], B[:, 0])
            H = 0.5 * (H + H.T)
        J = rng.normal(size=(m, nf))
        yield H, J, mu


def qp_instances(seed, count):
    """Yield (G, grad, x, seed_active) strictly convex bound QPs.

    n <= 6 bounded entries plus up to 3 unconstrained trailing ones;
    some x components sit exactly on their bound.
    """
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(0, 4))
        dim = n + m
        A = rng.normal(size=(dim, dim))
        G = A @ A.T + (0.1 + rng.uniform()) * np.eye(dim)
        grad = rng.normal(size=dim) * 3.0
        x = rng.uniform(0.0, 2.0, size=n)
        x[rng.uniform(size=n) < 0.2] = 0.0
        if rng.uniform() < 0.5:
            seed_active = np.flatnonzero(rng.uniform(size=n) < 0.3)
        else:
            seed_active = None
        yield G, grad, x, seed_active


def merit_form_instances(seed, count):
    """Yield (H, J, mu, nu, u) tuples for the stacked quadratic-form check."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 5))
        A = rng.normal(size=(n, n))
        H = 0.5 * (A + A.T)
        J = rng.normal(size=(m, n))
        mu = float(rng.uniform(0.05, 1.0))
        nu = float(rng.uniform(0.5, 2.0))
        u = rng.normal(size=n)
        yield H, J, mu, nu, u


def central_diff(fun, z, step):
    """Central finite-difference gradient of a scalar function."""
    z = np.asarray(z, dtype=float)
    out = np.zeros(z.shape[0])
    for i in range(z.shape[0]):
        e = np.zeros(z.shape[0])
        e[i] = step
        out[i] = (fun(z + e) - fun(z - e)) / (2.0 * step)
    return out
