"""Problem definition, evaluation bundle, and derivative checking.

A problem is the data of min f(x) subject to c(x) = 0 and x >= 0, with
callbacks for f, its gradient, the constraint vector, its Jacobian, and
the combined second-derivative matrix H(x, y) = hess f(x) + sum_i y_i *
hess c_i(x).
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import EvaluationError


@dataclass(frozen=True)
class NlpProblem:
    """Callbacks and metadata for one instance of the problem class."""

    name: str
    n: int
    m: int
    objective: Callable
    gradient: Callable
    constraints: Callable
    jacobian: Callable
    hessian: Callable
    x0: np.ndarray = field(default=None)
    y0: np.ndarray = field(default=None)


@dataclass(frozen=True)
class Iterate:
    """Primal-dual point. x must stay componentwise nonnegative."""

    x: np.ndarray
    y: np.ndarray

    @property
    def v(self):
        return np.concatenate([self.x, self.y])


def make_iterate(x, y):
    x = np.atleast_1d(np.asarray(x, dtype=float)).copy()
    y = np.atleast_1d(np.asarray(y, dtype=float)).copy() if np.size(y) else np.zeros(0)
    return Iterate(x=x, y=y)


@dataclass(frozen=True)
class Evaluation:
    """All problem quantities at one iterate: f, c, g, J, H."""

    f: float
    c: np.ndarray
    g: np.ndarray
    J: np.ndarray
    H: np.ndarray


def evaluate(problem, iterate):
    """Evaluate every callback at the iterate and validate the results.

    Wrong shapes, non-finite entries, or a visibly asymmetric H raise
    EvaluationError; callback exceptions are chained into the same type.
    """
    x, y = iterate.x, iterate.y
    n, m = problem.n, problem.m
    if x.shape != (n,):
        raise EvaluationError(f"x has shape {x.shape}, expected ({n},)")
    if y.shape != (m,):
        raise EvaluationError(f"y has shape {y.shape}, expected ({m},)")
    try:
        f = float(problem.objective(x))
        g = np.asarray(problem.gradient(x), dtype=float).reshape(-1)
        c = np.asarray(problem.constraints(x), dtype=float).reshape(-1)
        J = np.asarray(problem.jacobian(x), dtype=float).reshape(m, n)
        H = np.asarray(problem.hessian(x, y), dtype=float)
    except EvaluationError:
        raise
    except Exception as exc:
        raise EvaluationError(f"{problem.name}: evaluator raised: {exc}") from exc
    if g.shape != (n,):
        raise EvaluationError(f"gradient has shape {g.shape}, expected ({n},)")
    if c.shape != (m,):
        raise EvaluationError(f"constraints have shape {c.shape}, expected ({m},)")
    if H.shape != (n, n):
        raise EvaluationError(f"H has shape {H.shape}, expected ({n}, {n})")
    pieces = [np.array([f]), c, g, J.ravel(), H.ravel()]
    for p in pieces:
        if not np.all(np.isfinite(p)):
            raise EvaluationError(f"{problem.name}: non-finite evaluator output")
    hnorm = float(np.max(np.abs(H), initial=0.0))
    if float(np.max(np.abs(H - H.T), initial=0.0)) > 1e-12 * (1.0 + hnorm):
        raise EvaluationError(f"{problem.name}: H is not symmetric")
    return Evaluation(f=f, c=c, g=g, J=J, H=H)


@dataclass(frozen=True)
class DerivativeReport:
    """Relative agreement between callbacks and central differences."""

    gradient_error: float
    jacobian_error: float
    hessian_error: float
    step: float

    @property
    def max_error(self):
        return max(self.gradient_error, self.jacobian_error, self.hessian_error)


def check_derivatives(problem, x, y=None, step=1e-5):
    """Compare g, J, H against central finite differences of f, c, g.

    H is differenced through the combined gradient g(x) + J(x).T @ y so
    the multiplier-weighted constraint curvature is covered too. Errors
    are max-norm, relative to 1 + the exact quantity's max-norm.
    """
    x = np.asarray(x, dtype=float)
    n, m = problem.n, problem.m
    y = np.zeros(m) if y is None else np.asarray(y, dtype=float)
    it = make_iterate(x, y)
    ev = evaluate(problem, it)

    def lag_grad(z):
        g = np.asarray(problem.gradient(z), dtype=float).reshape(-1)
        if m:
            J = np.asarray(problem.jacobian(z), dtype=float).reshape(m, n)
            return g + J.T @ y
        return g

    g_fd = np.zeros(n)
    J_fd = np.zeros((m, n))
    H_fd = np.zeros((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        g_fd[i] = (problem.objective(x + e) - problem.objective(x - e)) / (2 * step)
        if m:
            cp = np.asarray(problem.constraints(x + e), dtype=float).reshape(-1)
            cm = np.asarray(problem.constraints(x - e), dtype=float).reshape(-1)
            J_fd[:, i] = (cp - cm) / (2 * step)
        H_fd[:, i] = (lag_grad(x + e) - lag_grad(x - e)) / (2 * step)
    H_fd = 0.5 * (H_fd + H_fd.T)

    def rel(approx, exact):
        denom = 1.0 + float(np.max(np.abs(exact), initial=0.0))
        return float(np.max(np.abs(approx - exact), initial=0.0)) / denom

    return DerivativeReport(
        gradient_error=rel(g_fd, ev.g),
        jacobian_error=rel(J_fd, ev.J),
        hessian_error=rel(H_fd, ev.H),
        step=step,
    )
