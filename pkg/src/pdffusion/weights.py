"""Pooling weight selection.

Three schemes: weights inversely proportional to each agent's worst-case
KLD against the others; weights minimizing the average KLD from the agents
to the log-linear pool (a convex objective over the simplex); and
covariance intersection weights minimizing the trace or log-determinant of
the fused covariance. The reverse form of the KLD objective, whose optimum
is always uniform weights, is exposed for verification.

The simplex optimizer is projected gradient descent with finite-difference
gradients and Armijo backtracking; two-agent covariance intersection uses
golden-section search on the single free weight.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import divergence, pooling
from .errors import DegenerateError, NonConvergenceError, PositivityError
from .gaussian import Gaussian, check_simplex, ci_fuse
from .grid import OpinionProfile

FD_STEP = 1e-5
ARMIJO_C = 1e-4
MIN_STEP = 1e-13
GOLDEN_TOL = 1e-10


@dataclass(frozen=True)
class WeightResult:
    weights: np.ndarray
    objective: float
    iterations: int
    converged: bool
    gradient_norm: float


class CICriterion(enum.Enum):
    TRACE = "trace"
    LOGDET = "logdet"


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex.

    Sort-and-threshold: find the largest set of coordinates that stay
    positive after subtracting a common shift, and clip the rest to zero.
    """
    v = np.asarray(v, dtype=np.float64)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0.0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


def _fd_gradient(objective: Callable[[np.ndarray], float], w: np.ndarray) -> np.ndarray:
    g = np.zeros_like(w)
    for i in range(w.size):
        e = np.zeros_like(w)
        e[i] = FD_STEP
        g[i] = (objective(w + e) - objective(w - e)) / (2.0 * FD_STEP)
    return g


def _minimize_on_simplex(
    objective: Callable[[np.ndarray], float],
    K: int,
    max_iter: int,
    tol: float,
) -> WeightResult:
    """Projected gradient descent from uniform weights.

    Convergence is declared when the natural residual, the distance between
    the iterate and its projected gradient step, drops below tol.
    """
    w = np.full(K, 1.0 / K)
    f = objective(w)
    residual = np.inf
    for it in range(1, max_iter + 1):
        g = _fd_gradient(objective, w)
        g = g - g.mean()  # tangent component along the simplex
        residual = float(np.linalg.norm(w - project_to_simplex(w - g)))
        if residual < tol:
            return WeightResult(w, f, it - 1, True, residual)
        step = 1.0
        while step > MIN_STEP:
            trial = project_to_simplex(w - step * g)
            f_trial = objective(trial)
            if f_trial <= f - ARMIJO_C * float(g @ (w - trial)):
                break
            step *= 0.5
        else:
            # no productive step left; treat the iterate as converged if the
            # residual is within a loose multiple of tol, else give up
            if residual < 100 * tol:
                return WeightResult(w, f, it, True, residual)
            raise NonConvergenceError(
                f"line search stalled at iteration {it} with residual {residual:.3e}",
                result=WeightResult(w, f, it, False, residual),
            )
        w, f = trial, f_trial
    raise NonConvergenceError(
        f"no convergence in {max_iter} iterations, residual {residual:.3e}",
        result=WeightResult(w, f, max_iter, False, residual),
    )


def _pairwise_kld(profile: OpinionProfile) -> np.ndarray:
    K = profile.K
    D = np.zeros((K, K))
    for a in range(K):
        for b in range(K):
            if a != b:
                D[a, b] = divergence.kl(profile.densities[a], profile.densities[b])
    return D


def min_kld_weights(profile: OpinionProfile, max_iter: int = 500, tol: float = 1e-6) -> WeightResult:
    """Weights minimizing the average KLD from the agents to their log-linear pool.

    The objective splits into the log normalizer of the unnormalized
    geometric mean plus a weighted average of pairwise KLDs, so the pairwise
    table and the agent log-densities are precomputed once and each
    evaluation is a single weighted sum.

    Raises
    ------
    PositivityError
        If any agent density has a zero.
    NonConvergenceError
        After max_iter iterations; the error carries the best iterate.
    """
    if not profile.positive:
        raise PositivityError("minimum-KLD weights need a strictly positive profile")
    if profile.K < 2:
        raise ValueError("weight selection needs at least two agents")
    K = profile.K
    logs = np.stack([np.log(q.values) for q in profile.densities]).reshape(K, -1)
    quad = profile.grid.quad_weights.reshape(-1)
    D = _pairwise_kld(profile)
    # b_j collects the column sums: the coefficient of w_j in the KLD average
    b = D.sum(axis=0) / K

    def objective(w: np.ndarray) -> float:
        s = w @ logs
        m = s.max()
        log_norm = m + np.log(float(np.sum(quad * np.exp(s - m))))
        return log_norm + float(w @ b)

    return _minimize_on_simplex(objective, K, max_iter, tol)


def reverse_kld_objective(profile: OpinionProfile, w) -> float:
    """Average KLD from the log-linear pool at ``w`` to each agent.

    Uniform weights minimize this for every positive profile.
    """
    w = check_simplex(w, profile.K)
    pooled = pooling.log_linear_pool(profile, w)
    vals = [divergence.kl(pooled, q) for q in profile.densities]
    return float(np.mean(vals))


def discrepancy_weights(profile: OpinionProfile) -> np.ndarray:
    """Weights inversely proportional to each agent's maximum KLD to the rest.

    Raises
    ------
    DegenerateError
        If some agent's maximum discrepancy is zero (identical agents).
    """
    if not profile.positive:
        raise PositivityError("discrepancy weights need a strictly positive profile")
    if profile.K < 2:
        raise ValueError("weight selection needs at least two agents")
    D = _pairwise_kld(profile)
    np.fill_diagonal(D, -np.inf)
    worst = D.max(axis=1)
    if np.any(worst <= 0.0):
        raise DegenerateError("an agent has zero maximum discrepancy; weights are undefined")
    gamma = 1.0 / worst
    return gamma / gamma.sum()


def _golden_section(f: Callable[[float], float], max_iter: int) -> tuple[float, int, float]:
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = 0.0, 1.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > GOLDEN_TOL and it < max_iter:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        it += 1
    return 0.5 * (a + b), it, b - a


def ci_weights(
    gaussians,
    criterion: CICriterion = CICriterion.TRACE,
    max_iter: int = 500,
    tol: float = 1e-6,
) -> WeightResult:
    """Covariance intersection weights minimizing fused covariance size.

    criterion TRACE minimizes trace of the fused covariance, LOGDET its
    log-determinant. Two agents use golden-section search on the single
    free weight; more use projected gradient descent.
    """
    gaussians = list(gaussians)
    K = len(gaussians)
    if K < 2:
        raise ValueError("weight selection needs at least two agents")

    def size(cov: np.ndarray) -> float:
        if criterion is CICriterion.TRACE:
            return float(np.trace(cov))
        sign, logdet = np.linalg.slogdet(cov)
        if sign <= 0:
            raise DegenerateError("fused covariance lost positive definiteness")
        return float(logdet)

    if K == 2:

        def f(w1: float) -> float:
            return size(ci_fuse(gaussians, [w1, 1.0 - w1]).cov)

        w1, it, width = _golden_section(f, max_iter)
        w = np.array([w1, 1.0 - w1])
        return WeightResult(w, f(w1), it, bool(width <= GOLDEN_TOL * 2), width)

    def objective(w: np.ndarray) -> float:
        w = np.maximum(w, 0.0)
        s = w.sum()
        if s <= 0.0:
            return np.inf
        return size(ci_fuse(gaussians, w / s).cov)

    return _minimize_on_simplex(objective, K, max_iter, tol)
