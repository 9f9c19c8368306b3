"""Fusion of agent posteriors in linear Gaussian estimation models.

K agents observe y_k = H_k theta + n_k with jointly Gaussian noise whose
blocks may be correlated across agents. Each agent's posterior is summarized
by a local statistic t_k; treating the stacked statistic as an observation
of theta gives a fused posterior that accounts for the correlation, unlike
naive product rules. The oracle posterior conditioned on the raw
observations is computed alongside for comparison whenever the full noise
covariance is invertible.

Scalar (d_theta = 1) models admit scalar pooling weights; general models get
matrix-valued weights plus the quadratic correction factor that makes the
fused likelihood exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from .errors import DimensionError, RankError, SingularityError
from .gaussian import Gaussian, pd_inverse, symmetrize
from .grid import GridDensity, OpinionProfile
from .pooling import multiplicative_pool

SYMMETRY_TOL = 1e-10
PSD_TOL = -1e-10


def _try_cholesky(mat: np.ndarray) -> bool:
    try:
        linalg.cholesky(mat, lower=True)
        return True
    except linalg.LinAlgError:
        return False


@dataclass(frozen=True, eq=False)
class LinearGaussianModel:
    """Observation model y_k = H_k theta + n_k with joint noise covariance.

    Fields
    ------
    H_blocks : K observation matrices, each d_{y_k} x d_theta with
        d_{y_k} >= d_theta and full column rank.
    Sigma : full noise covariance over the stacked observation, symmetric
        positive semidefinite with positive definite diagonal blocks.
    prior_mean, prior_cov : Gaussian prior on theta, prior_cov PD.
    """

    H_blocks: tuple[np.ndarray, ...]
    Sigma: np.ndarray
    prior_mean: np.ndarray
    prior_cov: np.ndarray

    def __post_init__(self):
        blocks = tuple(np.atleast_2d(np.asarray(h, dtype=np.float64)).copy() for h in self.H_blocks)
        if not blocks:
            raise DimensionError("need at least one agent block")
        d_theta = blocks[0].shape[1]
        for k, h in enumerate(blocks):
            if h.shape[1] != d_theta:
                raise DimensionError(f"H block {k} has {h.shape[1]} columns, expected {d_theta}")
            if h.shape[0] < d_theta:
                raise DimensionError(
                    f"H block {k} has fewer rows ({h.shape[0]}) than parameters ({d_theta})"
                )
            if not np.all(np.isfinite(h)):
                raise ValueError(f"H block {k} has non-finite entries")
            if np.linalg.matrix_rank(h) < d_theta:
                raise RankError(f"H block {k} is column rank deficient")
        d_y = sum(h.shape[0] for h in blocks)
        sigma = np.atleast_2d(np.asarray(self.Sigma, dtype=np.float64)).copy()
        if sigma.shape != (d_y, d_y):
            raise DimensionError(f"Sigma shape {sigma.shape}, expected ({d_y}, {d_y})")
        if not np.all(np.isfinite(sigma)):
            raise ValueError("Sigma has non-finite entries")
        if np.max(np.abs(sigma - sigma.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(sigma))):
            raise ValueError("Sigma is not symmetric")
        sigma = symmetrize(sigma)
        eigs = np.linalg.eigvalsh(sigma)
        if eigs[0] < PSD_TOL * max(1.0, eigs[-1]):
            raise ValueError(f"Sigma has negative eigenvalue {eigs[0]:.3e}")
        prior_mean = np.atleast_1d(np.asarray(self.prior_mean, dtype=np.float64)).copy()
        prior_cov = np.atleast_2d(np.asarray(self.prior_cov, dtype=np.float64)).copy()
        if prior_mean.shape != (d_theta,) or prior_cov.shape != (d_theta, d_theta):
            raise DimensionError("prior dimensions do not match the parameter dimension")
        if not _try_cholesky(prior_cov):
            raise SingularityError("prior covariance is not positive definite")
        for k in range(len(blocks)):
            lo, hi = self._span(blocks, k)
            if not _try_cholesky(sigma[lo:hi, lo:hi]):
                raise SingularityError(f"diagonal noise block {k} is not positive definite")
        for arr in blocks:
            arr.flags.writeable = False
        sigma.flags.writeable = False
        prior_mean.flags.writeable = False
        prior_cov.flags.writeable = False
        object.__setattr__(self, "H_blocks", blocks)
        object.__setattr__(self, "Sigma", sigma)
        object.__setattr__(self, "prior_mean", prior_mean)
        object.__setattr__(self, "prior_cov", prior_cov)
        # materializing the reduced covariance validates its invertibility
        self.sigma_tilde_inv

    @staticmethod
    def _span(blocks, k: int) -> tuple[int, int]:
        lo = sum(h.shape[0] for h in blocks[:k])
        return lo, lo + blocks[k].shape[0]

    @property
    def K(self) -> int:
        return len(self.H_blocks)

    @property
    def d_theta(self) -> int:
        return self.H_blocks[0].shape[1]

    @property
    def d_y(self) -> int:
        return self.Sigma.shape[0]

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(h.shape[0] for h in self.H_blocks)

    def sigma_block(self, k: int) -> np.ndarray:
        lo, hi = self._span(self.H_blocks, k)
        return self.Sigma[lo:hi, lo:hi]

    @cached_property
    def local_precisions(self) -> tuple[np.ndarray, ...]:
        """H_k^T Sigma_kk^{-1} H_k per agent."""
        out = []
        for k, h in enumerate(self.H_blocks):
            inv_block = pd_inverse(self.sigma_block(k), f"noise block {k}")
            out.append(symmetrize(h.T @ inv_block @ h))
        return tuple(out)

    @cached_property
    def V_blocks(self) -> tuple[np.ndarray, ...]:
        """Per-agent statistic maps (H_k^T S^{-1} H_k)^{-1} H_k^T S^{-1}."""
        out = []
        for k, h in enumerate(self.H_blocks):
            inv_block = pd_inverse(self.sigma_block(k), f"noise block {k}")
            gram = symmetrize(h.T @ inv_block @ h)
            if not _try_cholesky(gram):
                raise RankError(f"agent {k} statistic map is rank deficient")
            v = pd_inverse(gram, f"agent {k} gram") @ h.T @ inv_block
            if np.max(np.abs(v @ h - np.eye(self.d_theta))) > 1e-10:
                raise RankError(f"agent {k} statistic map fails the identity check")
            out.append(v)
        return tuple(out)

    @cached_property
    def V(self) -> np.ndarray:
        """Block-diagonal stack of the V_blocks, (K d_theta) x d_y."""
        return linalg.block_diag(*self.V_blocks)

    @cached_property
    def Sigma_tilde(self) -> np.ndarray:
        """Covariance of the stacked local statistics, V Sigma V^T."""
        return symmetrize(self.V @ self.Sigma @ self.V.T)

    @cached_property
    def sigma_tilde_inv(self) -> np.ndarray:
        return pd_inverse(self.Sigma_tilde, "reduced covariance")

    @cached_property
    def ones_kron(self) -> np.ndarray:
        return np.kron(np.ones((self.K, 1)), np.eye(self.d_theta))


@dataclass(frozen=True, eq=False)
class SupraFusionResult:
    posterior: Gaussian
    oracle: Gaussian | None
    scalar_weights: np.ndarray | None
    vector_weights: tuple[np.ndarray, ...] | None
    Sigma_tilde: np.ndarray
    Sigma_hat_inv: np.ndarray
    G: np.ndarray | None


def local_statistics(model: LinearGaussianModel, y) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    """Per-agent statistics t_k = V_k y_k, stacked, plus the maps V_k."""
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if y.shape != (model.d_y,):
        raise DimensionError(f"observation length {y.shape}, expected ({model.d_y},)")
    parts = []
    for k, v in enumerate(model.V_blocks):
        lo, hi = model._span(model.H_blocks, k)
        parts.append(v @ y[lo:hi])
    return np.concatenate(parts), model.V_blocks


def global_likelihood_params(model: LinearGaussianModel) -> tuple[np.ndarray, np.ndarray]:
    """The reduced covariance of the stacked statistics and the fused
    precision it induces on theta."""
    ones = model.ones_kron
    sigma_hat_inv = symmetrize(ones.T @ model.sigma_tilde_inv @ ones)
    return model.Sigma_tilde, sigma_hat_inv


def _oracle_posterior(model: LinearGaussianModel, y: np.ndarray) -> Gaussian | None:
    if not _try_cholesky(model.Sigma):
        return None  # oracle undefined for singular joint noise
    H = np.vstack(model.H_blocks)
    sigma_inv = pd_inverse(model.Sigma, "joint noise covariance")
    prior_prec = pd_inverse(model.prior_cov, "prior covariance")
    post_prec = symmetrize(H.T @ sigma_inv @ H + prior_prec)
    cov = pd_inverse(post_prec, "oracle posterior precision")
    mean = cov @ (H.T @ sigma_inv @ y + prior_prec @ model.prior_mean)
    return Gaussian(mean, cov)


def scalar_fusion(model: LinearGaussianModel, t, y=None) -> SupraFusionResult:
    """Fused posterior from local statistics of a scalar-parameter model.

    Weights w_k attach to the agent posteriors in the product-of-powers
    fusion rule; the posterior itself comes from the closed-form conjugate
    update. When the raw observation ``y`` is supplied and the joint noise
    covariance is invertible, the oracle posterior is filled in as well.

    Raises
    ------
    DimensionError
        If the model's parameter is not scalar.
    """
    if model.d_theta != 1:
        raise DimensionError("scalar fusion needs a one-dimensional parameter")
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if t.shape != (model.K,):
        raise DimensionError(f"statistic length {t.shape}, expected ({model.K},)")
    sti = model.sigma_tilde_inv
    col = sti @ np.ones(model.K)
    d = np.array([float(p[0, 0]) for p in model.local_precisions])
    weights = col / d
    sigma_hat_sq = 1.0 / float(col.sum())
    s0 = float(model.prior_cov[0, 0])
    m0 = float(model.prior_mean[0])
    var1 = sigma_hat_sq * s0 / (sigma_hat_sq + s0)
    mean1 = var1 * (float(col @ t) + m0 / s0)
    oracle = None
    if y is not None:
        oracle = _oracle_posterior(model, np.atleast_1d(np.asarray(y, dtype=np.float64)))
    return SupraFusionResult(
        posterior=Gaussian([mean1], [[var1]]),
        oracle=oracle,
        scalar_weights=weights,
        vector_weights=None,
        Sigma_tilde=model.Sigma_tilde,
        Sigma_hat_inv=np.array([[1.0 / sigma_hat_sq]]),
        G=None,
    )


def vector_fusion(model: LinearGaussianModel, t, y=None) -> SupraFusionResult:
    """Fused posterior with matrix-valued agent weights.

    W_k = (H_k^T S_kk^{-1} H_k)^{-1} (e_k kron I)^T SigmaTilde^{-1} (1 kron I);
    G is the quadratic correction making the weighted likelihood product
    exact. The posterior is the conjugate update under the fused precision.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    dt, K = model.d_theta, model.K
    if t.shape != (K * dt,):
        raise DimensionError(f"statistic length {t.shape}, expected ({K * dt},)")
    sti = model.sigma_tilde_inv
    ones = model.ones_kron
    sigma_hat_inv = symmetrize(ones.T @ sti @ ones)
    vector_weights = []
    for k in range(K):
        block_row = sti[k * dt : (k + 1) * dt, :]  # (e_k kron I)^T SigmaTilde^{-1}
        wk = pd_inverse(model.local_precisions[k], f"agent {k} precision") @ block_row @ ones
        vector_weights.append(wk)
    G = sigma_hat_inv.copy()
    for k in range(K):
        wk = vector_weights[k]
        G = G - wk.T @ model.local_precisions[k] @ wk
    G = symmetrize(G)
    prior_prec = pd_inverse(model.prior_cov, "prior covariance")
    cov1 = pd_inverse(symmetrize(sigma_hat_inv + prior_prec), "fused posterior precision")
    mean1 = cov1 @ (ones.T @ sti @ t + prior_prec @ model.prior_mean)
    oracle = None
    if y is not None:
        oracle = _oracle_posterior(model, np.atleast_1d(np.asarray(y, dtype=np.float64)))
    return SupraFusionResult(
        posterior=Gaussian(mean1, cov1),
        oracle=oracle,
        scalar_weights=None,
        vector_weights=tuple(vector_weights),
        Sigma_tilde=model.Sigma_tilde,
        Sigma_hat_inv=sigma_hat_inv,
        G=G,
    )


def substituted_oracle(model: LinearGaussianModel, y) -> Gaussian:
    """Oracle recomputed with the joint precision replaced by
    V^T (V Sigma V^T)^{-1} V.

    This reproduces the fused posterior exactly: the substitution is what
    discarding the raw observations in favor of the local statistics costs.
    """
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if y.shape != (model.d_y,):
        raise DimensionError(f"observation length {y.shape}, expected ({model.d_y},)")
    H = np.vstack(model.H_blocks)
    M = model.V.T @ model.sigma_tilde_inv @ model.V
    prior_prec = pd_inverse(model.prior_cov, "prior covariance")
    post_prec = symmetrize(H.T @ M @ H + prior_prec)
    cov = pd_inverse(post_prec, "substituted posterior precision")
    mean = cov @ (H.T @ M @ y + prior_prec @ model.prior_mean)
    return Gaussian(mean, cov)


def private_shared_model(
    K: int,
    r0: int,
    r,
    prior_mean: float = 0.0,
    prior_var: float = 1.0,
) -> LinearGaussianModel:
    """Scalar-parameter model where each agent sees r0 shared and r_k
    private unit-variance observations of theta.

    The shared observations occupy the leading r0 coordinates of every
    agent's block, making the cross covariance an identity on that corner.
    """
    r = [int(v) for v in np.atleast_1d(r)]
    K = int(K)
    r0 = int(r0)
    if K < 1 or len(r) != K:
        raise DimensionError(f"need K={K} private counts, got {len(r)}")
    if r0 < 0 or any(v < 1 for v in r):
        raise ValueError("private counts must be positive and the shared count nonnegative")
    sizes = [r0 + rk for rk in r]
    H_blocks = [np.ones((n, 1)) for n in sizes]
    d_y = sum(sizes)
    sigma = np.eye(d_y)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    for a in range(K):
        for b in range(K):
            if a != b and r0 > 0:
                sigma[offsets[a] : offsets[a] + r0, offsets[b] : offsets[b] + r0] = np.eye(r0)
    return LinearGaussianModel(tuple(H_blocks), sigma, [prior_mean], [[prior_var]])


def private_shared_weights(K: int, r0: int, r) -> np.ndarray:
    """Closed-form scalar fusion weights for the private/shared model.

    w_k = 1 - (K-1)/r_k * (1/r0 + sum_j 1/r_j)^{-1}; with no shared
    observations every weight is 1 and fusion is the plain product rule.
    """
    r = np.array([float(v) for v in np.atleast_1d(r)])
    K = int(K)
    if len(r) != K:
        raise DimensionError(f"need K={K} private counts, got {len(r)}")
    if r0 == 0:
        return np.ones(K)
    total = 1.0 / float(r0) + float(np.sum(1.0 / r))
    return 1.0 - (K - 1.0) / (r * total)


def multiplicative_posterior_fusion(
    prior: GridDensity, posteriors: OpinionProfile, weights=None
) -> GridDensity:
    """Fuse agent posteriors by the weighted product rule against the prior.

    Computes the normalization of prior^(1 - sum w) * prod post_k^{w_k}.
    All-ones weights give the conditionally-independent fusion rule.
    """
    return multiplicative_pool(posteriors, prior, weights)


def expfam_fuse_statistics(t_list, t0) -> np.ndarray:
    """Sum the local natural statistics onto the prior statistic."""
    t0 = np.atleast_1d(np.asarray(t0, dtype=np.float64))
    out = t0.copy()
    for i, t in enumerate(t_list):
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        if t.shape != t0.shape:
            raise DimensionError(f"statistic {i} has shape {t.shape}, expected {t0.shape}")
        out = out + t
    return out
