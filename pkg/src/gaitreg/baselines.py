"""Comparison models: affine least squares and epsilon-SVR with RBF kernel.

The SVR dual is solved by sequential minimal optimization on the stacked
2n-variable box QP

    min  1/2 (z a)' K (z a) + p' a
    s.t. sum_t z_t a_t = 0,   0 <= a_t <= C

with a = [alpha; alpha*], z = [+1...; -1...], p = [eps - y; eps + y].
Each step picks the maximally KKT-violating pair (largest gap between the
bias candidates -z_t G_t over the up/down index sets), solves the
two-variable subproblem in closed form, and maintains the gradient
incrementally.  The bias is the mean candidate over unbounded support
vectors, or the midpoint of the final bounds if none are free.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .preprocessing import FeatureDataset

DEFAULT_SVR_C = 10.0
DEFAULT_SVR_EPSILON = 0.01
DEFAULT_SVR_TOL = 1e-3
DEFAULT_SVR_MAX_UPDATES = 100_000


@dataclass(frozen=True)
class LinearModel:
    """y = x @ weights.T + intercept."""

    weights: np.ndarray  # (n_outputs, n_features)
    intercept: np.ndarray  # (n_outputs,)


def linear_fit(x: np.ndarray, y: np.ndarray) -> LinearModel:
    """Least squares via orthogonal decomposition (numpy lstsq / SVD).

    Rank-deficient designs fall back to the minimum-norm solution with a
    warning instead of failing.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        y = y[:, None]
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ConfigError(f"design {x.shape} and targets {y.shape} do not align")
    design = np.column_stack([x, np.ones(x.shape[0])])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        warnings.warn(
            f"rank-deficient design (rank {rank} < {design.shape[1]}); "
            "returning the minimum-norm solution",
            stacklevel=2,
        )
    return LinearModel(weights=coef[:-1].T.copy(), intercept=coef[-1].copy())


def linear_predict(model: LinearModel, x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=np.float64) @ model.weights.T + model.intercept


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """k(u, v) = exp(-gamma * ||u - v||^2), dense matrix."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    sq = (
        np.sum(a**2, axis=1)[:, None]
        + np.sum(b**2, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class SvrModel:
    """One fitted scalar-output epsilon-SVR."""

    coef: np.ndarray  # alpha - alpha* for every training row
    bias: float
    gamma: float
    c: float
    epsilon: float
    support_vectors: np.ndarray  # rows with nonzero coef
    support_coef: np.ndarray
    converged: bool
    n_updates: int
    dual_objective: float


def svr_fit(
    x: np.ndarray,
    y: np.ndarray,
    c: float = DEFAULT_SVR_C,
    epsilon: float = DEFAULT_SVR_EPSILON,
    gamma: Optional[float] = None,
    tol: float = DEFAULT_SVR_TOL,
    max_updates: int = DEFAULT_SVR_MAX_UPDATES,
) -> SvrModel:
    """Fit one output dimension by SMO; see the module docstring."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    n = x.shape[0]
    if n < 1 or y.shape[0] != n:
        raise ConfigError(f"need matching x {x.shape} and y {y.shape}")
    if c <= 0.0 or epsilon < 0.0:
        raise ConfigError(f"need C > 0 and epsilon >= 0, got C={c}, epsilon={epsilon}")
    if gamma is None:
        gamma = 1.0 / x.shape[1]
    if gamma <= 0.0:
        raise ConfigError(f"gamma must be positive, got {gamma}")

    kernel = rbf_kernel(x, x, gamma)
    alpha = np.zeros(n)  # pushes f(x_i) up
    alpha_star = np.zeros(n)  # pushes f(x_i) down
    # c0 = y - K beta; bias candidates are c0 - eps (alpha side), c0 + eps (alpha* side)
    c0 = y.copy()
    n_updates = 0
    converged = False
    eps_bound = 1e-12 * c
    work = np.empty(n)
    while True:
        # maximally violating pair over the up/down sets; alpha side wins ties
        np.copyto(work, c0)
        work[alpha >= c - eps_bound] = -np.inf
        ia = int(np.argmax(work))
        up_a = work[ia] - epsilon
        np.copyto(work, c0)
        work[alpha_star <= eps_bound] = -np.inf
        is_ = int(np.argmax(work))
        up_s = work[is_] + epsilon
        i_on_alpha = up_a >= up_s
        m_up = up_a if i_on_alpha else up_s
        bi = ia if i_on_alpha else is_

        np.copyto(work, c0)
        work[alpha <= eps_bound] = np.inf
        ja = int(np.argmin(work))
        low_a = work[ja] - epsilon
        np.copyto(work, c0)
        work[alpha_star >= c - eps_bound] = np.inf
        js = int(np.argmin(work))
        low_s = work[js] + epsilon
        j_on_alpha = low_a <= low_s
        m_low = low_a if j_on_alpha else low_s
        bj = ja if j_on_alpha else js

        if m_up - m_low < tol:
            converged = True
            break
        if n_updates >= max_updates:
            break
        eta = kernel[bi, bi] + kernel[bj, bj] - 2.0 * kernel[bi, bj]
        cap_i = (c - alpha[bi]) if i_on_alpha else alpha_star[bi]
        cap_j = alpha[bj] if j_on_alpha else (c - alpha_star[bj])
        step = min(cap_i, cap_j)
        if eta > 1e-12:
            step = min(step, (m_up - m_low) / eta)
        if i_on_alpha:
            alpha[bi] = min(alpha[bi] + step, c)
        else:
            alpha_star[bi] = max(alpha_star[bi] - step, 0.0)
        if j_on_alpha:
            alpha[bj] = max(alpha[bj] - step, 0.0)
        else:
            alpha_star[bj] = min(alpha_star[bj] + step, c)
        # beta_bi += step, beta_bj -= step, so K beta moves along two kernel rows
        c0 -= step * kernel[bi]
        c0 += step * kernel[bj]
        n_updates += 1

    coef = alpha - alpha_star
    free_a = (alpha > eps_bound) & (alpha < c - eps_bound)
    free_s = (alpha_star > eps_bound) & (alpha_star < c - eps_bound)
    if np.any(free_a) or np.any(free_s):
        cands = np.concatenate([c0[free_a] - epsilon, c0[free_s] + epsilon])
        bias = float(cands.mean())
    else:
        bias = float((m_up + m_low) / 2.0) if np.isfinite(m_up + m_low) else 0.0

    k_coef = kernel @ coef
    dual = float(
        0.5 * coef @ k_coef + epsilon * (alpha.sum() + alpha_star.sum()) - y @ coef
    )
    support = np.abs(coef) > 0.0
    return SvrModel(
        coef=coef,
        bias=bias,
        gamma=float(gamma),
        c=float(c),
        epsilon=float(epsilon),
        support_vectors=x[support].copy(),
        support_coef=coef[support].copy(),
        converged=converged,
        n_updates=n_updates,
        dual_objective=dual,
    )


def svr_predict(model: SvrModel, x: np.ndarray) -> np.ndarray:
    """f(x) = sum_i coef_i k(x_i, x) + b over the stored support vectors."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if len(model.support_coef) == 0:
        out = np.full(x.shape[0], model.bias)
    else:
        out = rbf_kernel(x, model.support_vectors, model.gamma) @ model.support_coef
        out = out + model.bias
    return float(out[0]) if single else out


@dataclass(frozen=True)
class SvrBaseline:
    """Multi-output SVR: independent fits on standardized targets."""

    models: tuple[SvrModel, ...]
    y_mean: np.ndarray
    y_std: np.ndarray


def fit_svr_baseline(
    x: np.ndarray,
    y: np.ndarray,
    c: float = DEFAULT_SVR_C,
    epsilon: float = DEFAULT_SVR_EPSILON,
    gamma: Optional[float] = None,
    tol: float = DEFAULT_SVR_TOL,
    max_updates: int = DEFAULT_SVR_MAX_UPDATES,
) -> SvrBaseline:
    """Standardize each target column (train statistics), fit one SVR per column.

    epsilon is therefore meant on the standardized scale, which keeps one
    tube width meaningful for targets in degrees and newton-meters alike.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        y = y[:, None]
    mean = y.mean(axis=0)
    std = y.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    models = tuple(
        svr_fit(x, (y[:, d] - mean[d]) / std[d], c, epsilon, gamma, tol, max_updates)
        for d in range(y.shape[1])
    )
    return SvrBaseline(models=models, y_mean=mean, y_std=std)


def predict_svr_baseline(baseline: SvrBaseline, x: np.ndarray) -> np.ndarray:
    cols = [
        svr_predict(m, x) * s + mu
        for m, mu, s in zip(baseline.models, baseline.y_mean, baseline.y_std)
    ]
    return np.column_stack(cols)


def grid_search_svr(
    features: FeatureDataset,
    grid_c: Sequence[float],
    grid_epsilon: Sequence[float],
    grid_gamma: Sequence[float],
    n_folds: int = 3,
    tol: float = DEFAULT_SVR_TOL,
    max_updates: int = DEFAULT_SVR_MAX_UPDATES,
) -> tuple[float, float, float]:
    """Pick (C, epsilon, gamma) by mean validation RMSE over trial-level folds.

    Trials are assigned round-robin (in dataset order) to n_folds folds;
    the score of a triple is the RMSE over all validation rows and both
    targets, averaged across folds.  Ties keep the lexicographically
    smallest triple because the grid is scanned in sorted order.
    """
    if not (len(grid_c) and len(grid_epsilon) and len(grid_gamma)):
        raise ConfigError("hyperparameter grid must be non-empty")
    n_trials = len(features.trial_ids)
    n_folds = min(n_folds, n_trials)
    if n_folds < 2:
        raise ConfigError(f"grid search needs >= 2 folds, got {n_folds}")
    fold_rows = [[] for _ in range(n_folds)]
    for t, (s, e) in enumerate(features.trial_slices):
        fold_rows[t % n_folds].extend(range(s, e))
    fold_rows = [np.asarray(rows, dtype=int) for rows in fold_rows]
    all_rows = np.arange(features.n_rows)

    best = None
    best_score = np.inf
    for c, eps, gamma in sorted(product(grid_c, grid_epsilon, grid_gamma)):
        scores = []
        for rows in fold_rows:
            train_rows = np.setdiff1d(all_rows, rows)
            fit = fit_svr_baseline(
                features.inputs[train_rows],
                features.targets[train_rows],
                c, eps, gamma, tol, max_updates,
            )
            pred = predict_svr_baseline(fit, features.inputs[rows])
            err = pred - features.targets[rows]
            scores.append(float(np.sqrt(np.mean(err**2))))
        score = float(np.mean(scores))
        if score < best_score:
            best_score = score
            best = (float(c), float(eps), float(gamma))
    return best
