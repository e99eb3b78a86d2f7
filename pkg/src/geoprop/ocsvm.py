"""One-class SVM (nu formulation) for scalar samples, solved exactly.

The dual problem is

    minimize   0.5 * sum_ij alpha_i alpha_j k(x_i, x_j)
    subject to 0 <= alpha_i <= 1 / (nu * n),  sum_i alpha_i = 1

with the RBF kernel k(x, y) = exp(-gamma * (x - y)^2). The decision
function is f(x) = sum_i alpha_i k(x_i, x) - rho, where rho equals the
pre-offset decision value at any unbounded support vector; f(x) >= 0 marks
x as an inlier (the boundary is inclusive).

Duplicate sample values have identical kernel columns, so the dual reduces
exactly to a problem over per-value masses m_v = sum of alphas at value v,
box-constrained by count_v / (nu * n); distributing a mass uniformly over
its duplicates changes nothing. The solver works on that compressed
problem with a maximal-violating-pair SMO loop, warm-started at the capped
water-level point (the exact optimum when the kernel is the identity),
then expands back to per-sample alphas.

Training samples here are tiny (one problem per node, n = T + 1), so the
solver favors exactness over scalability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_KKT_TOL = 1e-11
_MAX_ITER = 200_000


@dataclass(frozen=True)
class OcsvmModel:
    """Fitted model: support values, their alphas, offset, and kernel params."""

    support: np.ndarray  # (s,) sample values with alpha > 0
    alphas: np.ndarray  # (s,) dual coefficients, each in [0, 1/(nu*n_train)]
    rho: float
    gamma: float
    nu: float
    n_train: int

    def decision(self, x: float) -> float:
        return decision(self, x)


def resolve_gamma(samples: np.ndarray, gamma: float | str) -> float:
    """Numeric gamma, or the 'scale' convention 1 / max(var(samples), 1e-12)."""
    if gamma == "scale":
        return 1.0 / max(float(np.var(samples)), 1e-12)
    g = float(gamma)
    if not g > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    return g


def capped_water_level(caps: np.ndarray) -> float:
    """Level mu with sum(min(cap, mu)) = 1; requires sum(caps) >= 1.

    This is the closed-form optimum of minimizing sum(m^2) on the capped
    simplex: masses sit at min(cap, mu).
    """
    caps = np.asarray(caps, dtype=np.float64)
    total = caps.sum()
    if total < 1.0 - 1e-9:
        raise ValueError("caps sum below 1; the capped simplex is empty")
    order = np.sort(caps)
    remaining = 1.0
    k = len(order)
    for idx, c in enumerate(order):
        level = remaining / (k - idx)
        if level <= c:
            return float(level)
        remaining -= c
    return float(order[-1])


def _smo(K: np.ndarray, caps: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Maximal-violating-pair coordinate descent on the compressed dual."""
    g = K @ m
    eps = 1e-14
    for _ in range(_MAX_ITER):
        up = m < caps - eps
        dn = m > eps
        if not up.any() or not dn.any():
            break
        gi_candidates = np.where(up, g, np.inf)
        gj_candidates = np.where(dn, g, -np.inf)
        i = int(np.argmin(gi_candidates))
        j = int(np.argmax(gj_candidates))
        gap = g[j] - g[i]
        if gap <= _KKT_TOL:
            break
        denom = K[i, i] + K[j, j] - 2.0 * K[i, j]
        step = gap / denom if denom > 1e-15 else np.inf
        step = min(step, caps[i] - m[i], m[j])
        if step <= 0.0:
            break
        m[i] += step
        m[j] -= step
        g += step * (K[:, i] - K[:, j])
    else:
        raise ArithmeticError("one-class SVM dual failed to converge")
    # Snap solver dust so feasibility holds to tight tolerances.
    m[m < eps] = 0.0
    near_cap = caps - m < 1e-12
    m[near_cap] = caps[near_cap]
    residual = 1.0 - m.sum()
    if residual != 0.0:
        room = caps - m
        k = int(np.argmax(room))
        if room[k] >= residual:
            m[k] += residual
    return m


def train_ocsvm(samples, nu: float = 0.8, gamma: float | str = "scale") -> OcsvmModel:
    """Fit the nu one-class SVM on 1-D samples.

    All-identical samples yield a valid model that classifies that value as
    an inlier. Raises on an empty sample set or nu outside (0, 1].
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    n = x.size
    if n == 0:
        raise ValueError("train_ocsvm requires at least one sample")
    if not 0.0 < nu <= 1.0:
        raise ValueError(f"nu must be in (0, 1], got {nu}")
    g = resolve_gamma(x, gamma)

    values, inverse, vcounts = np.unique(x, return_inverse=True, return_counts=True)
    caps = vcounts / (nu * n)
    diff = values[:, None] - values[None, :]
    K = np.exp(-g * diff * diff)

    mu = capped_water_level(caps)
    m = np.minimum(caps, mu)
    deficit = 1.0 - m.sum()
    if deficit != 0.0:
        room = caps - m
        k = int(np.argmax(room))
        if room[k] >= deficit:
            m[k] += deficit
    if values.size > 1:
        m = _smo(K, caps, m)

    g_values = K @ m  # pre-offset decision at each distinct value
    per_sample_cap = 1.0 / (nu * n)
    alpha_values = m / vcounts  # per-sample alpha for samples at each value

    bound_eps = max(1e-12, 1e-9 * per_sample_cap)
    free = (alpha_values > bound_eps) & (alpha_values < per_sample_cap - bound_eps)
    at_cap = alpha_values >= per_sample_cap - bound_eps
    at_zero = alpha_values <= bound_eps
    if free.any():
        rho = float(np.mean(g_values[free]))
    else:
        lower = float(np.max(g_values[at_cap])) if at_cap.any() else -np.inf
        upper = float(np.min(g_values[at_zero])) if at_zero.any() else np.inf
        if np.isfinite(lower) and np.isfinite(upper):
            rho = 0.5 * (lower + upper)
        elif np.isfinite(lower):
            rho = lower
        else:
            rho = upper

    keep = m > 0.0
    support = np.repeat(values[keep], vcounts[keep])
    alphas = np.repeat(alpha_values[keep], vcounts[keep])
    return OcsvmModel(support=support, alphas=alphas, rho=rho, gamma=g, nu=nu, n_train=n)


def decision(model: OcsvmModel, x: float) -> float:
    """f(x) = sum_i alpha_i k(x_i, x) - rho; inlier iff f(x) >= 0."""
    d = model.support - float(x)
    return float(model.alphas @ np.exp(-model.gamma * d * d) - model.rho)


def decision_batch(model: OcsvmModel, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    d = model.support[None, :] - xs[:, None]
    return np.exp(-model.gamma * d * d) @ model.alphas - model.rho


def dual_objective(model: OcsvmModel) -> float:
    """0.5 * alpha^T K alpha over the stored support set."""
    d = model.support[:, None] - model.support[None, :]
    K = np.exp(-model.gamma * d * d)
    return float(0.5 * model.alphas @ K @ model.alphas)
