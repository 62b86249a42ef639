"""Block covariance assembly and expected absolute products of Gaussians.

Given a configuration and an index partition, the divided differences of
the process inside each block form a Gaussian vector X whose conditional
companion Y collects the next-order differences.  This module assembles
their joint covariance (theta, xi, omega), the conditional covariance
lambda, and evaluates E prod |Z_i| for centered Gaussian vectors Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import divdiff
from .errors import ConfigError, NotPSD, OrderUnavailable
from .partitions import IndexPartition

__all__ = [
    "KacRiceContext",
    "MonteCarloSpec",
    "assemble_context",
    "pi_k",
    "DEGENERACY_RTOL",
]

DEGENERACY_RTOL = 1e-12
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class MonteCarloSpec:
    """Sampling budget and seeding for Monte Carlo moments.

    The budget is spent in fixed-size chunks, each drawn from its own
    counter-based substream keyed by (seed, chunk index), so estimates do
    not depend on how chunks are scheduled across workers.
    """

    samples: int = 1_000_000
    seed: int = 190406
    chunk: int = 1 << 16
    block_threshold: float = 0.05


@dataclass(frozen=True)
class KacRiceContext:
    """Joint covariance data of the divided-difference vectors at one configuration."""

    x: tuple
    partition: IndexPartition
    theta: np.ndarray
    xi: np.ndarray
    omega: np.ndarray
    d_value: float
    lam: np.ndarray | None = None

    @property
    def degenerate(self) -> bool:
        return self.lam is None


def _degeneracy_scale(theta: np.ndarray) -> float:
    diag = np.clip(np.diag(theta), 0.0, None)
    return float(np.prod(diag)) if diag.size else 1.0


def _block_configs(x: np.ndarray, partition: IndexPartition) -> list[np.ndarray]:
    return [x[list(b)] for b in partition.blocks]


def assemble_context(model, points, partition: IndexPartition) -> KacRiceContext:
    """Covariance matrices of the block divided differences at a configuration.

    theta is the covariance of the within-block divided differences, omega
    that of the order-(block+1) differences, xi their cross covariance, and
    lam the conditional covariance of the latter given the former vanish.
    lam is left unset when det(theta) is below the degeneracy threshold.
    """
    x = divdiff.snap_configuration(points)
    n = x.size
    if partition.n != n:
        raise ConfigError(f"partition covers {partition.n} indices, configuration has {n}")
    if 2 * n > model.max_derivative_order:
        raise OrderUnavailable(
            f"configurations of {n} points need kappa up to order {2 * n}, "
            f"model {model.kind} declares {model.max_derivative_order}")

    if n == 2 and partition.num_blocks == 2 and x[0] != x[1]:
        return _two_point_singleton_context(model, x, partition)

    # all covariances depend on differences only; anchoring at the leftmost
    # node keeps node magnitudes (hence rounding) at the span scale
    blocks = _block_configs(x - x.min(), partition)
    sizes = [b.size for b in blocks]
    offs = np.concatenate([[0], np.cumsum(sizes)])

    theta = np.zeros((n, n))
    xi = np.zeros((n, n))
    omega = np.zeros((n, n))
    for bi, xb_i in enumerate(blocks):
        for bj, xb_j in enumerate(blocks):
            si, sj = slice(offs[bi], offs[bi + 1]), slice(offs[bj], offs[bj + 1])
            theta[si, sj] = divdiff.double_divided_diff_matrix(model, xb_i, xb_j)
            xi_blk = np.empty((sizes[bi], sizes[bj]))
            omega_blk = np.empty((sizes[bi], sizes[bj]))
            for a, xa in enumerate(xb_i):
                ext_i = np.append(xb_i, xa)
                xi_blk[a, :] = divdiff.double_divided_diff_matrix(
                    model, ext_i, xb_j)[-1, :]
                for b, xb in enumerate(xb_j):
                    omega_blk[a, b] = divdiff.double_divided_diff(
                        model, ext_i, np.append(xb_j, xb))
            xi[si, sj] = xi_blk
            omega[si, sj] = omega_blk

    theta = 0.5 * (theta + theta.T)
    omega = 0.5 * (omega + omega.T)
    d_value = float(np.linalg.det(theta))
    lam = None
    if d_value > DEGENERACY_RTOL * _degeneracy_scale(theta):
        sol = np.linalg.solve(theta, xi.T)
        lam = omega - xi @ sol
        lam = 0.5 * (lam + lam.T)
    return KacRiceContext(x=tuple(x), partition=partition, theta=theta, xi=xi,
                          omega=omega, d_value=d_value, lam=lam)


def _two_point_singleton_context(model, x: np.ndarray,
                                 partition: IndexPartition) -> KacRiceContext:
    """Two distinct points, singleton blocks: closed-form conditional covariance.

    The generic Schur complement loses all accuracy when the points are
    close (the conditional variance is a difference of near-equal O(1)
    terms); the explicit two-point formulas, fed by the model's
    cancellation-free 1 - kappa^2, stay accurate down to the snap scale.
    """
    z = x[1] - x[0]
    k0, k1, k2 = model.derivs(z, 2)
    om2 = float(model.one_minus_kappa_sq(abs(z)))
    if om2 <= DEGENERACY_RTOL:
        theta = np.array([[1.0, k0], [k0, 1.0]])
        xi = np.array([[0.0, -k1], [k1, 0.0]])
        omega = np.array([[1.0, -k2], [-k2, 1.0]])
        return KacRiceContext(x=tuple(x), partition=partition, theta=theta,
                              xi=xi, omega=omega, d_value=float(om2), lam=None)
    q = k1 * k1 / om2
    b = 1.0 - q
    c = -k2 - k0 * q
    theta = np.array([[1.0, k0], [k0, 1.0]])
    xi = np.array([[0.0, -k1], [k1, 0.0]])
    omega = np.array([[1.0, -k2], [-k2, 1.0]])
    lam = np.array([[b, c], [c, b]])
    return KacRiceContext(x=tuple(x), partition=partition, theta=theta, xi=xi,
                          omega=omega, d_value=float(om2), lam=lam)


# ---------------------------------------------------------------------------
# Expected absolute products
# ---------------------------------------------------------------------------

def _check_psd_and_factor(variance: np.ndarray) -> np.ndarray:
    """Eigen-floor check; returns a factor L with L L^T = variance (clipped)."""
    u = np.asarray(variance, dtype=float)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ConfigError("variance must be a square matrix")
    if not np.allclose(u, u.T, atol=1e-12 * max(1.0, float(np.abs(u).max()))):
        raise NotPSD("variance matrix is not symmetric")
    w, v = np.linalg.eigh(0.5 * (u + u.T))
    scale = max(float(np.trace(u)), 1e-300)
    if w.min() < -1e-10 * scale:
        raise NotPSD(f"smallest eigenvalue {w.min():.3e} below PSD floor")
    return v * np.sqrt(np.clip(w, 0.0, None))


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=np.array([seed & 0xFFFFFFFFFFFFFFFF, index],
                                      dtype=np.uint64)))


def _cholesky_or_none(u: np.ndarray) -> np.ndarray | None:
    try:
        return np.linalg.cholesky(u)
    except np.linalg.LinAlgError:
        return None


def _mc_abs_product(L: np.ndarray, mc: MonteCarloSpec,
                    L_control: np.ndarray | None = None,
                    powers: np.ndarray | None = None) -> tuple[float, float]:
    """Chunked Monte Carlo mean of prod |(L w)_i|^p_i over standard normals w.

    With `L_control` set, estimates the mean of the difference of the two
    products from common normals instead (control-variate correction).
    """
    k = L.shape[0]
    n_chunks = max(1, math.ceil(mc.samples / mc.chunk))
    total = 0.0
    total_sq = 0.0
    count = 0
    for c in range(n_chunks):
        n = min(mc.chunk, mc.samples - c * mc.chunk)
        if n <= 0:
            break
        w = _chunk_rng(mc.seed, c).standard_normal((n, k))
        vals = _abs_product(w @ L.T, powers)
        if L_control is not None:
            vals = vals - _abs_product(w @ L_control.T, powers)
        total += float(vals.sum())
        total_sq += float(np.square(vals).sum())
        count += n
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    return mean, math.sqrt(var / count)


def _abs_product(z: np.ndarray, powers: np.ndarray | None) -> np.ndarray:
    a = np.abs(z)
    if powers is not None:
        a = a ** powers[None, :]
    return a.prod(axis=1)


def _pi2_closed(u11: float, u22: float, u12: float) -> float:
    if u11 <= 0.0 or u22 <= 0.0:
        return 0.0
    s = math.sqrt(u11 * u22)
    r = min(1.0, max(-1.0, u12 / s))
    return (2.0 / math.pi) * s * (math.sqrt(1.0 - r * r) + r * math.asin(r))


def _correlation_clusters(u: np.ndarray, threshold: float) -> list[list[int]]:
    k = u.shape[0]
    d = np.sqrt(np.clip(np.diag(u), 0.0, None))
    denom = np.outer(d, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(denom > 0, np.abs(u) / denom, 0.0)
    adj = corr >= threshold
    seen = [False] * k
    groups = []
    for s in range(k):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(k):
                if not seen[j] and adj[i, j]:
                    seen[j] = True
                    stack.append(j)
        groups.append(sorted(comp))
    return groups


def pi_k(variance, mc: MonteCarloSpec | None = None) -> tuple[float, float]:
    """E prod_i |X_i| for X ~ N(0, variance), with a standard error.

    Sizes 1 and 2 use closed forms (zero error).  Larger sizes split the
    coordinates into weakly correlated groups: the product of the group
    values serves as an exact baseline and a common-random-numbers Monte
    Carlo estimates the (small) coupling correction, so nearly
    block-diagonal covariances are resolved far below the raw Monte Carlo
    noise floor.  A single strongly coupled group falls back to plain
    chunked Monte Carlo.
    """
    mc = mc or MonteCarloSpec()
    u = np.asarray(variance, dtype=float)
    L = _check_psd_and_factor(u)
    k = u.shape[0]
    if k == 1:
        return _SQRT_2_OVER_PI * math.sqrt(max(u[0, 0], 0.0)), 0.0
    if k == 2:
        return _pi2_closed(u[0, 0], u[1, 1], u[0, 1]), 0.0

    groups = _correlation_clusters(u, mc.block_threshold)
    if len(groups) == 1:
        return _mc_abs_product(L, mc)

    base = 1.0
    base_err_sq = 0.0
    control = np.zeros_like(u)
    for gi, g in enumerate(groups):
        idx = np.ix_(g, g)
        control[idx] = u[idx]
        val, err = pi_k(u[idx], replace(mc, seed=mc.seed + 1000003 * (gi + 1)))
        if val > 0:
            base_err_sq += (err / val) ** 2
        base *= val
    base_err = abs(base) * math.sqrt(base_err_sq)
    # the coupled correction needs factors that agree entrywise up to the
    # weak coupling; Cholesky nests block-wise (unlike eigenvectors), so the
    # per-sample difference really is of the coupling's size
    L_full = _cholesky_or_none(u)
    L_control = _cholesky_or_none(control)
    if L_full is None or L_control is None:
        return _mc_abs_product(L, mc)
    corr, corr_err = _mc_abs_product(L_full, mc, L_control=L_control)
    return base + corr, math.hypot(base_err, corr_err)


def conditional_abs_moment(variance, powers, mc: MonteCarloSpec | None = None
                           ) -> tuple[float, float]:
    """E prod_i |X_i|^{p_i} for X ~ N(0, variance) with integer powers p_i.

    Closed forms: all powers 1 (plain pi_k) and a single coordinate
    (Gaussian absolute moment); otherwise chunked Monte Carlo.
    """
    mc = mc or MonteCarloSpec()
    u = np.asarray(variance, dtype=float)
    p = np.asarray(powers, dtype=int)
    if p.shape != (u.shape[0],):
        raise ConfigError("one power per coordinate required")
    if np.all(p == 1):
        return pi_k(u, mc)
    if u.shape[0] == 1:
        var = max(float(u[0, 0]), 0.0)
        q = int(p[0])
        # E|Z|^q for Z ~ N(0, var)
        val = var ** (q / 2) * 2 ** (q / 2) * math.gamma((q + 1) / 2) / math.sqrt(math.pi)
        return val, 0.0
    L = _check_psd_and_factor(u)
    return _mc_abs_product(L, mc, powers=p.astype(float))
