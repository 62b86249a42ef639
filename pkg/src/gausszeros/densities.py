"""k-point intensities of the zero set, vanishing-order constant, clustering.

The k-point intensity rho_k is evaluated through its divided-difference
form: for a partition of the configuration into blocks, the intensity is
the square-rooted Vandermonde factor over blocks times a conditional
absolute moment over the square root of a block-covariance determinant.
Any partition whose cross-block points stay distinct gives the same value;
the cluster partition at scale 1 keeps the matrices well conditioned on
and near the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import divdiff
from .conditioning import (DEGENERACY_RTOL, MonteCarloSpec, assemble_context,
                           conditional_abs_moment, pi_k, _degeneracy_scale)
from .errors import (ConfigError, DegenerateConfiguration, SeparationTooSmall,
                     SizeCap)
from .partitions import IndexPartition, cluster_partition

__all__ = [
    "DensityResult",
    "VanishingConstant",
    "rho_k",
    "rho_with_partition",
    "vanishing_constant",
    "clustering_ratio",
    "RHO_POINT_CAP",
]

RHO_POINT_CAP = 6


@dataclass(frozen=True)
class DensityResult:
    """One intensity evaluation: value, factors, and the partition used."""

    rho: float
    d_value: float
    n_value: float
    partition_used: IndexPartition
    vandermonde_factor: float
    n_stderr: float = 0.0


@dataclass(frozen=True)
class VanishingConstant:
    """Diagonal limit constant of the rescaled k-point intensity."""

    value: float
    partition: IndexPartition
    stderr: float = 0.0


def _vandermonde_factor(x: np.ndarray, partition: IndexPartition) -> float:
    """prod over blocks of prod_{i != j in block} |x_i - x_j|^(1/2)."""
    out = 1.0
    for block in partition.blocks:
        pts = x[list(block)]
        for a in range(len(block)):
            for b in range(a + 1, len(block)):
                out *= abs(pts[a] - pts[b])
    return out


def _density_from_context(ctx, mc: MonteCarloSpec | None) -> DensityResult:
    if ctx.lam is None:
        raise DegenerateConfiguration(
            "block covariance is numerically singular; coarsen the partition "
            "or check the model for degeneracy")
    n = len(ctx.x)
    n_value, n_err = pi_k(ctx.lam, mc)
    vf = _vandermonde_factor(np.asarray(ctx.x), ctx.partition)
    denom = (2.0 * math.pi) ** (n / 2.0) * math.sqrt(ctx.d_value)
    return DensityResult(rho=vf * n_value / denom, d_value=ctx.d_value,
                         n_value=n_value, partition_used=ctx.partition,
                         vandermonde_factor=vf, n_stderr=n_err / denom * vf)


def rho_k(model, points, mc: MonteCarloSpec | None = None) -> DensityResult:
    """k-point intensity of the zero set, continuous across the diagonal.

    The partition is chosen as the scale-1 cluster partition of the
    configuration, which keeps the underlying Gaussian vector uniformly
    non-degenerate; the value does not depend on that choice.
    """
    x = divdiff.snap_configuration(points)
    if x.size > RHO_POINT_CAP:
        raise SizeCap(f"rho_k supports at most {RHO_POINT_CAP} points")
    partition = cluster_partition(x, 1.0)
    ctx = assemble_context(model, x, partition)
    if ctx.lam is None:
        raise DegenerateConfiguration(
            "scale-1 cluster partition is degenerate; the model's finite "
            "marginals are singular (correlation does not decay)")
    return _density_from_context(ctx, mc)


def rho_with_partition(model, points, partition: IndexPartition,
                       mc: MonteCarloSpec | None = None) -> DensityResult:
    """Same intensity as rho_k but assembled through the caller's partition.

    Degenerates exactly when two points in distinct blocks coincide.
    """
    x = divdiff.snap_configuration(points)
    ctx = assemble_context(model, x, partition)
    return _density_from_context(ctx, mc)


def vanishing_constant(model, points, mc: MonteCarloSpec | None = None
                       ) -> VanishingConstant:
    """Limit of rho_k divided by its diagonal Vandermonde factor.

    For the partition of exactly-coincident points, conditions the
    derivative of order |block| at each cluster site on all lower-order
    derivatives vanishing, and returns the factorial prefactor times the
    conditional absolute moment over the Gaussian normalizer.
    """
    y = divdiff.snap_configuration(points)
    k = y.size
    partition = cluster_partition(y, 0.0)
    sites = [float(y[b[0]]) for b in partition.blocks]
    orders_u = [(i, s) for b, s in zip(partition.blocks, sites)
                for i in range(len(b))]
    orders_v = [(len(b), s) for b, s in zip(partition.blocks, sites)]

    need = max(a for a, _ in orders_u + orders_v) * 2
    if need > model.max_derivative_order:
        raise SizeCap(
            f"vanishing constant at this diagonal needs kappa^({need})")

    def cov(a, sa, b, sb):
        # E f^(a)(sa) f^(b)(sb) = (-1)^a kappa^(a+b)(sb - sa)
        sign = -1.0 if a % 2 else 1.0
        return sign * model.derivs(sb - sa, a + b)[a + b]

    dim_u = len(orders_u)
    A = np.array([[cov(a, sa, b, sb) for (b, sb) in orders_u]
                  for (a, sa) in orders_u])
    B = np.array([[cov(a, sa, b, sb) for (b, sb) in orders_u]
                  for (a, sa) in orders_v])
    C = np.array([[cov(a, sa, b, sb) for (b, sb) in orders_v]
                  for (a, sa) in orders_v])
    det_a = float(np.linalg.det(A))
    if det_a <= DEGENERACY_RTOL * _degeneracy_scale(A):
        raise DegenerateConfiguration(
            "the conditioning Gaussian vector at this diagonal is degenerate")
    sol = np.linalg.solve(A, B.T)
    lam = C - B @ sol
    lam = 0.5 * (lam + lam.T)

    powers = np.array([len(b) for b in partition.blocks])
    moment, err = conditional_abs_moment(lam, powers, mc)
    prefactor = 1.0
    for b in partition.blocks:
        m = len(b)
        for i in range(m):
            prefactor *= math.factorial(i) / math.factorial(m)
    denom = (2.0 * math.pi) ** (k / 2.0) * math.sqrt(det_a)
    scale = prefactor / denom
    return VanishingConstant(value=scale * moment, partition=partition,
                             stderr=scale * err)


def clustering_ratio(model, points, partition: IndexPartition,
                     mc: MonteCarloSpec | None = None) -> tuple[float, float]:
    """Factorization ratio over a partition of well-separated blocks.

    Returns (prod over blocks of the block intensity / joint intensity,
    tail-norm^(1/2) at the observed separation), the second entry being the
    scale of the expected deviation from 1.
    """
    from .models import tail_norm  # local import: models is a leaf dependency

    x = divdiff.snap_configuration(points)
    k = x.size
    if partition.n != k:
        raise ConfigError("partition does not match the configuration length")
    eta = math.inf
    for bi in range(partition.num_blocks):
        for bj in range(bi + 1, partition.num_blocks):
            for i in partition.blocks[bi]:
                for j in partition.blocks[bj]:
                    eta = min(eta, abs(x[i] - x[j]))
    if partition.num_blocks == 1:
        return 1.0, 0.0
    if eta < 1.0:
        raise SeparationTooSmall(
            f"blocks must be separated by at least 1, found {eta:.3g}")

    joint = rho_k(model, x, mc)
    if joint.rho <= 0.0:
        raise DegenerateConfiguration("joint intensity vanished off the diagonal")
    prod = 1.0
    for block in partition.blocks:
        prod *= rho_k(model, x[list(block)], mc).rho
    bound = math.sqrt(tail_norm(model, k, eta))
    return prod / joint.rho, bound
