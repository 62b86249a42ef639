"""Newton-basis interpolation machinery for possibly repeated nodes.

A configuration is an ordered array of real nodes, repetitions allowed.
Repeated nodes switch the corresponding evaluation entries to derivative
data (confluent/Hermite interpolation), which keeps every quantity here
finite and well-conditioned on and near the diagonal.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import solve_triangular

from .errors import ConfigError, OrderUnavailable

__all__ = [
    "snap_configuration",
    "multiplicities",
    "newton_matrix",
    "divided_diff_vector",
    "double_divided_diff_matrix",
    "double_divided_diff",
    "SNAP_TOL",
]

SNAP_TOL = 1e-10


def snap_configuration(points, tol: float = SNAP_TOL) -> np.ndarray:
    """Merge nodes closer than `tol` onto the earliest node of their chain.

    The confluent branch is exact for coincident nodes while the
    distinct-node branch is catastrophically ill-conditioned below `tol`,
    so near-ties are resolved to exact ties before any matrix is built.
    Chaining is transitive along the sorted order; input order is kept.
    """
    x = np.asarray(points, dtype=float).copy()
    if x.ndim != 1 or x.size == 0:
        raise ConfigError("configuration must be a non-empty 1-D sequence")
    order = np.argsort(x, kind="stable")
    xs = x[order]
    starts = np.empty(xs.size, dtype=bool)
    starts[0] = True
    starts[1:] = np.diff(xs) >= tol
    cluster_id = np.cumsum(starts) - 1
    for c in range(int(cluster_id[-1]) + 1):
        members = order[cluster_id == c]
        if members.size > 1:
            x[members] = x[members.min()]
    return x


def multiplicities(points) -> np.ndarray:
    """c_i = number of earlier nodes equal to node i (after snapping)."""
    x = snap_configuration(points)
    out = np.zeros(x.size, dtype=int)
    for i in range(x.size):
        out[i] = int(np.sum(x[:i] == x[i]))
    return out


def newton_matrix(points) -> np.ndarray:
    """Matrix of the evaluation map in the Newton polynomial basis.

    Column j holds the evaluation data of prod_{l<j}(X - x_l); entry (i, j)
    is its c_i-th derivative at x_i divided by c_i!.  Lower triangular with
    diagonal prod_{l<i, x_l != x_i}(x_i - x_l), hence always invertible.
    """
    x = snap_configuration(points)
    c = multiplicities(x)
    p = x.size
    m = np.zeros((p, p))
    poly = Polynomial([1.0])
    for j in range(p):
        for i in range(j, p):
            if c[i] > j:
                continue
            m[i, j] = poly.deriv(c[i])(x[i]) / math.factorial(c[i]) if c[i] else poly(x[i])
        if j + 1 < p:
            poly = poly * Polynomial([-x[j], 1.0])
    return m


def divided_diff_vector(points, evals) -> np.ndarray:
    """Divided differences ([f]_1(x_1), ..., [f]_p(x_1..x_p)) from evaluation data.

    `evals` must hold the confluent evaluation of f at the configuration:
    entry i is f^{(c_i)}(x_i) / c_i!.  Solved by forward substitution
    against the lower-triangular Newton matrix.
    """
    x = snap_configuration(points)
    b = np.asarray(evals, dtype=float)
    if b.shape != x.shape:
        raise ConfigError("evaluation vector length must match the configuration")
    return solve_triangular(newton_matrix(x), b, lower=True)


TAYLOR_SPAN = 0.6  # max config span routed through the series path
_TAYLOR_EXTRA_ORDERS = 36
_TAYLOR_TAIL_RTOL = 1e-13


def _prefix_complete_homogeneous(args: np.ndarray, qmax: int) -> np.ndarray:
    """H[p, q] = complete homogeneous symmetric polynomial h_q(args[:p]).

    Newton's recurrence q h_q = sum_{r=1..q} p_r h_{q-r} over power sums of
    each prefix; rows p = 1..len(args), row 0 is the empty prefix (h_0 = 1).
    """
    k = args.size
    P = np.zeros((k + 1, qmax + 1))
    for r in range(1, qmax + 1):
        P[1:, r] = np.cumsum(args ** r)
    H = np.zeros((k + 1, qmax + 1))
    H[:, 0] = 1.0
    for q in range(1, qmax + 1):
        H[:, q] = (P[:, 1:q + 1] * H[:, q - 1::-1][:, :q]).sum(axis=1) / q
    return H


def _dd_matrix_taylor(model, x: np.ndarray, y: np.ndarray) -> np.ndarray | None:
    """Series evaluation of the double divided differences for tight nodes.

    Expands the kernel around the difference of the configuration centers:
    the (k, l) entry is (-1)^(k-1) sum over total orders n of
    kappa^(n)(c) * conv_n, where conv_n is the convolution of the factorial-
    weighted complete homogeneous polynomials of the centered node offsets.
    No divisions by node gaps occur, so accuracy is uniform down to (and
    on) the diagonal.  Returns None when the series cannot be certified to
    converge within the model's internal derivative orders.
    """
    k, l = x.size, y.size
    base_min = k + l - 2
    cap = getattr(model, "internal_order_cap", model.max_derivative_order)
    m_tot = min(cap, base_min + _TAYLOR_EXTRA_ORDERS)
    if m_tot < base_min + 6:
        return None
    cx = 0.5 * (x.min() + x.max())
    cy = 0.5 * (y.min() + y.max())
    u = cx - x
    v = y - cy
    kder = model.derivs(cy - cx, m_tot)
    hx = _prefix_complete_homogeneous(u, m_tot)
    hy = _prefix_complete_homogeneous(v, m_tot)
    inv_fact = np.array([1.0 / math.factorial(n) for n in range(m_tot + 1)])

    out = np.empty((k, l))
    for kk in range(1, k + 1):
        a = hx[kk, : m_tot - (kk - 1) + 1] * inv_fact[kk - 1:]
        for ll in range(1, l + 1):
            b = hy[ll, : m_tot - (ll - 1) + 1] * inv_fact[ll - 1:]
            conv = np.convolve(a, b)
            base = kk + ll - 2
            n_avail = m_tot - base + 1
            terms = conv[:n_avail] * kder[base: base + n_avail]
            scale = max(np.abs(terms).max(), 1e-300)
            if n_avail >= 3 and np.abs(terms[-3:]).max() > _TAYLOR_TAIL_RTOL * scale:
                return None
            out[kk - 1, ll - 1] = (-1.0) ** (kk - 1) * terms.sum()
    return out


def _cross_matrix(model, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Confluent evaluations of the correlation kernel on a node grid.

    Entry (i, j) is (-1)^{c_i(x)} kappa^{(c_i(x)+c_j(y))}(y_j - x_i)
    divided by c_i(x)! c_j(y)!.
    """
    cx = multiplicities(x)
    cy = multiplicities(y)
    max_order = int(cx.max() + cy.max())
    if max_order > model.max_derivative_order:
        raise OrderUnavailable(
            f"double divided difference needs kappa^({max_order}), model "
            f"{model.kind} declares {model.max_derivative_order}")
    lags = y[None, :] - x[:, None]
    dk = model.derivs(lags.ravel(), max_order).reshape(max_order + 1, *lags.shape)
    orders = cx[:, None] + cy[None, :]
    vals = np.take_along_axis(dk, orders[None, :, :], axis=0)[0]
    signs = np.where(cx[:, None] % 2 == 1, -1.0, 1.0)
    fact = np.array([math.factorial(v) for v in cx])[:, None] * \
        np.array([math.factorial(v) for v in cy])[None, :]
    return signs * vals / fact


def double_divided_diff_matrix(model, x_points, y_points) -> np.ndarray:
    """All double divided differences of kappa over prefixes of two configurations.

    Entry (k-1, l-1) is the divided difference of the correlation kernel
    taken over (x_1..x_k) in its first slot and (y_1..y_l) in the second;
    it equals the covariance of the k-th and l-th divided differences of
    the process at the two configurations.

    Tight configurations (both spans below TAYLOR_SPAN) go through the
    series path, which has no gap-induced precision loss; everything else
    uses forward substitution against the Newton matrices, which is stable
    once the node gaps are of order one.
    """
    x = snap_configuration(x_points)
    y = snap_configuration(y_points)
    if x.size + y.size - 2 > model.max_derivative_order:
        raise OrderUnavailable(
            f"order ({x.size}, {y.size}) differences need kappa^"
            f"({x.size + y.size - 2}), model {model.kind} declares "
            f"{model.max_derivative_order}")
    if (x.max() - x.min() <= TAYLOR_SPAN and y.max() - y.min() <= TAYLOR_SPAN):
        out = _dd_matrix_taylor(model, x, y)
        if out is not None:
            return out
    cross = _cross_matrix(model, x, y)
    half = solve_triangular(newton_matrix(x), cross, lower=True)
    return solve_triangular(newton_matrix(y), half.T, lower=True).T


def double_divided_diff(model, x_points, y_points) -> float:
    """The full-order double divided difference of kappa (bottom-right entry)."""
    return float(double_divided_diff_matrix(model, x_points, y_points)[-1, -1])
