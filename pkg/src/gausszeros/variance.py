"""Two-point excess intensity, variance growth constant, covariance predictor.

The two-point excess F(z) = rho_2(0, z) - 1/pi^2 has the closed form

    F(z) = pi^-2 [ (1 - k^2 - k'^2) / (1 - k^2)^(3/2) * h(a) - 1 ],
    h(a) = sqrt(1 - a^2) + a asin(a),
    a(z) = (k k'^2 - k^2 k'' + k'') / (1 - k^2 - k'^2),

with k = kappa(z) etc.  The number variance of zeros grows like R sigma^2
with sigma^2 = 1/pi + 2 int_0^inf F, and the exact finite-R covariance of
two linear statistics is an F-weighted cross-correlation plus a diagonal
term R/pi * int phi1 phi2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad as _quad
from scipy.special import erf

from .errors import ConfigError, NumericsError, QuadratureNotConverged
from .models import CorrelationModel, QuadratureSpec

__all__ = [
    "QuadratureSpec",
    "TestFunction",
    "two_point_F",
    "sigma_squared",
    "sigma_lower_bound",
    "predicted_covariance",
    "expected_linear_statistic",
]

_NEAR_ZERO = 1e-4


class NearSingular(NumericsError):
    """The two-point determinant vanished away from the diagonal."""


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """Integrable bounded test function with closed-form cross-correlations.

    kinds: indicator(a, b) -> 1 on [a, b];
           gaussian(center, width) -> exp(-(x-center)^2 / (2 width^2));
           table(xs, ys) -> linear interpolation, zero outside the grid.
    """

    __test__ = False  # not a pytest class, despite the name

    kind: str
    params: tuple

    @classmethod
    def indicator(cls, a: float, b: float) -> "TestFunction":
        if not b > a:
            raise ConfigError("indicator needs a < b")
        return cls("indicator", (float(a), float(b)))

    @classmethod
    def gaussian(cls, center: float, width: float) -> "TestFunction":
        if width <= 0:
            raise ConfigError("gaussian width must be positive")
        return cls("gaussian", (float(center), float(width)))

    @classmethod
    def table(cls, xs, ys) -> "TestFunction":
        xs = tuple(float(v) for v in xs)
        ys = tuple(float(v) for v in ys)
        if len(xs) != len(ys) or len(xs) < 2 or any(
                b <= a for a, b in zip(xs[:-1], xs[1:])):
            raise ConfigError("table needs increasing xs and matching ys")
        return cls("table", (xs, ys))

    @classmethod
    def from_spec(cls, text: str) -> "TestFunction":
        """Parse CLI syntax: indicator:0,1 | gaussian:0,1 | table:path.json."""
        name, _, arg = text.replace("(", ":").rstrip(")").partition(":")
        if name == "indicator":
            a, b = (float(t) for t in arg.split(","))
            return cls.indicator(a, b)
        if name == "gaussian":
            c, w = (float(t) for t in arg.split(","))
            return cls.gaussian(c, w)
        if name == "table":
            with open(arg) as fh:
                doc = json.load(fh)
            return cls.table(doc["xs"], doc["ys"])
        raise ConfigError(f"unknown test function {text!r}")

    # -- evaluation -------------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "indicator":
            a, b = self.params
            return ((x >= a) & (x <= b)).astype(float)
        if self.kind == "gaussian":
            c, w = self.params
            return np.exp(-0.5 * ((x - c) / w) ** 2)
        xs, ys = self.params
        return np.interp(x, xs, ys, left=0.0, right=0.0)

    # -- integral functionals ----------------------------------------------
    def integral(self) -> float:
        if self.kind == "indicator":
            a, b = self.params
            return b - a
        if self.kind == "gaussian":
            _, w = self.params
            return w * math.sqrt(2.0 * math.pi)
        xs, ys = self.params
        return float(np.trapezoid(ys, xs))

    def l2_norm_sq(self) -> float:
        if self.kind == "indicator":
            a, b = self.params
            return b - a
        if self.kind == "gaussian":
            _, w = self.params
            return w * math.sqrt(math.pi)
        xs, ys = self.params
        grid = np.linspace(xs[0], xs[-1], 4097)
        return float(np.trapezoid(self(grid) ** 2, grid))

    def sup_bound(self) -> float:
        if self.kind in ("indicator", "gaussian"):
            return 1.0
        _, ys = self.params
        return float(np.max(np.abs(ys)))

    def support_radius(self) -> float:
        """Largest |x| carrying (numerically) non-negligible mass."""
        if self.kind == "indicator":
            a, b = self.params
            return max(abs(a), abs(b))
        if self.kind == "gaussian":
            c, w = self.params
            return abs(c) + 9.0 * w
        xs, _ = self.params
        return max(abs(xs[0]), abs(xs[-1]))

    def cross_correlation(self, other: "TestFunction", u: float) -> float:
        """int phi(x) * other(x + u) dx, closed form where available."""
        if self.kind == "indicator" and other.kind == "indicator":
            a1, b1 = self.params
            a2, b2 = other.params
            return max(0.0, min(b1, b2 - u) - max(a1, a2 - u))
        if self.kind == "gaussian" and other.kind == "gaussian":
            c1, w1 = self.params
            c2, w2 = other.params
            s2 = w1 * w1 + w2 * w2
            return (math.sqrt(2.0 * math.pi) * w1 * w2 / math.sqrt(s2)
                    * math.exp(-0.5 * (c2 - u - c1) ** 2 / s2))
        if self.kind == "indicator" and other.kind == "gaussian":
            a, b = self.params
            c, w = other.params
            lo = (a + u - c) / (w * math.sqrt(2.0))
            hi = (b + u - c) / (w * math.sqrt(2.0))
            return w * math.sqrt(math.pi / 2.0) * float(erf(hi) - erf(lo))
        if self.kind == "gaussian" and other.kind == "indicator":
            return other.cross_correlation(self, -u)
        lo = max(-self.support_radius(), -other.support_radius() - u)
        hi = min(self.support_radius(), other.support_radius() - u)
        if hi <= lo:
            return 0.0
        grid = np.linspace(lo, hi, 2049)
        return float(np.trapezoid(self(grid) * other(grid + u), grid))


# ---------------------------------------------------------------------------
# Two-point excess and the variance constant
# ---------------------------------------------------------------------------

def two_point_F(model: CorrelationModel, z: float) -> float:
    """Two-point excess intensity rho_2(0, z) - 1/pi^2; even, -1/pi^2 at 0.

    Below |z| = 1e-4 the continuity value is returned: the exact value
    approaches -1/pi^2 linearly with slope bounded by the inverse
    correlation length, so the substitution error stays below 1e-4 there.
    """
    z = abs(float(z))
    if z < _NEAR_ZERO:
        return -1.0 / math.pi ** 2
    k0, k1, k2 = model.derivs(z, 2)
    om2 = float(model.one_minus_kappa_sq(z))
    if om2 < 1e-14:
        raise NearSingular(
            f"1 - kappa^2 = {om2:.3e} at z = {z}: model correlation reaches 1 "
            "away from 0")
    denom = om2 - k1 * k1
    numer = k0 * k1 * k1 + k2 * om2
    a = 1.0 if denom == 0.0 else min(1.0, max(-1.0, numer / denom))
    h = math.sqrt(max(0.0, 1.0 - a * a)) + a * math.asin(a)
    ratio = denom / om2 ** 1.5
    return (ratio * h - 1.0) / math.pi ** 2


def _integrate_chunked(f, a: float, b: float, abs_tol: float,
                       chunk_len: float = 25.0, limit: int = 200
                       ) -> tuple[float, float]:
    """Deterministic piecewise adaptive quadrature with summed error bounds."""
    if b <= a:
        return 0.0, 0.0
    n_chunks = max(1, int(math.ceil((b - a) / chunk_len)))
    edges = np.linspace(a, b, n_chunks + 1)
    per = abs_tol / n_chunks
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        res = _quad(f, lo, hi, epsabs=per, epsrel=1e-13, limit=limit,
                    full_output=1)
        total += res[0]
        err += res[1]
    return total, err


def sigma_squared(model: CorrelationModel, quad: QuadratureSpec | None = None
                  ) -> float:
    """Linear-growth constant of the zero-count variance: 1/pi + 2 int_0^inf F.

    The integral is truncated at the quadrature spec's radius; the model
    must certify that the discarded tail is below the tolerance, otherwise
    the computation refuses to report a value.
    """
    spec = quad or model.default_quadrature()
    T = spec.truncation_radius
    f = lambda z: two_point_F(model, z)
    head, e1 = _integrate_chunked(f, 0.0, min(1.0, T), 0.25 * spec.abs_tolerance,
                                  chunk_len=1.0, limit=spec.max_nodes)
    body, e2 = _integrate_chunked(f, min(1.0, T), T, 0.25 * spec.abs_tolerance,
                                  chunk_len=25.0, limit=spec.max_nodes)
    tail = model.f_tail_integral_bound(T)
    if tail is None:
        raise QuadratureNotConverged(
            f"model {model.kind} certifies no excess-intensity tail bound at "
            f"truncation {T}")
    total_err = 2.0 * (e1 + e2 + tail)
    if total_err > spec.abs_tolerance:
        raise QuadratureNotConverged(
            f"certified error {total_err:.3e} exceeds tolerance "
            f"{spec.abs_tolerance:.3e} (truncation {T})")
    return 1.0 / math.pi + 2.0 * (head + body)


def sigma_lower_bound(model: CorrelationModel, quad: QuadratureSpec | None = None
                      ) -> float:
    """Positive lower bound pi^-2 int_0^inf (kappa + kappa'')^2 for sigma^2."""
    spec = quad or model.default_quadrature()
    T = spec.truncation_radius

    def integrand(z: float) -> float:
        k0, _, k2 = model.derivs(z, 2)
        return (k0 + k2) ** 2

    val, err = _integrate_chunked(integrand, 0.0, T, 0.5 * spec.abs_tolerance,
                                  chunk_len=25.0, limit=spec.max_nodes)
    tail = _squared_sum_tail(model, T)
    if tail is None:
        raise QuadratureNotConverged(
            f"model {model.kind} certifies no tail bound at truncation {T}")
    total_err = (err + tail) / math.pi ** 2
    if total_err > spec.abs_tolerance:
        raise QuadratureNotConverged(
            f"certified error {total_err:.3e} exceeds tolerance "
            f"{spec.abs_tolerance:.3e}")
    return val / math.pi ** 2


def _squared_sum_tail(model: CorrelationModel, T: float) -> float | None:
    """Bound on int_T^inf (kappa + kappa'')^2 from the derivative envelopes."""
    if model.envelope_start(0) is None or model.envelope_start(2) is None:
        return None
    if max(model.envelope_start(0), model.envelope_start(2)) > T:
        return None
    val, _ = _quad(lambda t: (model.tail_envelope(0, t) + model.tail_envelope(2, t)) ** 2,
                   T, 50.0 * T, limit=400)
    edge = (model.tail_envelope(0, 50.0 * T) + model.tail_envelope(2, 50.0 * T)) ** 2
    return val + edge * 50.0 * T


def predicted_covariance(model: CorrelationModel, phi1: TestFunction,
                         phi2: TestFunction, R: float,
                         quad: QuadratureSpec | None = None) -> float:
    """Exact finite-R covariance of two linear statistics of the zero measure.

    R int phi1(x) phi2(x + z/R) F(z) dx dz  +  (R/pi) int phi1 phi2,
    with the inner cross-correlation in closed form per test-function pair.
    """
    if R <= 0:
        raise ConfigError("R must be positive")
    spec = quad or model.default_quadrature()
    T = spec.truncation_radius
    span = R * (phi1.support_radius() + phi2.support_radius())
    zmax = min(T, span + 1.0)

    def outer(z: float) -> float:
        return two_point_F(model, z) * phi1.cross_correlation(phi2, z / R)

    val, err = _integrate_chunked(outer, -zmax, zmax, 0.5 * spec.abs_tolerance,
                                  chunk_len=10.0, limit=spec.max_nodes)
    if zmax < span:
        tail = model.f_tail_integral_bound(zmax)
        cc_sup = min(phi1.integral() * phi2.sup_bound(),
                     phi2.integral() * phi1.sup_bound())
        if tail is None:
            raise QuadratureNotConverged(
                "cannot certify the discarded excess-intensity tail")
        err += 2.0 * tail * abs(cc_sup)
    if err * R > max(spec.abs_tolerance, 1e-6) * max(R, 1.0):
        raise QuadratureNotConverged(
            f"covariance quadrature error {err * R:.3e} too large")
    return R * val + (R / math.pi) * phi1.cross_correlation(phi2, 0.0)


def expected_linear_statistic(phi: TestFunction, R: float) -> float:
    """Mean of the linear statistic of the rescaled zero measure: (R/pi) int phi."""
    if R <= 0:
        raise ConfigError("R must be positive")
    return (R / math.pi) * phi.integral()
