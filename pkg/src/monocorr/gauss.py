"""Gaussian-space primitives: normal tails, bivariate orthant probabilities and the
normalized sign-covariance ratio.

Orthant probabilities use the integral over the correlation,

    P(xi > t, eta > s) = Phi(-t) Phi(-s) + int_0^rho phi_r(t, s) dr,

evaluated after substituting r = sin(theta).  With that substitution the
(1 - r^2)^(-1/2) factor cancels against dr and the exponent is rewritten as

    (t - s)^2 / (2 cos^2 theta) + t s / (1 + sin theta)

which has no cancellation as theta -> pi/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .bounds import AuditReport
from .errors import PreconditionError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate

LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)
INV_SQRT_2PI = 1.0 / math.sqrt(2 * math.pi)
LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class GaussianPair:
    t: float
    s: float
    rho: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.s)):
            raise ValueError("thresholds must be finite")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"correlation {self.rho} outside [-1, 1]")


@dataclass(frozen=True)
class Halfspace:
    """{x : <w, x> > t} with a unit normal w."""

    w: tuple[float, ...]
    t: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("normal vector must be a non-empty 1-d sequence")
        norm = float(np.linalg.norm(w))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"normal vector has norm {norm!r}, expected 1")
        object.__setattr__(self, "w", tuple((w / norm).tolist()))
        if not math.isfinite(self.t):
            raise ValueError("threshold must be finite")

    @classmethod
    def from_direction(cls, v: Sequence[float], t: float) -> "Halfspace":
        v = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(v))
        if norm == 0:
            raise ValueError("zero direction vector")
        return cls(tuple((v / norm).tolist()), t)

    @property
    def dim(self) -> int:
        return len(self.w)


# --- univariate -------------------------------------------------------------


def log_pdf(t):
    return -0.5 * np.square(t) - LOG_SQRT_2PI


def pdf(t):
    """Standard normal density."""
    if np.ndim(t) == 0:
        return math.exp(-0.5 * t * t - LOG_SQRT_2PI)
    return np.exp(log_pdf(np.asarray(t, dtype=float)))


def upper_tail(t):
    """Phi(-t) = P(Z > t) through erfc; positive up to t ~ 37."""
    if np.ndim(t) == 0:
        return 0.5 * math.erfc(t / math.sqrt(2))
    return 0.5 * special.erfc(np.asarray(t, dtype=float) / math.sqrt(2))


def log_upper_tail(t):
    """log Phi(-t), finite far beyond the range where Phi(-t) underflows."""
    return special.log_ndtr(-np.asarray(t, dtype=float))[()]


def log_e_over_pdf_squared(t: float) -> float:
    """log(e / phi(t)^2) = 1 + t^2 + log(2 pi), without forming phi(t)."""
    return 1.0 + t * t + LOG_2PI


# --- bivariate --------------------------------------------------------------


def bivariate_density(r: float, t: float, s: float) -> float:
    if not -1.0 < r < 1.0:
        raise ValueError(f"density needs |r| < 1, got {r}")
    q = 1.0 - r * r
    expo = -(t * t + s * s - 2.0 * r * t * s) / (2.0 * q)
    return math.exp(expo - LOG_2PI - 0.5 * math.log(q))


def h_integrand(r, t: float, s: float):
    """phi_r(t, s) / (phi(t) phi(s))."""
    r = np.asarray(r, dtype=float)
    if np.any(np.abs(r) >= 1.0):
        raise ValueError("h_r needs |r| < 1")
    q = 1.0 - r * r
    out = np.exp((r * t * s - 0.5 * (t * t + s * s) * r * r) / q) / np.sqrt(q)
    return out[()]


def _stable_exponent(theta: np.ndarray, t: float, s: float) -> np.ndarray:
    c = np.cos(theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        quad = np.where(t == s, 0.0, (t - s) ** 2 / (2.0 * c * c))
    return quad + t * s / (1.0 + np.sin(theta))


def _excess_integrand(t: float, s: float):
    def f(theta):
        return np.exp(-_stable_exponent(theta, t, s) - LOG_2PI)
    return f


def _h_theta_integrand(t: float, s: float):
    half_sq = 0.5 * (t * t + s * s)

    def f(theta):
        return np.exp(half_sq - _stable_exponent(theta, t, s))
    return f


def orthant_excess(t: float, s: float, rho: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """P(xi > t, eta > s) - Phi(-t) Phi(-s) for a standard pair with correlation rho."""
    GaussianPair(t, s, rho)
    if rho == 1.0:
        hi, lo = max(t, s), min(t, s)
        return upper_tail(hi) * upper_tail(-lo)
    if rho == -1.0:
        joint = max(0.0, upper_tail(t) - upper_tail(-s)) if t < -s else 0.0
        return joint - upper_tail(t) * upper_tail(s)
    if rho == 0.0:
        return 0.0
    return integrate(_excess_integrand(t, s), 0.0, math.asin(rho), cfg).value


def plackett_orthant(p: GaussianPair, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """P(xi > t, eta > s)."""
    if p.rho == 1.0:
        return upper_tail(max(p.t, p.s))
    return upper_tail(p.t) * upper_tail(p.s) + orthant_excess(p.t, p.s, p.rho, cfg)


def _require_nonneg_rho(rho: float) -> None:
    if rho < 0:
        raise PreconditionError(f"correlation must be non-negative, got {rho}")


def sign_cov(p: GaussianPair, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Cov(sgn(xi - t), sgn(eta - s)) with sgn(0) = -1."""
    _require_nonneg_rho(p.rho)
    return 4.0 * orthant_excess(p.t, p.s, p.rho, cfg)


def orthant_by_conditioning(p: GaussianPair, epsabs: float = 1e-15, epsrel: float = 1e-13) -> float:
    """P(xi > t, eta > s) = int_t^inf phi(x) Phi((rho x - s)/sqrt(1 - rho^2)) dx.

    Independent of the correlation integral and of the in-house quadrature;
    kept as an oracle.  Needs |rho| < 1.
    """
    if abs(p.rho) >= 1.0:
        raise ValueError("conditioning formula needs |rho| < 1")
    scale = math.sqrt(1.0 - p.rho * p.rho)

    def f(x):
        return math.exp(-0.5 * x * x - LOG_SQRT_2PI) * special.ndtr((p.rho * x - p.s) / scale)

    # split at the kink of the conditional probability so quad sees smooth pieces
    pts = sorted({p.t, max(p.t, p.s / p.rho) if p.rho > 0 else p.t, p.t + 40.0})
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a:
            total += sp_integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=200)[0]
    return total


def gamma_ratio(p: GaussianPair, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """sign_cov * (1+|t|)(1+|s|) / (rho phi(t) phi(s)); the rho -> 0 limit at rho = 0."""
    _require_nonneg_rho(p.rho)
    scale = 4.0 * (1.0 + abs(p.t)) * (1.0 + abs(p.s))
    if p.rho == 0.0:
        return scale
    upper = math.pi / 2 if p.rho == 1.0 else math.asin(p.rho)
    return scale * integrate(_h_theta_integrand(p.t, p.s), 0.0, upper, cfg).value / p.rho


def lemma32_rhs(p: GaussianPair, c: float) -> float:
    """c rho phi(t) phi(s) / ((1+|t|)(1+|s|))."""
    return c * p.rho * pdf(p.t) * pdf(p.s) / ((1.0 + abs(p.t)) * (1.0 + abs(p.s)))


# --- grid scan --------------------------------------------------------------


@dataclass(frozen=True)
class GridMin:
    min: float
    argmin: GaussianPair
    points: int


def axis(lo: float, hi: float, count: int) -> list[float]:
    if count < 1:
        raise ValueError("axis needs at least one point")
    if count == 1:
        return [float(lo)]
    return np.linspace(lo, hi, count).tolist()


def parse_axis(text: str) -> list[float]:
    """'lo:hi:count' -> evenly spaced values, endpoints included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range {text!r} is not of the form lo:hi:count")
    return axis(float(parts[0]), float(parts[1]), int(parts[2]))


def _symmetry_key(t: float, s: float) -> tuple[float, float, bool]:
    # the integrand depends on (t - s)^2, t s and t^2 + s^2 only
    a, b = abs(t), abs(s)
    return (max(a, b), min(a, b), t * s >= 0)


def gamma_values(
    ts: Sequence[float],
    ss: Sequence[float],
    rhos: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> dict[tuple[float, float, float], float]:
    """Gamma at every grid point; symmetric points share one evaluation."""
    cache: dict[tuple, float] = {}
    out = {}
    for t in ts:
        for s in ss:
            key = _symmetry_key(t, s)
            for rho in rhos:
                k = key + (rho,)
                if k not in cache:
                    cache[k] = gamma_ratio(GaussianPair(t, s, rho), cfg)
                out[(t, s, rho)] = cache[k]
    return out


def gamma_grid_min(
    ts: Sequence[float],
    ss: Sequence[float],
    rhos: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> GridMin:
    """Minimum of Gamma over a product grid; ties go to the smallest (t, s, rho)."""
    if any(r < 0 or r > 1 for r in rhos):
        raise PreconditionError("grid correlations must lie in [0, 1]")
    values = gamma_values(ts, ss, rhos, cfg)
    (t, s, rho), best = min(values.items(), key=lambda kv: (kv[1], kv[0]))
    return GridMin(best, GaussianPair(t, s, rho), len(values))


# --- halfspaces -------------------------------------------------------------


@dataclass(frozen=True)
class HalfspaceInfluences:
    signed: tuple[float, ...]
    indicator: tuple[float, ...]


def halfspace_influences(H: Halfspace) -> HalfspaceInfluences:
    """E[sgn(<w,x> - t) x_k] = 2 phi(t) w_k and E[1_H x_k] = phi(t) w_k."""
    d = pdf(H.t)
    return HalfspaceInfluences(
        tuple(2.0 * d * wk for wk in H.w),
        tuple(d * wk for wk in H.w),
    )


def _correlation(A: Halfspace, B: Halfspace) -> float:
    if A.dim != B.dim:
        raise PreconditionError(f"halfspaces live in different dimensions ({A.dim}, {B.dim})")
    rho = math.fsum(a * b for a, b in zip(A.w, B.w))
    if rho < -1e-12:
        raise PreconditionError(f"correlation {rho} is negative")
    return min(1.0, max(0.0, rho))


def ltf_pair_report(A: Halfspace, B: Halfspace, cfg: QuadratureConfig = DEFAULT_CONFIG, label: str = "") -> AuditReport:
    rho = _correlation(A, B)
    cov = orthant_excess(A.t, B.t, rho, cfg)
    w1 = rho * pdf(A.t) * pdf(B.t)
    denom = math.sqrt(log_e_over_pdf_squared(A.t)) * math.sqrt(log_e_over_pdf_squared(B.t))
    meta = {
        "rho": rho,
        "t": A.t,
        "s": B.t,
        "w1": w1,
        "w1_aa": pdf(A.t) ** 2,
        "w1_bb": pdf(B.t) ** 2,
        "w1_signed": 4.0 * w1,
    }
    return AuditReport(label or f"ltf_pair(t={A.t:.6g},s={B.t:.6g},rho={rho:.6g})", "ltf_pair", cov, w1 / denom, A.dim, meta)


def proposition1_report(t: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> AuditReport:
    """Nested halfspaces {<w,x> > t} inside {<w,x> > -t}, t >= 1.

    ``rhs_core`` uses log(e/phi(t)^2) ~ t^2 + 1 as displayed in the tightness
    argument; the exact log(e/phi(t)^2) variant is kept in the metadata.
    """
    if t < 1:
        raise PreconditionError(f"tightness example needs t >= 1, got {t}")
    tail = upper_tail(t)
    cov = tail * tail
    w1 = pdf(t) ** 2
    rhs = w1 / (t * t + 1.0)
    rhs_exact = w1 / log_e_over_pdf_squared(t)
    meta = {
        "t": t,
        "w1": w1,
        "rhs_core_exact_log": rhs_exact,
        "ratio_exact_log": cov / rhs_exact,
        "tail_bound_ratio": (t * t + 1.0) / (t * t),
        "bound_holds": cov / rhs <= 2.0,
    }
    return AuditReport(f"proposition1(t={t:.6g})", "proposition1", cov, rhs, None, meta)


@dataclass(frozen=True)
class LemmaD1Result:
    min_h: float
    pass_: bool


def lemmaD1_check(t: float, k: float, samples: int) -> LemmaD1Result:
    """min of h_r(t, -k) over equispaced r in [0, 1/(2tk)] against 1/e."""
    if t < 1 or k < 1:
        raise PreconditionError(f"need t >= 1 and k >= 1, got t={t}, k={k}")
    if samples < 2:
        raise PreconditionError("need at least two sample points")
    r = np.linspace(0.0, 1.0 / (2.0 * t * k), samples)
    m = float(np.min(h_integrand(r, t, -k)))
    return LemmaD1Result(m, m >= math.exp(-1.0) - 1e-12)


def lemma32_check(p: GaussianPair, c: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                  slack: Optional[float] = None) -> tuple[float, float, bool]:
    """(sign_cov, bound, holds) for the sign-covariance lower bound with constant c.

    ``slack`` is a relative allowance for quadrature error, default 10 * rel_tol.
    """
    slack = 10 * cfg.rel_tol if slack is None else slack
    lhs = sign_cov(p, cfg)
    rhs = lemma32_rhs(p, c)
    return lhs, rhs, lhs >= rhs * (1.0 - slack)
