"""Right-hand sides of the cube correlation inequalities, audited against exact covariances.

Universal constants are never fixed here.  Each report carries the bound
with its constant dropped (``rhs_core``) and the ratio ``cov / rhs_core``,
which is the empirical constant for that instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from . import cube
from .cube import BooleanFamily
from .errors import DimensionError, PreconditionError

Number = Union[Fraction, float]


@dataclass(frozen=True)
class AuditReport:
    """Covariance, bound core and ratio for one inequality instance."""

    label: str
    inequality: str
    cov: Number
    rhs_core: float
    n: Optional[int] = None
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.rhs_core >= 0:
            raise ValueError(f"rhs_core must be non-negative, got {self.rhs_core}")

    @property
    def vacuous(self) -> bool:
        return self.rhs_core == 0 and self.cov == 0

    @property
    def ratio(self) -> Optional[float]:
        """cov / rhs_core; ``None`` when vacuous, ``inf`` for a positive cov over a zero bound."""
        if self.rhs_core == 0:
            if self.cov == 0:
                return None
            return math.inf if self.cov > 0 else -math.inf
        return float(self.cov) / self.rhs_core


def _log_e_over(w: Number) -> float:
    return 1.0 - math.log(float(w))


def _require_increasing(*families: BooleanFamily) -> None:
    for F in families:
        if not cube.is_increasing(F):
            raise PreconditionError("input family is not increasing")


def _require_same_dim(F: BooleanFamily, G: BooleanFamily) -> None:
    if F.n != G.n:
        raise DimensionError(f"dimension mismatch: {F.n} vs {G.n}")


def talagrand_report(F: BooleanFamily, G: BooleanFamily, label: str = "") -> AuditReport:
    _require_same_dim(F, G)
    _require_increasing(F, G)
    cov = cube.covariance(F, G)
    w = cube.w1(F, G)
    meta = {"w1": w}
    if w == 0:
        # impossible for increasing pairs with cov > 0; kept visible rather than raised
        if cov > 0:
            meta["anomaly"] = "w1 = 0 with positive covariance"
        return AuditReport(label, "talagrand", cov, 0.0, F.n, meta)
    return AuditReport(label, "talagrand", cov, float(w) / _log_e_over(w), F.n, meta)


def kkm_report(F: BooleanFamily, G: BooleanFamily, label: str = "") -> AuditReport:
    _require_same_dim(F, G)
    _require_increasing(F, G)
    cov = cube.covariance(F, G)
    wfg, wff, wgg = cube.w1(F, G), cube.w1(F, F), cube.w1(G, G)
    meta = {"w1": wfg, "w1_ff": wff, "w1_gg": wgg}
    if wff == 0 or wgg == 0:
        if cov > 0:
            meta["anomaly"] = "self-W1 = 0 with positive covariance"
        return AuditReport(label, "kkm", cov, 0.0, F.n, meta)
    rhs = float(wfg) / (math.sqrt(_log_e_over(wff)) * math.sqrt(_log_e_over(wgg)))
    return AuditReport(label, "kkm", cov, rhs, F.n, meta)


def _log_n_over_sqrt_n(n: int) -> float:
    return math.log(n) / math.sqrt(n)


def theorem1_report(F: BooleanFamily, label: str = "") -> AuditReport:
    """Covariance of a regular balanced increasing family with majority."""
    prof = cube.classify(F)
    if not prof.increasing:
        raise PreconditionError("theorem1: family is not increasing")
    if not prof.balanced:
        raise PreconditionError(f"theorem1: family is not balanced (measure {prof.measure})")
    if not prof.regular:
        raise PreconditionError("theorem1: family is not regular")
    if F.n % 2 == 0:
        raise PreconditionError(f"theorem1: n={F.n} is even, majority is unbalanced")
    cov = cube.covariance(F, cube.majority(F.n, max_dim=max(F.n, cube.DEFAULT_MAX_DIM)))
    return AuditReport(label, "theorem1", cov, _log_n_over_sqrt_n(F.n), F.n)


def theorem2_report(F: BooleanFamily, label: str = "") -> AuditReport:
    """Best covariance of a balanced increasing family with a dictator or majority."""
    prof = cube.classify(F)
    if not prof.increasing:
        raise PreconditionError("theorem2: family is not increasing")
    if not prof.balanced:
        raise PreconditionError(f"theorem2: family is not balanced (measure {prof.measure})")
    cap = max(F.n, cube.DEFAULT_MAX_DIM)
    candidates = [(f"dictator(n={F.n},i={i})", cube.dictator(F.n, i, cap)) for i in range(F.n)]
    candidates.append((f"majority(n={F.n})", cube.majority(F.n, cap)))
    best_name, best_cov = None, None
    for name, h in candidates:
        c = cube.covariance(F, h)
        if best_cov is None or c > best_cov:
            best_name, best_cov = name, c
    return AuditReport(label, "theorem2", best_cov, _log_n_over_sqrt_n(F.n), F.n, {"best_h": best_name})


def proof1_identity_check(F: BooleanFamily, h: BooleanFamily) -> Fraction:
    """cov(F, h) - (agreement(F, h)/2 - 1/4); exactly zero whenever F is balanced."""
    _require_same_dim(F, h)
    if 2 * F.count != F.size:
        raise PreconditionError("identity check needs a balanced family")
    return cube.covariance(F, h) - (cube.agreement(F, h) / 2 - Fraction(1, 4))


def majority_influence_exact(n: int) -> Fraction:
    if n < 1 or n % 2 == 0:
        raise PreconditionError(f"majority influence formula needs odd n >= 1, got {n}")
    return Fraction(2 * math.comb(n - 1, n // 2), 2**n)


def kkl_ratio(F: BooleanFamily) -> float:
    """max_k I_k * n / log n, the empirical KKL constant."""
    if F.n < 2:
        raise PreconditionError("kkl ratio needs n >= 2")
    if 2 * F.count != F.size:
        raise PreconditionError("kkl ratio is audited on balanced families only")
    top = max(cube.influence_profile(F).per_coordinate)
    return float(top) * F.n / math.log(F.n)


@dataclass(frozen=True)
class AgreementSummary:
    """Exact agreement probabilities entering the monotone approximation trichotomy."""

    bias: Fraction
    dictator_agreement: Fraction
    majority_agreement: Fraction

    def excess(self, n: int) -> tuple[float, float]:
        """Agreement advantages over 1/2, dictator in units of 1/sqrt(n), majority in log n/sqrt(n)."""
        d = float(self.dictator_agreement - Fraction(1, 2)) * math.sqrt(n)
        m = float(self.majority_agreement - Fraction(1, 2)) / _log_n_over_sqrt_n(n) if n > 1 else math.inf
        return d, m


def agreement_summary(F: BooleanFamily) -> AgreementSummary:
    cap = max(F.n, cube.DEFAULT_MAX_DIM)
    bias = max(F.measure, 1 - F.measure)
    dic = max(cube.agreement(F, cube.dictator(F.n, i, cap)) for i in range(F.n))
    return AgreementSummary(bias, dic, cube.agreement(F, cube.majority(F.n, cap)))
