"""Monotone step functions and their atomic Lebesgue-Stieltjes measures.

A step function f(x) = base + sum_{t_j < x} delta_j is left-continuous; its
measure puts mass delta_j at t_j.  Covariances of f(Z1), g(Z2) over a
correlated normal pair reduce to finite sums over atom pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import AuditReport
from .errors import DescriptorError, PreconditionError
from .gauss import GaussianPair, orthant_excess, pdf
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate

_RANGE_SLACK = 1e-12
_TAIL = 40.0


@dataclass(frozen=True)
class MonotoneStep:
    base: float
    breakpoints: tuple[float, ...]
    jumps: tuple[float, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.jumps):
            raise DescriptorError("breakpoints and jumps differ in length")
        if not (math.isfinite(self.base) and self.base >= 0):
            raise DescriptorError(f"base {self.base} must be finite and non-negative")
        if any(not math.isfinite(t) for t in self.breakpoints):
            raise DescriptorError("breakpoints must be finite")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise DescriptorError("breakpoints must be strictly increasing")
        if any(not (d > 0 and math.isfinite(d)) for d in self.jumps):
            raise DescriptorError("jumps must be positive")
        top = self.base + math.fsum(self.jumps)
        if top > 1.0 + _RANGE_SLACK:
            raise DescriptorError(f"range overflow: base + jumps = {top:.17g} > 1")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        levels = np.concatenate([[self.base], self.base + np.cumsum(self.jumps)])
        # searchsorted 'left' counts breakpoints strictly below x
        return levels[np.searchsorted(np.asarray(self.breakpoints), x, side="left")][()]

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.breakpoints, self.jumps))

    def scaled(self, alpha: float) -> "MonotoneStep":
        return MonotoneStep(self.base, self.breakpoints, tuple(alpha * d for d in self.jumps))

    def to_dict(self) -> dict:
        return {"base": self.base, "atoms": [[t, d] for t, d in self.atoms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "MonotoneStep":
        try:
            return make_step(float(obj.get("base", 0.0)), [(float(t), float(d)) for t, d in obj["atoms"]])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DescriptorError):
                raise
            raise DescriptorError(f"malformed step function {obj!r}: {exc}") from None


def make_step(base: float, points: Sequence[tuple[float, float]]) -> MonotoneStep:
    pts = list(points)
    return MonotoneStep(float(base), tuple(float(t) for t, _ in pts), tuple(float(d) for _, d in pts))


@dataclass(frozen=True)
class StieltjesMoments:
    mass: float
    a: float
    b: float


def moments(f: MonotoneStep) -> StieltjesMoments:
    dens = [pdf(t) for t in f.breakpoints]
    return StieltjesMoments(
        mass=math.fsum(f.jumps),
        a=math.fsum(d * p for d, p in zip(f.jumps, dens)),
        b=math.fsum(d * (1.0 + abs(t)) * p for t, d, p in zip(f.breakpoints, f.jumps, dens)),
    )


def damped_moment(f: MonotoneStep) -> float:
    """int phi(t) / (1 + |t|) dmu_f, the lower Cauchy-Schwarz factor."""
    return math.fsum(d * pdf(t) / (1.0 + abs(t)) for t, d in f.atoms)


def a_via_expectation(f: MonotoneStep, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """E[f(Z) Z] by quadrature, one smooth piece per interval between breakpoints."""
    cuts = [-_TAIL] + [t for t in f.breakpoints if -_TAIL < t < _TAIL] + [_TAIL]
    total = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        level = float(f(0.5 * (lo + hi)))
        if level == 0.0:
            continue
        res = integrate(lambda x: x * np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi), lo, hi, cfg)
        total.append(level * res.value)
    return math.fsum(total)


@dataclass(frozen=True)
class Lemma52Result:
    lhs: float
    rhs: float
    intermediate_rhs: float
    crude_rhs: float
    pass_: bool
    intermediate_pass: bool

    @property
    def passed(self) -> bool:
        return self.pass_ and self.intermediate_pass


def lemma52_check(f: MonotoneStep) -> Lemma52Result:
    """b_f against 2 a_f sqrt(log(e/a_f^2)), plus the Jensen-stage bounds."""
    m = moments(f)
    if m.a == 0.0:
        ok = m.b == 0.0
        return Lemma52Result(m.b, 0.0, 0.0, 0.0, ok, ok)
    rhs = 2.0 * m.a * math.sqrt(1.0 - 2.0 * math.log(m.a))
    jensen = m.a * (1.0 + math.sqrt(max(0.0, 2.0 * math.log(m.mass / (math.sqrt(2 * math.pi) * m.a)))))
    crude = m.a * (1.0 + math.sqrt(max(0.0, -math.log(2 * math.pi * m.a * m.a))))
    return Lemma52Result(
        lhs=m.b,
        rhs=rhs,
        intermediate_rhs=jensen,
        crude_rhs=crude,
        pass_=m.b <= rhs + 1e-12,
        intermediate_pass=m.b <= jensen + 1e-12 and jensen <= crude + 1e-12 and crude <= rhs + 1e-12,
    )


def general_cov(f: MonotoneStep, g: MonotoneStep, rho: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Cov(f(Z1), g(Z2)) as the double sum over atom pairs, in (j, l) order."""
    if not 0.0 <= rho <= 1.0:
        raise PreconditionError(f"correlation {rho} outside [0, 1]")
    terms = [
        dj * dl * orthant_excess(tj, sl, rho, cfg)
        for tj, dj in f.atoms
        for sl, dl in g.atoms
    ]
    return math.fsum(terms)


def _unit(v: Sequence[float], name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-12:
        raise PreconditionError(f"{name} is not a unit vector")
    return v / np.linalg.norm(v)


def theorem3_report(
    f: MonotoneStep,
    g: MonotoneStep,
    w: Sequence[float],
    v: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    label: str = "",
) -> AuditReport:
    w, v = _unit(w, "w"), _unit(v, "v")
    if w.shape != v.shape:
        raise PreconditionError("w and v differ in dimension")
    rho = math.fsum(w * v)
    if rho < -1e-12:
        raise PreconditionError(f"correlation {rho} is negative")
    rho = min(1.0, max(0.0, rho))
    GaussianPair(0.0, 0.0, rho)
    cov = general_cov(f, g, rho, cfg)
    mf, mg = moments(f), moments(g)
    w1 = rho * mf.a * mg.a
    meta = {"a_f": mf.a, "a_g": mg.a, "rho": rho, "w1": w1, "w1_ff": mf.a ** 2, "w1_gg": mg.a ** 2}
    if w1 == 0.0:
        return AuditReport(label, "theorem3", cov, 0.0, int(w.size), meta)
    rhs = w1 / (math.sqrt(1.0 - 2.0 * math.log(mf.a)) * math.sqrt(1.0 - 2.0 * math.log(mg.a)))
    return AuditReport(label, "theorem3", cov, rhs, int(w.size), meta)


def random_step(rng: np.random.Generator, max_atoms: int, lo: float, hi: float) -> MonotoneStep:
    """Distinct atoms uniform in [lo, hi], jumps normalized to a mass drawn in (0, 1]."""
    k = int(rng.integers(1, max_atoms + 1))
    locs = np.unique(rng.uniform(lo, hi, size=k))
    raw = 1.0 - rng.random(locs.size)
    mass = 1.0 - rng.random()
    jumps = raw / raw.sum() * mass
    return make_step(0.0, list(zip(locs.tolist(), jumps.tolist())))
