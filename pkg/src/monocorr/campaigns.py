"""Audit campaigns: run every applicable check over a catalog or grid and collect reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bounds, cube, gauss, mc, stieltjes
from .bounds import AuditReport
from .cube import FamilyDescriptor
from .gauss import GaussianPair, Halfspace
from .quadrature import DEFAULT_CONFIG, QuadratureConfig


@dataclass
class Campaign:
    reports: list[AuditReport] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def kkl_report(F: cube.BooleanFamily, label: str = "") -> AuditReport:
    """KKL audit in report form: cov holds max_k I_k, rhs_core is log n / n."""
    top = max(cube.influence_profile(F).per_coordinate)
    if 2 * F.count != F.size:
        raise bounds.PreconditionError("kkl ratio is audited on balanced families only")
    return AuditReport(label, "kkl", top, math.log(F.n) / F.n, F.n)


def cube_campaign(descs: Sequence[FamilyDescriptor], max_dim: int = cube.DEFAULT_MAX_DIM) -> Campaign:
    out = Campaign()
    fams = [cube.generate(d, max_dim) for d in descs]
    profs = [cube.classify(F) for F in fams]
    for i, (di, Fi, pi) in enumerate(zip(descs, fams, profs)):
        meta = {"descriptors": [di.to_dict()]}
        if pi.balanced:
            for dh, H in zip(descs, fams):
                if H.n == Fi.n and bounds.proof1_identity_check(Fi, H) != 0:
                    out.violations.append(f"agreement identity fails for {di.label} vs {dh.label}")
            if Fi.n >= 2:
                rep = kkl_report(Fi, di.label)
                out.reports.append(AuditReport(rep.label, rep.inequality, rep.cov, rep.rhs_core, rep.n, meta))
        if pi.increasing and pi.balanced and Fi.n >= 2:
            rep = bounds.theorem2_report(Fi, di.label)
            out.reports.append(AuditReport(rep.label, rep.inequality, rep.cov, rep.rhs_core, rep.n,
                                           {**rep.metadata, **meta}))
            if pi.regular and Fi.n % 2 == 1 and Fi.n >= 3:
                rep = bounds.theorem1_report(Fi, di.label)
                out.reports.append(AuditReport(rep.label, rep.inequality, rep.cov, rep.rhs_core, rep.n, meta))
        if pi.increasing:
            first = cube.first_level_coefficients(Fi)
            if first != cube.influence_profile(Fi).per_coordinate:
                out.violations.append(f"first-level coefficients differ from influences for {di.label}")
        if di.kind == "majority" and di.n % 2 == 1:
            expect = bounds.majority_influence_exact(di.n)
            if any(x != expect for x in cube.influence_profile(Fi).per_coordinate):
                out.violations.append(f"majority influence formula fails for {di.label}")
        for j in range(i, len(descs)):
            dj, Fj, pj = descs[j], fams[j], profs[j]
            if Fj.n != Fi.n or not (pi.increasing and pj.increasing):
                continue
            label = f"{di.label}|{dj.label}"
            pair_meta = {"descriptors": [di.to_dict(), dj.to_dict()]}
            for make in (bounds.talagrand_report, bounds.kkm_report):
                rep = make(Fi, Fj, label)
                out.reports.append(AuditReport(rep.label, rep.inequality, rep.cov, rep.rhs_core, rep.n,
                                               {**rep.metadata, **pair_meta}))
            if cube.covariance(Fi, Fj) < 0:
                out.violations.append(f"negative covariance for increasing pair {label}")
    return out


def grid_rows(ts, ss, rhos, cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[dict]:
    """One record per grid point: Gamma, indicator covariance, LTF bound core and ratio."""
    gammas = gauss.gamma_values(ts, ss, rhos, cfg)
    rows = []
    for (t, s, rho), gam in sorted(gammas.items()):
        A = Halfspace((1.0, 0.0), t)
        B = Halfspace((rho, math.sqrt(max(0.0, 1.0 - rho * rho))), s)
        rep = gauss.ltf_pair_report(A, B, cfg)
        rows.append({"t": t, "s": s, "rho": rho, "gamma": gam, "cov": rep.cov,
                     "rhs_core": rep.rhs_core, "ratio": rep.ratio})
    return rows


def theorem3_campaign(instances, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Campaign:
    out = Campaign()
    for label, f, g, w, v in instances:
        rep = stieltjes.theorem3_report(f, g, w, v, cfg, label)
        rep.metadata["steps"] = [f.to_dict(), g.to_dict()]
        out.reports.append(rep)
        if rep.cov < 0:
            out.violations.append(f"negative covariance for {label}")
        for name, h in (("f", f), ("g", g)):
            if not stieltjes.lemma52_check(h).passed:
                out.violations.append(f"log-moment bound fails for {name} in {label}")
    return out


@dataclass(frozen=True)
class CalibrationCase:
    name: str
    exact: float
    estimate: mc.Estimate

    @property
    def inside(self) -> bool:
        return self.estimate.contains(self.exact)


def calibration_cases(cfg: mc.McConfig) -> list[CalibrationCase]:
    """Fifty Monte-Carlo estimates whose exact values are known in closed form."""
    rng = np.random.default_rng(cfg.seed)
    cases = []

    def run(name, exact, fn):
        sub = mc.McConfig(cfg.samples, (cfg.seed + 7919 * (len(cases) + 1)) % 2**64, cfg.streams)
        cases.append(CalibrationCase(name, exact, fn(sub)))

    for rho in np.linspace(0.05, 0.95, 10).tolist():
        p = GaussianPair(0.0, 0.0, rho)
        run(f"sheppard(rho={rho:.3g})", 0.25 + math.asin(rho) / (2 * math.pi), lambda c, p=p: mc.mc_orthant(p, c))
    for _ in range(10):
        t, s = rng.uniform(-2, 2, 2).tolist()
        p = GaussianPair(t, s, 0.0)
        run(f"independent({t:.3g},{s:.3g})", gauss.upper_tail(t) * gauss.upper_tail(s), lambda c, p=p: mc.mc_orthant(p, c))
    for _ in range(10):
        t, s = rng.uniform(-2, 2, 2).tolist()
        p = GaussianPair(t, s, 1.0)
        run(f"comonotone({t:.3g},{s:.3g})", gauss.upper_tail(max(t, s)), lambda c, p=p: mc.mc_orthant(p, c))
    for _ in range(10):
        dim = int(rng.integers(1, 7))
        H = Halfspace.from_direction(rng.standard_normal(dim), float(rng.uniform(-2, 2)))
        k = int(rng.integers(0, dim))
        run(f"halfspace(dim={dim},k={k})", 2 * gauss.pdf(H.t) * H.w[k], lambda c, H=H, k=k: mc.mc_halfspace_influence(H, k, c))
    for _ in range(10):
        dim = int(rng.integers(2, 7))
        H = Halfspace.from_direction(np.abs(rng.standard_normal(dim)) + 0.05, float(rng.uniform(-2, 2)))
        k = int(rng.integers(0, dim))
        run(f"sectional(dim={dim},k={k})", gauss.pdf(H.t) * H.w[k], lambda c, H=H, k=k: mc.mc_sectional_influence(H, k, c))
    return cases
