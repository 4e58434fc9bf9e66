"""Canonical family catalogs and seeded instance generators used by audit campaigns."""

from __future__ import annotations

import numpy as np

from . import cube
from .cube import FamilyDescriptor
from .stieltjes import MonotoneStep, random_step


def harris_catalog() -> list[FamilyDescriptor]:
    """Increasing families for n = 3..12 plus 20 random positive-weight LTFs."""
    out = []
    for n in range(3, 13):
        out.append(FamilyDescriptor("dictator", n, {"i": 0}))
        out.append(FamilyDescriptor("dictator", n, {"i": n - 1}))
        out.append(FamilyDescriptor("majority", n))
        out.append(FamilyDescriptor("threshold", n, {"k": 2}))
        out.append(FamilyDescriptor("threshold", n, {"k": n}))
        for r in (2, 3):
            if n % r == 0 and r < n:
                out.append(FamilyDescriptor("tribes", n, {"r": r}))
        out.append(FamilyDescriptor("ltf", n, {"weights": [float(i + 1) for i in range(n)], "t": n * (n + 1) / 4}))
    for j in range(20):
        out.append(FamilyDescriptor("random_monotone", 3 + j % 10, {"seed": j}))
    return out


def balanced_catalog(ns) -> list[FamilyDescriptor]:
    """Balanced increasing families of the given dimensions."""
    out = []
    for n in ns:
        cands = [FamilyDescriptor("dictator", n, {"i": 0}), FamilyDescriptor("majority", n)]
        if n % 2:
            cands.append(FamilyDescriptor("threshold", n, {"k": (n + 1) // 2}))
        cands += [FamilyDescriptor("random_monotone", n, {"seed": 100 * n + j}) for j in range(3)]
        for d in cands:
            F = cube.generate(d)
            if 2 * F.count == F.size:
                out.append(d)
    return out


def regular_balanced(descs) -> list[FamilyDescriptor]:
    keep = []
    for d in descs:
        prof = cube.classify(cube.generate(d))
        if prof.increasing and prof.balanced and prof.regular:
            keep.append(d)
    return keep


def random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def theorem3_instances(count: int, seed: int) -> list[tuple[str, MonotoneStep, MonotoneStep, np.ndarray, np.ndarray]]:
    """Random (f, g, w, v) with up to five atoms in [-3, 3] and <w, v> > 0."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        f = random_step(rng, 5, -3.0, 3.0)
        g = random_step(rng, 5, -3.0, 3.0)
        dim = int(rng.integers(2, 7))
        w, v = random_unit(rng, dim), random_unit(rng, dim)
        rho = float(w @ v)
        if abs(rho) < 1e-3:
            continue
        if rho < 0:
            v = -v
        out.append((f"theorem3#{len(out)}", f, g, w, v))
    return out

