"""Seeded Monte-Carlo estimators used as oracles for the Gaussian closed forms.

Samples are split into ``streams``; stream j draws from its own child of
``SeedSequence(seed)`` and normals come from the inverse CDF of uniforms on
(0, 1).  Per-stream (count, mean, M2) triples are merged in stream order, so
an estimate depends only on (samples, seed, streams).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Iterator, Optional

import numpy as np
from scipy import special

from .errors import PreconditionError
from .gauss import GaussianPair, Halfspace, pdf
from .stieltjes import MonotoneStep

_CHUNK = 1 << 18
_HALF_ULP = 2.0 ** -54


@dataclass(frozen=True)
class McConfig:
    samples: int = 10**6
    seed: int = 0
    streams: int = 4

    def __post_init__(self):
        if self.samples < 100:
            raise ValueError("need at least 100 samples")
        if self.streams < 1 or self.streams > self.samples:
            raise ValueError("stream count must be in [1, samples]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n: int
    seed: Optional[int] = None

    def contains(self, value: float, k: float = 4.0) -> bool:
        return abs(self.mean - value) <= k * self.std_error

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass(frozen=True)
class _Moments:
    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, x: np.ndarray) -> "_Moments":
        if x.size == 0:
            return cls(0, 0.0, 0.0)
        mu = float(np.mean(x))
        return cls(int(x.size), mu, float(np.sum((x - mu) ** 2)))

    def merge(self, other: "_Moments") -> "_Moments":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return _Moments(n, mean, m2)


def _stream_sizes(cfg: McConfig) -> list[int]:
    base, extra = divmod(cfg.samples, cfg.streams)
    return [base + (1 if j < extra else 0) for j in range(cfg.streams)]


def standard_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Inverse-CDF normals from uniforms shifted into the open interval (0, 1)."""
    return special.ndtri(rng.random(shape) + _HALF_ULP)


def _chunks(size: int) -> Iterator[int]:
    while size > 0:
        m = min(size, _CHUNK)
        yield m
        size -= m


Sampler = Callable[[np.random.Generator, int], np.ndarray]


def _stream_moments(seq: np.random.SeedSequence, size: int, sampler: Sampler) -> _Moments:
    rng = np.random.Generator(np.random.PCG64(seq))
    acc = _Moments(0, 0.0, 0.0)
    for m in _chunks(size):
        acc = acc.merge(_Moments.of(np.asarray(sampler(rng, m), dtype=float)))
    return acc


def _run(cfg: McConfig, sampler: Sampler, workers: int = 1) -> _Moments:
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.streams)
    sizes = _stream_sizes(cfg)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_stream_moments, seqs, sizes, [sampler] * cfg.streams))
    else:
        parts = [_stream_moments(q, m, sampler) for q, m in zip(seqs, sizes)]
    acc = _Moments(0, 0.0, 0.0)
    for part in parts:
        acc = acc.merge(part)
    return acc


def _estimate(acc: _Moments, cfg: McConfig) -> Estimate:
    var = acc.m2 / (acc.count - 1)
    return Estimate(acc.mean, math.sqrt(var / acc.count), acc.count, cfg.seed)


def mc_orthant(p: GaussianPair, cfg: McConfig = McConfig(), lower: bool = False, workers: int = 1) -> Estimate:
    """P(xi > t, eta > s), or P(xi <= t, eta <= s) when ``lower``."""
    rho, c = p.rho, math.sqrt(max(0.0, 1.0 - p.rho * p.rho))

    def sampler(rng, m):
        z = standard_normals(rng, (2, m))
        xi, eta = z[0], rho * z[0] + c * z[1]
        if lower:
            return (xi <= p.t) & (eta <= p.s)
        return (xi > p.t) & (eta > p.s)

    return _estimate(_run(cfg, sampler, workers), cfg)


def _coordinate(H: Halfspace, k: int) -> int:
    if not 0 <= k < H.dim:
        raise IndexError(f"coordinate {k} outside [0, {H.dim})")
    return k


def mc_halfspace_influence(H: Halfspace, k: int, cfg: McConfig = McConfig(), workers: int = 1) -> Estimate:
    """E[sgn(<w, xi> - t) xi_k], coordinate ``k`` zero-based."""
    k = _coordinate(H, k)
    w = np.asarray(H.w)

    def sampler(rng, m):
        z = standard_normals(rng, (m, H.dim))
        sign = np.where(z @ w > H.t, 1.0, -1.0)
        return sign * z[:, k]

    return _estimate(_run(cfg, sampler, workers), cfg)


def mc_sectional_influence(H: Halfspace, k: int, cfg: McConfig = McConfig(), workers: int = 1) -> Estimate:
    """Average boundary density phi(t_k(x)) of the one-dimensional sections along ``k``."""
    k = _coordinate(H, k)
    wk = H.w[k]
    if wk <= 0:
        raise PreconditionError(f"sectional influence needs w_k > 0, got {wk}")
    if H.dim == 1:
        return Estimate(pdf(H.t / wk), 0.0, 0, cfg.seed)
    rest = np.delete(np.asarray(H.w), k)

    def sampler(rng, m):
        x = standard_normals(rng, (m, H.dim - 1))
        return pdf((H.t - x @ rest) / wk)

    return _estimate(_run(cfg, sampler, workers), cfg)


def mc_general_cov(f: MonotoneStep, g: MonotoneStep, rho: float, cfg: McConfig = McConfig(), workers: int = 1) -> Estimate:
    """Cov(f(Z1), g(Z2)); the standard error is that of the mean of centred products."""
    GaussianPair(0.0, 0.0, rho)
    c = math.sqrt(max(0.0, 1.0 - rho * rho))

    def pair(rng, m):
        z = standard_normals(rng, (2, m))
        return f(z[0]), g(rho * z[0] + c * z[1])

    mx = _run(cfg, lambda rng, m: pair(rng, m)[0], workers).mean
    my = _run(cfg, lambda rng, m: pair(rng, m)[1], workers).mean

    def centred(rng, m):
        x, y = pair(rng, m)
        return (x - mx) * (y - my)

    acc = _run(cfg, centred, workers)
    est = _estimate(acc, cfg)
    n = acc.count
    return Estimate(est.mean * n / (n - 1), est.std_error, n, cfg.seed)
