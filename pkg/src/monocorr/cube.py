"""Boolean families on the discrete cube {0,1}^n.

A family is stored as its full truth table: entry ``j`` is the membership
of the point whose binary expansion is ``j``, with coordinate ``i`` equal to
bit ``i`` of ``j`` (little-endian).  Every statistic is an exact integer
count turned into a :class:`fractions.Fraction`, so denominators are powers
of two.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DescriptorError, DimensionError

DEFAULT_MAX_DIM = 24

KINDS = ("dictator", "majority", "tribes", "ltf", "threshold", "random_monotone")


@dataclass(frozen=True, eq=False)
class BooleanFamily:
    """Immutable truth table of a subset of {0,1}^n."""

    n: int
    bits: np.ndarray = field(repr=False)
    count: int

    def __post_init__(self):
        if self.bits.dtype != np.bool_ or self.bits.shape != (1 << self.n,):
            raise DimensionError(f"truth table must be a bool array of length 2**{self.n}")
        if self.bits.flags.writeable:
            raise ValueError("truth table must be read-only")
        if int(np.count_nonzero(self.bits)) != self.count:
            raise ValueError("count does not match truth table")

    @classmethod
    def from_bits(cls, n: int, bits, max_dim: int = DEFAULT_MAX_DIM) -> "BooleanFamily":
        _check_dim(n, max_dim)
        table = np.array(bits, dtype=np.bool_, copy=True).reshape(-1)
        if table.shape != (1 << n,):
            raise DimensionError(f"expected {1 << n} entries, got {table.size}")
        table.flags.writeable = False
        return cls(n, table, int(np.count_nonzero(table)))

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def measure(self) -> Fraction:
        return Fraction(self.count, self.size)

    def __contains__(self, point: int) -> bool:
        return bool(self.bits[point])

    def __eq__(self, other):
        if not isinstance(other, BooleanFamily):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, self.bits.tobytes()))

    def members(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def complement(self) -> "BooleanFamily":
        return BooleanFamily.from_bits(self.n, ~self.bits, max_dim=max(self.n, 1))

    def to_hex(self) -> str:
        """Truth table as hex, bit ``j`` of the byte stream = point ``j``."""
        return np.packbits(self.bits, bitorder="little").tobytes().hex()

    @classmethod
    def from_hex(cls, n: int, text: str, max_dim: int = DEFAULT_MAX_DIM) -> "BooleanFamily":
        _check_dim(n, max_dim)
        raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
        table = np.unpackbits(raw, bitorder="little")[: 1 << n]
        return cls.from_bits(n, table, max_dim=max_dim)


@dataclass(frozen=True)
class FamilyProfile:
    measure: Fraction
    increasing: bool
    balanced: bool
    regular: bool


@dataclass(frozen=True)
class InfluenceProfile:
    per_coordinate: tuple[Fraction, ...]
    total: Fraction

    def __post_init__(self):
        if sum(self.per_coordinate, Fraction(0)) != self.total:
            raise ValueError("total influence must equal the sum of coordinate influences")


def _check_dim(n: int, max_dim: int = DEFAULT_MAX_DIM) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise DimensionError(f"dimension must be an integer, got {n!r}")
    if n < 1 or n > max_dim:
        raise DimensionError(f"dimension {n} outside [1, {max_dim}]")


def _same_dim(F: BooleanFamily, G: BooleanFamily) -> None:
    if F.n != G.n:
        raise DimensionError(f"dimension mismatch: {F.n} vs {G.n}")


def make_family(n: int, members: Iterable[int], max_dim: int = DEFAULT_MAX_DIM) -> BooleanFamily:
    _check_dim(n, max_dim)
    idx = np.fromiter((int(m) for m in members), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= (1 << n)):
        raise DimensionError(f"member index out of range for n={n}")
    table = np.zeros(1 << n, dtype=np.bool_)
    table[idx] = True
    return BooleanFamily.from_bits(n, table, max_dim=max_dim)


def _halves(F: BooleanFamily, k: int) -> tuple[np.ndarray, np.ndarray]:
    # rows pair every point with x_k = 0 against its partner with x_k = 1
    view = F.bits.reshape(-1, 2, 1 << k)
    return view[:, 0, :], view[:, 1, :]


def is_increasing(F: BooleanFamily) -> bool:
    for k in range(F.n):
        low, high = _halves(F, k)
        if np.any(low & ~high):
            return False
    return True


def _boundary_counts(F: BooleanFamily) -> list[int]:
    """Per coordinate, the number of x in F whose k-th flip leaves F."""
    counts = []
    for k in range(F.n):
        low, high = _halves(F, k)
        counts.append(int(np.count_nonzero(low != high)))
    return counts


def influence_profile(F: BooleanFamily) -> InfluenceProfile:
    # an edge {x, x^e_k} crossing the boundary contributes exactly one member of F
    per = tuple(Fraction(2 * c, F.size) for c in _boundary_counts(F))
    return InfluenceProfile(per, sum(per, Fraction(0)))


def sensitivity_profile(F: BooleanFamily) -> tuple[Fraction, ...]:
    """mu{x : 1_F(x) != 1_F(x ^ e_k)} for each k, counted over all points."""
    idx = np.arange(F.size, dtype=np.int64)
    return tuple(
        Fraction(int(np.count_nonzero(F.bits != F.bits[idx ^ (1 << k)])), F.size)
        for k in range(F.n)
    )


def classify(F: BooleanFamily) -> FamilyProfile:
    infl = influence_profile(F).per_coordinate
    return FamilyProfile(
        measure=F.measure,
        increasing=is_increasing(F),
        balanced=2 * F.count == F.size,
        regular=all(x == infl[0] for x in infl),
    )


def covariance(F: BooleanFamily, G: BooleanFamily) -> Fraction:
    _same_dim(F, G)
    both = int(np.count_nonzero(F.bits & G.bits))
    return Fraction(both, F.size) - Fraction(F.count * G.count, F.size * F.size)


def agreement(F: BooleanFamily, h: BooleanFamily) -> Fraction:
    _same_dim(F, h)
    return Fraction(int(np.count_nonzero(F.bits == h.bits)), F.size)


def w1(F: BooleanFamily, G: BooleanFamily) -> Fraction:
    _same_dim(F, G)
    a = influence_profile(F).per_coordinate
    b = influence_profile(G).per_coordinate
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def first_level_coefficients(F: BooleanFamily) -> tuple[Fraction, ...]:
    """E[(2*1_F - 1)(2*x_k - 1)] for each coordinate k."""
    out = []
    for k in range(F.n):
        low, high = _halves(F, k)
        diff = int(np.count_nonzero(high)) - int(np.count_nonzero(low))
        out.append(Fraction(2 * diff, F.size))
    return tuple(out)


def conditional_differences(F: BooleanFamily) -> tuple[Fraction, ...]:
    """mu(F | x_k = 1) - mu(F | x_k = 0) for each coordinate k.

    For increasing F this equals I_k(F) itself (not 4 I_k).
    """
    half = F.size // 2
    out = []
    for k in range(F.n):
        low, high = _halves(F, k)
        out.append(Fraction(int(np.count_nonzero(high)) - int(np.count_nonzero(low)), half))
    return tuple(out)


# --- generators -------------------------------------------------------------


def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1, dtype=np.uint8)
    for _ in range(n):
        pc = np.concatenate([pc, pc + 1])
    return pc


def _weighted_sums(weights: Sequence[float]) -> np.ndarray:
    sums = np.zeros(1, dtype=np.float64)
    for a in weights:
        sums = np.concatenate([sums, sums + float(a)])
    return sums


def dictator(n: int, i: int, max_dim: int = DEFAULT_MAX_DIM) -> BooleanFamily:
    """{x : x_i = 1}, with ``i`` zero-based."""
    _check_dim(n, max_dim)
    if not 0 <= i < n:
        raise DescriptorError(f"dictator coordinate {i} outside [0, {n})")
    idx = np.arange(1 << n, dtype=np.int64)
    return BooleanFamily.from_bits(n, (idx >> i) & 1, max_dim=max_dim)


def majority(n: int, max_dim: int = DEFAULT_MAX_DIM) -> BooleanFamily:
    """{x : sum x_i > n/2}; unbalanced for even n."""
    _check_dim(n, max_dim)
    return BooleanFamily.from_bits(n, 2 * _popcounts(n).astype(np.int64) > n, max_dim=max_dim)


def threshold(n: int, k: int, max_dim: int = DEFAULT_MAX_DIM) -> BooleanFamily:
    """{x : sum x_i >= k}."""
    _check_dim(n, max_dim)
    if not 0 <= k <= n + 1:
        raise DescriptorError(f"threshold level {k} outside [0, {n + 1}]")
    return BooleanFamily.from_bits(n, _popcounts(n) >= k, max_dim=max_dim)


def tribes(n: int, r: int, max_dim: int = DEFAULT_MAX_DIM) -> BooleanFamily:
    """Some block of ``r`` consecutive coordinates is all ones; needs r | n."""
    _check_dim(n, max_dim)
    if r < 1 or n % r:
        raise DescriptorError(f"tribes needs a block size r >= 1 dividing n (n={n}, r={r})")
    idx = np.arange(1 << n, dtype=np.int64)
    table = np.zeros(1 << n, dtype=np.bool_)
    block = (1 << r) - 1
    for j in range(n // r):
        mask = block << (j * r)
        table |= (idx & mask) == mask
    return BooleanFamily.from_bits(n, table, max_dim=max_dim)


def ltf(n: int, weights: Sequence[float], t: float, max_dim: int = DEFAULT_MAX_DIM) -> BooleanFamily:
    """{x : sum a_i x_i > t} with non-negative weights."""
    _check_dim(n, max_dim)
    if len(weights) != n:
        raise DescriptorError(f"ltf needs {n} weights, got {len(weights)}")
    if any(not math.isfinite(a) or a < 0 for a in weights):
        raise DescriptorError("ltf weights must be finite and non-negative")
    return BooleanFamily.from_bits(n, _weighted_sums(weights) > t, max_dim=max_dim)


def random_monotone_params(n: int, seed: int) -> tuple[list[float], float]:
    """Weights in (0, 1] and the threshold bringing the measure closest to 1/2."""
    rng = np.random.default_rng(seed)
    weights = (1.0 - rng.random(n)).tolist()
    levels = np.unique(_weighted_sums(weights))
    # threshold just above levels[j] keeps every sum > levels[j]
    ordered = np.sort(_weighted_sums(weights))
    above = ordered.size - np.searchsorted(ordered, levels, side="right")
    j = int(np.argmin(np.abs(2 * above - ordered.size)))
    t = float(levels[j] + levels[j + 1]) / 2 if j + 1 < levels.size else float(levels[j])
    return weights, t


def random_monotone(n: int, seed: int, max_dim: int = DEFAULT_MAX_DIM) -> BooleanFamily:
    weights, t = random_monotone_params(n, seed)
    return ltf(n, weights, t, max_dim=max_dim)


# --- descriptors ------------------------------------------------------------

_REQUIRED = {
    "dictator": ("i",),
    "majority": (),
    "tribes": ("r",),
    "ltf": ("weights", "t"),
    "threshold": ("k",),
    "random_monotone": ("seed",),
}


@dataclass(frozen=True)
class FamilyDescriptor:
    """A named family generator plus its parameters, e.g. tribes with r=3."""

    kind: str
    n: int
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self, max_dim: int = DEFAULT_MAX_DIM) -> None:
        if self.kind not in _REQUIRED:
            raise DescriptorError(f"unknown family kind {self.kind!r}")
        try:
            _check_dim(self.n, max_dim)
        except DimensionError as exc:
            raise DescriptorError(f"{self.kind}: {exc}") from None
        missing = [p for p in _REQUIRED[self.kind] if p not in self.params]
        if missing:
            raise DescriptorError(f"{self.kind} descriptor missing {', '.join(missing)}")
        p, n = self.params, self.n
        if self.kind == "tribes" and (int(p["r"]) < 1 or n % int(p["r"])):
            raise DescriptorError(f"tribes(n={n}, r={p['r']}): r must divide n")
        if self.kind == "dictator" and not 0 <= int(p["i"]) < n:
            raise DescriptorError(f"dictator(n={n}, i={p['i']}): coordinate out of range")
        if self.kind == "threshold" and not 0 <= int(p["k"]) <= n + 1:
            raise DescriptorError(f"threshold(n={n}, k={p['k']}): level out of range")
        if self.kind == "ltf":
            w = p["weights"]
            if len(w) != n or any(float(a) < 0 for a in w):
                raise DescriptorError(f"ltf(n={n}): need {n} non-negative weights")

    @property
    def label(self) -> str:
        if self.kind == "ltf":
            w = ",".join(format(float(a), ".6g") for a in self.params["weights"])
            return f"ltf(n={self.n},w=[{w}],t={format(float(self.params['t']), '.6g')})"
        inner = ",".join(f"{k}={self.params[k]}" for k in _REQUIRED[self.kind])
        return f"{self.kind}(n={self.n}{',' if inner else ''}{inner})"

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "n": self.n, **self.params}

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "FamilyDescriptor":
        if not isinstance(obj, dict) or "kind" not in obj or "n" not in obj:
            raise DescriptorError(f"descriptor needs 'kind' and 'n': {obj!r}")
        params = {k: v for k, v in obj.items() if k not in ("kind", "n")}
        n = obj["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise DescriptorError(f"descriptor dimension must be an integer: {obj!r}")
        return cls(str(obj["kind"]), n, params)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def generate(desc: FamilyDescriptor, max_dim: int = DEFAULT_MAX_DIM) -> BooleanFamily:
    desc.validate(max_dim)
    p, n = desc.params, desc.n
    if desc.kind == "dictator":
        return dictator(n, int(p["i"]), max_dim)
    if desc.kind == "majority":
        return majority(n, max_dim)
    if desc.kind == "tribes":
        return tribes(n, int(p["r"]), max_dim)
    if desc.kind == "ltf":
        return ltf(n, [float(a) for a in p["weights"]], float(p["t"]), max_dim)
    if desc.kind == "threshold":
        return threshold(n, int(p["k"]), max_dim)
    return random_monotone(n, int(p["seed"]), max_dim)
