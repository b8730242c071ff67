"""Uncertain quantities, deterministic substreams, and empirical percentiles.

Every stochastic input to the model (loss severities, occurrence rates,
benefit magnitudes, cost amounts) is expressed as one of five distribution
families.  Sampling is driven by counter-based substreams so that the value
drawn for a given (master seed, stream key, iteration) triple is identical
on every platform and under any degree of parallelism.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# Distribution families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Point:
    """Degenerate distribution: always returns ``value``."""

    value: float


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float


@dataclass(frozen=True)
class Triangular:
    lo: float
    mode: float
    hi: float


@dataclass(frozen=True)
class Pert:
    """Beta-PERT with the standard shape weight of 4 on the mode."""

    lo: float
    mode: float
    hi: float


@dataclass(frozen=True)
class Lognormal:
    """Parameterized by the median and the log-space standard deviation."""

    median: float
    sigma: float


UncertainQuantity = Union[Point, Uniform, Triangular, Pert, Lognormal]


@dataclass(frozen=True)
class PointRate:
    """Fixed annual event rate; fractional parts realized by Bernoulli thinning."""

    events_per_year: float


@dataclass(frozen=True)
class PoissonRate:
    mean_events_per_year: float


FrequencyModel = Union[PointRate, PoissonRate]


# ---------------------------------------------------------------------------
# Deterministic substreams
# ---------------------------------------------------------------------------


def stream_words(master_seed: int, stream_key: str) -> tuple[int, int]:
    """Derive the 128-bit Philox key for a named stream.

    Uses a keyed BLAKE2b digest of the stream key so that distinct keys give
    statistically independent streams and the mapping is stable across
    platforms and Python processes.
    """
    seed_bytes = (master_seed & _MASK64).to_bytes(8, "little")
    digest = hashlib.blake2b(
        stream_key.encode("utf-8"), digest_size=16, key=seed_bytes
    ).digest()
    return (
        int.from_bytes(digest[:8], "little"),
        int.from_bytes(digest[8:], "little"),
    )


def _philox_for(words: tuple[int, int], iteration_index: int) -> np.random.Philox:
    # Iteration occupies counter word 2, leaving 2^128 draws per iteration.
    counter = np.zeros(4, dtype=np.uint64)
    counter[2] = iteration_index & _MASK64
    counter[3] = (iteration_index >> 64) & _MASK64
    key = np.array(words, dtype=np.uint64)
    return np.random.Philox(counter=counter, key=key)


class RngStream:
    """Deterministic random substream for one (seed, key, iteration) triple.

    Two independently constructed streams with equal triples yield
    bit-identical draw sequences.  Instances hold their own generator and
    must not be shared across threads; derive a fresh stream instead.
    """

    __slots__ = ("master_seed", "stream_key", "iteration_index", "_generator")

    def __init__(self, master_seed: int, stream_key: str, iteration_index: int = 0):
        self.master_seed = master_seed
        self.stream_key = stream_key
        self.iteration_index = iteration_index
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            words = stream_words(self.master_seed, self.stream_key)
            self._generator = np.random.Generator(
                _philox_for(words, self.iteration_index)
            )
        return self._generator

    def for_iteration(self, iteration_index: int) -> "RngStream":
        """Fresh stream for another iteration of the same key."""
        return RngStream(self.master_seed, self.stream_key, iteration_index)

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"RngStream(master_seed={self.master_seed}, "
            f"stream_key={self.stream_key!r}, iteration_index={self.iteration_index})"
        )


class SubstreamSampler:
    """Reusable generator for tight per-iteration loops.

    Produces draw sequences bit-identical to :class:`RngStream` while
    avoiding a bit-generator allocation per (stream, iteration) pair.  Not
    thread-safe: each worker owns one instance.
    """

    def __init__(self) -> None:
        self._counter = np.zeros(4, dtype=np.uint64)
        self._key = np.zeros(2, dtype=np.uint64)
        self._state = {
            "bit_generator": "Philox",
            "state": {"counter": self._counter, "key": self._key},
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        self._bit_generator = np.random.Philox(key=0)
        self.generator = np.random.Generator(self._bit_generator)

    def at(self, words: tuple[int, int], iteration_index: int) -> np.random.Generator:
        """Position the shared generator at a (stream, iteration) pair."""
        self._counter[2] = iteration_index & _MASK64
        self._counter[3] = (iteration_index >> 64) & _MASK64
        self._key[0] = words[0]
        self._key[1] = words[1]
        self._bit_generator.state = self._state
        return self.generator


def _resolve_generator(rng: "RngStream | np.random.Generator") -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    return rng


# ---------------------------------------------------------------------------
# Operations on uncertain quantities
# ---------------------------------------------------------------------------


def _parameters(q: UncertainQuantity) -> tuple[float, ...]:
    if isinstance(q, Point):
        return (q.value,)
    if isinstance(q, Uniform):
        return (q.lo, q.hi)
    if isinstance(q, (Triangular, Pert)):
        return (q.lo, q.mode, q.hi)
    if isinstance(q, Lognormal):
        return (q.median, q.sigma)
    raise TypeError(f"unsupported quantity type {type(q).__name__}")


def validate(
    q: UncertainQuantity, *, nonnegative: bool = False, label: str = "quantity"
) -> list[str]:
    """Check distribution invariants; returns one message per violation."""
    problems: list[str] = []
    try:
        params = _parameters(q)
    except TypeError:
        return [f"{label}: unsupported quantity type {type(q).__name__}"]
    if not all(math.isfinite(p) for p in params):
        return [f"{label}: all distribution parameters must be finite, got {params}"]
    if isinstance(q, Uniform):
        if not (q.lo <= q.hi):
            problems.append(f"{label}: uniform requires lo <= hi, got ({q.lo}, {q.hi})")
    elif isinstance(q, (Triangular, Pert)):
        family = "triangular" if isinstance(q, Triangular) else "pert"
        if not (q.lo <= q.mode <= q.hi):
            problems.append(
                f"{label}: {family} requires lo <= mode <= hi, "
                f"got ({q.lo}, {q.mode}, {q.hi})"
            )
    elif isinstance(q, Lognormal):
        if not (q.median > 0):
            problems.append(f"{label}: lognormal requires median > 0, got {q.median}")
        if q.sigma < 0:
            problems.append(f"{label}: lognormal requires sigma >= 0, got {q.sigma}")
    if nonnegative and not problems:
        lo, _ = support(q)
        if lo < 0:
            problems.append(f"{label}: must be nonnegative, support starts at {lo}")
    return problems


def mean(q: UncertainQuantity) -> float:
    """Closed-form mean of the distribution."""
    if isinstance(q, Point):
        return q.value
    if isinstance(q, Uniform):
        return (q.lo + q.hi) / 2.0
    if isinstance(q, Triangular):
        return (q.lo + q.mode + q.hi) / 3.0
    if isinstance(q, Pert):
        return (q.lo + 4.0 * q.mode + q.hi) / 6.0
    if isinstance(q, Lognormal):
        return q.median * math.exp(q.sigma * q.sigma / 2.0)
    raise TypeError(f"unsupported quantity type {type(q).__name__}")


def support(q: UncertainQuantity) -> tuple[float, float]:
    """Closed support bounds (upper bound may be infinite)."""
    if isinstance(q, Point):
        return q.value, q.value
    if isinstance(q, (Uniform, Triangular, Pert)):
        return q.lo, q.hi
    if isinstance(q, Lognormal):
        return 0.0, math.inf
    raise TypeError(f"unsupported quantity type {type(q).__name__}")


def is_degenerate(q: UncertainQuantity) -> bool:
    """True when sampling ``q`` never consumes randomness (constant value)."""
    if isinstance(q, Point):
        return True
    if isinstance(q, (Uniform, Triangular, Pert)):
        return q.hi == q.lo
    if isinstance(q, Lognormal):
        return q.sigma == 0
    return False


def scaled(q: UncertainQuantity, factor: float) -> UncertainQuantity:
    """Distribution of ``factor * X`` for a nonnegative scale factor."""
    if factor < 0:
        raise ValueError(f"scale factor must be nonnegative, got {factor}")
    if factor == 0:
        return Point(0.0)
    if isinstance(q, Point):
        return Point(q.value * factor)
    if isinstance(q, Uniform):
        return Uniform(q.lo * factor, q.hi * factor)
    if isinstance(q, Triangular):
        return Triangular(q.lo * factor, q.mode * factor, q.hi * factor)
    if isinstance(q, Pert):
        return Pert(q.lo * factor, q.mode * factor, q.hi * factor)
    if isinstance(q, Lognormal):
        return Lognormal(q.median * factor, q.sigma)
    raise TypeError(f"unsupported quantity type {type(q).__name__}")


@lru_cache(maxsize=None)
def make_sampler(q: UncertainQuantity):
    """Compile ``q`` into a single-draw closure over a generator.

    The closure consumes the generator's stream exactly as repeated
    :func:`sample` calls would; hot loops use it to skip per-call dispatch.
    """
    if isinstance(q, Point):
        value = q.value
        return lambda gen: value
    if isinstance(q, Uniform):
        if q.hi == q.lo:
            lo = q.lo
            return lambda gen: lo
        lo, hi = q.lo, q.hi
        return lambda gen: float(gen.uniform(lo, hi))
    if isinstance(q, Triangular):
        if q.hi == q.lo:
            lo = q.lo
            return lambda gen: lo
        lo, mode, hi = q.lo, q.mode, q.hi
        return lambda gen: float(gen.triangular(lo, mode, hi))
    if isinstance(q, Pert):
        width = q.hi - q.lo
        if width == 0:
            lo = q.lo
            return lambda gen: lo
        lo = q.lo
        alpha = 1.0 + 4.0 * (q.mode - q.lo) / width
        beta = 1.0 + 4.0 * (q.hi - q.mode) / width
        return lambda gen: lo + width * float(gen.beta(alpha, beta))
    if isinstance(q, Lognormal):
        if q.sigma == 0:
            median = q.median
            return lambda gen: median
        median, sigma = q.median, q.sigma
        return lambda gen: median * math.exp(sigma * float(gen.standard_normal()))
    raise TypeError(f"unsupported quantity type {type(q).__name__}")


@lru_cache(maxsize=None)
def make_batch_sampler(q: UncertainQuantity):
    """Compile ``q`` into a closure summing ``n`` draws in one vector call.

    Consumes the bit stream exactly as ``n`` sequential :func:`sample`
    calls would (numpy vector draws advance the stream identically); the
    sum itself is accumulated in vector order.
    """
    if isinstance(q, Point):
        value = q.value
        return lambda gen, n: value * n
    if isinstance(q, Uniform):
        if q.hi == q.lo:
            lo = q.lo
            return lambda gen, n: lo * n
        lo, hi = q.lo, q.hi
        return lambda gen, n: float(gen.uniform(lo, hi, size=n).sum())
    if isinstance(q, Triangular):
        if q.hi == q.lo:
            lo = q.lo
            return lambda gen, n: lo * n
        lo, mode, hi = q.lo, q.mode, q.hi
        return lambda gen, n: float(gen.triangular(lo, mode, hi, size=n).sum())
    if isinstance(q, Pert):
        width = q.hi - q.lo
        if width == 0:
            lo = q.lo
            return lambda gen, n: lo * n
        lo = q.lo
        alpha = 1.0 + 4.0 * (q.mode - q.lo) / width
        beta = 1.0 + 4.0 * (q.hi - q.mode) / width
        return lambda gen, n: lo * n + width * float(gen.beta(alpha, beta, size=n).sum())
    if isinstance(q, Lognormal):
        if q.sigma == 0:
            median = q.median
            return lambda gen, n: median * n
        median, sigma = q.median, q.sigma

        def draw_lognormal_sum(gen, n: int) -> float:
            # Array exp only pays off for larger batches; either branch
            # consumes the stream identically.
            z = gen.standard_normal(size=n)
            if n <= 8:
                total = 0.0
                for value in z:
                    total += math.exp(sigma * value)
                return median * total
            return median * float(np.exp(sigma * z).sum())

        return draw_lognormal_sum
    raise TypeError(f"unsupported quantity type {type(q).__name__}")


def sample(q: UncertainQuantity, rng: "RngStream | np.random.Generator") -> float:
    """Draw one value from ``q``; a Point returns its value without a draw."""
    return make_sampler(q)(_resolve_generator(rng))


# ---------------------------------------------------------------------------
# Frequency models
# ---------------------------------------------------------------------------


def frequency_mean(freq: FrequencyModel) -> float:
    if isinstance(freq, PointRate):
        return freq.events_per_year
    if isinstance(freq, PoissonRate):
        return freq.mean_events_per_year
    raise TypeError(f"unsupported frequency type {type(freq).__name__}")


def validate_frequency(freq: FrequencyModel, *, label: str = "frequency") -> list[str]:
    rate = frequency_mean(freq)
    if rate < 0 or not math.isfinite(rate):
        return [f"{label}: rate must be finite and >= 0, got {rate}"]
    return []


@lru_cache(maxsize=None)
def make_count_sampler(freq: FrequencyModel):
    """Compile a frequency model into an events-per-year draw closure.

    PointRate uses expected-value Bernoulli thinning for the fractional
    part, so the mean event count equals the rate exactly.
    """
    if isinstance(freq, PointRate):
        rate = freq.events_per_year
        base = int(rate)
        frac = rate - base
        if frac == 0:
            return lambda gen: base
        return lambda gen: base + (1 if gen.random() < frac else 0)
    if isinstance(freq, PoissonRate):
        lam = freq.mean_events_per_year
        if lam == 0:
            return lambda gen: 0
        return lambda gen: int(gen.poisson(lam))
    raise TypeError(f"unsupported frequency type {type(freq).__name__}")


def sample_event_count(
    freq: FrequencyModel, rng: "RngStream | np.random.Generator"
) -> int:
    """Draw the number of events in one year."""
    return make_count_sampler(freq)(_resolve_generator(rng))


# ---------------------------------------------------------------------------
# Empirical percentiles
# ---------------------------------------------------------------------------


def percentile(samples, p: float) -> float:
    """Linear-interpolation percentile at rank ``p * (n - 1)``.

    ``p=0`` returns the minimum, ``p=1`` the maximum.  Input need not be
    pre-sorted.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"percentile fraction must lie in [0, 1], got {p}")
    data = sorted(samples)
    n = len(data)
    if n == 0:
        raise ValueError("cannot take a percentile of an empty sample set")
    rank = p * (n - 1)
    lower = int(math.floor(rank))
    frac = rank - lower
    if frac == 0.0 or lower + 1 >= n:
        return float(data[lower])
    return float(data[lower] + frac * (data[lower + 1] - data[lower]))
