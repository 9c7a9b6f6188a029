"""Probe vectors for the four single-query trace estimators.

FIXED   uniform column of the identity, estimate ``n x^H A x``
MUBS    uniform basis out of ``n + 1`` MUBs, then a uniform vector in it,
        estimate ``n x^H A x``
HUTCHINSON  i.i.d. +/-1 entries, estimate ``x^T A x``
GAUSSIAN    i.i.d. N(0, 1) entries, estimate ``x^T A x``
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .mub import NotPrimeError, is_prime, mub_vector, next_prime_at_least
from .oracle import QuadraticFormOracle, as_oracle, padded_oracle
from .rng import RandomStream

GAUSSIAN_BITS_PER_ENTRY = 64


class EstimatorKind(enum.Enum):
    FIXED = "fixed"
    MUBS = "mubs"
    HUTCHINSON = "hutchinson"
    GAUSSIAN = "gaussian"

    @property
    def code(self) -> int:
        """Stable small integer used when keying random streams."""
        return list(EstimatorKind).index(self)

    @classmethod
    def parse(cls, name) -> "EstimatorKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        aliases = {"fixed_basis": "fixed", "unit": "fixed", "mub": "mubs",
                   "rademacher": "hutchinson", "hutch": "hutchinson",
                   "normal": "gaussian"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown estimator {name!r}; choose from {valid}") from None


@dataclass(frozen=True)
class ProbeVector:
    x: np.ndarray
    scale: float
    bits_used: int


@dataclass(frozen=True)
class TraceEstimate:
    mean: float
    sample_variance: float
    samples: int
    total_bits: int
    theoretical_bits: Optional[int]
    dim: int

    @property
    def standard_error(self) -> float:
        return math.sqrt(self.sample_variance / self.samples)


@dataclass(frozen=True)
class BitBudget:
    """Random bits needed per probe.

    ``bits`` is None when exact sampling needs unboundedly many bits
    (Gaussian); ``fixed_precision_bits`` then gives the cost at double
    precision.
    """

    bits: Optional[int]
    fixed_precision_bits: Optional[int] = None

    def __str__(self):
        if self.bits is None:
            return f"unbounded (exact); {self.fixed_precision_bits} at fixed precision"
        return str(self.bits)


def _ceil_log2(m: int) -> int:
    return (m - 1).bit_length()


def random_bits_required(kind, n: int) -> BitBudget:
    kind = EstimatorKind.parse(kind)
    if n < 1:
        raise ValueError("dimension must be positive")
    if kind is EstimatorKind.FIXED:
        return BitBudget(_ceil_log2(n))
    if kind is EstimatorKind.MUBS:
        return BitBudget(_ceil_log2(n) + _ceil_log2(n + 1))
    if kind is EstimatorKind.HUTCHINSON:
        return BitBudget(n)
    return BitBudget(None, GAUSSIAN_BITS_PER_ENTRY * n)


def draw_probe(kind, n: int, stream: RandomStream) -> ProbeVector:
    kind = EstimatorKind.parse(kind)
    start = stream.bit_counter
    if kind is EstimatorKind.FIXED:
        x = np.zeros(n)
        x[stream.uniform_int(n)] = 1.0
        return ProbeVector(x, float(n), stream.bit_counter - start)
    if kind is EstimatorKind.MUBS:
        if not is_prime(n):
            raise NotPrimeError(f"MUB probes need a prime dimension, got {n}; pad first")
        basis = stream.uniform_int(n + 1)
        index = stream.uniform_int(n)
        return ProbeVector(mub_vector(n, basis, index), float(n),
                           stream.bit_counter - start)
    if kind is EstimatorKind.HUTCHINSON:
        x = 1.0 - 2.0 * stream.bit_array(n)
        return ProbeVector(x, 1.0, stream.bit_counter - start)
    x = stream.normals(n)
    return ProbeVector(x, 1.0, GAUSSIAN_BITS_PER_ENTRY * n)


def single_shot(oracle: QuadraticFormOracle, probe: ProbeVector) -> float:
    return probe.scale * float(oracle.quad_form(probe.x))


def prepare_oracle(oracle, kind) -> QuadraticFormOracle:
    """Pad to the next prime dimension when MUB probes are requested."""
    oracle = as_oracle(oracle)
    if EstimatorKind.parse(kind) is EstimatorKind.MUBS and not is_prime(oracle.dim):
        return padded_oracle(oracle, next_prime_at_least(oracle.dim))
    return oracle


def single_shots(oracle, kind, samples: int, seed: int,
                 stream_prefix: Sequence[int] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Every single-shot estimate and its bit cost, sample ``i`` keyed ``(seed, *prefix, i)``."""
    kind = EstimatorKind.parse(kind)
    if samples < 1:
        raise ValueError("need at least one sample")
    oracle = prepare_oracle(oracle, kind)
    n = oracle.dim
    batch = max(1, min(256, (1 << 21) // n))
    shots = np.empty(samples)
    bits = np.empty(samples, dtype=np.int64)
    prefix = tuple(stream_prefix)
    for lo in range(0, samples, batch):
        hi = min(samples, lo + batch)
        probes = [draw_probe(kind, n, RandomStream(seed, prefix + (i,)))
                  for i in range(lo, hi)]
        block = np.stack([p.x for p in probes], axis=1)
        shots[lo:hi] = probes[0].scale * np.atleast_1d(oracle.quad_form(block))
        bits[lo:hi] = [p.bits_used for p in probes]
    return shots, bits


def estimate_trace(oracle, kind, samples: int, seed: int = 0,
                   stream_prefix: Sequence[int] = ()) -> TraceEstimate:
    """Average ``samples`` independent single-shot estimates of ``Tr(A)``.

    ``oracle`` may be a :class:`QuadraticFormOracle`, a dense array or a scipy
    sparse matrix.  Results depend only on ``seed`` and ``stream_prefix``.
    """
    kind = EstimatorKind.parse(kind)
    prepared = prepare_oracle(oracle, kind)
    shots, bits = single_shots(prepared, kind, samples, seed, stream_prefix)
    mean = math.fsum(shots) / samples
    var = math.fsum((shots - mean) ** 2) / (samples - 1) if samples > 1 else 0.0
    per_probe = random_bits_required(kind, prepared.dim)
    theoretical = None if per_probe.bits is None else per_probe.bits * samples
    return TraceEstimate(mean, var, samples, int(bits.sum()), theoretical, prepared.dim)
