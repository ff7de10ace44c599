"""Seeded random-variate streams with per-purpose keying.

Every consumer of randomness in a simulation owns a named stream keyed by
(node, item, purpose).  Stream state is derived deterministically from the
master seed and the key, never from the order in which streams are first
touched, so two scenarios with the same master seed consume *identical*
uniform sequences per stream even when their parameters differ (common
random numbers).  To keep that alignment, every variate below consumes
exactly one uniform per draw.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

StreamKey = tuple[str, int, str]


class StreamError(ValueError):
    """Base class for bad sampler arguments."""


class NonPositiveMean(StreamError):
    """Exponential mean must be strictly positive."""


class InvalidSupport(StreamError):
    """Triangular support must satisfy 0 < min <= mode <= max."""


def _derive_seed(master_seed: int, key: StreamKey) -> np.random.SeedSequence:
    """Derive a reproducible, platform-stable seed for one stream.

    Uses sha256 over a canonical rendering of (master_seed, key) so the
    derivation does not depend on Python hash randomization.
    """
    node, item, purpose = key
    text = f"{master_seed}|{node}|{item}|{purpose}"
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4)]
    return np.random.SeedSequence(words)


@dataclass
class RngStream:
    """One independent uniform stream plus the variates drawn from it."""

    key: StreamKey
    master_seed: int
    trace_limit: int = 0
    _gen: np.random.Generator = field(init=False, repr=False)
    trace: list[float] = field(init=False, default_factory=list)

    def __post_init__(self) -> None:
        self.rewind()

    def rewind(self, master_seed: int | None = None) -> None:
        """Return the stream to its initial state (optionally under a new seed)."""
        if master_seed is not None:
            self.master_seed = master_seed
        self._gen = np.random.Generator(np.random.PCG64(_derive_seed(self.master_seed, self.key)))
        self.trace = []

    def uniform(self) -> float:
        """Next raw uniform on [0, 1); the single source all variates scale."""
        u = float(self._gen.random())
        if len(self.trace) < self.trace_limit:
            self.trace.append(u)
        return u

    def interarrival(self, mean: float) -> float:
        """Exponential inter-arrival time with the given mean, in working hours.

        Inverse transform: mean * (-ln U).  One uniform per draw.
        """
        if mean <= 0:
            raise NonPositiveMean(f"inter-arrival mean must be > 0, got {mean}")
        u = self.uniform()
        # Guard against u == 0.0 (log(0)); the generator never returns 1.0.
        if u == 0.0:
            u = 5e-324
        return mean * -math.log(u)

    def triangular(self, lo: float, mode: float, hi: float) -> float:
        """Continuous triangular draw via inverse transform.  One uniform per draw.

        The degenerate case lo == mode == hi still consumes a uniform so
        scenarios that differ only in variability stay stream-aligned.
        """
        if not (0 < lo <= mode <= hi):
            raise InvalidSupport(f"need 0 < min <= mode <= max, got ({lo}, {mode}, {hi})")
        u = self.uniform()
        if hi == lo:
            return lo
        cut = (mode - lo) / (hi - lo)
        if u < cut:
            return lo + math.sqrt(u * (hi - lo) * (mode - lo))
        return hi - math.sqrt((1.0 - u) * (hi - lo) * (hi - mode))

    def demand_quantity(self, lo: int, mode: int, hi: int) -> int:
        """Triangular draw rounded half-up to an integer and clamped to [lo, hi]."""
        x = self.triangular(lo, mode, hi)
        q = math.floor(x + 0.5)
        return max(lo, min(hi, q))


class StreamHub:
    """Registry of named streams sharing one master seed.

    Streams are created lazily on first access; because state derives only
    from (master seed, key), access order does not matter.  ``reset``
    rewinds every stream to its initial state.
    """

    def __init__(self, master_seed: int, trace_limit: int = 0) -> None:
        self.master_seed = master_seed
        self.trace_limit = trace_limit
        self._streams: dict[StreamKey, RngStream] = {}

    def stream(self, node: str, item: int, purpose: str) -> RngStream:
        key = (node, item, purpose)
        st = self._streams.get(key)
        if st is None:
            st = RngStream(key, self.master_seed, self.trace_limit)
            self._streams[key] = st
        return st

    def reset(self, master_seed: int | None = None) -> None:
        """Rewind every stream in place; optionally rekey to a new master seed.

        Held stream references stay valid: after two identical resets, two
        runs consume identical uniforms per stream.
        """
        if master_seed is not None:
            self.master_seed = master_seed
        for st in self._streams.values():
            st.rewind(self.master_seed)

    def uniform_traces(self) -> dict[StreamKey, tuple[float, ...]]:
        """First ``trace_limit`` uniforms consumed per stream, for CRN audits."""
        return {key: tuple(st.trace) for key, st in sorted(self._streams.items())}
