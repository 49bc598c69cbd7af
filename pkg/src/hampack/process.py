"""Uniform random edge process on K_n with degree tracking and hitting times.

The process adds one uniformly random missing edge per step.  Two generation
modes are provided:

* ``full-shuffle``: a uniformly random permutation of all C(n,2) vertex pairs,
  realized lazily (partial Fisher-Yates over pair ranks), so memory is
  proportional to the number of edges actually consumed rather than n^2.
* ``rejection``: repeatedly sample uniform pairs and discard repeats.  Valid
  for consumers that stop far below saturation, which is the case here since
  hitting times of interest are ~ (n log n)/2 << C(n,2).

Both modes are deterministic given (n, seed, mode).
"""

from __future__ import annotations

from math import isqrt
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import DuplicateEdgeError, ExhaustedStreamError, InvalidParameterError

Edge = tuple[int, int]

MODES = ("full-shuffle", "rejection")

_BATCH = 2048


def _unrank_pair(n: int, r: int) -> Edge:
    """Map rank r in [0, C(n,2)) to the r-th pair (u, v), u < v, in
    lexicographic order.  Exact integer arithmetic (no float rounding)."""
    # Number of pairs with first coordinate < u is cum(u) = u*n - u*(u+1)/2.
    # Invert with an isqrt and fix up by at most one step.
    d = (2 * n - 1) ** 2 - 8 * r
    u = (2 * n - 1 - isqrt(d)) // 2
    while u * n - u * (u + 1) // 2 > r:
        u -= 1
    while (u + 1) * n - (u + 1) * (u + 2) // 2 <= r:
        u += 1
    v = u + 1 + (r - (u * n - u * (u + 1) // 2))
    return (u, v)


def _iter_full_shuffle(n: int, rng: np.random.Generator) -> Iterator[Edge]:
    """Lazy Fisher-Yates over pair ranks: emits a uniform permutation prefix
    of all C(n,2) pairs using O(emitted) memory."""
    total = n * (n - 1) // 2
    moved: dict[int, int] = {}
    k = 0
    while k < total:
        hi = min(k + _BATCH, total)
        lows = np.arange(k, hi, dtype=np.int64)
        js = rng.integers(lows, total)
        for off in range(hi - k):
            idx = k + off
            j = int(js[off])
            vj = moved.get(j, j)
            moved[j] = moved.pop(idx, idx)
            yield _unrank_pair(n, vj)
        k = hi


def _iter_rejection(n: int, rng: np.random.Generator) -> Iterator[Edge]:
    """Sample uniform pairs, rejecting self-loops and repeats.  Uniform among
    not-yet-emitted pairs at every step."""
    total = n * (n - 1) // 2
    seen: set[Edge] = set()
    while len(seen) < total:
        us = rng.integers(0, n, _BATCH)
        vs = rng.integers(0, n, _BATCH)
        for a, b in zip(us, vs):
            if a == b:
                continue
            u, v = (int(a), int(b)) if a < b else (int(b), int(a))
            if (u, v) in seen:
                continue
            seen.add((u, v))
            yield (u, v)


class EdgeStream:
    """Ordered sequence of distinct unordered vertex pairs.

    Generated streams are recomputed from the seed on each iteration, so a
    stream object can be traversed any number of times and always yields the
    identical sequence.
    """

    def __init__(self, n: int, seed=None, mode: str = "full-shuffle",
                 edges: Optional[list[Edge]] = None):
        if n < 3:
            raise InvalidParameterError(f"need n >= 3, got {n}")
        if mode not in MODES and edges is None:
            raise InvalidParameterError(f"unknown mode {mode!r}")
        self.n = n
        self.seed = seed
        self.mode = mode if edges is None else "explicit"
        self._edges = edges

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "EdgeStream":
        canon = []
        seen = set()
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise InvalidParameterError(f"bad edge ({u}, {v}) for n={n}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise DuplicateEdgeError(f"edge {e} repeated in explicit stream")
            seen.add(e)
            canon.append(e)
        return cls(n, mode="explicit", edges=canon)

    def __iter__(self) -> Iterator[Edge]:
        if self._edges is not None:
            return iter(self._edges)
        rng = np.random.default_rng(self.seed)
        if self.mode == "full-shuffle":
            return _iter_full_shuffle(self.n, rng)
        return _iter_rejection(self.n, rng)

    def take(self, k: int) -> list[Edge]:
        """First k edges of the stream."""
        out = []
        for e in self:
            out.append(e)
            if len(out) == k:
                break
        if len(out) < k:
            raise ExhaustedStreamError(f"stream has only {len(out)} edges, wanted {k}")
        return out

    def dump(self, path, limit: Optional[int] = None) -> None:
        """Write the stream as text: header ``n=<n> seed=<seed>`` then one
        line ``t u v`` per edge."""
        with open(path, "w") as fh:
            fh.write(f"n={self.n} seed={self.seed}\n")
            for t, (u, v) in enumerate(self, start=1):
                fh.write(f"{t} {u} {v}\n")
                if limit is not None and t >= limit:
                    break


def new_stream(n: int, seed, mode: str = "full-shuffle") -> EdgeStream:
    """Build a deterministic uniform edge stream on [n]."""
    return EdgeStream(n, seed=seed, mode=mode)


class ProcessState:
    """Adjacency, degrees, and an O(1) minimum-degree threshold monitor.

    ``threshold`` is the degree k being watched; ``below_threshold_count``
    counts vertices with degree < k and is maintained incrementally.
    """

    def __init__(self, n: int, threshold: int = 1):
        if n < 3:
            raise InvalidParameterError(f"need n >= 3, got {n}")
        if threshold < 1:
            raise InvalidParameterError(f"need threshold >= 1, got {threshold}")
        self.n = n
        self.threshold = threshold
        self.adjacency: list[list[int]] = [[] for _ in range(n)]
        self.degree = [0] * n
        self.below_threshold_count = n
        self.t = 0
        self._present: set[Edge] = set()

    def has_edge(self, u: int, v: int) -> bool:
        e = (u, v) if u < v else (v, u)
        return e in self._present

    def apply_edge(self, e: Edge) -> None:
        u, v = e
        if u > v:
            u, v = v, u
        if (u, v) in self._present:
            raise DuplicateEdgeError(f"edge ({u}, {v}) already present")
        self._present.add((u, v))
        self.adjacency[u].append(v)
        self.adjacency[v].append(u)
        for w in (u, v):
            self.degree[w] += 1
            if self.degree[w] == self.threshold:
                self.below_threshold_count -= 1
        self.t += 1

    def min_degree_reached(self) -> bool:
        return self.below_threshold_count == 0

    def degrees_array(self) -> np.ndarray:
        return np.asarray(self.degree, dtype=np.int64)


def apply_edge(state: ProcessState, e: Edge) -> ProcessState:
    """Functional-style wrapper over ProcessState.apply_edge (mutates state)."""
    state.apply_edge(e)
    return state


def hitting_time(stream: EdgeStream, k: int) -> int:
    """Smallest t such that the graph of the first t edges has min degree >= k.

    Exact by construction: the monitor counts vertices below k, so the
    returned t is the first step at which the count hits zero (hence min
    degree at t-1 was < k).
    """
    if k < 1:
        raise InvalidParameterError(f"need k >= 1, got {k}")
    state = ProcessState(stream.n, threshold=k)
    for e in stream:
        state.apply_edge(e)
        if state.min_degree_reached():
            return state.t
    raise ExhaustedStreamError(
        f"stream exhausted after {state.t} edges before min degree {k}")


def expected_tau(n: int, k: int, omega: Optional[float] = None) -> float:
    """Reference point m = C(n,2) * p for the min-degree-k hitting time, with
    p = (ln n + (k-1) ln ln n - omega)/n.  omega defaults to ln ln ln n
    (clamped at 0 for small n where the iterated log is negative)."""
    ln_n = np.log(n)
    if omega is None:
        omega = default_omega(n)
    p = (ln_n + (k - 1) * np.log(ln_n) - omega) / n
    return n * (n - 1) / 2 * p


def default_omega(n: int) -> float:
    """Slowly diverging omega(n) = ln ln ln n, clamped to be nonnegative."""
    ln_n = float(np.log(n))
    if ln_n <= 1.0:
        return 0.0
    lnln = float(np.log(ln_n))
    if lnln <= 1.0:
        return 0.0
    return float(np.log(lnln))
