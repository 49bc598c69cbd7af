"""Online edge coloring state machine with q = 2*sigma internal colors.

Each arriving edge gets an irrevocable internal color and is routed to one of
two pools per color: star edges (the expander backbone) or plus edges
("boosters", used later to close cycles).  The case analysis per edge uv:

* some endpoint still needs colors  ->  uniform color from the union of the
  endpoints' need lists, star pool;
* no need, but before the freeze time or neither endpoint is saturated
  ("full")  ->  uniform color over all q, star pool;
* no need, after the freeze, exactly one endpoint full  ->  the color
  minimizing the non-full endpoint's color degree (lowest index on ties),
  star pool;
* no need, after the freeze, both endpoints full  ->  uniform color, then a
  fair coin sends the edge to the star or the plus pool.

The full set is frozen once, when exactly t_eps = floor(eps * n * ln n)
edges have been colored: vertices whose every color degree is at least
d_full at that moment.  Plus edges therefore always join two full vertices,
and the first edge of any color at any vertex is always a star edge.

Internal colors c and c + sigma are merged afterwards into final color c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ContractViolationError, InvalidParameterError

Edge = tuple[int, int]

STAR = "star"
PLUS = "plus"


def full_degree_threshold(n: int, q: int, epsilon: float) -> int:
    """Per-color degree needed to count as full: max(1, floor(eps*ln(n)/(1000 q))).

    The asymptotic constant is far below 1 at any feasible n; clamping at 1
    keeps the intended semantics (every color present)."""
    return max(1, math.floor(epsilon * math.log(n) / (1000 * q)))


class ColoringState:
    """Mutable state of the online coloring over one process run."""

    def __init__(self, n: int, sigma: int, epsilon: float, seed,
                 d_full: Optional[int] = None):
        if sigma < 2:
            raise InvalidParameterError(f"need sigma >= 2, got {sigma}")
        if n < 3:
            raise InvalidParameterError(f"need n >= 3, got {n}")
        if epsilon <= 0:
            raise InvalidParameterError(f"need epsilon > 0, got {epsilon}")
        self.n = n
        self.sigma = sigma
        self.q = 2 * sigma
        self.epsilon = epsilon
        self.t_eps = math.floor(epsilon * n * math.log(n))
        self.d_full = full_degree_threshold(n, self.q, epsilon) if d_full is None else d_full
        self.rng = np.random.default_rng(seed)
        self.t = 0
        q = self.q
        self.deg = [[0] * q for _ in range(n)]       # per-vertex per-color degree
        self.need_mask = [(1 << q) - 1] * n          # bit c set <=> deg[v][c] == 0
        self.need_total = n * q                      # sum over v of |C_v|
        self.full: Optional[list[bool]] = None
        self.full_frozen_at: Optional[int] = None
        self.full_prime: Optional[list[bool]] = None
        self.full_prime_at: Optional[int] = None
        self.star_pools: list[list[tuple[int, int, int]]] = [[] for _ in range(q)]
        self.plus_pools: list[list[tuple[int, int, int]]] = [[] for _ in range(q)]
        self.flags: list[str] = []
        self._audit_every = 1000

    # -- derived views ---------------------------------------------------

    def need_list(self, v: int) -> list[int]:
        m = self.need_mask[v]
        return [c for c in range(self.q) if m >> c & 1]

    def need_count(self, v: int) -> int:
        return bin(self.need_mask[v]).count("1")

    def colored_edges(self) -> int:
        return sum(len(p) for p in self.star_pools) + sum(len(p) for p in self.plus_pools)

    def _full_set_now(self) -> list[bool]:
        d = self.d_full
        return [min(row) >= d for row in self.deg]

    # -- protocol ---------------------------------------------------------

    def maybe_snapshot_full_prime(self) -> None:
        if self.full_prime is None and self.t == self.t_eps // 2:
            self.full_prime = self._full_set_now()
            self.full_prime_at = self.t

    def freeze_full(self, early: bool = False) -> list[bool]:
        """Freeze the full set.  Must be called exactly once, when t == t_eps;
        ``early`` permits the degenerate guard (process stopped before t_eps),
        which flags the run."""
        if self.full is not None:
            raise ContractViolationError("full set already frozen")
        if self.t != self.t_eps and not early:
            raise ContractViolationError(
                f"freeze at t={self.t}, expected t_eps={self.t_eps}")
        if early and self.t != self.t_eps:
            self.flags.append("eps-too-large")
            if self.full_prime is None:
                self.full_prime = self._full_set_now()
                self.full_prime_at = self.t
        self.full = self._full_set_now()
        self.full_frozen_at = self.t
        return self.full

    def color_edge(self, e: Edge, t: int) -> tuple[int, str]:
        """Color one arriving edge; returns (internal color, pool)."""
        if t != self.t + 1:
            raise ContractViolationError(f"edge at t={t}, state expects {self.t + 1}")
        u, v = e
        q = self.q
        union = self.need_mask[u] | self.need_mask[v]
        pool = STAR
        if union:
            # uniform over the joint need list
            choices = [c for c in range(q) if union >> c & 1]
            color = choices[int(self.rng.integers(len(choices)))]
            step5 = True
        else:
            step5 = False
            full = self.full
            if t <= self.t_eps or full is None or (not full[u] and not full[v]):
                color = int(self.rng.integers(q))
            elif full[u] != full[v]:
                w = v if full[u] else u
                row = self.deg[w]
                color = min(range(q), key=lambda c: (row[c], c))
            else:
                color = int(self.rng.integers(q))
                if int(self.rng.integers(2)):
                    pool = PLUS
        before = self.need_total
        for w in (u, v):
            row = self.deg[w]
            if row[color] == 0:
                self.need_mask[w] &= ~(1 << color)
                self.need_total -= 1
            row[color] += 1
        if step5 and not self.need_total < before:
            raise ContractViolationError("need total failed to decrease on a "
                                         "needy-edge coloring")
        (self.star_pools if pool == STAR else self.plus_pools)[color].append((t, u, v))
        self.t = t
        self.maybe_snapshot_full_prime()
        if t % self._audit_every == 0:
            self.audit_needs()
        return color, pool

    # -- audits -------------------------------------------------------------

    def audit_needs(self) -> None:
        """Recompute the need lists from the degree table and compare."""
        total = 0
        for v in range(self.n):
            mask = 0
            for c, d in enumerate(self.deg[v]):
                if d == 0:
                    mask |= 1 << c
            if mask != self.need_mask[v]:
                raise ContractViolationError(
                    f"need list out of sync at vertex {v}: "
                    f"{mask:b} vs {self.need_mask[v]:b}")
            total += bin(mask).count("1")
        if total != self.need_total:
            raise ContractViolationError(
                f"need total out of sync: {total} vs {self.need_total}")

    def audit_pools(self) -> None:
        """Structural pool invariants: each colored edge in exactly one pool,
        plus edges join full vertices, the first edge of each (vertex, color)
        is a star edge."""
        if self.colored_edges() != self.t:
            raise ContractViolationError("pool sizes do not sum to t")
        seen: set[Edge] = set()
        first_time: dict[tuple[int, int], tuple[int, str]] = {}
        for pools, tag in ((self.star_pools, STAR), (self.plus_pools, PLUS)):
            for c, pool in enumerate(pools):
                for (t, u, v) in pool:
                    key = (u, v) if u < v else (v, u)
                    if key in seen:
                        raise ContractViolationError(f"edge {key} in two pools")
                    seen.add(key)
                    if tag == PLUS:
                        if self.full is None or not (self.full[u] and self.full[v]):
                            raise ContractViolationError(
                                f"plus edge {key} with a non-full endpoint")
                    for w in (u, v):
                        cur = first_time.get((w, c))
                        if cur is None or t < cur[0]:
                            first_time[(w, c)] = (t, tag)
        for (w, c), (t, tag) in first_time.items():
            if tag != STAR:
                raise ContractViolationError(
                    f"first color-{c} edge at vertex {w} is a plus edge")

    def dump_colored(self, path) -> None:
        """Text dump, one line per edge: ``t u v internal_color pool``."""
        rows = []
        for pools, tag in ((self.star_pools, STAR), (self.plus_pools, PLUS)):
            for c, pool in enumerate(pools):
                rows.extend((t, u, v, c, tag) for (t, u, v) in pool)
        rows.sort()
        with open(path, "w") as fh:
            for t, u, v, c, tag in rows:
                fh.write(f"{t} {u} {v} {c} {tag}\n")


def init_coloring(n: int, sigma: int, epsilon: float, seed,
                  d_full: Optional[int] = None) -> ColoringState:
    """Fresh coloring state; the coloring RNG is seeded independently of the
    process RNG (callers derive both from a master seed)."""
    return ColoringState(n, sigma, epsilon, seed, d_full=d_full)


def freeze_full(state: ColoringState, early: bool = False) -> list[bool]:
    return state.freeze_full(early=early)


def color_edge(state: ColoringState, e: Edge, t: int) -> tuple[int, str]:
    return state.color_edge(e, t)


@dataclass
class MergedColoring:
    """Final coloring after identifying internal colors c and c + sigma."""

    n: int
    sigma: int
    star: list[list[tuple[int, int, int]]]   # per merged color, (t, u, v), arrival order
    plus: list[list[tuple[int, int, int]]]
    internal_star: list[list[tuple[int, int, int]]] = field(repr=False, default_factory=list)

    def star_edges(self, c: int) -> list[Edge]:
        return [(u, v) for (_, u, v) in self.star[c]]

    def booster_edges(self, c: int) -> list[Edge]:
        return [(u, v) for (_, u, v) in self.plus[c]]

    def star_degrees(self, c: int) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        for (_, u, v) in self.star[c]:
            d[u] += 1
            d[v] += 1
        return d

    def total_edges(self) -> int:
        return sum(len(p) for p in self.star) + sum(len(p) for p in self.plus)


def merge_colors(state: ColoringState) -> MergedColoring:
    """Identify internal colors mod sigma; arrival order is preserved inside
    each merged pool (the two internal pools are interleaved by time)."""
    sigma = state.sigma
    star, plus = [], []
    for c in range(sigma):
        star.append(sorted(state.star_pools[c] + state.star_pools[c + sigma]))
        plus.append(sorted(state.plus_pools[c] + state.plus_pools[c + sigma]))
    return MergedColoring(n=state.n, sigma=sigma, star=star, plus=plus,
                          internal_star=[list(p) for p in state.star_pools])
