"""Rotation-based Hamilton cycle construction inside one merged color class.

The engine grows a path in the star subgraph (expander backbone), using
rotations with a fixed endpoint to multiply reachable endpoints, simple
extensions whenever a rotated endpoint sees a vertex off the path, and the
class's booster edges -- scanned in arrival order, each examined at most once
over the whole run -- to close cycles.  A closed non-spanning cycle is
reopened into a longer path through any star edge leaving it, which exists
whenever the star subgraph is connected.

The endpoint search keeps one witness path per discovered endpoint (parent
pointers over rotations) and reconstructs paths by replaying suffix
reversals on a numpy array.  A completed search with no extension available
satisfies the expansion bound |N*(END) \\ {fixed}| < 2|END|; this is checked
after every such search and a violation is treated as an internal error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EngineInvariantError, InvalidParameterError, InvalidRotationError

Edge = tuple[int, int]


class ColorClassGraph:
    """Star adjacency plus the arrival-ordered booster list of one class."""

    def __init__(self, n: int, star_edges: Sequence[Edge], boosters: Sequence[Edge]):
        if n < 3:
            raise InvalidParameterError(f"need n >= 3, got {n}")
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.adj_set: list[set[int]] = [set() for _ in range(n)]
        self.star_edges: list[Edge] = []
        for u, v in star_edges:
            u, v = (u, v) if u < v else (v, u)
            if v in self.adj_set[u]:
                raise InvalidParameterError(f"duplicate star edge ({u}, {v})")
            self.adj_set[u].add(v)
            self.adj_set[v].add(u)
            self.star_edges.append((u, v))
        for lst, s in zip(self.adj, self.adj_set):
            lst.extend(sorted(s))
        self.boosters: list[Edge] = []
        for u, v in boosters:
            u, v = (u, v) if u < v else (v, u)
            if v in self.adj_set[u]:
                raise InvalidParameterError(
                    f"booster ({u}, {v}) duplicates a star edge")
            self.boosters.append((u, v))
        self._connected: Optional[bool] = None

    def has_star_edge(self, u: int, v: int) -> bool:
        return v in self.adj_set[u]

    def star_degree(self, v: int) -> int:
        return len(self.adj[v])

    def is_connected(self) -> bool:
        """Whether the star subgraph spans all n vertices in one component."""
        if self._connected is None:
            seen = bytearray(self.n)
            seen[0] = 1
            stack = [0]
            count = 1
            while stack:
                u = stack.pop()
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = 1
                        count += 1
                        stack.append(w)
            self._connected = count == self.n
        return self._connected


def rotate(path: Sequence[int], i: int,
           graph: Optional[ColorClassGraph] = None) -> list[int]:
    """Rotate (x_1,...,x_k) around pivot position i (1-based) into
    (x_1,...,x_i,x_k,...,x_{i+1}), keeping x_1 fixed.

    Requires 2 <= i <= k-2; when a graph is supplied, the chord {x_i, x_k}
    must be a star edge.
    """
    k = len(path)
    if not 2 <= i <= k - 2:
        raise InvalidRotationError(f"pivot {i} outside [2, {k - 2}]")
    if graph is not None and not graph.has_star_edge(path[i - 1], path[k - 1]):
        raise InvalidRotationError(
            f"chord ({path[i - 1]}, {path[k - 1]}) is not a star edge")
    return list(path[:i]) + list(path[i:][::-1])


class _RotationSearch:
    """Breadth-first closure over rotations from a root path, fixed end first.

    Discovers each reachable endpoint once, with a (parent, pivot) record
    sufficient to rebuild its witness path.  Extension opportunities (an
    endpoint star-adjacent to a vertex off the path) and closure chords (an
    endpoint star-adjacent to the fixed end) are noted as soon as the
    endpoint is discovered; callers decide whether to act or keep expanding.
    """

    def __init__(self, g: ColorClassGraph, root: np.ndarray, on_path):
        self.g = g
        self.root = root
        self.k = len(root)
        self.fixed = int(root[0])
        self.on_path = on_path
        self.root_pos = np.full(g.n, -1, dtype=np.int32)
        self.root_pos[root] = np.arange(self.k, dtype=np.int32)
        self.node_end: list[int] = []
        self.node_parent: list[int] = []
        self.node_pivot: list[int] = []
        self.node_of = np.full(g.n, -1, dtype=np.int32)
        self.head = 0
        self.exhausted = self.k < 2
        self.extension: Optional[tuple[int, int]] = None  # (node, outside vertex)
        self.closure_node: Optional[int] = None
        self.posa_end_count: Optional[int] = None
        self.posa_nbr_count: Optional[int] = None
        if self.k >= 2:
            self._add_node(int(root[-1]), -1, -1)

    def _add_node(self, endpoint: int, parent: int, pivot: int) -> int:
        idx = len(self.node_end)
        self.node_end.append(endpoint)
        self.node_parent.append(parent)
        self.node_pivot.append(pivot)
        self.node_of[endpoint] = idx
        if self.extension is None:
            for w in self.g.adj[endpoint]:
                if not self.on_path[w]:
                    self.extension = (idx, w)
                    break
        if (self.closure_node is None and self.k >= 3
                and self.fixed in self.g.adj_set[endpoint]):
            self.closure_node = idx
        return idx

    def endpoints(self) -> set[int]:
        return set(self.node_end)

    def reconstruct(self, idx: int) -> tuple[np.ndarray, np.ndarray]:
        """Witness path for node idx as (vertex array, position array)."""
        pivots = []
        j = idx
        while j > 0:
            pivots.append(self.node_pivot[j])
            j = self.node_parent[j]
        pa = self.root.copy()
        pos = self.root_pos.copy()
        k = self.k
        for w in reversed(pivots):
            jw = int(pos[w])
            pa[jw + 1:] = pa[jw + 1:][::-1]
            pos[pa[jw + 1:]] = np.arange(jw + 1, k, dtype=np.int32)
        return pa, pos

    def expand_one(self) -> None:
        """Expand the next queued endpoint: apply every valid star chord from
        its witness path and enqueue newly reached endpoints."""
        if self.head >= len(self.node_end):
            self.exhausted = True
            return
        idx = self.head
        self.head += 1
        b = self.node_end[idx]
        if self.k < 4:
            if self.head >= len(self.node_end):
                self.exhausted = True
            return
        pa, pos = self.reconstruct(idx)
        kmax = self.k - 3
        for w in self.g.adj[b]:
            j = int(pos[w])
            if 1 <= j <= kmax:
                cand = int(pa[j + 1])
                if self.node_of[cand] < 0:
                    self._add_node(cand, idx, w)
        if self.head >= len(self.node_end):
            self.exhausted = True

    def run_to_exhaustion(self) -> None:
        while not self.exhausted:
            self.expand_one()

    def find(self, target: int) -> Optional[int]:
        """Expand (resumably) until target is a discovered endpoint; returns
        its node index, or None if the closure exhausts without reaching it.
        Stops early if an extension opportunity appears (caller checks)."""
        while True:
            t = int(self.node_of[target])
            if t >= 0:
                return t
            if self.exhausted:
                return None
            if self.extension is not None:
                return None
            self.expand_one()

    def check_posa_bound(self) -> None:
        """On a completed no-extension search, the star neighborhood of the
        endpoint set (fixed end excluded) must be smaller than twice the
        endpoint set."""
        ends = self.endpoints()
        nbrs: set[int] = set()
        for b in ends:
            nbrs |= self.g.adj_set[b]
        nbrs -= ends
        nbrs.discard(self.fixed)
        self.posa_end_count = len(ends)
        self.posa_nbr_count = len(nbrs)
        if len(nbrs) >= 2 * len(ends):
            raise EngineInvariantError(
                f"expansion bound violated: |N*(END)|={len(nbrs)} "
                f">= 2*|END|={2 * len(ends)}")


@dataclass
class RotationTree:
    """Result of a full rotation closure from one fixed endpoint."""

    fixed: int
    endpoints: set[int]
    extension: Optional[tuple[int, int]]  # (endpoint, outside vertex)
    end_count: int
    neighbor_count: Optional[int]
    _search: _RotationSearch = field(repr=False)

    def path_to(self, endpoint: int) -> list[int]:
        idx = int(self._search.node_of[endpoint])
        if idx < 0:
            raise InvalidParameterError(f"{endpoint} is not a reachable endpoint")
        pa, _ = self._search.reconstruct(idx)
        return [int(v) for v in pa]


def compute_end_set(g: ColorClassGraph, path: Sequence[int],
                    fixed: int) -> RotationTree:
    """All endpoints reachable from the path by rotations keeping ``fixed``
    fixed, with witness reconstruction data.

    Always runs the closure to exhaustion; any extension opportunity seen
    along the way is reported on the tree rather than short-circuiting, so
    the endpoint set is complete either way.
    """
    if fixed == path[-1]:
        path = list(path)[::-1]
    if fixed != path[0]:
        raise InvalidParameterError(f"{fixed} is not an endpoint of the path")
    on_path = bytearray(g.n)
    for v in path:
        on_path[v] = 1
    search = _RotationSearch(g, np.asarray(path, dtype=np.int32), on_path)
    search.run_to_exhaustion()
    ext = None
    if search.extension is not None:
        node, w = search.extension
        ext = (search.node_end[node], w)
    else:
        search.check_posa_bound()
    return RotationTree(fixed=fixed, endpoints=search.endpoints(), extension=ext,
                        end_count=len(search.node_end),
                        neighbor_count=search.posa_nbr_count, _search=search)


def extend_path(g: ColorClassGraph, tree: RotationTree) -> Optional[list[int]]:
    """Extend by one vertex using star edges only: take the recorded
    extension opportunity if any, else look for an off-path neighbor of the
    fixed endpoint.  None when no extension exists."""
    if tree.extension is not None:
        b, w = tree.extension
        return tree.path_to(b) + [w]
    search = tree._search
    for w in g.adj[tree.fixed]:
        if not search.on_path[w]:
            return [w] + [int(v) for v in search.root]
    return None


@dataclass
class CycleResult:
    outcome: str  # "hamilton-cycle" | "failure"
    cycle: Optional[list[int]]
    rounds: int
    boosters_examined: int
    boosters_applied: int
    restarts: int
    final_path_len: int
    fail_reason: Optional[str] = None
    posa_checks: int = 0

    @property
    def success(self) -> bool:
        return self.outcome == "hamilton-cycle"


class HamiltonEngine:
    """Drives rounds of greedy extension, rotation search, star closures and
    booster scans until a Hamilton cycle is found or the class is exhausted.

    Deterministic given (graph, seed, flags).  The booster cursor advances
    monotonically across rounds and restarts: each booster is examined at
    most once, in arrival order.
    """

    def __init__(self, g: ColorClassGraph, seed=0, strict_boosters: bool = False,
                 max_restarts: int = 4):
        self.g = g
        self.rng = np.random.default_rng(seed)
        self.strict_boosters = strict_boosters
        self.max_restarts = max_restarts
        self.cursor = 0
        self.rounds = 0
        self.boosters_applied = 0
        self.restarts_used = 0
        self.posa_checks = 0
        self.path: list[int] = []
        self.on_path = bytearray(g.n)
        self.last_search: Optional[_RotationSearch] = None
        self._used_boosters: set[Edge] = set()
        self._sec_cache: dict[int, _RotationSearch] = {}

    # -- path plumbing -------------------------------------------------

    def set_path(self, path: Sequence[int]) -> None:
        self.path = [int(v) for v in path]
        self.on_path = bytearray(self.g.n)
        for v in self.path:
            self.on_path[v] = 1
        self._sec_cache = {}

    def _seed_path(self) -> None:
        start = int(self.rng.integers(self.g.n))
        self.set_path([start])

    def _greedy_extend(self) -> None:
        # Extend the tail to maximality, flip, extend again; star edges only.
        for _ in range(2):
            cands = [w for w in self.g.adj[self.path[-1]] if not self.on_path[w]]
            while cands:
                w = cands[int(self.rng.integers(len(cands)))] if len(cands) > 1 else cands[0]
                self.path.append(w)
                self.on_path[w] = 1
                cands = [x for x in self.g.adj[w] if not self.on_path[x]]
            self.path.reverse()

    # -- committing moves ----------------------------------------------

    def _commit_extension(self, search: _RotationSearch) -> None:
        node, w = search.extension
        pa, _ = search.reconstruct(node)
        self.path = [int(v) for v in pa] + [w]
        self.on_path[w] = 1

    def _commit_cycle(self, pa: np.ndarray, pos: np.ndarray,
                      chord_is_booster: bool) -> tuple[str, Optional[list[int]]]:
        """Close the witness path with the chord {pa[0], pa[-1]}; either a
        Hamilton cycle, or reopen through the first star edge leaving the
        cycle (scanning cycle vertices in index order)."""
        k = len(pa)
        chord = (int(pa[0]), int(pa[-1]))
        if k == self.g.n:
            if chord_is_booster:
                self._used_boosters.add(self._canon(chord))
            cycle = [int(v) for v in pa]
            self._verify_cycle(cycle)
            return "hamilton", cycle
        z = w_out = -1
        for v in range(self.g.n):
            if self.on_path[v]:
                for w in self.g.adj[v]:
                    if not self.on_path[w]:
                        z, w_out = v, w
                        break
                if z >= 0:
                    break
        if z < 0:
            raise EngineInvariantError("no escape edge from a non-spanning cycle "
                                       "in a connected star graph")
        jz = int(pos[z])
        head = pa[jz::-1]
        tail = pa[k - 1:jz:-1]
        self.path = [w_out] + [int(v) for v in head] + [int(v) for v in tail]
        self.on_path[w_out] = 1
        if chord_is_booster and jz != k - 1:
            # jz == k-1 drops the chord again; otherwise it is now a path edge.
            self._used_boosters.add(self._canon(chord))
        return "extended", None

    @staticmethod
    def _canon(e: Edge) -> Edge:
        return e if e[0] < e[1] else (e[1], e[0])

    def _verify_cycle(self, cycle: list[int]) -> None:
        n = self.g.n
        if len(cycle) != n or len(set(cycle)) != n:
            raise EngineInvariantError("reported cycle does not span all vertices")
        for i in range(n):
            u, v = cycle[i], cycle[(i + 1) % n]
            if not (self.g.has_star_edge(u, v)
                    or self._canon((u, v)) in self._used_boosters):
                raise EngineInvariantError(
                    f"cycle edge ({u}, {v}) is not a star edge or used booster")

    # -- round machinery -------------------------------------------------

    def rotation_round(self) -> tuple[str, Optional[list[int]]]:
        """One round: greedy extension, then rotation search acting on the
        first extension or (unless strict) star closure found.  Returns one
        of ("hamilton", cycle), ("extended", None), ("stalled", None); in the
        stalled case `self.last_search` holds the completed closure."""
        self.rounds += 1
        self._sec_cache = {}
        self._greedy_extend()
        search = _RotationSearch(
            self.g, np.asarray(self.path, dtype=np.int32), self.on_path)
        while True:
            if search.extension is not None:
                self._commit_extension(search)
                return "extended", None
            if search.closure_node is not None and not self.strict_boosters:
                pa, pos = search.reconstruct(search.closure_node)
                return self._commit_cycle(pa, pos, chord_is_booster=False)
            if search.exhausted:
                search.check_posa_bound()
                self.posa_checks += 1
                self.last_search = search
                return "stalled", None
            search.expand_one()

    def _secondary_search(self, main: _RotationSearch, x: int) -> _RotationSearch:
        sec = self._sec_cache.get(x)
        if sec is None:
            pa, _ = main.reconstruct(int(main.node_of[x]))
            root = pa[::-1].copy()
            sec = _RotationSearch(self.g, root, self.on_path)
            self._sec_cache[x] = sec
        return sec

    def try_boosters(self, main: Optional[_RotationSearch] = None,
                     ) -> tuple[str, Optional[list[int]]]:
        """Scan boosters from the cursor.  A booster {x, y} applies when x is
        a realizable endpoint (the fixed end or a discovered one) and y lies
        in the endpoint closure of the corresponding witness path; endpoint
        sets for non-fixed x are computed on demand and cached per round.
        Returns ("hamilton", cycle) / ("extended", None) / ("exhausted", None).
        """
        if main is None:
            main = self.last_search
        if main is None:
            raise InvalidParameterError("no completed rotation search available")
        fixed = main.fixed
        while self.cursor < len(self.g.boosters):
            x, y = self.g.boosters[self.cursor]
            self.cursor += 1
            if not (self.on_path[x] and self.on_path[y]):
                continue
            for (s, t) in ((x, y), (y, x)):
                if s == fixed:
                    node = int(main.node_of[t])
                    if node >= 0:
                        pa, pos = main.reconstruct(node)
                        self.boosters_applied += 1
                        return self._commit_cycle(pa, pos, chord_is_booster=True)
                elif main.node_of[s] >= 0:
                    sec = self._secondary_search(main, s)
                    node = sec.find(t)
                    if sec.extension is not None:
                        self._commit_extension(sec)
                        return "extended", None
                    if node is not None:
                        pa, pos = sec.reconstruct(node)
                        self.boosters_applied += 1
                        return self._commit_cycle(pa, pos, chord_is_booster=True)
                    if sec.exhausted:
                        sec.check_posa_bound()
                        self.posa_checks += 1
        return "exhausted", None

    def _deep_star_closures(self, main: _RotationSearch,
                            cap: int = 64) -> tuple[str, Optional[list[int]]]:
        """Last resort on a stalled round with no boosters left: look for a
        second-level star closure, a chord {b, y} with b in END(a) and y in
        END(b).  Secondary searches run in endpoint-discovery order and
        short-circuit on any extension they expose.  Capped to bound the cost
        of a genuinely stuck class."""
        checked = 0
        for idx in range(len(main.node_end)):
            if checked >= cap:
                break
            b = main.node_end[idx]
            sec = self._sec_cache.get(b)
            if sec is None:
                sec = self._secondary_search(main, b)
            checked += 1
            while True:
                if sec.extension is not None:
                    self._commit_extension(sec)
                    return "extended", None
                if sec.closure_node is not None:
                    pa, pos = sec.reconstruct(sec.closure_node)
                    return self._commit_cycle(pa, pos, chord_is_booster=False)
                if sec.exhausted:
                    if sec.posa_end_count is None:
                        sec.check_posa_bound()
                        self.posa_checks += 1
                    break
                sec.expand_one()
        return "stuck", None

    def _attempt(self) -> tuple[str, Optional[list[int]]]:
        self._seed_path()
        while True:
            status, cycle = self.rotation_round()
            if status == "hamilton":
                return status, cycle
            if status == "extended":
                continue
            status, cycle = self.try_boosters()
            if status == "hamilton":
                return status, cycle
            if status == "extended":
                continue
            if not self.strict_boosters:
                status, cycle = self._deep_star_closures(self.last_search)
                if status == "hamilton":
                    return status, cycle
                if status == "extended":
                    continue
            return "stuck", None

    def run(self) -> CycleResult:
        if not self.g.is_connected():
            return CycleResult(
                outcome="failure", cycle=None, rounds=0,
                boosters_examined=self.cursor, boosters_applied=0,
                restarts=0, final_path_len=0,
                fail_reason="star-subgraph-disconnected")
        # Degree certificate: a Hamilton cycle needs two class edges per
        # vertex, boosters included.
        total_deg = [len(a) for a in self.g.adj]
        for u, v in self.g.boosters:
            total_deg[u] += 1
            total_deg[v] += 1
        if min(total_deg) < 2:
            return CycleResult(
                outcome="failure", cycle=None, rounds=0,
                boosters_examined=self.cursor, boosters_applied=0,
                restarts=0, final_path_len=0,
                fail_reason="degree-below-two-certificate")
        best_len = 0
        for attempt in range(1 + self.max_restarts):
            if attempt > 0:
                self.restarts_used += 1
            status, cycle = self._attempt()
            best_len = max(best_len, len(self.path))
            if status == "hamilton":
                return CycleResult(
                    outcome="hamilton-cycle", cycle=cycle, rounds=self.rounds,
                    boosters_examined=self.cursor,
                    boosters_applied=self.boosters_applied,
                    restarts=self.restarts_used, final_path_len=self.g.n,
                    posa_checks=self.posa_checks)
        return CycleResult(
            outcome="failure", cycle=None, rounds=self.rounds,
            boosters_examined=self.cursor, boosters_applied=self.boosters_applied,
            restarts=self.restarts_used, final_path_len=best_len,
            fail_reason="boosters-exhausted", posa_checks=self.posa_checks)


def try_boosters(g: ColorClassGraph, engine: HamiltonEngine,
                 ) -> tuple[str, Optional[list[int]]]:
    """Module-level wrapper over the engine's booster scan."""
    assert engine.g is g
    return engine.try_boosters()


def find_hamilton_cycle(g: ColorClassGraph, seed=0, strict_boosters: bool = False,
                        max_restarts: int = 4) -> CycleResult:
    """Run the full procedure on one color class graph."""
    engine = HamiltonEngine(g, seed=seed, strict_boosters=strict_boosters,
                            max_restarts=max_restarts)
    return engine.run()
