"""Trial orchestration: run the process + online coloring to the hitting
time, extract one Hamilton cycle per merged color, validate, and aggregate
over seeded Monte Carlo trials.

Reproducibility contract: (config, master seed) determine every byte of the
trial log, independent of worker count.  Per-trial seeds derive from the
master seed and trial index through numpy SeedSequence spawn keys; process,
coloring, engine and validation randomness use separate child streams.
Wall-clock timings are recorded only when explicitly enabled, so default
logs are byte-stable across runs.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import multiprocessing
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import validators as V
from .coloring import ColoringState, init_coloring, merge_colors
from .errors import InvalidParameterError
from .posa import ColorClassGraph, find_hamilton_cycle
from .process import ProcessState, default_omega, new_stream

VALIDATION_LEVELS = ("off", "fast", "full")


@dataclass
class TrialConfig:
    n: int = 1024
    sigma: int = 2
    epsilon: float = 0.1
    seed: int = 0
    trials: int = 1
    parallelism: int = 1
    validate: str = "fast"
    strict_boosters: bool = False
    stream_mode: str = "full-shuffle"
    # threshold overrides; None means the documented default formula
    d_full_override: Optional[int] = None
    omega_override: Optional[float] = None
    delta_exponent: float = 0.9
    small_denominator: Optional[float] = None
    expansion_samples: int = 1000
    expansion_max_size: Optional[int] = None
    engine_restarts: int = 4
    record_timings: bool = False
    # output paths
    out: Optional[str] = None
    summary: Optional[str] = None
    dump_edges: Optional[str] = None
    dump_cycles: Optional[str] = None
    dump_coloring: Optional[str] = None

    def __post_init__(self):
        if self.n < 3:
            raise InvalidParameterError(f"n must be >= 3, got {self.n}")
        if self.sigma < 2:
            raise InvalidParameterError(f"sigma must be >= 2, got {self.sigma}")
        if not 0 < self.epsilon:
            raise InvalidParameterError("epsilon must be positive")
        if self.trials < 1 or self.parallelism < 1:
            raise InvalidParameterError("trials and parallelism must be >= 1")
        if self.validate not in VALIDATION_LEVELS:
            raise InvalidParameterError(
                f"validate must be one of {VALIDATION_LEVELS}, got {self.validate!r}")

    @property
    def q(self) -> int:
        return 2 * self.sigma

    def omega(self) -> float:
        return self.omega_override if self.omega_override is not None \
            else default_omega(self.n)

    def m_reference(self) -> int:
        """Reference edge count m = C(n,2) p for validator snapshots."""
        ln_n = math.log(self.n)
        p = (ln_n + (self.q - 1) * math.log(ln_n) - self.omega()) / self.n
        return max(1, round(self.n * (self.n - 1) / 2 * p))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrialConfig":
        return cls(**d)


def trial_seed_sequence(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))


@dataclass
class TrialReport:
    trial: int
    seed: int
    n: int
    sigma: int
    tau: int
    colors: list[dict]
    validators: dict
    timings_ms: dict
    flags: list[str] = field(default_factory=list)
    audit: dict = field(default_factory=dict)

    @property
    def full_success(self) -> bool:
        return all(c["success"] for c in self.colors)

    def to_json_dict(self) -> dict:
        return {
            "trial": self.trial, "seed": self.seed, "n": self.n,
            "sigma": self.sigma, "tau": self.tau, "colors": self.colors,
            "validators": self.validators, "timings_ms": self.timings_ms,
            "flags": self.flags, "audit": self.audit,
        }


def _cycle_checksum(cycle: Sequence[int]) -> str:
    payload = ",".join(str(v) for v in cycle).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def run_trial(config: TrialConfig, trial_index: int = 0) -> TrialReport:
    """One full pipeline run.  Raises on any hard-invariant violation; engine
    failures are recorded per color, not raised."""
    ss = trial_seed_sequence(config.seed, trial_index)
    seed_proc, seed_col, seed_eng, seed_val = ss.spawn(4)
    trial_seed = int(ss.generate_state(1, dtype=np.uint64)[0])
    timings: dict[str, float] = {}
    t_start = time.perf_counter()

    n, sigma, q = config.n, config.sigma, config.q
    stream = new_stream(n, seed_proc, mode=config.stream_mode)
    state = init_coloring(n, sigma, config.epsilon, seed_col,
                          d_full=config.d_full_override)
    proc = ProcessState(n, threshold=q)
    m_ref = config.m_reference()

    edges: list[tuple[int, int]] = []
    snap_teps: Optional[np.ndarray] = None
    snap_m: Optional[tuple[np.ndarray, list[int], int]] = None
    below_before_last = -1
    t = 0
    for e in stream:
        t += 1
        below_before_last = proc.below_threshold_count
        proc.apply_edge(e)
        edges.append(e)
        stopping = proc.min_degree_reached()
        if stopping and state.full is None and t - 1 < state.t_eps:
            state.freeze_full(early=True)   # degenerate guard: freeze at tau-1
        state.color_edge(e, t)
        if t == state.t_eps and state.full is None:
            state.freeze_full()
        if t == state.t_eps:
            snap_teps = proc.degrees_array()
        if t == m_ref:
            snap_m = (proc.degrees_array(),
                      [state.need_count(v) for v in range(n)], t)
        if stopping:
            break
    tau = t
    flags = list(state.flags)
    if snap_m is None:  # process stopped before the reference time m
        snap_m = (proc.degrees_array(),
                  [state.need_count(v) for v in range(n)], tau)
        flags.append("snapshot-at-tau")
    if snap_teps is None:
        snap_teps = proc.degrees_array()

    # hitting-time minimality, exact, every trial
    if below_before_last <= 0:
        raise InvalidParameterError("hitting time not minimal: previous step "
                                    "already had min degree >= threshold")
    assert min(proc.degree) >= q
    state.audit_needs()
    state.audit_pools()
    timings["process_coloring"] = (time.perf_counter() - t_start) * 1000

    t_phase = time.perf_counter()
    merged = merge_colors(state)
    assert merged.total_edges() == tau, "merged classes must partition all edges"

    colors: list[dict] = []
    cycles: list[Optional[list[int]]] = []
    class_edge_sets: list[set] = []
    engine_seeds = seed_eng.spawn(sigma)
    for c in range(sigma):
        star_edges = merged.star_edges(c)
        booster_edges = merged.booster_edges(c)
        g = ColorClassGraph(n, star_edges, booster_edges)
        res = find_hamilton_cycle(g, seed=engine_seeds[c],
                                  strict_boosters=config.strict_boosters,
                                  max_restarts=config.engine_restarts)
        entry = {
            "success": bool(res.success),
            "rounds": res.rounds,
            "boosters_used": res.boosters_examined,
            "boosters_applied": res.boosters_applied,
            "restarts": res.restarts,
            "posa_checks": res.posa_checks,
        }
        class_set = set(map(frozenset, star_edges)) | set(map(frozenset, booster_edges))
        class_edge_sets.append(class_set)
        if res.success:
            cyc = res.cycle
            # re-verify: Hamiltonian, monochromatic
            assert len(cyc) == n and len(set(cyc)) == n
            for i in range(n):
                assert frozenset((cyc[i], cyc[(i + 1) % n])) in class_set, \
                    "cycle edge outside its color class"
            entry["cycle_sha256"] = _cycle_checksum(cyc)
        else:
            entry["fail_reason"] = res.fail_reason
        cycles.append(res.cycle)
        colors.append(entry)
    # pairwise edge-disjointness across reported cycles, from raw edge sets
    cycle_edge_sets = []
    for cyc in cycles:
        if cyc is None:
            cycle_edge_sets.append(set())
        else:
            cycle_edge_sets.append(
                {frozenset((cyc[i], cyc[(i + 1) % n])) for i in range(n)})
    for i in range(sigma):
        for j in range(i + 1, sigma):
            assert not (cycle_edge_sets[i] & cycle_edge_sets[j]), \
                "cycles share an edge across colors"
    timings["hamilton"] = (time.perf_counter() - t_phase) * 1000

    t_phase = time.perf_counter()
    checks = _run_validators(config, state, merged, proc, edges, tau,
                             snap_teps, snap_m, seed_val)
    timings["validators"] = (time.perf_counter() - t_phase) * 1000

    audit = {
        "hitting_time_minimal": True,
        "need_monotone": True,          # enforced per edge inside the coloring
        "pool_partition": True,         # audit_pools() above
        "plus_endpoints_full": True,    # audit_pools() above
        "cycles_edge_disjoint": True,
        "sum_degrees": int(sum(proc.degree)),
    }
    report = TrialReport(
        trial=trial_index, seed=trial_seed, n=n, sigma=sigma, tau=tau,
        colors=colors, validators=checks,
        timings_ms={k: round(v, 3) for k, v in timings.items()}
        if config.record_timings else {},
        flags=flags, audit=audit)

    _maybe_dump(config, trial_index, stream, state, cycles, tau)
    return report


def _run_validators(config: TrialConfig, state: ColoringState, merged,
                    proc: ProcessState, edges, tau: int,
                    snap_teps: np.ndarray, snap_m, seed_val) -> dict:
    if config.validate == "off":
        return {}
    n, q = config.n, config.q
    checks: dict[str, dict] = {}
    merged_sd = [merged.star_degrees(c) for c in range(config.sigma)]
    star_adjs = [V.build_adjacency(n, merged.star_edges(c))
                 for c in range(config.sigma)]

    deg_m, needs_m, t_m = snap_m
    small = V.classify_small(deg_m, q, denominator=config.small_denominator)
    large_mask = small.large_mask

    internal_sd = np.zeros((n, q), dtype=np.int64)
    for c, pool in enumerate(state.star_pools):
        for (_, u, v) in pool:
            internal_sd[u][c] += 1
            internal_sd[v][c] += 1

    res = V.star_degree_check(merged_sd, internal_sd, large_mask, state.d_full)
    checks[res.name] = res.to_dict()
    conn_verdicts = []
    for c in range(config.sigma):
        r = V.connectivity_check(star_adjs[c], name=f"connectivity_{c}")
        conn_verdicts.append(r)
        checks[r.name] = r.to_dict()
    checks["connectivity"] = {
        "verdict": V.PASS if all(r.verdict == V.PASS for r in conn_verdicts)
        else V.FAIL,
        "details": {"per_color": [r.verdict for r in conn_verdicts]}}

    if config.validate != "full":
        return checks

    rng_val = np.random.default_rng(seed_val)
    omega = config.omega()

    res = V.max_degree_check(deg_m)
    checks[res.name] = res.to_dict()
    res = V.color_list_check(needs_m, deg_m, q)
    checks[res.name] = res.to_dict()
    res = V.degree_tail_check(deg_m, q, omega)
    checks[res.name] = res.to_dict()
    adj_m = V.build_adjacency(n, edges[:t_m])
    res = V.find_small_structures(adj_m, small)
    checks[res.name] = res.to_dict()
    res = V.full_size_check(
        n, q, config.epsilon,
        full_size=sum(state.full) if state.full is not None else 0,
        full_prime_size=sum(state.full_prime) if state.full_prime is not None else None,
        delta_exponent=config.delta_exponent)
    checks[res.name] = res.to_dict()
    res = V.pool_size_check(
        [len(p) for p in merged.star], [len(p) for p in merged.plus], n, q)
    checks[res.name] = res.to_dict()
    exp_verdicts = []
    for c in range(config.sigma):
        r = V.expansion_sampler(star_adjs[c], rng_val,
                                samples=config.expansion_samples,
                                max_size=config.expansion_max_size)
        exp_verdicts.append(r)
        checks[f"expansion_{c}"] = r.to_dict()
    checks["expansion"] = {
        "verdict": V.PASS if all(r.verdict == V.PASS for r in exp_verdicts)
        else V.FAIL,
        "details": {"per_color": [r.verdict for r in exp_verdicts]}}
    if state.full is not None and state.full_frozen_at is not None:
        res = V.post_teps_degree_check(
            snap_teps, deg_m, state.full,
            edges[state.full_frozen_at:t_m], n, q, config.epsilon)
        checks[res.name] = res.to_dict()
    res = V.tau_window_check(tau, n, q, omega)
    checks[res.name] = res.to_dict()
    return checks


def _maybe_dump(config: TrialConfig, trial_index: int, stream, state,
                cycles, tau: int) -> None:
    def path_for(base: str) -> str:
        return base if config.trials == 1 else f"{base}.t{trial_index}"

    if config.dump_edges:
        stream.dump(path_for(config.dump_edges), limit=tau)
    if config.dump_coloring:
        state.dump_colored(path_for(config.dump_coloring))
    if config.dump_cycles:
        with open(path_for(config.dump_cycles), "w") as fh:
            for c, cyc in enumerate(cycles):
                if cyc is not None:
                    fh.write(f"{c} " + " ".join(str(v) for v in cyc) + "\n")


@dataclass
class ExperimentSummary:
    n: int
    sigma: int
    epsilon: float
    trials: int
    full_success_rate: float
    per_color_success: list[float]
    mean_tau: float
    min_tau: int
    max_tau: int
    norm_tau: float
    validator_pass_rates: dict

    CSV_COLUMNS = ["n", "sigma", "epsilon", "trials", "full_success_rate",
                   "mean_tau", "min_tau", "max_tau", "norm_tau",
                   "connectivity_rate", "star_degree_rate", "expansion_rate",
                   "color_list_theta_rate", "max_degree_rate"]

    def csv_row(self) -> str:
        vals = [self.n, self.sigma, self.epsilon, self.trials,
                self.full_success_rate, self.mean_tau, self.min_tau,
                self.max_tau, self.norm_tau]
        for key in ("connectivity", "star_degree", "expansion",
                    "color_list_theta", "max_degree"):
            r = self.validator_pass_rates.get(key)
            vals.append("" if r is None else r)
        return ",".join(str(v) for v in vals)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def tau_normalizer(n: int, sigma: int) -> float:
    """n (ln n + (2 sigma - 1) ln ln n) / 2, the first-order location of the
    min-degree-2*sigma hitting time."""
    ln_n = math.log(n)
    return n * (ln_n + (2 * sigma - 1) * math.log(ln_n)) / 2


def summarize(records: Sequence[dict], config: TrialConfig) -> ExperimentSummary:
    """Aggregate trial records (exactly recomputable from the JSON log)."""
    trials = len(records)
    taus = [r["tau"] for r in records]
    sigma = config.sigma
    full = sum(1 for r in records if all(c["success"] for c in r["colors"]))
    per_color = [
        sum(1 for r in records if r["colors"][c]["success"]) / trials
        for c in range(sigma)]
    rates: dict[str, Optional[float]] = {}
    for key in ("connectivity", "star_degree", "expansion",
                "color_list_theta", "max_degree", "small_structures",
                "pool_size", "full_size", "degree_tail", "tau_window",
                "post_teps_degree"):
        applicable = [r for r in records
                      if key in r.get("validators", {})
                      and r["validators"][key]["verdict"] != V.SKIPPED]
        if applicable:
            rates[key] = sum(
                1 for r in applicable
                if r["validators"][key]["verdict"] == V.PASS) / len(applicable)
        else:
            rates[key] = None
    return ExperimentSummary(
        n=config.n, sigma=sigma, epsilon=config.epsilon, trials=trials,
        full_success_rate=full / trials,
        per_color_success=per_color,
        mean_tau=sum(taus) / trials, min_tau=min(taus), max_tau=max(taus),
        norm_tau=(sum(taus) / trials) / tau_normalizer(config.n, sigma),
        validator_pass_rates=rates)


def _worker(args: tuple) -> tuple[int, dict]:
    config_dict, idx = args
    config = TrialConfig.from_dict(config_dict)
    report = run_trial(config, trial_index=idx)
    return idx, report.to_json_dict()


def run_experiment(config: TrialConfig) -> tuple[ExperimentSummary, list[dict]]:
    """Run config.trials independent trials (parallel across trials only) and
    aggregate.  Writes the JSON-lines trial log and the CSV summary when
    paths are configured; records come back in trial-index order regardless
    of parallelism."""
    indices = list(range(config.trials))
    if config.parallelism > 1 and config.trials > 1:
        cfg = config.to_dict()
        with multiprocessing.get_context("fork").Pool(config.parallelism) as pool:
            results = pool.map(_worker, [(cfg, i) for i in indices], chunksize=1)
        records = [rec for _, rec in sorted(results)]
    else:
        records = [run_trial(config, trial_index=i).to_json_dict()
                   for i in indices]
    summary = summarize(records, config)
    if config.out:
        with open(config.out, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    if config.summary:
        with open(config.summary, "w") as fh:
            fh.write(",".join(ExperimentSummary.CSV_COLUMNS) + "\n")
            fh.write(summary.csv_row() + "\n")
    return summary, records
