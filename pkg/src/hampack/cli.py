"""Command-line entry point.

Example:
    hampack --n 1024 --sigma 2 --trials 20 --seed 7 --validate full \
            --out trials.jsonl --summary summary.csv
"""

from __future__ import annotations

import argparse
import sys

from .errors import InvalidParameterError
from .harness import TrialConfig, run_experiment


def _parse_config_file(path: str) -> dict:
    """key=value lines; '#' starts a comment; values are parsed as int,
    float, bool, or left as strings."""
    out: dict = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(f"bad config line: {line!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key] = _coerce(val)
    return out


def _coerce(val: str):
    low = val.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(val)
        except ValueError:
            pass
    return val


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hampack",
        description="Simulate the random graph process, color edges online, "
                    "and pack one Hamilton cycle per color at the hitting time.")
    p.add_argument("--n", type=int, default=None, help="number of vertices")
    p.add_argument("--sigma", type=int, default=None, help="number of final colors (>= 2)")
    p.add_argument("--epsilon", type=float, default=None, help="freeze-time constant")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--trials", type=int, default=None, help="number of trials")
    p.add_argument("--parallelism", type=int, default=None,
                   help="worker processes (trials run in parallel)")
    p.add_argument("--validate", choices=["off", "fast", "full"], default=None)
    p.add_argument("--strict-boosters", action="store_true", default=None,
                   help="disable star-edge cycle closures (boosters only)")
    p.add_argument("--dump-edges", metavar="PATH", default=None)
    p.add_argument("--dump-cycles", metavar="PATH", default=None)
    p.add_argument("--dump-coloring", metavar="PATH", default=None)
    p.add_argument("--out", metavar="PATH", default=None,
                   help="JSON-lines trial log")
    p.add_argument("--summary", metavar="PATH", default=None,
                   help="CSV summary")
    p.add_argument("--config", metavar="PATH", default=None,
                   help="key=value config file; explicit CLI flags override it")
    p.add_argument("--record-timings", action="store_true", default=None,
                   help="include wall-clock timings in the trial log "
                        "(makes logs non-reproducible byte-for-byte)")
    return p


_ARG_TO_FIELD = {
    "n": "n", "sigma": "sigma", "epsilon": "epsilon", "seed": "seed",
    "trials": "trials", "parallelism": "parallelism", "validate": "validate",
    "strict_boosters": "strict_boosters", "dump_edges": "dump_edges",
    "dump_cycles": "dump_cycles", "dump_coloring": "dump_coloring",
    "out": "out", "summary": "summary", "record_timings": "record_timings",
}


def config_from_args(argv) -> TrialConfig:
    args = build_parser().parse_args(argv)
    settings: dict = {}
    if args.config:
        file_settings = _parse_config_file(args.config)
        unknown = set(file_settings) - set(TrialConfig.__dataclass_fields__)
        if unknown:
            raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
        settings.update(file_settings)
    for arg_name, field_name in _ARG_TO_FIELD.items():
        val = getattr(args, arg_name)
        if val is not None:
            settings[field_name] = val
    return TrialConfig(**settings)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = config_from_args(argv)
    except (InvalidParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        summary, records = run_experiment(config)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    full = summary.full_success_rate
    print(f"n={summary.n} sigma={summary.sigma} trials={summary.trials} "
          f"full_success={full:.3f} mean_tau={summary.mean_tau:.1f} "
          f"norm_tau={summary.norm_tau:.4f}")
    for key, rate in sorted(summary.validator_pass_rates.items()):
        if rate is not None:
            print(f"  validator {key}: {rate:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
