"""Command-line driver: run experiments, select antennas, verify against oracles.

Subcommands
-----------
simulate --config FILE --out DIR [--threads K]
    Run every experiment section of an INI config file; write one sweep CSV
    per section (plus an outage CSV when thresholds are configured) and a
    JSON run manifest.
select --input FILE --mode separate|total [--power P] [--noise S2]
    Select antennas for one channel vector; print the on/off bitstring and
    the received SNR (equals the raw selection objective at the default
    power = noise = 1).
verify --n-max N --instances M --seed S
    Compare both selection algorithms against exhaustive brute force on
    random instances; exit 2 on any mismatch beyond 1e-9 relative.
figures --out DIR [--trials T] [--seed S]
    Reproduce the five canned result tables (fig4.csv .. fig8.csv).

Exit codes: 0 success, 1 usage/configuration error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import platform
import sys
import time

import numpy as np

from . import __version__
from .channel import ChannelRealization, read_channel_file, sample_block
from .metrics import PowerConstraint
from .montecarlo import (ANTENNA_SELECT, OABF_S, OABF_T, PHASE_ALIGNED,
                         ExperimentConfig, MetricTable, run_sweep)
from .selection import (MODE_SEPARATE, MODE_TOTAL, brute_force_separate,
                        brute_force_total, oabf_s, oabf_t)

SWEEP_HEADER = "scheme,n,trials,mean_snr,se_snr,mean_norm_snr,se_norm_snr,mean_rate,se_rate,mean_k"
OUTAGE_HEADER = "scheme,n,threshold_db,outage,trials"

_VERIFY_MAX_N = 20
_ORACLE_RTOL = 1e-9


class CliError(Exception):
    """Usage or configuration problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# ---------------------------------------------------------------------------
# config file handling
# ---------------------------------------------------------------------------

_REQUIRED_KEYS = ("schemes", "mode", "n_values", "trials", "seed")
_OPTIONAL_KEYS = ("power", "noise", "outage_thresholds_db")


def _parse_section(name: str, sec) -> ExperimentConfig:
    def fail(key, why):
        raise CliError(f"config section [{name}], field '{key}': {why}")

    for key in sec:
        if key not in _REQUIRED_KEYS and key not in _OPTIONAL_KEYS:
            fail(key, "unknown field")
    for key in _REQUIRED_KEYS:
        if key not in sec:
            fail(key, "missing required field")

    schemes = tuple(s.strip() for s in sec["schemes"].split(",") if s.strip())
    mode = sec["mode"].strip()
    if mode not in (MODE_SEPARATE, MODE_TOTAL):
        fail("mode", f"must be '{MODE_SEPARATE}' or '{MODE_TOTAL}', got {mode!r}")
    try:
        power = float(sec.get("power", "1.0"))
    except ValueError:
        fail("power", f"not a number: {sec['power']!r}")
    try:
        noise = float(sec.get("noise", "1.0"))
    except ValueError:
        fail("noise", f"not a number: {sec['noise']!r}")
    try:
        n_values = tuple(int(v) for v in sec["n_values"].split(","))
    except ValueError:
        fail("n_values", f"expected comma-separated integers, got {sec['n_values']!r}")
    try:
        trials = int(sec["trials"])
    except ValueError:
        fail("trials", f"expected an integer, got {sec['trials']!r}")
    try:
        seed = int(sec["seed"])
    except ValueError:
        fail("seed", f"expected an integer, got {sec['seed']!r}")
    thresholds = None
    if "outage_thresholds_db" in sec:
        try:
            dbs = [float(v) for v in sec["outage_thresholds_db"].split(",")]
        except ValueError:
            fail("outage_thresholds_db",
                 f"expected comma-separated numbers, got {sec['outage_thresholds_db']!r}")
        thresholds = tuple(10.0 ** (db / 10.0) for db in dbs)
    try:
        pc = PowerConstraint(mode, power, noise)
        return ExperimentConfig(schemes, pc, n_values, trials, seed, thresholds)
    except ValueError as exc:
        raise CliError(f"config section [{name}]: {exc}") from exc


def parse_config_file(path) -> list:
    """Parse an INI experiment file into [(section name, ExperimentConfig)]."""
    cp = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise CliError(f"invalid config file {path}: {exc}") from exc
    if not cp.sections():
        raise CliError(f"config file {path} defines no experiment sections")
    return [(name, _parse_section(name, cp[name])) for name in cp.sections()]


# ---------------------------------------------------------------------------
# CSV / manifest emission
# ---------------------------------------------------------------------------

def _write_sweep_csv(path, table: MetricTable) -> None:
    lines = [SWEEP_HEADER]
    for scheme in table.config.schemes:
        for n in table.config.n_values:
            r = table.row(scheme, n)
            lines.append(f"{r.scheme},{r.n},{r.trials},{r.mean_snr!r},{r.se_snr!r},"
                         f"{r.mean_norm_snr!r},{r.se_norm_snr!r},{r.mean_rate!r},"
                         f"{r.se_rate!r},{r.mean_k!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_outage_csv(path, table: MetricTable) -> None:
    lines = [OUTAGE_HEADER]
    for scheme in table.config.schemes:
        for n in table.config.n_values:
            r = table.row(scheme, n)
            for p in r.outage.points:
                db = float(10.0 * np.log10(p.snr_threshold))
                lines.append(f"{r.scheme},{r.n},{db!r},{p.probability!r},{p.trials}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _config_echo(config: ExperimentConfig) -> dict:
    thresholds = config.outage_thresholds
    return {
        "schemes": list(config.schemes),
        "mode": config.constraint.mode,
        "power": config.constraint.power,
        "noise": config.constraint.noise_variance,
        "n_values": list(config.n_values),
        "trials": config.trials,
        "seed": config.master_seed,
        "outage_thresholds_db": (None if thresholds is None
                                 else [10.0 * float(np.log10(t)) for t in thresholds]),
    }


def _write_manifest(out_dir, command: str, experiments: dict, wall_time: float,
                    extra: dict = None) -> None:
    manifest = {
        "command": command,
        "experiments": experiments,
        "versions": {
            "oabf": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": wall_time,
    }
    if extra:
        manifest.update(extra)
    import os
    path = os.path.join(str(out_dir), "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    import os

    experiments = parse_config_file(args.config)
    os.makedirs(args.out, exist_ok=True)
    t0 = time.perf_counter()
    echo = {}
    for name, config in experiments:
        table = run_sweep(config, threads=args.threads)
        files = [f"{name}.csv"]
        _write_sweep_csv(os.path.join(args.out, f"{name}.csv"), table)
        if config.outage_thresholds is not None:
            files.append(f"{name}_outage.csv")
            _write_outage_csv(os.path.join(args.out, f"{name}_outage.csv"), table)
        echo[name] = dict(_config_echo(config), files=files)
        print(f"[{name}] wrote {', '.join(files)}")
    _write_manifest(args.out, "simulate", echo, time.perf_counter() - t0,
                    extra={"config_file": str(args.config), "threads": args.threads})
    return 0


def cmd_select(args) -> int:
    try:
        ch = read_channel_file(args.input)
    except (OSError, ValueError) as exc:
        raise CliError(f"channel file {args.input}: {exc}") from exc
    if args.power <= 0 or args.noise <= 0:
        raise CliError("power and noise must be positive")
    result = oabf_s(ch) if args.mode == MODE_SEPARATE else oabf_t(ch)
    bits = "".join("1" if i in set(result.selection.indices) else "0"
                   for i in range(ch.n))
    snr = args.power * result.objective / args.noise
    print(f"{bits} {snr!r}")
    return 0


def run_verification(n_max: int, instances: int, seed: int,
                     separate_algo=oabf_s, total_algo=oabf_t, report=print) -> int:
    """Oracle harness: compare selectors against brute force on random instances.

    Returns 0 when every objective matches exhaustive search within 1e-9
    relative, 2 after reporting the first failing instance.  The algo
    arguments exist so tests can inject a faulty selector and watch the
    harness catch it.
    """
    if n_max > _VERIFY_MAX_N:
        raise ValueError(f"n-max {n_max} exceeds brute-force capacity {_VERIFY_MAX_N}")
    if n_max < 2:
        raise ValueError("n-max must be at least 2")
    if instances < 1:
        raise ValueError("instances must be at least 1")

    def matches(a, b):
        return abs(a - b) <= _ORACLE_RTOL * max(abs(a), abs(b))

    for n in range(2, n_max + 1):
        H = sample_block(n, seed, (n - 2) * instances, instances)
        ok_sep = ok_tot = 0
        for i in range(instances):
            ch = ChannelRealization(H[i])
            exact_sep = brute_force_separate(ch).objective
            exact_tot = brute_force_total(ch).objective
            got_sep = separate_algo(ch).objective
            got_tot = total_algo(ch).objective
            for label, got, exact in (("separate", got_sep, exact_sep),
                                      ("total", got_tot, exact_tot)):
                if not matches(got, exact):
                    report(f"MISMATCH ({label} mode) at N={n}, instance {i}: "
                           f"algorithm={got!r} brute_force={exact!r}")
                    report("failing channel coefficients (re im):")
                    for h in ch.coefficients:
                        report(f"  {h.real!r} {h.imag!r}")
                    return 2
            ok_sep += 1
            ok_tot += 1
        report(f"N={n:2d}: separate {ok_sep}/{instances} pass, total {ok_tot}/{instances} pass")
    report("verification OK")
    return 0


def cmd_verify(args) -> int:
    try:
        return run_verification(args.n_max, args.instances, args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


_FIGURE_N_SWEEP = (8, 16, 32, 64)
_FIGURE_N_OUTAGE = (1, 2, 3)
_FIGURE_THRESHOLDS_DB = tuple(range(-45, 13))


def _figure_configs(trials: int, seed: int) -> dict:
    """Canned experiment set reproducing the five published result tables."""
    thresholds = tuple(10.0 ** (db / 10.0) for db in _FIGURE_THRESHOLDS_DB)
    sep = PowerConstraint.separate()
    tot = PowerConstraint.total()
    sweep_sep = ExperimentConfig((PHASE_ALIGNED, OABF_S, ANTENNA_SELECT), sep,
                                 _FIGURE_N_SWEEP, trials, seed)
    return {
        # fig4: normalized SNR vs N and fig5: achievable rate vs N come from
        # the same per-antenna-power sweep (different columns of one table)
        "fig4": sweep_sep,
        "fig5": sweep_sep,
        "fig6": ExperimentConfig((PHASE_ALIGNED, OABF_S), sep, _FIGURE_N_OUTAGE,
                                 10 * trials, seed, thresholds),
        "fig7": ExperimentConfig((PHASE_ALIGNED, OABF_T, OABF_S), tot,
                                 _FIGURE_N_SWEEP, trials, seed),
        "fig8": ExperimentConfig((PHASE_ALIGNED, OABF_T), tot, _FIGURE_N_OUTAGE,
                                 10 * trials, seed, thresholds),
    }


def cmd_figures(args) -> int:
    import os

    if args.trials < 1:
        raise CliError("--trials must be at least 1")
    os.makedirs(args.out, exist_ok=True)
    configs = _figure_configs(args.trials, args.seed)
    t0 = time.perf_counter()
    echo = {}
    tables = {}
    for name, config in configs.items():
        key = id(config)
        if key not in tables:  # fig4/fig5 share one run
            tables[key] = run_sweep(config)
        table = tables[key]
        if config.outage_thresholds is not None:
            _write_outage_csv(os.path.join(args.out, f"{name}.csv"), table)
        else:
            _write_sweep_csv(os.path.join(args.out, f"{name}.csv"), table)
        echo[name] = dict(_config_echo(config), files=[f"{name}.csv"])
        print(f"[{name}] wrote {name}.csv")
    _write_manifest(args.out, "figures", echo, time.perf_counter() - t0)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="oabf", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run experiments from a config file")
    p.add_argument("--config", required=True, help="INI experiment file")
    p.add_argument("--out", required=True, help="output directory for CSV/JSON")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("select", help="select antennas for one channel vector")
    p.add_argument("--input", required=True, help="channel file ('re im' lines or JSON)")
    p.add_argument("--mode", required=True, choices=[MODE_SEPARATE, MODE_TOTAL])
    p.add_argument("--power", type=float, default=1.0, help="transmit power (default 1)")
    p.add_argument("--noise", type=float, default=1.0, help="noise variance (default 1)")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("verify", help="check algorithms against brute-force oracles")
    p.add_argument("--n-max", type=int, required=True, help="largest antenna count (<= 20)")
    p.add_argument("--instances", type=int, required=True, help="random instances per N")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figures", help="reproduce the canned result tables")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--trials", type=int, default=10000,
                   help="trials per sweep point; outage tables use 10x (default 10000)")
    p.add_argument("--seed", type=int, default=20240601, help="master seed")
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
