"""Reproducible Monte Carlo sweeps over antenna counts and schemes.

Every trial owns one random stream (stream index = trial index), and all
schemes in a run are applied to the same channel realization per trial, so
scheme comparisons are paired and self-gaps are exactly zero.  Per-trial
quantities are written into preallocated arrays indexed by trial and
reduced afterwards in a fixed order, which makes the output a pure
function of the configuration regardless of chunking or thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import selection
from .channel import sample_block
from .metrics import OutageCurve, OutagePoint, PowerConstraint
from .selection import MODE_SEPARATE

OABF_S = "oabf_s"
OABF_B = "oabf_b"
OABF_T = "oabf_t"
ANTENNA_SELECT = "antenna_select"
PHASE_ALIGNED = "phase_aligned"

ALL_SCHEMES = (OABF_S, OABF_B, OABF_T, ANTENNA_SELECT, PHASE_ALIGNED)

# cap on trials * N per generated channel block (memory control)
_BLOCK_BUDGET = 2_000_000

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: scheme list, power model, antenna sweep, trial count, seed."""

    schemes: tuple
    constraint: PowerConstraint
    n_values: tuple
    trials: int
    master_seed: int
    outage_thresholds: tuple = None  # linear SNR thresholds, optional

    def __post_init__(self):
        schemes = tuple(self.schemes)
        if not schemes:
            raise ValueError("at least one scheme is required")
        for s in schemes:
            if s not in ALL_SCHEMES:
                raise ValueError(f"unknown scheme {s!r}; valid: {', '.join(ALL_SCHEMES)}")
        if len(set(schemes)) != len(schemes):
            raise ValueError("duplicate scheme in configuration")
        n_values = tuple(int(n) for n in self.n_values)
        if not n_values or any(n < 1 for n in n_values):
            raise ValueError("n_values must be a nonempty list of antenna counts >= 1")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed <= 0xFFFFFFFFFFFFFFFF:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        thresholds = self.outage_thresholds
        if thresholds is not None:
            thresholds = tuple(float(t) for t in thresholds)
            if not thresholds:
                raise ValueError("outage_thresholds, if given, must be nonempty")
        object.__setattr__(self, "schemes", schemes)
        object.__setattr__(self, "n_values", n_values)
        object.__setattr__(self, "outage_thresholds", thresholds)


@dataclass(frozen=True)
class MetricRow:
    """Aggregated metrics for one (scheme, antenna count) cell."""

    scheme: str
    n: int
    trials: int
    seed: int
    mean_snr: float
    se_snr: float
    mean_norm_snr: float
    se_norm_snr: float
    mean_rate: float
    se_rate: float
    mean_k: float
    outage: OutageCurve = None


@dataclass
class MetricTable:
    """Rows keyed by (scheme, n), in scheme-major configuration order."""

    config: ExperimentConfig
    rows: dict = field(default_factory=dict)

    def row(self, scheme: str, n: int) -> MetricRow:
        try:
            return self.rows[(scheme, int(n))]
        except KeyError:
            raise KeyError(f"no row for scheme={scheme!r}, n={n}") from None

    def __iter__(self):
        return iter(self.rows.values())


def _apply_scheme(scheme: str, H: np.ndarray):
    """Per-trial received power |beam sum|^2 (or (sum|h|)^2) and cardinality."""
    if scheme == PHASE_ALIGNED:
        amp = np.abs(H).sum(axis=1)
        return amp * amp, np.full(H.shape[0], H.shape[1], dtype=np.int64)
    if scheme == OABF_S:
        _, _, power, k = selection.oabf_s_batch(H)
    elif scheme == OABF_B:
        _, _, power, k = selection.oabf_b_batch(H)
    elif scheme == OABF_T:
        mask, beam_sum, _, k = selection.oabf_t_batch(H)
        power = beam_sum.real ** 2 + beam_sum.imag ** 2
    elif scheme == ANTENNA_SELECT:
        _, _, power, k = selection.antenna_select_batch(H)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return power, k


def _fill_trials(config: ExperimentConfig, n: int, lo: int, hi: int, store: dict):
    H = sample_block(n, config.master_seed, lo, hi - lo)
    for scheme in config.schemes:
        power, k = _apply_scheme(scheme, H)
        store[scheme][0][lo:hi] = power
        store[scheme][1][lo:hi] = k


def _reduce(config: ExperimentConfig, n: int, scheme: str, power: np.ndarray,
            k: np.ndarray) -> MetricRow:
    pc = config.constraint
    if pc.mode == MODE_SEPARATE:
        snr = pc.power * power / pc.noise_variance
    else:
        snr = pc.power * power / (k * pc.noise_variance)
    norm = power / (pc.noise_variance * k)
    rate = np.log1p(snr) / _LN2
    t = config.trials

    def mean_se(x):
        if t == 1:
            return float(x[0]), 0.0
        return float(np.mean(x)), float(np.std(x, ddof=1) / np.sqrt(t))

    mean_snr, se_snr = mean_se(snr)
    mean_norm, se_norm = mean_se(norm)
    mean_rate, se_rate = mean_se(rate)
    curve = None
    if config.outage_thresholds is not None:
        points = [OutagePoint(th, int(np.count_nonzero(snr < th)) / t, t)
                  for th in config.outage_thresholds]
        curve = OutageCurve(tuple(points))
    return MetricRow(scheme, n, t, config.master_seed, mean_snr, se_snr,
                     mean_norm, se_norm, mean_rate, se_rate, float(np.mean(k)), curve)


def run_sweep(config: ExperimentConfig, threads: int = 1) -> MetricTable:
    """Run the configured experiment and aggregate one row per (scheme, n).

    Output is a pure function of the configuration: trial t always consumes
    the channel from stream t, and every scheme in the run sees the same
    realizations.  `threads` only splits the per-trial work; it never
    changes results.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    table = MetricTable(config)
    per_n = {}
    for n in config.n_values:
        store = {s: (np.empty(config.trials, dtype=np.float64),
                     np.empty(config.trials, dtype=np.int64))
                 for s in config.schemes}
        chunk = max(1, _BLOCK_BUDGET // n)
        ranges = [(lo, min(config.trials, lo + chunk))
                  for lo in range(0, config.trials, chunk)]
        if threads == 1 or len(ranges) == 1:
            for lo, hi in ranges:
                _fill_trials(config, n, lo, hi, store)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [pool.submit(_fill_trials, config, n, lo, hi, store)
                           for lo, hi in ranges]
                for f in futures:
                    f.result()
        per_n[n] = store
    for scheme in config.schemes:
        for n in config.n_values:
            power, k = per_n[n][scheme]
            table.rows[(scheme, n)] = _reduce(config, n, scheme, power, k)
    return table


def run_outage(config: ExperimentConfig, threads: int = 1) -> MetricTable:
    """`run_sweep` for configurations that carry outage thresholds."""
    if config.outage_thresholds is None:
        raise ValueError("run_outage requires outage_thresholds in the configuration")
    return run_sweep(config, threads=threads)


_GAP_METRICS = {
    "snr": ("mean_snr", "se_snr"),
    "norm_snr": ("mean_norm_snr", "se_norm_snr"),
    "rate": ("mean_rate", "se_rate"),
}


def paired_gap(table: MetricTable, scheme_a: str, scheme_b: str, metric: str):
    """Per-n mean gap (scheme_a - scheme_b) with propagated standard error.

    Returns a list of (n, gap, se) tuples in configuration order.  Since the
    schemes shared channels, the gap of a scheme against itself is exactly 0.
    """
    try:
        mean_attr, se_attr = _GAP_METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; valid: {', '.join(_GAP_METRICS)}") from None
    out = []
    for n in table.config.n_values:
        ra = table.row(scheme_a, n)
        rb = table.row(scheme_b, n)
        gap = getattr(ra, mean_attr) - getattr(rb, mean_attr)
        se = float(np.hypot(getattr(ra, se_attr), getattr(rb, se_attr)))
        out.append((n, gap, se))
    return out
