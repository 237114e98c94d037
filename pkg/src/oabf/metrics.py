"""Link metrics and closed-form performance anchors.

Per-realization figures (SNR under either power constraint, normalized SNR,
achievable rate), empirical outage statistics, a log-log diversity-order
fit, and the closed-form expressions used as acceptance anchors for the
Monte Carlo curves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .selection import MODE_SEPARATE, MODE_TOTAL, SelectionResult

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class PowerConstraint:
    """Transmit power model: per-antenna power (separate) or a shared total."""

    mode: str
    power: float
    noise_variance: float

    def __post_init__(self):
        if self.mode not in (MODE_SEPARATE, MODE_TOTAL):
            raise ValueError(f"unknown power mode: {self.mode!r}")
        if not self.power > 0.0:
            raise ValueError(f"transmit power must be positive, got {self.power}")
        if not self.noise_variance > 0.0:
            raise ValueError(f"noise variance must be positive, got {self.noise_variance}")

    @classmethod
    def separate(cls, power_per_antenna: float = 1.0, noise_variance: float = 1.0):
        return cls(MODE_SEPARATE, float(power_per_antenna), float(noise_variance))

    @classmethod
    def total(cls, total_power: float = 1.0, noise_variance: float = 1.0):
        return cls(MODE_TOTAL, float(total_power), float(noise_variance))


@dataclass(frozen=True)
class OutagePoint:
    snr_threshold: float
    probability: float
    trials: int


@dataclass(frozen=True)
class OutageCurve:
    """Empirical outage probability at a list of linear SNR thresholds."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    def thresholds(self) -> np.ndarray:
        return np.array([p.snr_threshold for p in self.points])

    def probabilities(self) -> np.ndarray:
        return np.array([p.probability for p in self.points])


def snr_separate(sel: SelectionResult, pc: PowerConstraint) -> float:
    """Received SNR under per-antenna power: P_o |sum h_j|^2 / sigma^2."""
    if sel.mode != MODE_SEPARATE or pc.mode != MODE_SEPARATE:
        raise ValueError("snr_separate requires a separate-mode selection and constraint")
    return pc.power * sel.objective / pc.noise_variance


def snr_total(sel: SelectionResult, pc: PowerConstraint) -> float:
    """Received SNR under shared power: P_t |sum h_j|^2 / (K sigma^2)."""
    if sel.mode != MODE_TOTAL or pc.mode != MODE_TOTAL:
        raise ValueError("snr_total requires a total-mode selection and constraint")
    return pc.power * sel.objective / pc.noise_variance


def normalized_snr(sel: SelectionResult, noise_variance: float = 1.0) -> float:
    """Received SNR divided by the total radiated power: |sum h_j|^2 / (sigma^2 K).

    The transmit power cancels, so this isolates the array gain of the
    selection (per-antenna mode; the same expression applies in total mode).
    """
    s = sel.selection.beam_sum
    return (s.real * s.real + s.imag * s.imag) / (noise_variance * sel.selection.cardinality)


def achievable_rate(snr):
    """Shannon rate log2(1 + SNR) in bits/symbol; accepts scalars or arrays."""
    snr = np.asarray(snr, dtype=np.float64)
    if np.any(snr < 0.0):
        raise ValueError("SNR must be nonnegative")
    out = np.log1p(snr) / _LN2
    return float(out) if out.ndim == 0 else out


def outage_probability(samples, threshold: float) -> OutagePoint:
    """Exact empirical fraction of SNR samples strictly below the threshold."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("outage probability needs at least one SNR sample")
    count = int(np.count_nonzero(samples < threshold))
    return OutagePoint(float(threshold), count / samples.size, samples.size)


def diversity_order_estimate(curve: OutageCurve) -> float:
    """Least-squares diversity exponent of an outage curve.

    Fits -log10(outage) against -log10(threshold) over the supplied points
    with outage strictly inside (0, 1); the slope is the diversity order
    (outage ~ c * threshold^d in the deep-fade regime).
    """
    t = curve.thresholds()
    p = curve.probabilities()
    ok = (p > 0.0) & (p < 1.0)
    if ok.sum() < 2:
        raise ValueError("need at least two points with outage strictly in (0, 1)")
    x = -np.log10(t[ok])
    y = -np.log10(p[ok])
    if np.ptp(x) == 0.0:
        raise ValueError("cannot fit a slope: all thresholds equal")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def expected_optimal_received_power(n: int) -> float:
    """Mean received power of ideal phase alignment over Rayleigh fading:
    E[(sum |h_j|)^2] = n + n(n-1) pi/4."""
    if n < 1:
        raise ValueError(f"need at least one antenna, got n={n}")
    return n + n * (n - 1) * np.pi / 4.0


def antenna_selection_array_gain(n: int) -> float:
    """Array gain of best-antenna selection: the harmonic sum H_n = sum 1/i."""
    if n < 1:
        raise ValueError(f"need at least one antenna, got n={n}")
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def oabf_mean_snr_lower_bound(n: int, power_per_antenna: float = 1.0,
                              noise_variance: float = 1.0) -> float:
    """Lower bound on the mean on-off SNR under per-antenna power:
    (P_o / (pi^2 sigma^2)) * (n + n(n-1) pi/4)."""
    return (power_per_antenna / (np.pi ** 2 * noise_variance)
            * expected_optimal_received_power(n))


def rate_gap_bound() -> float:
    """Constant rate penalty of on-off switching versus ideal phase
    alignment: 2 log2(pi) ~ 3.31 bits/symbol, independent of array size."""
    return 2.0 * np.log2(np.pi)
