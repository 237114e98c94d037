"""On-off analog beamforming: subset selection algorithms and a Monte Carlo
link simulator for transmit arrays whose antennas are switched on or off."""

from .channel import (ChannelRealization, RngStream, from_values,
                      read_channel_file, sample_block, sample_rayleigh,
                      write_channel_file)
from .metrics import (OutageCurve, OutagePoint, PowerConstraint,
                      achievable_rate, antenna_selection_array_gain,
                      diversity_order_estimate, expected_optimal_received_power,
                      normalized_snr, oabf_mean_snr_lower_bound,
                      outage_probability, rate_gap_bound, snr_separate,
                      snr_total)
from .montecarlo import (ALL_SCHEMES, ANTENNA_SELECT, OABF_B, OABF_S, OABF_T,
                         PHASE_ALIGNED, ExperimentConfig, MetricRow,
                         MetricTable, paired_gap, run_outage, run_sweep)
from .selection import (MODE_SEPARATE, MODE_TOTAL, BeamSelection,
                        SelectionResult, antenna_select, brute_force_separate,
                        brute_force_total, crossing_angles, oabf_b, oabf_s,
                        oabf_t, phase_aligned_value, topk_by_projection)

__version__ = "0.1.0"
