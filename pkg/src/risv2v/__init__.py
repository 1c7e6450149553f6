"""Performance analysis of RIS + STAR-surface assisted V2V links.

Closed-form outage probability, ergodic-capacity upper bounds and energy
efficiency under NOMA/OMA over Fisher-Snedecor F composite fading, plus a
reproducible Monte-Carlo oracle that cross-validates every closed form.
"""

from .analytics import (CapacityReport, OutageReport, Thresholds,
                        capacity_report, ec_upper_noma_r, ec_upper_noma_t,
                        ec_upper_oma, energy_efficiency, outage_noma_r,
                        outage_noma_t, outage_oma, outage_report,
                        total_power_watts)
from .fading import (AggregateStats, FadingParams, aggregate_stats,
                     element_moments, sample_envelope, v_cdf, v_pdf)
from .linkmodel import (Geometry, LinkBudget, PowerConfig, SurfaceConfig,
                        SystemConfig, link_budget, path_loss_los, sinr_sic,
                        sinr_t_noma, snr_oma, snr_r_noma)
from .montecarlo import (MetricEstimate, capacity_values, empirical_capacity,
                         empirical_ee, empirical_outage, outage_events,
                         point_estimates, simulate_v, wilson_interval)
from .numerics import (db_to_linear, dbm_to_watts, linear_to_db, q_function,
                       random_stream, sample_gamma, watts_to_dbm)
from .cli import (ConfigError, ResultRow, SweepSpec, default_config,
                  load_config, run_point, run_sweep, run_validate)

__version__ = "0.1.0"
