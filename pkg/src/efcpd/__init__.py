"""Reversible exchangeable fragmentation-coalescence chains with Poisson-Dirichlet equilibria."""

from .chain import (
    BalanceReport,
    DistVector,
    Generator,
    build_generator,
    check_detailed_balance,
    marginal_restriction,
    restricted_pd_distribution,
    stationary_distribution,
    tv_distance,
)
from .eppf import Params, crp_weights, eppf_normalization, paintbox_eppf, pd_eppf
from .exact import ExactRational, alpha_weight, format_rational, parse_rational, rising_factorial
from .mass import MassPartition
from .partitions import (
    SetPartition,
    bell_number,
    coag_transitions,
    enumerate_set_partitions,
    merge_blocks,
    restrict,
    shape,
    split_block,
    split_transitions,
)
from .rates import (
    DiscreteMeasure,
    RateTable,
    build_rate_table,
    coag_rate,
    coag_rate_quadrature,
    split_rate,
    split_rate_from_measure,
    total_split_rate,
)

__version__ = "0.1.0"
