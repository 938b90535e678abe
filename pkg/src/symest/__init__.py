"""Set-valued state estimation for non-deterministic state machines.

Monolithic estimation (:mod:`symest.estimator`), decomposition of the
symbol alphabet into aggregation maps (:mod:`symest.decomposition`), the
decentralized intersection scheme (:mod:`symest.distributed`) and the two
constructions that make it exact: chain partitions (:mod:`symest.chains`)
and quotient machines (:mod:`symest.quotient`).
"""

from importlib.resources import files

from .chains import (
    ChainPartition,
    IsMachineView,
    build_decomposition,
    chain_decomposition,
    check_chain_decomposable,
    is_chain,
    iso_partition,
    partition_chains,
)
from .core import Machine, StateSet, Trace, enabled_states, enumerate_paths, successors
from .decomposition import (
    AggregationMap,
    Decomposition,
    aggregate_trace,
    check_consistency,
    preimage_trace,
    restriction_domain,
)
from .distributed import (
    DistributedFamily,
    decentralized_estimate,
    decentralized_estimate_and_predict,
    decentralized_predict,
    derive_distributed,
    distributed_sets,
)
from .errors import (
    InconsistentDecomposition,
    InputError,
    MachineError,
    NotChainDecomposable,
    ParseError,
    SymestError,
)
from .estimator import OnlineEstimator, estimate, estimate_and_predict, oracle_estimate, oracle_predict, predict
from .kernels import backend_name
from .quotient import QuotientMap, build_quotient, merge_relation, quotient_decomposition, quotient_pipeline

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a shipped example file, e.g. ``data_path("chain_machine.json")``."""
    return files(__name__).joinpath("data", name)
