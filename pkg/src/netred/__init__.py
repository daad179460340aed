"""Two-group model reduction for networked LTI systems."""
from .dynamics import GeneratorParams, NetworkModel, aggregate_dynamics, evaluate_tyu, generator_tf
from .errors import NetredError
from .graph import BlockModelParams, WsbmParams, build_block_laplacian, kron_reduce, sample_wsbm
from .polyrat import Polynomial, RationalFunction
from .reduction import ReducedModel, reduce_network, theorem1_bound
from .sim import DisturbanceSpec, StateSpace, response_report
from .spectral import Partition, spectral_cluster, symmetric_eig

__version__ = "0.1.0"

__all__ = [
    "BlockModelParams", "DisturbanceSpec", "GeneratorParams", "NetredError", "NetworkModel", "Partition",
    "Polynomial", "RationalFunction", "ReducedModel", "StateSpace", "WsbmParams", "aggregate_dynamics",
    "build_block_laplacian", "evaluate_tyu", "generator_tf", "kron_reduce", "reduce_network", "response_report",
    "sample_wsbm", "spectral_cluster", "symmetric_eig", "theorem1_bound",
]
