"""Neural-network decoding for the triangular color code and the toric code with a twist."""
from .codes import CodeLattice, build_color_code, build_lattice, build_twisted_toric_code, validate
from .exgraph import ExcitationGraph, build_graph, removal_operator
from .noise import NoiseModel, effective_rate, rate_from_effective
from .pauli import LogicalClass, PauliOperator, StabilizerGroup

__version__ = "0.1.0"
