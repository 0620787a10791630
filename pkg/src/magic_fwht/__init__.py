"""Stabilizer Renyi entropies and stabilizer nullity of dense N-qubit states.

All ``4^N`` Pauli correlators are obtained from ``2^N`` fast Walsh-Hadamard
transforms, one per X-mask family, for ``O(N 4^N)`` exact evaluation; a
Monte-Carlo variant samples families instead.
"""
from .clifford import (
    CircuitSpec,
    apply_circuit,
    build_brickwall,
    clifford_unitary,
    random_stabilizer_product_state,
    sample_two_qubit_clifford,
)
from .fwht import fwht_inplace, fwht_naive
from .measures import MagicReport, PartialMoment, brute_force_magic, exact_magic, partial_moment
from .metropolis import MhConfig, MhResult, mh_magic
from .montecarlo import McConfig, McResult, landscape_profile, mc_magic, precondition
from .pauli import FamilyCorrelators, PauliLabel, family_correlators, single_correlator
from .statevector import (
    GateMatrix,
    StateVector,
    apply_gate,
    dump_state,
    load_state,
    make_basis_state,
    make_haar_random_state,
)

__version__ = "0.1.0"
