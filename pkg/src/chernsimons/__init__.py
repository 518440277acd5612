"""Exact U(1) Chern-Simons state preparation at odd prime level."""
from .cyclo import CycArray, CycScalar, Level, omega_power, proportional, quadratic_gauss_sum, to_complex
from .entanglement import ReplicaSpec, flat_entropy, flat_spectrum_check, ghz_count, replica_z
from .formats import ParseError, format_manifold, format_network, parse_manifold, parse_network
from .so3 import dimension_inequality, fusion_rules, so3_s_matrix, verlinde_dim
from .stabilizer import (
    PauliOp,
    StabilizerTableau,
    WignerTable,
    dense_from_tableau,
    entropy_from_tableau,
    is_stabilizer,
    stabilizer_group_search,
    tableau_from_state,
    weyl_apply,
    wigner_function,
)
from .states import (
    DenseState,
    GateMatrix,
    Site,
    apply_gate,
    basis_state,
    c_add,
    contract_pair,
    copy_tensor,
    dual,
    fusion_state,
    fusion_tensor,
    modular_gate,
    perfect_tensor,
    tensor_product,
)
from .surgery import (
    Component,
    IllDefinedError,
    SurgeryPresentation,
    reduced_linking,
    s3_expectation,
    state_from_presentation,
    tableau_from_presentation,
    well_definedness,
)
from .tensornet import TensorNetwork, clifford_word, contract, stabilizer_state_from_word

