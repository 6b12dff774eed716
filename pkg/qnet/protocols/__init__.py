"""
Quantum information protocols driven by single photons scattered on GUE nodes.
"""

from qnet.protocols.base import (
    BACKENDS,
    Branch,
    ProtocolOutcome,
    Register,
    controlled_string,
    line_diagonals,
    measure_parity,
    resonant_node,
)
from qnet.protocols.detector import DetectorResponse, detection_probability, photon_detector
from qnet.protocols.parity import (
    ghz_state,
    parity_fidelity,
    parity_network,
    parity_projectors,
    prepare_cluster_1d,
    prepare_ghz,
)
from qnet.protocols.pulses import PulseScan, PulseSpec, pulse_average, pulse_fidelity_scan
from qnet.protocols.toric import (
    ToricLattice,
    code_state,
    logical_sign_table,
    solve_gf2,
    stabilizer_values,
    toric_generate,
    toric_logical,
)
from qnet.protocols.transfer import (
    controlled_z_subcircuit,
    qst_entanglement_fidelity,
    qst_fidelity_closed_form,
    run_heralded_retry,
    run_state_transfer,
    transfer_network,
)

__all__ = [
    "BACKENDS",
    "Branch",
    "DetectorResponse",
    "ProtocolOutcome",
    "PulseScan",
    "PulseSpec",
    "Register",
    "ToricLattice",
    "code_state",
    "controlled_string",
    "controlled_z_subcircuit",
    "detection_probability",
    "ghz_state",
    "line_diagonals",
    "logical_sign_table",
    "measure_parity",
    "parity_fidelity",
    "parity_network",
    "parity_projectors",
    "photon_detector",
    "prepare_cluster_1d",
    "prepare_ghz",
    "pulse_average",
    "pulse_fidelity_scan",
    "qst_entanglement_fidelity",
    "qst_fidelity_closed_form",
    "resonant_node",
    "run_heralded_retry",
    "run_state_transfer",
    "solve_gf2",
    "stabilizer_values",
    "toric_generate",
    "toric_logical",
    "transfer_network",
]
