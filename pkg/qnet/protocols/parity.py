"""
Parity measurements with a single photon, and the entangled states they herald (GHZ and 1D cluster states).

Qubit ``n`` of a network sits on node ``n``; subsets are given as 1-based node indices. The photon enters line down and
its output line heralds the parity: down for +1, up for -1.
"""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

import numpy as np

from qnet.exceptions import InvalidParameters
from qnet.helpers import bitstrings
from qnet.protocols.base import (
    HADAMARD,
    LINE_NAMES,
    LOST,
    PAULI_X,
    PAULI_Z,
    PLUS,
    Branch,
    ProtocolOutcome,
    Register,
    absorbed,
    chained_beamsplitters,
    line_diagonals,
    mixture,
    photon_branches,
    resonant_node,
)
from qnet.scatter import NodeParams, far_detuned
from qnet.slh import DOWN, UP, NetworkSpec

logger = logging.getLogger(__name__)


def qubit_labels(n_qubits: int, start: int = 1) -> tuple[str, ...]:
    return tuple(f"q{n}" for n in range(start, start + n_qubits))


def _check_subset(n_qubits: int, subset: Iterable[int]) -> tuple[int, ...]:
    members = tuple(sorted(set(subset)))
    if any(not 1 <= n <= n_qubits for n in members):
        raise InvalidParameters(f"subset {members} is not within nodes 1..{n_qubits}")
    return members


def parity_diagonal(n_qubits: int, subset: Iterable[int]) -> np.ndarray:
    """Eigenvalues of prod_{n in subset} sigma_z^n over all bitstrings"""
    members = _check_subset(n_qubits, subset)
    return np.array([(-1) ** sum(bits[n - 1] for n in members) for bits in bitstrings(n_qubits)], dtype=float)


def parity_projectors(n_qubits: int, subset: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    """Projectors (1 + P)/2 and (1 - P)/2 onto the two parity eigenspaces"""
    parity = parity_diagonal(n_qubits, subset)
    return np.diag((1 + parity) / 2), np.diag((1 - parity) / 2)


def parity_network(
    n_qubits: int,
    subset: Iterable[int],
    gamma_r: float = 1.0,
    node: NodeParams | None = None,
    phi_tilde: float = 0.0,
    idle: str = "far",
) -> NetworkSpec:
    """Network measuring the parity of ``subset`` among ``n_qubits`` qubits.

    With ``idle="far"`` the other nodes stay in the network, pushed QNET_FAR_DETUNING gamma_r off resonance. With
    ``idle="exact"`` they are dropped and the network only holds the subset, in order.
    """
    members = _check_subset(n_qubits, subset)
    node = node or resonant_node(gamma_r)
    if idle == "exact":
        if not members:
            raise InvalidParameters("an exact parity network needs at least one qubit")
        return NetworkSpec((node,) * len(members), chained_beamsplitters(len(members), HADAMARD, HADAMARD), phi_tilde)
    if idle != "far":
        raise InvalidParameters(f'idle nodes are either "far" or "exact", got "{idle}"')

    nodes = []
    unitaries = [HADAMARD]
    for n in range(1, n_qubits + 1):
        resonant = n in members
        nodes.append(node if resonant else far_detuned(node, gamma_r))
        base = HADAMARD if n == n_qubits else np.eye(2)
        unitaries.append(absorbed(base) if resonant else base)
    return NetworkSpec(tuple(nodes), tuple(unitaries), phi_tilde)


def ideal_parity_states(n_qubits: int, subset: Iterable[int]) -> dict[int, np.ndarray | None]:
    """Normalized (1 +- P)|Psi_+> for lines down and up; None where the projection vanishes"""
    parity = parity_diagonal(n_qubits, subset)
    plus = np.full(2**n_qubits, 2 ** (-n_qubits / 2), dtype=np.complex128)
    states: dict[int, np.ndarray | None] = {}
    for line, sign in ((DOWN, 1.0), (UP, -1.0)):
        projected = (1 + sign * parity) * plus
        norm = np.linalg.norm(projected)
        states[line] = projected / norm if norm > 1e-12 else None
    return states


def parity_fidelity(spec: NetworkSpec, subset: Iterable[int], delta_p: float, backend: str = "ideal") -> float:
    """sum_j |<Psi_j^ideal| S^{j,down} |Psi_+>|^2 for qubits prepared in |+> on every node of ``spec``"""
    n_qubits = spec.n_nodes
    diagonals = line_diagonals(spec, delta_p, backend)
    plus = np.full(2**n_qubits, 2 ** (-n_qubits / 2), dtype=np.complex128)
    fidelity = 0.0
    for line, ideal in ideal_parity_states(n_qubits, subset).items():
        if ideal is not None:
            fidelity += abs(np.vdot(ideal, diagonals[line] * plus)) ** 2
    return float(fidelity)


def ghz_state(n_qubits: int) -> np.ndarray:
    """(|+...+> + |-...->)/sqrt(2)"""
    plus = np.full(2**n_qubits, 2 ** (-n_qubits / 2))
    minus = plus * parity_diagonal(n_qubits, range(1, n_qubits + 1))
    return (plus + minus) / np.sqrt(2)


def cluster_state(n_qubits: int) -> np.ndarray:
    """prod_m CZ_{m,m+1} |+...+>"""
    signs = np.array([(-1) ** sum(a * b for a, b in zip(bits, bits[1:])) for bits in bitstrings(n_qubits)])
    return signs * 2 ** (-n_qubits / 2)


def _herald(
    name: str,
    spec: NetworkSpec,
    target: np.ndarray,
    corrections: dict[int, Sequence[tuple[str, np.ndarray, str]]],
    delta_p: float,
    backend: str,
) -> ProtocolOutcome:
    labels = qubit_labels(spec.n_nodes)
    register = Register.product({label: PLUS for label in labels})
    branches = []
    for line, probability, state in photon_branches(register, labels, spec, delta_p, backend):
        if state is None:
            branches.append(Branch((f"photon:{LOST}",), probability, None))
            continue
        applied = []
        for gate_name, gate, label in corrections[line]:
            state = state.apply(gate, label)
            applied.append(f"{gate_name}:{label}")
        fidelity = float(abs(np.vdot(target, state.vector)) ** 2)
        branches.append(Branch((f"photon:{LINE_NAMES[line]}",), probability, state, tuple(applied), fidelity))

    detected = [branch for branch in branches if branch.state is not None]
    total = sum(branch.probability for branch in detected)
    fidelity = sum(branch.probability * branch.fidelity for branch in detected) / total  # type: ignore[operator]
    logger.debug("%s on %d qubits at delta_p=%s: fidelity %.12f", name, spec.n_nodes, delta_p, fidelity)
    return ProtocolOutcome(name, tuple(branches), mixture(branches, labels), float(fidelity))


def prepare_ghz(
    n_qubits: int, delta_p: float = 0.0, gamma_r: float = 1.0, backend: str = "ideal", phi_tilde: float = 0.0
) -> ProtocolOutcome:
    """GHZ state from |+...+>: a photon measures the parity of all qubits, line up is fixed with sigma_x on qubit 1"""
    if n_qubits < 2:
        raise InvalidParameters(f"a GHZ state needs at least 2 qubits, got {n_qubits}")
    node = resonant_node(gamma_r)
    spec = NetworkSpec((node,) * n_qubits, chained_beamsplitters(n_qubits, HADAMARD, HADAMARD), phi_tilde)
    corrections = {DOWN: [], UP: [("X", PAULI_X, "q1")]}
    return _herald("ghz", spec, ghz_state(n_qubits), corrections, delta_p, backend)


def prepare_cluster_1d(
    n_qubits: int, delta_p: float = 0.0, gamma_r: float = 1.0, backend: str = "ideal", phi_tilde: float = 0.0
) -> ProtocolOutcome:
    """Linear cluster state from |+...+> with Hadamard beamsplitters after every node.

    Line down leaves prod_n H_n |C>, line up prod_n H_n Z_N |C>; both are undone with local gates.
    """
    if n_qubits < 2:
        raise InvalidParameters(f"a cluster state needs at least 2 qubits, got {n_qubits}")
    node = resonant_node(gamma_r)
    unitaries = chained_beamsplitters(n_qubits, HADAMARD, HADAMARD, inner=HADAMARD)
    spec = NetworkSpec((node,) * n_qubits, unitaries, phi_tilde)
    labels = qubit_labels(n_qubits)
    hadamards = [("H", HADAMARD, label) for label in labels]
    corrections = {DOWN: hadamards, UP: hadamards + [("Z", PAULI_Z, labels[-1])]}
    return _herald("cluster_1d", spec, cluster_state(n_qubits), corrections, delta_p, backend)
