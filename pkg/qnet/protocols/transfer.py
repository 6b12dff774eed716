"""
Quantum state transfer between the first and last node of a network, and its loss-tolerant heralded variant.

A single photon injected in line down crosses Hadamard, node 1, Hadamard, node N, Hadamard: this realizes a
controlled-Z between qubits 1 and N (line up adds sigma_z on qubit 1). Measuring qubit 1 in the x basis then teleports
its state onto qubit N, which starts in |+>.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from qnet.exceptions import InvalidParameters
from qnet.protocols.base import (
    CNOT,
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
    line_diagonals,
    mixture,
    normalized_amplitudes,
    photon_branches,
    resonant_node,
)
from qnet.qops import DensityMatrix, HilbertSpace
from qnet.scatter import NodeParams, far_detuned
from qnet.slh import DOWN, UP, NetworkSpec

logger = logging.getLogger(__name__)

ZERO = np.array([1.0, 0.0])
BELL = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)


def qst_fidelity_closed_form(delta_p: float | np.ndarray, gamma_r: float = 1.0) -> float | np.ndarray:
    """Entanglement fidelity of the state transfer for a photon detuned by ``delta_p``"""
    if gamma_r <= 0:
        raise InvalidParameters(f"gamma_r must be > 0, got {gamma_r}")
    g, d = gamma_r, np.asarray(delta_p, dtype=float)
    numerator = g**8 - 2 * g**6 * d**2 - 2 * g**5 * d**3 + 3 * g**4 * d**4 + 2 * g**3 * d**5 + 4 * d**8
    return numerator / (g**4 + 4 * d**4) ** 2


def transfer_network(
    n_nodes: int,
    gamma_r: float = 1.0,
    node: NodeParams | None = None,
    phi_tilde: float = 0.0,
) -> NetworkSpec:
    """Nodes 1 and N resonant, the nodes in between far detuned; Hadamards before node 1, after node 1 and at the end"""
    if n_nodes < 2:
        raise InvalidParameters(f"state transfer needs at least 2 nodes, got {n_nodes}")
    node = node or resonant_node(gamma_r)
    idle = far_detuned(node, gamma_r)
    nodes = (node,) + (idle,) * (n_nodes - 2) + (node,)
    unitaries = (HADAMARD, absorbed(HADAMARD)) + (np.eye(2),) * (n_nodes - 2) + (absorbed(HADAMARD),)
    return NetworkSpec(nodes, unitaries, phi_tilde)


def controlled_z_subcircuit(
    delta_p: float = 0.0, gamma_r: float = 1.0, backend: str = "ideal"
) -> dict[int, np.ndarray]:
    """4x4 operator on (qubit 1, qubit N) heralded by each output line, after the line-up correction.

    Normalized by sqrt(2); both lines give the controlled-Z at delta_p = 0.
    """
    diagonals = line_diagonals(transfer_network(2, gamma_r), delta_p, backend)
    correction = {DOWN: np.ones(4), UP: np.array([1.0, 1.0, -1.0, -1.0])}
    return {line: np.diag(np.sqrt(2) * correction[line] * diagonals[line]) for line in (DOWN, UP)}


def _transfer_branches(
    register: Register, labels: Sequence[str], spec: NetworkSpec, delta_p: float, backend: str
) -> list[Branch]:
    first, last = labels[0], labels[-1]
    branches = []
    for line, probability, state in photon_branches(register, labels, spec, delta_p, backend):
        if state is None:
            branches.append(Branch((f"photon:{LOST}",), probability, None))
            continue
        corrections = []
        if line == UP:
            state = state.apply(PAULI_Z, first)
            corrections.append(f"Z:{first}")
        state = state.apply(HADAMARD, first)
        for outcome in (0, 1):
            p_outcome, projected = state.project(first, outcome)
            if p_outcome == 0:
                continue
            projected = projected.apply(HADAMARD, last)
            applied = corrections + [f"H:{last}"]
            if outcome:
                projected = projected.apply(PAULI_Z, last)
                applied.append(f"Z:{last}")
            record = (f"photon:{LINE_NAMES[line]}", f"{first}:{outcome}")
            branches.append(Branch(record, probability * p_outcome, projected, tuple(applied)))
    return branches


def _initial_register(spec: NetworkSpec, first_state: np.ndarray, extra: dict | None = None) -> Register:
    labels = [f"q{n}" for n in range(1, spec.n_nodes + 1)]
    states = {label: ZERO for label in labels}
    states[labels[0]] = first_state
    states[labels[-1]] = PLUS
    states.update(extra or {})
    return Register.product(states)


def run_state_transfer(
    spec: NetworkSpec, input_state: Sequence[complex], delta_p: float = 0.0, backend: str = "ideal"
) -> ProtocolOutcome:
    """Teleport ``input_state`` = (c0, c1) from qubit 1 to qubit N.

    The returned state and fidelity are conditioned on the photon being detected.
    """
    target = normalized_amplitudes(input_state)
    register = _initial_register(spec, target)
    labels = register.labels
    branches = []
    for branch in _transfer_branches(register, labels, spec, delta_p, backend):
        if branch.state is not None:
            rho = branch.state.density([labels[-1]])
            fidelity = float(np.real(np.vdot(target, rho @ target)))
            branch = Branch(branch.record, branch.probability, branch.state, branch.corrections, fidelity)
        branches.append(branch)
    state = mixture(branches, [labels[-1]])
    fidelity = float(np.real(np.vdot(target, state.matrix @ target))) if state is not None else 0.0
    logger.debug("State transfer over %d nodes at delta_p=%s: fidelity %.12f", spec.n_nodes, delta_p, fidelity)
    return ProtocolOutcome("qst", tuple(branches), state, fidelity)


def qst_entanglement_fidelity(spec: NetworkSpec, delta_p: float, backend: str = "ideal") -> float:
    """Average transfer fidelity, from a qubit 1 maximally entangled with an ancilla ``a``.

    Undetected photons count as failures, so losses lower the result.
    """
    register = _initial_register(spec, ZERO, {"a": ZERO})
    register = register.apply(HADAMARD, "q1").apply_two(CNOT, "q1", "a")
    last = register.labels[spec.n_nodes - 1]
    fidelity = 0.0
    for branch in _transfer_branches(register, register.labels[: spec.n_nodes], spec, delta_p, backend):
        if branch.state is not None:
            rho = branch.state.density([last, "a"])
            fidelity += branch.probability * float(np.real(np.vdot(BELL, rho @ BELL)))
    return fidelity


def _entangle_backup(register: Register) -> Register:
    """(c0|0>+c1|1>)_b |0>_1 -> (|0>_1 X|psi>_b + |1>_1 |psi>_b) / sqrt(2)"""
    return register.apply(HADAMARD, "q1").apply(PAULI_X, "b").apply_two(CNOT, "q1", "b")


def _sample(rng: np.random.Generator, probabilities: Sequence[float]) -> int:
    probabilities = np.asarray(probabilities, dtype=float)
    return int(rng.choice(len(probabilities), p=probabilities / probabilities.sum()))


def _measure(register: Register, label: str, rng: np.random.Generator) -> tuple[int, Register]:
    outcome = _sample(rng, [register.probability(label, 0), register.probability(label, 1)])
    return outcome, register.project(label, outcome)[1]


def run_heralded_retry(
    loss_probability: float,
    input_state: Sequence[complex] = (1.0, 0.0),
    seed: int = 0,
    runs: int = 1,
    delta_p: float = 0.0,
    gamma_r: float = 1.0,
    backend: str = "ideal",
) -> ProtocolOutcome:
    """State transfer protected by a backup qubit ``b``, repeated until the photon is detected.

    Each attempt loses the photon with probability ``loss_probability`` after it scattered. A lost photon is
    recovered from by measuring qubit 1, which leaves the state on ``b`` up to a known sigma_x, and re-entangling.
    """
    if not 0 <= loss_probability < 1:
        raise InvalidParameters(f"loss probability must be in [0, 1), got {loss_probability}")
    if runs < 1:
        raise InvalidParameters(f"runs must be >= 1, got {runs}")
    target = normalized_amplitudes(input_state)
    spec = transfer_network(2, gamma_r)
    diagonals = line_diagonals(spec, delta_p, backend)
    nodes = ["q1", "q2"]
    rng = np.random.default_rng(seed)

    trials = np.zeros(runs, dtype=int)
    fidelities = np.zeros(runs)
    rho_total = np.zeros((2, 2), dtype=np.complex128)
    for run in range(runs):
        register = Register.product({"q1": target, "b": ZERO, "q2": PLUS})
        # Move the input onto the backup qubit, then spread it over (q1, b)
        register = register.apply_two(CNOT, "q1", "b").apply_two(CNOT, "b", "q1")
        register = _entangle_backup(register)
        while True:
            trials[run] += 1
            scattered = [register.apply_diagonal(diagonals[line], nodes) for line in (DOWN, UP)]
            line = _sample(rng, [state.norm() ** 2 for state in scattered])
            register = scattered[line].normalized()
            if rng.random() < loss_probability:
                outcome, register = _measure(register, "q1", rng)
                if outcome:
                    register = register.apply(PAULI_Z, "q2")
                else:
                    register = register.apply(PAULI_X, "b")
                register = _entangle_backup(register.reset("q1", outcome))
                continue
            if line == UP:
                register = register.apply(PAULI_Z, "q1")
            outcome, register = _measure(register.apply(HADAMARD, "q1"), "q1", rng)
            register = register.apply(HADAMARD, "q2")
            if outcome:
                register = register.apply(PAULI_Z, "q2")
            backup, register = _measure(register, "b", rng)
            if not backup:
                register = register.apply(PAULI_X, "q2")
            break
        rho = register.density(["q2"])
        rho_total += rho
        fidelities[run] = float(np.real(np.vdot(target, rho @ target)))

    counts = np.bincount(trials)
    branches = tuple(
        Branch((f"trials:{k}",), float(count / runs), None) for k, count in enumerate(counts) if count and k
    )
    sem = float(np.std(trials, ddof=1) / np.sqrt(runs)) if runs > 1 else 0.0
    data = {
        "trials": trials,
        "mean_trials": float(np.mean(trials)),
        "sem_trials": sem,
        "expected_trials": 1.0 / (1.0 - loss_probability),
        "min_fidelity": float(np.min(fidelities)),
    }
    logger.debug(
        "Heralded transfer, P_d=%s: %.4f trials on average over %d runs", loss_probability, data["mean_trials"], runs
    )
    state = DensityMatrix(HilbertSpace((("q2", 2),)), rho_total / runs)
    return ProtocolOutcome("qst_retry", branches, state, float(np.mean(fidelities)), data)
