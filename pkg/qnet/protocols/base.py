"""
Building blocks shared by every protocol: a qubit register, photon scattering branches and protocol outcomes.

Protocol registers use the node's shifting level as logical ``|0>``: a resonant node (Delta = -gamma_r/2,
V = gamma_r) then acts on the line carrying the nodes as ``-i sigma_z`` at delta_p = 0. That phase is absorbed into the
beamsplitter following each resonant node, so an ideal node contributes exactly ``sigma_z`` to the up line.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from qnet.conf import settings
from qnet.exceptions import DimensionMismatch, InvalidParameters, UnknownSubsystem
from qnet.gue import optimal_params
from qnet.qops import DensityMatrix, HilbertSpace, StateVector, partial_trace, sigma_x, sigma_z
from qnet.scatter import RIGHT, NodeParams, ScatteringResult, general_scattering, ideal_scattering
from qnet.slh import DOWN, UP, NetworkSpec, hadamard

logger = logging.getLogger(__name__)

HADAMARD = hadamard()
PAULI_X = sigma_x().matrix
PAULI_Z = sigma_z().matrix
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)

PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
MINUS = np.array([1.0, -1.0]) / np.sqrt(2)

LINE_NAMES = {DOWN: "down", UP: "up"}
LOST = "lost"

# Up-line factor of a resonant node at delta_p = 0, on the logical |0>, |1> levels
NODE_PHASE = -1j

BACKENDS: dict[str, Callable[..., ScatteringResult]] = {
    "ideal": ideal_scattering,
    "general": general_scattering,
}


def resonant_node(gamma_r: float = 1.0, r: float = 0.0, v_ratio: float = 1.0, **gue_changes) -> NodeParams:
    """Unidirectional node at Delta = -gamma_r/2 whose qubit shifts the GUE by V = v_ratio * gamma_r.

    At delta_p = 0 this node acts on its line as ``i sigma_z`` in the qubit basis.
    """
    if gamma_r <= 0:
        raise InvalidParameters(f"gamma_r must be > 0, got {gamma_r}")
    phi_opt = optimal_params(r, 1.0).phi_opt
    gamma = gamma_r / (2 * (1 + 2 * r * np.cos(phi_opt) + r**2))
    return NodeParams.optimal(r, gamma, delta_n=-gamma_r / 2, v=v_ratio * gamma_r, **gue_changes)


def absorbed(unitary: np.ndarray) -> np.ndarray:
    """Beamsplitter following a resonant node, with the node phase on the up line removed"""
    return np.asarray(unitary, dtype=np.complex128) @ np.diag([1.0, np.conj(NODE_PHASE)])


def chained_beamsplitters(n_nodes: int, first: np.ndarray, last: np.ndarray, inner: np.ndarray | None = None):
    """U_0 = first, U_n = inner after each node and U_N = last, every U_n (n >= 1) absorbing its node phase"""
    inner = np.eye(2) if inner is None else inner
    unitaries = [np.asarray(first, dtype=np.complex128)]
    unitaries += [absorbed(inner) for _ in range(n_nodes - 1)]
    unitaries.append(absorbed(last))
    return tuple(unitaries)


def line_diagonals(
    spec: NetworkSpec, delta_p: float, backend: str = "ideal", jobs: int = 1
) -> dict[int, np.ndarray]:
    """Right-moving output amplitudes for a photon injected in line down, as diagonals over logical bitstrings.

    Logical ``|0>`` of every qubit is the physical level that shifts its GUE by V, i.e. physical ``|1>`` of
    :class:`~qnet.scatter.NodeParams`. Entry ``b`` of a returned diagonal therefore holds the physical amplitude of
    the complementary bitstring, and ``ScatteringResult.diagonal`` must not be mixed with these arrays unreversed.
    """
    try:
        scatter = BACKENDS[backend]
    except KeyError:
        raise InvalidParameters(f'unknown scattering backend "{backend}"') from None
    result = scatter(spec, delta_p, jobs=jobs) if backend == "general" else scatter(spec, delta_p)
    # Logical levels are the physical ones flipped, which reverses every bitstring index
    return {line: result.diagonal(RIGHT, line, DOWN)[::-1] for line in (DOWN, UP)}


class Register:
    """Pure state of named qubits, stored as a tensor with one axis of length 2 per qubit"""

    def __init__(self, labels: Sequence[str], amplitudes: np.ndarray):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise InvalidParameters(f"duplicate qubit labels in {self.labels}")
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.size != 2 ** len(self.labels):
            raise DimensionMismatch(f"{amplitudes.size} amplitudes for {len(self.labels)} qubits")
        self.amplitudes = amplitudes.reshape((2,) * len(self.labels))

    @classmethod
    def product(cls, states: Mapping[str, Sequence[complex]]) -> Register:
        """Product state, one normalized single-qubit vector per label"""
        amplitudes = np.ones(1, dtype=np.complex128)
        for vector in states.values():
            amplitudes = np.kron(amplitudes, normalized_amplitudes(vector))
        return cls(tuple(states), amplitudes)

    def copy(self) -> Register:
        return Register(self.labels, self.amplitudes.copy())

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownSubsystem(label) from None

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(tuple((label, 2) for label in self.labels))

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def normalized(self) -> Register:
        return Register(self.labels, self.amplitudes / self.norm())

    def apply(self, gate: np.ndarray, label: str) -> Register:
        k = self.axis(label)
        amplitudes = np.tensordot(gate, self.amplitudes, axes=([1], [k]))
        return Register(self.labels, np.moveaxis(amplitudes, 0, k))

    def apply_many(self, gate: np.ndarray, labels: Sequence[str]) -> Register:
        register = self
        for label in labels:
            register = register.apply(gate, label)
        return register

    def apply_two(self, gate: np.ndarray, control: str, target: str) -> Register:
        """Two-qubit gate in the (control, target) basis"""
        axes = [self.axis(control), self.axis(target)]
        amplitudes = np.tensordot(gate.reshape(2, 2, 2, 2), self.amplitudes, axes=([2, 3], axes))
        return Register(self.labels, np.moveaxis(amplitudes, [0, 1], axes))

    def apply_diagonal(self, diagonal: np.ndarray, labels: Sequence[str]) -> Register:
        """Multiply by an operator diagonal in the computational basis of ``labels`` (first label most significant)"""
        axes = [self.axis(label) for label in labels]
        k = len(axes)
        moved = np.moveaxis(self.amplitudes, axes, range(k))
        factor = np.asarray(diagonal).reshape((2,) * k + (1,) * (len(self.labels) - k))
        return Register(self.labels, np.moveaxis(moved * factor, range(k), axes))

    def probability(self, label: str, outcome: int) -> float:
        k = self.axis(label)
        return float(np.sum(np.abs(np.take(self.amplitudes, outcome, axis=k)) ** 2))

    def project(self, label: str, outcome: int) -> tuple[float, Register]:
        """Computational-basis measurement branch: its probability and the renormalized post-measurement state"""
        mask = np.zeros(2)
        mask[outcome] = 1.0
        projected = self.apply_diagonal(mask, [label])
        probability = projected.norm() ** 2
        if probability == 0:
            return 0.0, projected
        return probability, projected.normalized()

    def with_qubit(self, label: str, vector: Sequence[complex]) -> Register:
        """Prepend a qubit in state ``vector``"""
        amplitudes = np.tensordot(normalized_amplitudes(vector), self.amplitudes, axes=0)
        return Register((label, *self.labels), amplitudes)

    def without(self, label: str, outcome: int) -> Register:
        """Drop a qubit already projected on ``outcome``"""
        k = self.axis(label)
        labels = self.labels[:k] + self.labels[k + 1 :]
        return Register(labels, np.take(self.amplitudes, outcome, axis=k)).normalized()

    def reset(self, label: str, outcome: int) -> Register:
        """Bring a qubit measured in ``outcome`` back to |0>"""
        return self.apply(PAULI_X, label) if outcome else self

    def density(self, keep: Sequence[str] | None = None) -> np.ndarray:
        rho = np.outer(self.vector, self.vector.conj())
        if keep is None:
            return rho
        return partial_trace(rho, self.space, keep)

    def state_vector(self) -> StateVector:
        return StateVector(self.space, self.vector)


@dataclass(frozen=True)
class Branch:
    """One measurement record of a protocol.

    ``record`` lists the observations in order, e.g. ``("photon:up", "q1:0")``. ``state`` is None when no
    post-measurement state is kept: a lost photon, or a branch that only aggregates statistics.
    """

    record: tuple[str, ...]
    probability: float
    state: Register | None
    corrections: tuple[str, ...] = ()
    fidelity: float | None = None


@dataclass(frozen=True)
class ProtocolOutcome:
    name: str
    branches: tuple[Branch, ...]
    state: DensityMatrix | None = None
    fidelity: float | None = None
    data: dict = field(default_factory=dict)

    @property
    def branch_probabilities(self) -> dict[tuple[str, ...], float]:
        return {branch.record: branch.probability for branch in self.branches}

    def total_probability(self) -> float:
        return float(sum(branch.probability for branch in self.branches))

    def detected(self) -> tuple[Branch, ...]:
        return tuple(branch for branch in self.branches if branch.state is not None)


def photon_branches(
    register: Register,
    qubits: Sequence[str],
    spec: NetworkSpec,
    delta_p: float,
    backend: str = "ideal",
) -> list[tuple[int | str, float, Register | None]]:
    """Scatter one photon, injected in line down, on the nodes holding ``qubits`` (in network order).

    Returns ``(line, probability, post-detection state)`` for both right outputs, plus a lost branch carrying the
    probability that the photon leaves to the left.
    """
    if len(qubits) != spec.n_nodes:
        raise DimensionMismatch(f"{len(qubits)} qubits for a network of {spec.n_nodes} nodes")
    diagonals = line_diagonals(spec, delta_p, backend)
    branches: list[tuple[int | str, float, Register | None]] = []
    for line in (DOWN, UP):
        scattered = register.apply_diagonal(diagonals[line], qubits)
        probability = scattered.norm() ** 2
        if probability > 0:
            branches.append((line, probability, scattered.normalized()))
    lost = 1.0 - sum(branch[1] for branch in branches)
    if lost > settings.QNET_NORM_ATOL:
        branches.append((LOST, lost, None))
    return branches


def parity_spec(n_nodes: int, gamma_r: float = 1.0, node: NodeParams | None = None, phi_tilde: float = 0.0):
    """Network measuring the parity of its ``n_nodes`` qubits: Hadamards at both ends, nodes in between"""
    node = node or resonant_node(gamma_r)
    return NetworkSpec((node,) * n_nodes, chained_beamsplitters(n_nodes, HADAMARD, HADAMARD), phi_tilde)


def controlled_spec(n_targets: int, gamma_r: float = 1.0, node: NodeParams | None = None, phi_tilde: float = 0.0):
    """Control node followed by ``n_targets`` nodes, a Hadamard between them: a photon-mediated controlled string"""
    node = node or resonant_node(gamma_r)
    n_nodes = n_targets + 1
    unitaries = [HADAMARD, absorbed(HADAMARD)] + [absorbed(np.eye(2))] * (n_targets - 1) + [absorbed(HADAMARD)]
    return NetworkSpec((node,) * n_nodes, tuple(unitaries), phi_tilde)


def measure_parity(
    register: Register,
    qubits: Sequence[str],
    delta_p: float = 0.0,
    gamma_r: float = 1.0,
    basis: str = "z",
    backend: str = "ideal",
) -> list[tuple[int | str, float, Register | None]]:
    """Photon-heralded measurement of the Pauli string on ``qubits``: line down heralds +1, line up -1.

    ``basis="x"`` rotates the qubits with Hadamards before and after the scattering.
    """
    rotate = _basis_rotation(basis)
    if rotate:
        register = register.apply_many(HADAMARD, qubits)
    branches = photon_branches(register, qubits, parity_spec(len(qubits), gamma_r), delta_p, backend)
    if rotate:
        branches = [(line, p, state.apply_many(HADAMARD, qubits) if state else None) for line, p, state in branches]
    return branches


def controlled_string(
    register: Register,
    control: str,
    targets: Sequence[str],
    delta_p: float = 0.0,
    gamma_r: float = 1.0,
    basis: str = "z",
    backend: str = "ideal",
    control_first: bool = True,
) -> list[tuple[int | str, float, Register | None]]:
    """Controlled Pauli string from ``control`` onto ``targets``.

    The photon meets the control first by default; the up-line correction is then sigma_z on the control. With
    ``control_first=False`` the photon crosses the targets first and line up is corrected with the string itself.
    """
    rotate = _basis_rotation(basis)
    if rotate:
        register = register.apply_many(HADAMARD, targets)
    if control_first:
        qubits = [control, *targets]
        spec = controlled_spec(len(targets), gamma_r)
    else:
        qubits = [*targets, control]
        node = resonant_node(gamma_r)
        unitaries = chained_beamsplitters(len(targets), HADAMARD, HADAMARD) + (absorbed(HADAMARD),)
        spec = NetworkSpec((node,) * len(qubits), unitaries)
    branches = []
    for line, probability, state in photon_branches(register, qubits, spec, delta_p, backend):
        if state is not None:
            if line == UP:
                state = state.apply(PAULI_Z, control) if control_first else state.apply_many(PAULI_Z, targets)
            if rotate:
                state = state.apply_many(HADAMARD, targets)
        branches.append((line, probability, state))
    return branches


def _basis_rotation(basis: str) -> bool:
    if basis not in ("z", "x"):
        raise InvalidParameters(f'string basis must be "z" or "x", got "{basis}"')
    return basis == "x"


def normalized_amplitudes(amplitudes: Sequence[complex]) -> np.ndarray:
    vector = np.asarray(amplitudes, dtype=np.complex128)
    if vector.shape != (2,):
        raise InvalidParameters(f"a qubit state needs two amplitudes, got {len(vector)}")
    if abs(np.linalg.norm(vector) - 1) > 1e-9:
        raise InvalidParameters(f"qubit amplitudes {amplitudes} are not normalized")
    return vector


def mixture(branches: Sequence[Branch], keep: Sequence[str]) -> DensityMatrix | None:
    """Probability-weighted state of the detected branches, conditioned on detection"""
    detected = [(branch.probability, branch.state) for branch in branches if branch.state is not None]
    detected = [(p, state) for p, state in detected if p > 0]
    if not detected:
        return None
    total = sum(p for p, _ in detected)
    rho = sum(p * state.density(keep) for p, state in detected) / total
    space = HilbertSpace(tuple((label, 2) for label in detected[0][1].labels if label in keep))
    return DensityMatrix(space, rho)
