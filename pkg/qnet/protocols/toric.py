"""
Toric code on an ``n_side`` x ``n_side`` periodic lattice, generated and manipulated with single photons.

Qubits live on the edges: ``h(x, y)`` joins sites (x, y) and (x+1, y), ``v(x, y)`` joins (x, y) and (x, y+1).
Plaquette operators A_p are products of sigma_z around a face, vertex operators B_v products of sigma_x around a site.
Starting from |+...+>, every B_v is already +1; each A_p is measured with a parity photon and the -1 outcomes are
undone with sigma_x corrections found by solving the plaquette incidence system over GF(2).

The four code states are |Phi_1> (projection of |+...+>), Z_1|Phi_1>, Z_2|Phi_1> and Z_2 Z_1|Phi_1>. Logical
qubits are written on the (|Phi_1>, |Phi_2>) pair through the ancilla ``q0``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from qnet.conf import settings
from qnet.exceptions import CodeSpaceError, CodeSpaceWarning, InvalidParameters, PreconditionError, SizeLimitExceeded
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
    controlled_string,
    measure_parity,
    mixture,
    normalized_amplitudes,
)
from qnet.slh import UP

logger = logging.getLogger(__name__)

ANCILLA = "q0"
LOGICAL_OPERATORS = ("Z1", "Z2", "X1", "X2")


@dataclass(frozen=True)
class ToricLattice:
    n_side: int

    def __post_init__(self):
        if self.n_side < 2:
            raise InvalidParameters(f"a toric lattice needs n_side >= 2, got {self.n_side}")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_side**2

    def horizontal(self, x: int, y: int) -> int:
        n = self.n_side
        return (y % n) * n + (x % n)

    def vertical(self, x: int, y: int) -> int:
        n = self.n_side
        return n * n + (y % n) * n + (x % n)

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(f"q{k + 1}" for k in range(self.n_qubits))

    @cached_property
    def plaquettes(self) -> tuple[tuple[int, ...], ...]:
        """Edges around the face whose lower left corner is site (x, y), row by row"""
        sites = [(x, y) for y in range(self.n_side) for x in range(self.n_side)]
        return tuple(
            (self.horizontal(x, y), self.horizontal(x, y + 1), self.vertical(x, y), self.vertical(x + 1, y))
            for x, y in sites
        )

    @cached_property
    def vertices(self) -> tuple[tuple[int, ...], ...]:
        """Edges meeting at site (x, y), row by row"""
        sites = [(x, y) for y in range(self.n_side) for x in range(self.n_side)]
        return tuple(
            (self.horizontal(x, y), self.horizontal(x - 1, y), self.vertical(x, y), self.vertical(x, y - 1))
            for x, y in sites
        )

    @cached_property
    def paths(self) -> dict[str, tuple[int, ...]]:
        """Supports of the logical strings. Z_1 anticommutes with X_1 only, Z_2 with X_2 only."""
        n = self.n_side
        return {
            "Z1": tuple(self.horizontal(x, 0) for x in range(n)),
            "Z2": tuple(self.vertical(0, y) for y in range(n)),
            "X1": tuple(self.horizontal(0, y) for y in range(n)),
            "X2": tuple(self.vertical(x, 0) for x in range(n)),
        }

    def qubit_labels(self, indices: Sequence[int]) -> list[str]:
        return [self.labels[k] for k in indices]

    def incidence(self, kind: str) -> np.ndarray:
        """Stabilizer by qubit 0/1 matrix, for ``kind`` "plaquette" or "vertex\" """
        groups = {"plaquette": self.plaquettes, "vertex": self.vertices}
        if kind not in groups:
            raise InvalidParameters(f'incidence kind is "plaquette" or "vertex", got "{kind}"')
        matrix = np.zeros((len(groups[kind]), self.n_qubits), dtype=np.uint8)
        for row, members in enumerate(groups[kind]):
            matrix[row, list(members)] = 1
        return matrix

    @cached_property
    def independent_stabilizers(self) -> int:
        return gf2_rank(self.incidence("plaquette")) + gf2_rank(self.incidence("vertex"))

    @property
    def code_dimension(self) -> int:
        return 2 ** (self.n_qubits - self.independent_stabilizers)


def _row_reduce(matrix: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2), with its pivot columns"""
    reduced = np.array(matrix, dtype=np.uint8) % 2
    pivots: list[int] = []
    row = 0
    for col in range(reduced.shape[1]):
        if row == reduced.shape[0]:
            break
        candidates = np.flatnonzero(reduced[row:, col])
        if candidates.size == 0:
            continue
        pivot = row + candidates[0]
        reduced[[row, pivot]] = reduced[[pivot, row]]
        others = np.flatnonzero(reduced[:, col])
        others = others[others != row]
        reduced[others] ^= reduced[row]
        pivots.append(col)
        row += 1
    return reduced, pivots


def gf2_rank(matrix: np.ndarray) -> int:
    return len(_row_reduce(matrix)[1])


def solve_gf2(matrix: np.ndarray, rhs: np.ndarray, strict: bool = True) -> np.ndarray:
    """One solution x of matrix @ x = rhs (mod 2), free variables set to 0.

    An inconsistent system raises PreconditionError, unless ``strict`` is False: the offending equations are then
    ignored.
    """
    matrix = np.asarray(matrix, dtype=np.uint8) % 2
    rhs = np.asarray(rhs, dtype=np.uint8).reshape(-1) % 2
    if rhs.size != matrix.shape[0]:
        raise InvalidParameters(f"{rhs.size} right-hand sides for {matrix.shape[0]} equations")
    n_vars = matrix.shape[1]
    reduced, pivots = _row_reduce(np.column_stack([matrix, rhs]))
    solution = np.zeros(n_vars, dtype=np.uint8)
    for row, col in enumerate(pivots):
        if col == n_vars:
            if strict:
                raise PreconditionError("syndrome is not reachable with the given incidence matrix")
            continue
        solution[col] = reduced[row, n_vars]
    return solution


def _string_image(register: Register, labels: Sequence[str], gate: np.ndarray) -> Register:
    return register.apply_many(gate, labels)


def _pauli_expectation(register: Register, labels: Sequence[str], gate: np.ndarray) -> float:
    return float(np.real(np.vdot(register.vector, _string_image(register, labels, gate).vector)))


def _projected(register: Register, labels: Sequence[str], gate: np.ndarray) -> Register:
    """(1 + P) / 2 applied to ``register`` for the Pauli string P"""
    image = _string_image(register, labels, gate)
    return Register(register.labels, (register.amplitudes + image.amplitudes) / 2)


def _check_size(lattice: ToricLattice):
    if lattice.n_qubits > settings.QNET_MAX_TORIC_QUBITS:
        raise SizeLimitExceeded(
            f"{lattice.n_qubits} lattice qubits, QNET_MAX_TORIC_QUBITS is {settings.QNET_MAX_TORIC_QUBITS}"
        )


def apply_logical(register: Register, lattice: ToricLattice, name: str) -> Register:
    if name not in LOGICAL_OPERATORS:
        raise InvalidParameters(f'unknown logical operator "{name}", expected one of {LOGICAL_OPERATORS}')
    gate = PAULI_Z if name.startswith("Z") else PAULI_X
    return _string_image(register, lattice.qubit_labels(lattice.paths[name]), gate)


def code_state(lattice: ToricLattice, index: int) -> Register:
    """|Phi_index>, index in 1..4"""
    if index not in (1, 2, 3, 4):
        raise InvalidParameters(f"code states are numbered 1 to 4, got {index}")
    _check_size(lattice)
    register = Register.product({label: PLUS for label in lattice.labels})
    for plaquette in lattice.plaquettes:
        register = _projected(register, lattice.qubit_labels(plaquette), PAULI_Z)
    register = register.normalized()
    if index in (2, 4):
        register = apply_logical(register, lattice, "Z1")
    if index in (3, 4):
        register = apply_logical(register, lattice, "Z2")
    return register


def stabilizer_values(register: Register, lattice: ToricLattice) -> tuple[np.ndarray, np.ndarray]:
    """Expectation values of every A_p and every B_v"""
    plaquettes = [_pauli_expectation(register, lattice.qubit_labels(p), PAULI_Z) for p in lattice.plaquettes]
    vertices = [_pauli_expectation(register, lattice.qubit_labels(v), PAULI_X) for v in lattice.vertices]
    return np.array(plaquettes), np.array(vertices)


def code_space_overlap(register: Register, lattice: ToricLattice) -> float:
    """Squared norm of the projection of ``register`` onto the code space (other qubits left untouched)"""
    projected = register
    for plaquette in lattice.plaquettes:
        projected = _projected(projected, lattice.qubit_labels(plaquette), PAULI_Z)
    for vertex in lattice.vertices:
        projected = _projected(projected, lattice.qubit_labels(vertex), PAULI_X)
    return projected.norm() ** 2 / register.norm() ** 2


def check_code_space(register: Register, lattice: ToricLattice, atol: float = 1e-9) -> Register:
    """Return ``register``, projected back onto the code space with a CodeSpaceWarning if it had leaked out"""
    overlap = code_space_overlap(register, lattice)
    if overlap < settings.QNET_BRANCH_CUTOFF:
        raise CodeSpaceError(f"overlap {overlap:.3e}", data={"overlap": overlap})
    if overlap >= 1 - atol:
        return register
    warnings.warn(f"state projected onto the toric code space, overlap was {overlap:.6f}", CodeSpaceWarning)
    projected = register
    for plaquette in lattice.plaquettes:
        projected = _projected(projected, lattice.qubit_labels(plaquette), PAULI_Z)
    for vertex in lattice.vertices:
        projected = _projected(projected, lattice.qubit_labels(vertex), PAULI_X)
    return projected.normalized()


def logical_sign_table(lattice: ToricLattice) -> np.ndarray:
    """Entry [alpha - 1, beta - 1] is the eigenvalue of X_alpha on |Phi_beta>"""
    table = np.zeros((2, 4))
    for beta in range(4):
        state = code_state(lattice, beta + 1)
        for alpha, name in enumerate(("X1", "X2")):
            table[alpha, beta] = np.real(np.vdot(state.vector, apply_logical(state, lattice, name).vector))
    return table


def _outcome_state(branches: Sequence[Branch], keep: Sequence[str]):
    if len(keep) > settings.QNET_MAX_DENSITY_QUBITS:
        return None
    return mixture(branches, keep)


def _detected_fidelity(branches: Sequence[Branch]) -> float:
    detected = [branch for branch in branches if branch.state is not None and branch.fidelity is not None]
    total = sum(branch.probability for branch in detected)
    if total == 0:
        return 0.0
    return float(sum(branch.probability * branch.fidelity for branch in detected) / total)  # type: ignore[operator]


def _parity_sign(line) -> str:
    return "-1" if line == UP else "+1"


def toric_generate(
    lattice: ToricLattice,
    delta_p: float = 0.0,
    seed: int | None = None,
    gamma_r: float = 1.0,
    backend: str = "ideal",
) -> ProtocolOutcome:
    """Measure every plaquette with a photon, then apply the sigma_x corrections of the observed syndrome.

    Without ``seed`` every outcome branch is enumerated with its probability. With a seed a single branch is
    sampled; its record probability is kept in ``data["record_probability"]``.
    """
    _check_size(lattice)
    rng = np.random.default_rng(seed) if seed is not None else None
    frontier: list[tuple[tuple[str, ...], float, Register | None, tuple[int, ...]]] = [
        ((), 1.0, Register.product({label: PLUS for label in lattice.labels}), ())
    ]
    for index, plaquette in enumerate(lattice.plaquettes):
        qubits = lattice.qubit_labels(plaquette)
        expanded = []
        for record, probability, register, syndrome in frontier:
            if register is None:
                expanded.append((record, probability, register, syndrome))
                continue
            outcomes = [
                branch
                for branch in measure_parity(register, qubits, delta_p, gamma_r, backend=backend)
                if branch[1] > settings.QNET_BRANCH_CUTOFF
            ]
            if rng is not None:
                weights = np.array([branch[1] for branch in outcomes])
                choice = rng.choice(len(outcomes), p=weights / weights.sum())
                outcomes = [outcomes[choice]]
            for line, p_line, state in outcomes:
                if state is None:
                    expanded.append((record + (f"A{index}:{LOST}",), probability * p_line, None, syndrome))
                else:
                    observed = record + (f"A{index}:{_parity_sign(line)}",)
                    expanded.append((observed, probability * p_line, state, syndrome + (int(line == UP),)))
        frontier = expanded
        logger.debug("Plaquette %d measured, %d branches", index, len(frontier))

    target = code_state(lattice, 1)
    incidence = lattice.incidence("plaquette")
    branches = []
    for record, probability, register, syndrome in frontier:
        if register is None:
            branches.append(Branch(record, probability, None))
            continue
        flips = np.flatnonzero(solve_gf2(incidence, np.array(syndrome), strict=delta_p == 0))
        labels = lattice.qubit_labels(flips)
        register = register.apply_many(PAULI_X, labels)
        fidelity = float(abs(np.vdot(target.vector, register.vector)) ** 2)
        branches.append(Branch(record, probability, register, tuple(f"X:{label}" for label in labels), fidelity))

    values = [np.concatenate(stabilizer_values(b.state, lattice)) for b in branches if b.state is not None]
    data = {
        "independent_stabilizers": lattice.independent_stabilizers,
        "min_stabilizer": float(min(np.min(v) for v in values)) if values else float("nan"),
    }
    if rng is not None:
        data["record_probability"] = branches[0].probability
        branches = [Branch(b.record, 1.0, b.state, b.corrections, b.fidelity) for b in branches]
    fidelity = _detected_fidelity(branches)
    logger.debug(
        "Toric code generated on %d qubits: %d branches, fidelity %.12f", lattice.n_qubits, len(branches), fidelity
    )
    return ProtocolOutcome("toric_generate", tuple(branches), _outcome_state(branches, lattice.labels), fidelity, data)


def measure_logical(
    register: Register,
    lattice: ToricLattice,
    name: str,
    delta_p: float = 0.0,
    gamma_r: float = 1.0,
    backend: str = "ideal",
) -> list[Branch]:
    """Photon measurement of a logical string, as done for the stabilizers"""
    if name not in LOGICAL_OPERATORS:
        raise InvalidParameters(f'unknown logical operator "{name}", expected one of {LOGICAL_OPERATORS}')
    basis = "z" if name.startswith("Z") else "x"
    qubits = lattice.qubit_labels(lattice.paths[name])
    branches = []
    for line, probability, state in measure_parity(register, qubits, delta_p, gamma_r, basis, backend):
        if probability <= settings.QNET_BRANCH_CUTOFF:
            continue
        value = LOST if state is None else _parity_sign(line)
        branches.append(Branch((f"{name}:{value}",), probability, state))
    return branches


def _photon_record(line) -> str:
    return f"photon:{LOST if line == LOST else LINE_NAMES[line]}"


def exp_string(
    register: Register,
    lattice: ToricLattice,
    phi: float,
    string: str,
    delta_p: float = 0.0,
    gamma_r: float = 1.0,
    backend: str = "ideal",
) -> list[Branch]:
    """exp(i phi S) for a logical string S, through the ancilla ``q0``.

    The ancilla in |+> controls S via a photon, is rotated by exp(i phi sigma_x) and measured; outcome 1 is fixed by
    applying S.
    """
    if string not in LOGICAL_OPERATORS:
        raise InvalidParameters(f'unknown logical operator "{string}", expected one of {LOGICAL_OPERATORS}')
    ideal = np.cos(phi) * register.vector + 1j * np.sin(phi) * apply_logical(register, lattice, string).vector
    rotation = np.cos(phi) * np.eye(2) + 1j * np.sin(phi) * PAULI_X
    basis = "z" if string.startswith("Z") else "x"
    targets = lattice.qubit_labels(lattice.paths[string])
    extended = register.with_qubit(ANCILLA, PLUS)
    branches = []
    for line, probability, state in controlled_string(extended, ANCILLA, targets, delta_p, gamma_r, basis, backend):
        if state is None:
            branches.append(Branch((_photon_record(line),), probability, None))
            continue
        corrections = ("Z:q0",) if line == UP else ()
        state = state.apply(rotation, ANCILLA)
        for outcome in (0, 1):
            p_outcome, projected = state.project(ANCILLA, outcome)
            if p_outcome <= settings.QNET_BRANCH_CUTOFF:
                continue
            projected = projected.without(ANCILLA, outcome)
            applied = corrections
            if outcome:
                projected = apply_logical(projected, lattice, string)
                applied = corrections + (string,)
            fidelity = float(abs(np.vdot(ideal, projected.vector)) ** 2)
            record = (_photon_record(line), f"{ANCILLA}:{outcome}")
            branches.append(Branch(record, probability * p_outcome, projected, applied, fidelity))
    return branches


def logical_target(lattice: ToricLattice, amplitudes: Sequence[complex]) -> np.ndarray:
    c0, c1 = normalized_amplitudes(amplitudes)
    return c0 * code_state(lattice, 1).vector + c1 * code_state(lattice, 2).vector


def write_in(
    lattice: ToricLattice,
    amplitudes: Sequence[complex],
    delta_p: float = 0.0,
    gamma_r: float = 1.0,
    backend: str = "ideal",
) -> list[Branch]:
    """c0|0> + c1|1> on the ancilla -> c0|Phi_1> + c1|Phi_2> on the lattice"""
    target = logical_target(lattice, amplitudes)
    register = code_state(lattice, 1).with_qubit(ANCILLA, amplitudes)
    targets = lattice.qubit_labels(lattice.paths["Z1"])
    branches = []
    for line, probability, state in controlled_string(register, ANCILLA, targets, delta_p, gamma_r, "z", backend):
        if state is None:
            branches.append(Branch((_photon_record(line),), probability, None))
            continue
        corrections = ("Z:q0",) if line == UP else ()
        state = state.apply(HADAMARD, ANCILLA)
        for outcome in (0, 1):
            p_outcome, projected = state.project(ANCILLA, outcome)
            if p_outcome <= settings.QNET_BRANCH_CUTOFF:
                continue
            projected = projected.without(ANCILLA, outcome)
            applied = corrections
            if outcome:
                projected = apply_logical(projected, lattice, "X1")
                applied = corrections + ("X1",)
            fidelity = float(abs(np.vdot(target, projected.vector)) ** 2)
            record = (_photon_record(line), f"{ANCILLA}:{outcome}")
            branches.append(Branch(record, probability * p_outcome, projected, applied, fidelity))
    return branches


def read_out(
    register: Register,
    lattice: ToricLattice,
    amplitudes: Sequence[complex] | None = None,
    delta_p: float = 0.0,
    gamma_r: float = 1.0,
    backend: str = "ideal",
) -> list[Branch]:
    """c0|Phi_1> + c1|Phi_2> -> c0|0> + c1|1> on the ancilla ``q0``, the inverse of :func:`write_in`.

    The photon crosses the X_1 string before the ancilla. A Z_1 parity photon then disentangles the lattice.
    Branch fidelities are computed against ``amplitudes`` when given.
    """
    target = None if amplitudes is None else normalized_amplitudes(amplitudes)
    extended = register.with_qubit(ANCILLA, PLUS)
    targets = lattice.qubit_labels(lattice.paths["X1"])
    branches = []
    for line, probability, state in controlled_string(
        extended, ANCILLA, targets, delta_p, gamma_r, "x", backend, control_first=False
    ):
        if state is None:
            branches.append(Branch((_photon_record(line),), probability, None))
            continue
        corrections = ("X1",) if line == UP else ()
        for parity in measure_logical(state, lattice, "Z1", delta_p, gamma_r, backend):
            record = (_photon_record(line), *parity.record)
            if parity.state is None:
                branches.append(Branch(record, probability * parity.probability, None))
                continue
            final = parity.state.apply(HADAMARD, ANCILLA)
            applied = corrections + ("H:q0",)
            if parity.record[0].endswith("-1"):
                final = final.apply(PAULI_Z, ANCILLA)
                applied = applied + ("Z:q0",)
            fidelity = None
            if target is not None:
                rho = final.density([ANCILLA])
                fidelity = float(np.real(np.vdot(target, rho @ target)))
            branches.append(Branch(record, probability * parity.probability, final, applied, fidelity))
    return branches


def round_trip(
    lattice: ToricLattice,
    amplitudes: Sequence[complex],
    delta_p: float = 0.0,
    gamma_r: float = 1.0,
    backend: str = "ideal",
) -> list[Branch]:
    """Write ``amplitudes`` into the lattice and read them back onto the ancilla"""
    branches = []
    for written in write_in(lattice, amplitudes, delta_p, gamma_r, backend):
        if written.state is None:
            branches.append(written)
            continue
        for read in read_out(written.state, lattice, amplitudes, delta_p, gamma_r, backend):
            branches.append(
                Branch(
                    written.record + read.record,
                    written.probability * read.probability,
                    read.state,
                    written.corrections + read.corrections,
                    read.fidelity,
                )
            )
    return branches


ACTIONS = LOGICAL_OPERATORS + ("measure", "exp_string", "write_in", "read_out", "round_trip")


def toric_logical(
    lattice: ToricLattice,
    action: str,
    state: Register | None = None,
    delta_p: float = 0.0,
    gamma_r: float = 1.0,
    backend: str = "ideal",
    phi: float = 0.0,
    string: str = "Z1",
    amplitudes: Sequence[complex] = (1.0, 0.0),
) -> ProtocolOutcome:
    """Run one logical manipulation of the toric code.

    ``action`` is a logical operator name (Z1, Z2, X1, X2), ``measure`` (of ``string``), ``exp_string`` (exp(i phi
    string)), ``write_in``, ``read_out`` or ``round_trip`` (both, for ``amplitudes``). Operations on an existing code
    state start from ``state``, |Phi_1> by default.
    """
    if action not in ACTIONS:
        raise InvalidParameters(f'unknown toric action "{action}", expected one of {ACTIONS}')
    _check_size(lattice)
    data: dict = {"action": action}
    keep: Sequence[str] = lattice.labels

    if action == "write_in":
        branches = write_in(lattice, amplitudes, delta_p, gamma_r, backend)
    elif action == "round_trip":
        branches = round_trip(lattice, amplitudes, delta_p, gamma_r, backend)
        keep = (ANCILLA,)
    else:
        memory = check_code_space(state if state is not None else code_state(lattice, 1), lattice)
        if action in LOGICAL_OPERATORS:
            image = apply_logical(memory, lattice, action)
            branches = [Branch((action,), 1.0, image, (action,))]
            data["eigenvalue"] = float(np.real(np.vdot(memory.vector, image.vector)))
        elif action == "measure":
            branches = measure_logical(memory, lattice, string, delta_p, gamma_r, backend)
            detected = [b for b in branches if b.state is not None]
            signed = [(-1 if b.record[0].endswith("-1") else 1) * b.probability for b in detected]
            data["expectation"] = float(sum(signed))
        elif action == "exp_string":
            branches = exp_string(memory, lattice, phi, string, delta_p, gamma_r, backend)
        else:
            branches = read_out(memory, lattice, amplitudes, delta_p, gamma_r, backend)
            keep = (ANCILLA,)

    with_fidelity = any(branch.fidelity is not None for branch in branches)
    fidelity = _detected_fidelity(branches) if with_fidelity else None
    logger.debug("Toric %s on %d qubits: %d branches", action, lattice.n_qubits, len(branches))
    return ProtocolOutcome(f"toric_{action}", tuple(branches), _outcome_state(branches, keep), fidelity, data)
