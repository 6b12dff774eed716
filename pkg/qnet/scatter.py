"""
Single-photon scattering on interferometric networks of qubit + GUE nodes.

A photon of detuning ``delta_p`` enters one of the two waveguides (line 0 = down, line 1 = up) moving right. The
qubits only shift the GUE frequencies, so the scattering operator is diagonal in the qubit bitstring ``s``; for each
bitstring the network is linear and its transfer matrix follows from the input-output relation

    out = [1 + C (i delta_p + A)^-1 C^dagger] S in,      A = -i H - 1/2 C^dagger C,

restricted to the single-excitation subspace of the GUEs. The frequency conserving delta function is never stored.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from qnet.conf import settings
from qnet.exceptions import InvalidParameters, PreconditionError, ResonanceSingularity, UnsupportedClosedForm
from qnet.gue import GueParams, optimal_params, single_excitation_generator
from qnet.helpers import bitstrings
from qnet.qops import HilbertSpace, Operator
from qnet.slh import DOWN, UP, NetworkSpec, concatenate, interferometer_chains

logger = logging.getLogger(__name__)

RIGHT, LEFT = "R", "L"

AmplitudeKey = tuple  # (out_direction, out_line, in_line, bits)


@dataclass(frozen=True)
class NodeParams:
    """A qubit coupled to a GUE by cross-Kerr interactions V_1, V_2.

    ``delta_n`` is the node detuning: at the unidirectional point the delocalized excitation sits at -delta_n. The
    GUE detunings are then ``delta_n + 2 r gamma sin(phi_opt)``. Anharmonicities play no role for a single photon.
    """

    gue: GueParams
    v1: float = 0.0
    v2: float = 0.0
    delta_n: float = 0.0

    def __post_init__(self):
        if self.v1 < 0 or self.v2 < 0:
            raise InvalidParameters(f"cross-Kerr shifts must be >= 0, got {self.v1}, {self.v2}")

    @classmethod
    def optimal(cls, r: float, gamma: float, delta_n: float, v: float, **gue_changes) -> NodeParams:
        """Unidirectional node with V_1 = V_2 = v. ``gue_changes`` perturb the GUE afterwards (e.g. j_hop)."""
        opt = optimal_params(r, gamma)
        gue = GueParams(
            delta1=delta_n + opt.delta_shift,
            delta2=delta_n + opt.delta_shift,
            j_hop=opt.j_opt,
            gamma1=gamma,
            gamma2=gamma,
            r1=r,
            r2=r,
            phi=opt.phi_opt,
            n_max=2,
        )
        return cls(gue=dataclasses.replace(gue, **gue_changes), v1=v, v2=v, delta_n=delta_n)

    @property
    def gamma_r(self) -> float:
        return optimal_params(self.gue.r1, self.gue.gamma1).gamma_r

    def conditioned(self, qubit: int) -> GueParams:
        """GUE seen by a photon when the qubit is in state ``qubit``"""
        if not qubit:
            return self.gue
        return self.gue.replace(delta1=self.gue.delta1 + self.v1, delta2=self.gue.delta2 + self.v2)

    def is_unidirectional(self, tol: float = 1e-9) -> bool:
        p = self.gue
        if not p.is_symmetric or p.gamma1 <= 0:
            return False
        opt = optimal_params(p.r1, p.gamma1)
        scale = max(1.0, p.gamma1)
        checks = [
            abs(p.phi - opt.phi_opt) <= tol,
            abs(p.j_hop - opt.j_opt) <= tol * scale,
            abs(p.delta1 - p.delta2) <= tol * scale,
            abs(p.delta1 - self.delta_n - opt.delta_shift) <= tol * scale,
            abs(self.v1 - self.v2) <= tol * scale,
        ]
        return all(checks)


def transfer_phase(x: float, gamma_r: float) -> complex:
    """t(x) = (2ix + gamma_r) / (2ix - gamma_r), the transmission of a unidirectional emitter detuned by x"""
    return (2j * x + gamma_r) / (2j * x - gamma_r)


def ideal_phase_gate(node: NodeParams, delta_p: float) -> np.ndarray:
    """Diagonal qubit operator t(Delta + delta_p)|0><0| + t(Delta + delta_p + V)|1><1|"""
    gamma_r = node.gamma_r
    return np.diag(
        [
            transfer_phase(node.delta_n + delta_p, gamma_r),
            transfer_phase(node.delta_n + delta_p + node.v1, gamma_r),
        ]
    )


def node_transfer(p: GueParams, delta_p: float, direction: str = RIGHT) -> tuple[complex, complex]:
    """Transmission and reflection of a bare GUE for a photon arriving in ``direction``"""
    generator, row_r, row_l = single_excitation_generator(p)
    row_in, row_out = (row_r, row_l) if direction == RIGHT else (row_l, row_r)
    system = 1j * delta_p * np.eye(2) + generator
    try:
        response = np.linalg.solve(system, row_in.conj())
    except np.linalg.LinAlgError:
        raise ResonanceSingularity(f"single node at delta_p={delta_p}") from None
    return complex(1 + row_in @ response), complex(row_out @ response)


def _closed_form(p: GueParams, delta_p: float) -> tuple[complex, complex]:
    # Cramer inverse of the 2x2 system (i delta_p + A) for a photon coming from the left
    generator, row_r, row_l = single_excitation_generator(p)
    (a, b), (c, d) = 1j * delta_p * np.eye(2) + generator
    det = a * d - b * c
    if abs(det) == 0:
        raise ResonanceSingularity(f"single node at delta_p={delta_p}")
    inverse = np.array([[d, -b], [-c, a]]) / det
    source = row_r.conj()
    return complex(1 + row_r @ inverse @ source), complex(row_l @ inverse @ source)


def node_amplitudes(node: NodeParams, delta_p: float) -> tuple[complex, complex, complex, complex]:
    """Reflection and transmission (r0, t0, r1, t1) of a node, for the qubit in |0> and |1>"""
    if not node.gue.is_symmetric:
        raise UnsupportedClosedForm("node couplings are not symmetric (gamma_1 != gamma_2 or r_1 != r_2)")
    t0, r0 = _closed_form(node.conditioned(0), delta_p)
    t1, r1 = _closed_form(node.conditioned(1), delta_p)
    return r0, t0, r1, t1


@dataclass(frozen=True, eq=False)
class ScatteringResult:
    """Amplitudes for a right-moving input photon, keyed by (out_direction, out_line, in_line, bits).

    The common propagation factor ``global_phase`` is divided out of every amplitude.
    """

    delta_p: float
    n_nodes: int
    amplitudes: Mapping[AmplitudeKey, complex]
    global_phase: complex = 1.0

    def amplitude(self, out_direction: str, out_line: int, in_line: int, bits: tuple[int, ...]) -> complex:
        return self.amplitudes[(out_direction, out_line, in_line, tuple(bits))]

    def diagonal(self, out_direction: str, out_line: int, in_line: int) -> np.ndarray:
        """Scattering operator on the qubits, as the diagonal over bitstrings (first qubit most significant)"""
        return np.array([self.amplitude(out_direction, out_line, in_line, bits) for bits in bitstrings(self.n_nodes)])

    def total_probability(self, in_line: int, bits: tuple[int, ...]) -> float:
        return float(
            sum(
                abs(self.amplitude(direction, line, in_line, bits)) ** 2
                for direction in (RIGHT, LEFT)
                for line in (DOWN, UP)
            )
        )


def _check_unidirectional(spec: NetworkSpec) -> None:
    for n, node in enumerate(spec.nodes, start=1):
        if not node.is_unidirectional():
            raise PreconditionError(f"node {n} is not at the unidirectional point")


def ideal_scattering(spec: NetworkSpec, delta_p: float) -> ScatteringResult:
    """Factorized network: U_N S_N U_{N-1} ... S_1 U_0 with S_n = diag(1, sigma^n) on (down, up)"""
    _check_unidirectional(spec)
    gates = [np.diag(ideal_phase_gate(node, delta_p)) for node in spec.nodes]
    amplitudes: dict[AmplitudeKey, complex] = {}
    for bits in bitstrings(spec.n_nodes):
        matrix = spec.beamsplitters[0]
        for n, bit in enumerate(bits, start=1):
            matrix = spec.beamsplitters[n] @ np.diag([1.0, gates[n - 1][bit]]) @ matrix
        for j in (DOWN, UP):
            for i in (DOWN, UP):
                amplitudes[(RIGHT, j, i, bits)] = complex(matrix[j, i])
                amplitudes[(LEFT, j, i, bits)] = 0j
    return ScatteringResult(delta_p, spec.n_nodes, amplitudes, np.exp(1j * spec.phi_tilde * spec.n_nodes))


def _excitation_operators(spec: NetworkSpec) -> tuple[HilbertSpace, list[tuple[Operator, Operator]], np.ndarray]:
    """Single-excitation representation: level 0 is the vacuum, levels 2n-1 and 2n hold transmons 1 and 2 of node n.

    Returns the space, the per-node (L_R, L_L) couplings and the bitstring-independent GUE Hamiltonian block.
    """
    n_nodes = spec.n_nodes
    dim = 2 * n_nodes + 1
    space = HilbertSpace((("excitation", dim),))
    couplings = []
    hamiltonian = np.zeros((dim, dim), dtype=np.complex128)
    for n, node in enumerate(spec.nodes):
        generator, row_r, row_l = single_excitation_generator(node.gue)
        rows = slice(2 * n + 1, 2 * n + 3)
        lr = np.zeros((dim, dim), dtype=np.complex128)
        ll = np.zeros((dim, dim), dtype=np.complex128)
        lr[0, rows] = row_r
        ll[0, rows] = row_l
        couplings.append((Operator(space, lr), Operator(space, ll)))
        # Local Hamiltonian: generator = -(iH + 1/2 decay), with the decay rebuilt from the rows
        decay = np.outer(row_r.conj(), row_r) + np.outer(row_l.conj(), row_l)
        hamiltonian[rows, rows] = 1j * (generator + 0.5 * decay)
    return space, couplings, hamiltonian


def general_scattering(spec: NetworkSpec, delta_p: float, jobs: int = 1) -> ScatteringResult:
    """Scattering amplitudes from the resolvent of the full network, valid for any node parameters"""
    space, couplings, local_h = _excitation_operators(spec)
    right, left = interferometer_chains(couplings, spec.beamsplitters, spec.phi_tilde)
    network = concatenate(right, left)

    coupling_rows = np.array([op.matrix[0, 1:] for op in network.couplings])
    base_h = (network.hamiltonian.matrix + local_h)[1:, 1:]
    decay = coupling_rows.conj().T @ coupling_rows
    s_matrix = network.s_matrix
    global_phase = np.exp(1j * spec.phi_tilde * spec.n_nodes)
    dim = base_h.shape[0]

    def solve(bits: tuple[int, ...]) -> dict[AmplitudeKey, complex]:
        shifts = np.zeros(dim)
        for n, (bit, node) in enumerate(zip(bits, spec.nodes)):
            if bit:
                shifts[2 * n], shifts[2 * n + 1] = node.v1, node.v2
        # Cross-Kerr shift -|1><1| (V_1 n_1 + V_2 n_2) of every excited qubit
        hamiltonian = base_h - np.diag(shifts)
        system = 1j * delta_p * np.eye(dim) - 1j * hamiltonian - 0.5 * decay
        try:
            response = np.linalg.solve(system, coupling_rows.conj().T)
        except np.linalg.LinAlgError:
            raise ResonanceSingularity(f"network resolvent at delta_p={delta_p}, bits={bits}") from None
        transfer = (np.eye(4) + coupling_rows @ response) @ s_matrix / global_phase
        result = {}
        for j in (DOWN, UP):
            for i in (DOWN, UP):
                result[(RIGHT, j, i, bits)] = complex(transfer[j, i])
                result[(LEFT, j, i, bits)] = complex(transfer[2 + j, i])
        return result

    all_bits = bitstrings(spec.n_nodes)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            parts = list(executor.map(solve, all_bits))
    else:
        parts = [solve(bits) for bits in all_bits]

    amplitudes: dict[AmplitudeKey, complex] = {}
    for part in parts:
        amplitudes.update(part)
    logger.debug("General scattering of %d nodes at delta_p=%s", spec.n_nodes, delta_p)
    return ScatteringResult(delta_p, spec.n_nodes, amplitudes, global_phase)


def far_detuned(node: NodeParams, gamma_r: float | None = None) -> NodeParams:
    """Same node pushed QNET_FAR_DETUNING gamma_r away from resonance"""
    gamma_r = gamma_r or node.gamma_r
    detuning = settings.QNET_FAR_DETUNING * gamma_r
    shift = detuning - node.delta_n
    gue = node.gue.replace(delta1=node.gue.delta1 + shift, delta2=node.gue.delta2 + shift)
    return dataclasses.replace(node, gue=gue, delta_n=detuning)
