"""
SLH triplets and network composition.

A triplet ``(S, L, H)`` describes an open system with ``n`` input-output channels: a scalar ``n x n`` scattering
matrix, ``n`` coupling operators and a Hamiltonian. Triplets defined over different subsystems are lifted to the union
of their spaces when composed.

Interferometer channels are ordered ``(down, up)``: index 0 is the waveguide without emitters, index 1 the waveguide
carrying the nodes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.linalg import block_diag

from qnet.conf import settings
from qnet.exceptions import DimensionMismatch, InvalidDimension, InvalidParameters
from qnet.gue import GueParams, build_coupling_ops, build_hamiltonian
from qnet.helpers import hermitian_defect, is_unitary
from qnet.qops import HilbertSpace, Operator, embed, lift, projector, truncated_boson, zero

if TYPE_CHECKING:
    from qnet.scatter import NodeParams

logger = logging.getLogger(__name__)

DOWN, UP = 0, 1


@dataclass(frozen=True, eq=False)
class SlhTriplet:
    s_matrix: np.ndarray
    couplings: tuple[Operator, ...]
    hamiltonian: Operator

    def __post_init__(self):
        s_matrix = np.array(self.s_matrix, dtype=np.complex128)
        s_matrix.setflags(write=False)
        object.__setattr__(self, "s_matrix", s_matrix)
        object.__setattr__(self, "couplings", tuple(self.couplings))
        if not is_unitary(s_matrix, settings.QNET_UNITARY_ATOL):
            raise InvalidParameters("scattering matrix is not unitary")
        if len(self.couplings) != s_matrix.shape[0]:
            raise DimensionMismatch(f"{len(self.couplings)} couplings for {s_matrix.shape[0]} channels")
        for coupling in self.couplings:
            if coupling.space != self.hamiltonian.space:
                raise DimensionMismatch("couplings and Hamiltonian must share one Hilbert space")
        scale = max(1.0, float(np.max(np.abs(self.hamiltonian.matrix))))
        if hermitian_defect(self.hamiltonian.matrix) > settings.QNET_HERMITIAN_ATOL * scale:
            raise InvalidDimension("triplet Hamiltonian is not Hermitian")

    @property
    def space(self) -> HilbertSpace:
        return self.hamiltonian.space

    @property
    def channels(self) -> int:
        return self.s_matrix.shape[0]

    def lifted(self, space: HilbertSpace) -> SlhTriplet:
        if space == self.space:
            return self
        return SlhTriplet(
            self.s_matrix,
            tuple(lift(coupling, space) for coupling in self.couplings),
            lift(self.hamiltonian, space),
        )


def identity_triplet(channels: int = 1, space: HilbertSpace | None = None) -> SlhTriplet:
    space = space or HilbertSpace()
    return SlhTriplet(np.eye(channels), tuple(zero(space) for _ in range(channels)), zero(space))


def phase(theta: float, space: HilbertSpace | None = None) -> SlhTriplet:
    """Single-channel propagation phase exp(i theta)"""
    space = space or HilbertSpace()
    return SlhTriplet(np.array([[np.exp(1j * theta)]]), (zero(space),), zero(space))


def beamsplitter(unitary: np.ndarray, space: HilbertSpace | None = None) -> SlhTriplet:
    """Static linear optical element mixing the channels"""
    unitary = np.asarray(unitary, dtype=np.complex128)
    space = space or HilbertSpace()
    return SlhTriplet(unitary, tuple(zero(space) for _ in range(unitary.shape[0])), zero(space))


def hadamard() -> np.ndarray:
    """Balanced beamsplitter (1/sqrt(2)) [[1, 1], [1, -1]] on (down, up)"""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2)


def series(g2: SlhTriplet, g1: SlhTriplet) -> SlhTriplet:
    """Feed the outputs of g1 into the inputs of g2"""
    if g1.channels != g2.channels:
        raise DimensionMismatch(f"series product of {g2.channels} and {g1.channels} channels")
    space = g1.space.union(g2.space)
    g1, g2 = g1.lifted(space), g2.lifted(space)

    s2 = g2.s_matrix
    fed = [sum((s2[i, j] * g1.couplings[j] for j in range(g1.channels)), zero(space)) for i in range(g2.channels)]
    couplings = tuple(fed[i] + g2.couplings[i] for i in range(g2.channels))

    exchange = sum((g2.couplings[i].dag() @ fed[i] for i in range(g2.channels)), zero(space))
    hamiltonian = g1.hamiltonian + g2.hamiltonian - 0.5j * (exchange - exchange.dag())
    return SlhTriplet(s2 @ g1.s_matrix, couplings, hamiltonian.as_hermitian())


def concatenate(first: SlhTriplet, second: SlhTriplet) -> SlhTriplet:
    """Place two systems side by side; channels of ``first`` come before those of ``second``"""
    space = first.space.union(second.space)
    first, second = first.lifted(space), second.lifted(space)
    return SlhTriplet(
        block_diag(first.s_matrix, second.s_matrix),
        first.couplings + second.couplings,
        (first.hamiltonian + second.hamiltonian).as_hermitian(),
    )


def gue_triplets(p: GueParams, prefix: str = "") -> tuple[SlhTriplet, SlhTriplet]:
    """Right- and left-moving single-channel triplets of a GUE; the Hamiltonian is carried by the right one"""
    ops = build_coupling_ops(p, prefix)
    hamiltonian = build_hamiltonian(p, prefix)
    return (
        SlhTriplet(np.eye(1), (ops.lr,), hamiltonian),
        SlhTriplet(np.eye(1), (ops.ll,), zero(hamiltonian.space)),
    )


def chain_prefix(n: int) -> str:
    return f"g{n}."


def compose_gue_chain(gues: Sequence[GueParams], phi_tilde: float) -> SlhTriplet:
    """Cascade of GUEs on one waveguide, separated by the propagation phase ``phi_tilde``.

    Right-moving photons visit GUE 1 first, left-moving photons visit GUE N first. The returned triplet has the
    right-moving channel first and the left-moving channel second.
    """
    if not gues:
        raise InvalidParameters("a chain needs at least one GUE")
    pairs = [gue_triplets(p, chain_prefix(n)) for n, p in enumerate(gues, start=1)]

    right = pairs[0][0]
    for right_n, _ in pairs[1:]:
        right = series(right_n, series(phase(phi_tilde), right))

    left = pairs[-1][1]
    for _, left_n in reversed(pairs[:-1]):
        left = series(left_n, series(phase(phi_tilde), left))

    logger.debug("Composed a chain of %d GUEs, space dimension %d", len(gues), right.space.dim)
    return concatenate(right, left)


def closed_form_chain_hamiltonian(gues: Sequence[GueParams], phi_tilde: float) -> Operator:
    """Chain Hamiltonian written directly as the sum of local terms and the cascaded exchange terms"""
    space = HilbertSpace()
    for n, p in enumerate(gues, start=1):
        space = space.union(build_hamiltonian(p, chain_prefix(n)).space)
    ops = [build_coupling_ops(p, chain_prefix(n)) for n, p in enumerate(gues, start=1)]
    total = zero(space)
    for n, p in enumerate(gues, start=1):
        total = total + lift(build_hamiltonian(p, chain_prefix(n)), space)
    for n in range(len(gues)):
        for m in range(len(gues)):
            if n == m:
                continue
            factor = np.exp(1j * phi_tilde * abs(n - m))
            if n > m:
                term = factor * (lift(ops[n].lr, space).dag() @ lift(ops[m].lr, space))
            else:
                term = factor * (lift(ops[n].ll, space).dag() @ lift(ops[m].ll, space))
            total = total - 0.5j * (term - term.dag())
    return total.as_hermitian()


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """Interferometer of two waveguides: beamsplitter U_0, node 1, U_1, ..., node N, U_N"""

    nodes: tuple[NodeParams, ...]
    beamsplitters: tuple[np.ndarray, ...]
    phi_tilde: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        unitaries = tuple(np.array(u, dtype=np.complex128) for u in self.beamsplitters)
        object.__setattr__(self, "beamsplitters", unitaries)
        if not self.nodes:
            raise InvalidParameters("a network needs at least one node")
        if len(unitaries) != len(self.nodes) + 1:
            raise InvalidParameters(f"{len(self.nodes)} nodes need {len(self.nodes) + 1} beamsplitters")
        for index, unitary in enumerate(unitaries):
            if unitary.shape != (2, 2) or not is_unitary(unitary, settings.QNET_UNITARY_ATOL):
                raise InvalidParameters(f"beamsplitter U_{index} is not a 2x2 unitary")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @classmethod
    def hadamard_ends(cls, nodes: Sequence[NodeParams], phi_tilde: float = 0.0) -> NetworkSpec:
        """U_0 = U_N = Hadamard, identities in between"""
        unitaries = [hadamard()] + [np.eye(2)] * (len(nodes) - 1) + [hadamard()]
        return cls(tuple(nodes), tuple(unitaries), phi_tilde)


def interferometer_chains(
    node_couplings: Sequence[tuple[Operator, Operator]],
    beamsplitters: Sequence[np.ndarray],
    phi_tilde: float,
) -> tuple[SlhTriplet, SlhTriplet]:
    """Right- and left-moving two-channel triplets of an interferometer.

    ``node_couplings[n]`` holds the right- and left-moving coupling operators of node n + 1, all acting on one
    shared space. Node Hamiltonians are not included.
    """
    space = node_couplings[0][0].space
    half = phase(phi_tilde / 2, space)

    def node_block(coupling: Operator) -> SlhTriplet:
        node = SlhTriplet(np.eye(1), (coupling,), zero(space))
        return concatenate(phase(phi_tilde, space), series(half, series(node, half)))

    right = beamsplitter(beamsplitters[0], space)
    for n, (lr, _) in enumerate(node_couplings, start=1):
        right = series(beamsplitter(beamsplitters[n]), series(node_block(lr), right))

    n_nodes = len(node_couplings)
    left = beamsplitter(beamsplitters[n_nodes].T, space)
    for n in range(n_nodes, 0, -1):
        left = series(beamsplitter(beamsplitters[n - 1].T), series(node_block(node_couplings[n - 1][1]), left))
    return right, left


def node_space(n: int, p: GueParams) -> HilbertSpace:
    prefix = chain_prefix(n)
    return HilbertSpace(((f"q{n}", 2), (f"{prefix}a1", p.n_max), (f"{prefix}a2", p.n_max)))


def compose_interferometer(spec: NetworkSpec) -> tuple[SlhTriplet, SlhTriplet]:
    """Right- and left-moving triplets of the two-waveguide interferometer, over the qubits and GUEs of all nodes"""
    space = HilbertSpace()
    for n, node in enumerate(spec.nodes, start=1):
        space = space.union(node_space(n, node.gue))
    couplings = []
    for n, node in enumerate(spec.nodes, start=1):
        ops = build_coupling_ops(node.gue, chain_prefix(n))
        couplings.append((lift(ops.lr, space), lift(ops.ll, space)))
    return interferometer_chains(couplings, spec.beamsplitters, spec.phi_tilde)


def node_interaction(n: int, node: NodeParams) -> Operator:
    """Qubit-conditioned cross-Kerr shift -|1><1|_q (V_1 n_1 + V_2 n_2) of node n"""
    space = node_space(n, node.gue)
    prefix = chain_prefix(n)
    excited = embed(projector("q", 2, 1), space, f"q{n}")
    boson = truncated_boson(node.gue.n_max)
    number = boson.dag() @ boson
    n1 = embed(number, space, f"{prefix}a1")
    n2 = embed(number, space, f"{prefix}a2")
    return -(excited @ (node.v1 * n1 + node.v2 * n2))


def interferometer_hamiltonian(spec: NetworkSpec) -> Operator:
    """Total Hamiltonian: waveguide-mediated terms of both chains plus each node's GUE and qubit interaction"""
    right, left = compose_interferometer(spec)
    space = right.space
    total = right.hamiltonian + left.hamiltonian
    for n, node in enumerate(spec.nodes, start=1):
        total = total + lift(build_hamiltonian(node.gue, chain_prefix(n)), space)
        total = total + lift(node_interaction(n, node), space)
    return total.as_hermitian()
