import numpy as np
import pytest
from scipy.stats import unitary_group

from qnet.exceptions import InvalidParameters, PreconditionError, UnsupportedClosedForm
from qnet.gue import GueParams
from qnet.helpers import bitstrings
from qnet.scatter import (
    LEFT,
    RIGHT,
    NodeParams,
    far_detuned,
    general_scattering,
    ideal_phase_gate,
    ideal_scattering,
    node_amplitudes,
    node_transfer,
    transfer_phase,
)
from qnet.slh import DOWN, UP, NetworkSpec


def random_node(rng):
    """Node away from the unidirectional point, with asymmetric couplings"""
    gue = GueParams(
        delta1=rng.uniform(-1.0, 1.0),
        delta2=rng.uniform(-1.0, 1.0),
        j_hop=rng.uniform(-1.0, 1.0),
        gamma1=rng.uniform(0.3, 1.5),
        gamma2=rng.uniform(0.3, 1.5),
        r1=rng.uniform(-0.5, 0.5),
        r2=rng.uniform(-0.5, 0.5),
        phi=rng.uniform(0.0, 2 * np.pi),
        n_max=2,
    )
    return NodeParams(gue, v1=rng.uniform(0.0, 2.0), v2=rng.uniform(0.0, 2.0), delta_n=0.0)


def random_unitaries(count, rng):
    return tuple(unitary_group.rvs(2, random_state=rng) for _ in range(count))


class TestSingleNode:
    @pytest.mark.parametrize("x", [-2.0, 0.0, 0.3, 10.0])
    def test_transfer_phase_is_unimodular(self, x):
        assert abs(transfer_phase(x, 1.0)) == pytest.approx(1.0)

    def test_resonant_gate_is_i_sigma_z(self, node):
        assert np.allclose(ideal_phase_gate(node, 0.0), np.diag([1j, -1j]))

    @pytest.mark.parametrize("delta_p", [-0.7, 0.0, 0.25])
    @pytest.mark.parametrize("qubit", [0, 1])
    def test_unidirectional_node_matches_phase_gate(self, node, delta_p, qubit):
        transmission, reflection = node_transfer(node.conditioned(qubit), delta_p)
        assert transmission == pytest.approx(ideal_phase_gate(node, delta_p)[qubit, qubit])
        assert abs(reflection) == pytest.approx(0.0, abs=1e-12)

    def test_closed_form_matches_resolvent(self):
        node = NodeParams.optimal(0.15, 0.6, delta_n=0.1, v=0.8, j_hop=-0.3)
        r0, t0, r1, t1 = node_amplitudes(node, 0.2)
        assert (t0, r0) == pytest.approx(node_transfer(node.conditioned(0), 0.2))
        assert (t1, r1) == pytest.approx(node_transfer(node.conditioned(1), 0.2))
        assert abs(t0) ** 2 + abs(r0) ** 2 == pytest.approx(1.0)

    def test_closed_form_needs_symmetry(self, node):
        asymmetric = NodeParams(node.gue.replace(gamma2=2 * node.gue.gamma1), v1=1.0, v2=1.0)
        with pytest.raises(UnsupportedClosedForm):
            node_amplitudes(asymmetric, 0.0)

    def test_negative_shift(self, node):
        with pytest.raises(InvalidParameters):
            NodeParams(node.gue, v1=-1.0)

    def test_far_detuned(self, node):
        far = far_detuned(node)
        assert far.is_unidirectional()
        assert abs(ideal_phase_gate(far, 0.0)[1, 1] - 1.0) < 2e-3

    @pytest.mark.parametrize("seed", range(5))
    def test_left_input_sees_mirrored_node(self, seed):
        rng = np.random.default_rng(seed)
        p = random_node(rng).gue
        delta_p = rng.uniform(-1.0, 1.0)
        assert node_transfer(p, delta_p, LEFT) == pytest.approx(node_transfer(p.mirrored(), delta_p, RIGHT), abs=1e-10)


class TestNetwork:
    def test_general_matches_ideal(self, node):
        spec = NetworkSpec.hadamard_ends([node, node], phi_tilde=0.3)
        ideal = ideal_scattering(spec, 0.1)
        general = general_scattering(spec, 0.1)
        for key, value in ideal.amplitudes.items():
            assert general.amplitudes[key] == pytest.approx(value, abs=1e-9)

    def test_random_beamsplitters(self, node):
        unitaries = unitary_group.rvs(2, size=4, random_state=5)
        spec = NetworkSpec((node, node, node), tuple(unitaries), phi_tilde=1.2)
        ideal = ideal_scattering(spec, -0.2)
        general = general_scattering(spec, -0.2, jobs=2)
        for line in (DOWN, UP):
            assert np.allclose(general.diagonal(RIGHT, line, DOWN), ideal.diagonal(RIGHT, line, DOWN), atol=1e-9)

    def test_photon_is_conserved(self, node):
        perturbed = NodeParams(node.gue.replace(j_hop=0.5 * node.gue.j_hop), node.v1, node.v2, node.delta_n)
        spec = NetworkSpec.hadamard_ends([perturbed, node])
        result = general_scattering(spec, 0.05)
        for bits in [(0, 0), (0, 1), (1, 1)]:
            assert result.total_probability(DOWN, bits) == pytest.approx(1.0)
        assert abs(result.amplitude(LEFT, DOWN, DOWN, (1, 0))) > 1e-6

    def test_ideal_backend_needs_unidirectional_nodes(self, node):
        perturbed = NodeParams(node.gue.replace(phi=node.gue.phi + 0.1), node.v1, node.v2, node.delta_n)
        with pytest.raises(PreconditionError):
            ideal_scattering(NetworkSpec.hadamard_ends([perturbed]), 0.0)

    def test_hadamard_parity_readout(self, node):
        # Two resonant nodes between Hadamards route the photon by the parity of the qubits
        result = ideal_scattering(NetworkSpec.hadamard_ends([node, node]), 0.0)
        for bits in [(0, 0), (1, 1)]:
            assert abs(result.amplitude(RIGHT, DOWN, DOWN, bits)) == pytest.approx(0.0, abs=1e-12)
        for bits in [(0, 1), (1, 0)]:
            assert abs(result.amplitude(RIGHT, UP, DOWN, bits)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("n_nodes", [1, 2])
    def test_unitary_for_random_nodes(self, n_nodes):
        rng = np.random.default_rng(100 + n_nodes)
        for _ in range(25):
            spec = NetworkSpec(
                tuple(random_node(rng) for _ in range(n_nodes)),
                random_unitaries(n_nodes + 1, rng),
                phi_tilde=rng.uniform(0.0, 2 * np.pi),
            )
            result = general_scattering(spec, rng.uniform(-1.0, 1.0))
            for bits in bitstrings(n_nodes):
                for in_line in (DOWN, UP):
                    assert result.total_probability(in_line, bits) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("n_nodes", [1, 2, 3, 4])
    def test_factorization_for_random_beamsplitters(self, node, n_nodes):
        rng = np.random.default_rng(200 + n_nodes)
        for _ in range(25):
            spec = NetworkSpec((node,) * n_nodes, random_unitaries(n_nodes + 1, rng), rng.uniform(0.0, 2 * np.pi))
            delta_p = rng.uniform(-0.5, 0.5)
            ideal = ideal_scattering(spec, delta_p)
            general = general_scattering(spec, delta_p)
            for out_line in (DOWN, UP):
                for in_line in (DOWN, UP):
                    expected = ideal.diagonal(RIGHT, out_line, in_line)
                    assert np.allclose(general.diagonal(RIGHT, out_line, in_line), expected, atol=1e-8)
                    assert np.allclose(general.diagonal(LEFT, out_line, in_line), 0.0, atol=1e-8)
