import numpy as np
import pytest

from qnet.exceptions import InvalidParameters
from qnet.protocols import (
    ghz_state,
    parity_fidelity,
    parity_network,
    parity_projectors,
    prepare_cluster_1d,
    prepare_ghz,
    resonant_node,
)
from qnet.protocols.base import HADAMARD, chained_beamsplitters
from qnet.protocols.parity import cluster_state, parity_diagonal
from qnet.slh import NetworkSpec


class TestParityOperators:
    def test_diagonal(self):
        assert list(parity_diagonal(2, [1, 2])) == [1, -1, -1, 1]
        assert list(parity_diagonal(2, [2])) == [1, -1, 1, -1]

    def test_projectors_are_complete(self):
        even, odd = parity_projectors(3, [1, 3])
        assert np.allclose(even + odd, np.eye(8))
        assert np.allclose(even @ odd, 0.0)

    @pytest.mark.parametrize("subset", [[0], [1, 4]])
    def test_subset_out_of_range(self, subset):
        with pytest.raises(InvalidParameters):
            parity_diagonal(3, subset)

    def test_states_are_normalized(self):
        assert np.linalg.norm(ghz_state(4)) == pytest.approx(1.0)
        assert np.linalg.norm(cluster_state(4)) == pytest.approx(1.0)


class TestParityNetwork:
    def test_exact_idle_drops_nodes(self):
        assert parity_network(5, [2, 4], idle="exact").n_nodes == 2
        assert parity_network(5, [2, 4], idle="far").n_nodes == 5

    def test_invalid_idle(self):
        with pytest.raises(InvalidParameters):
            parity_network(3, [1], idle="sleep")

    @pytest.mark.parametrize("n_qubits", [1, 2, 4])
    def test_ideal_fidelity_is_one(self, n_qubits):
        subset = range(1, n_qubits + 1)
        spec = parity_network(n_qubits, subset, idle="exact")
        assert parity_fidelity(spec, subset, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_far_detuned_idle_nodes(self):
        spec = parity_network(4, [1, 3], idle="far")
        assert parity_fidelity(spec, [1, 3], 0.0) > 0.999

    def test_detuning_lowers_fidelity(self):
        spec = parity_network(3, [1, 2, 3], idle="exact")
        values = [parity_fidelity(spec, [1, 2, 3], delta_p) for delta_p in (0.0, 0.05, 0.1)]
        assert values[0] > values[1] > values[2]

    def test_infidelity_is_quadratic_in_detuning(self):
        spec = parity_network(4, range(1, 5), idle="exact")
        small, large = (1 - parity_fidelity(spec, range(1, 5), delta_p) for delta_p in (1e-3, 2e-3))
        assert np.log2(large / small) == pytest.approx(2.0, abs=0.1)

    def test_shift_fluctuation(self):
        node = resonant_node(1.0, v_ratio=0.98)
        spec = parity_network(4, range(1, 5), node=node, idle="exact")
        assert parity_fidelity(spec, range(1, 5), 0.0, backend="general") >= 0.99

    def test_general_backend(self):
        spec = parity_network(3, [1, 2], idle="exact")
        assert parity_fidelity(spec, [1, 2], 0.0, backend="general") == pytest.approx(1.0, abs=1e-9)

    def test_hopping_fluctuation(self):
        rng = np.random.default_rng(3)
        j_opt = resonant_node(1.0).gue.j_hop
        fidelities = []
        for _ in range(20):
            nodes = tuple(resonant_node(1.0, j_hop=j_opt * (1 + rng.uniform(-0.05, 0.05))) for _ in range(4))
            spec = NetworkSpec(nodes, chained_beamsplitters(4, HADAMARD, HADAMARD))
            fidelities.append(parity_fidelity(spec, range(1, 5), 0.0, backend="general"))
        assert np.mean(fidelities) >= 0.99

    def test_infidelity_is_quadratic_in_shift_error(self):
        nodes = [resonant_node(1.0, v_ratio=1 + eps) for eps in (1e-3, 2e-3)]
        specs = [parity_network(4, range(1, 5), node=node, idle="exact") for node in nodes]
        small, large = (1 - parity_fidelity(spec, range(1, 5), 0.0) for spec in specs)
        assert np.log2(large / small) == pytest.approx(2.0, abs=0.1)

    def test_infidelity_is_quadratic_in_size(self):
        sizes = np.array([2, 4, 8])
        infidelities = [
            1 - parity_fidelity(parity_network(n, range(1, n + 1), idle="exact"), range(1, n + 1), 1e-3) for n in sizes
        ]
        assert np.polyfit(np.log(sizes), np.log(infidelities), 1)[0] == pytest.approx(2.0, abs=0.1)


class TestHeraldedStates:
    @pytest.mark.parametrize("prepare", [prepare_ghz, prepare_cluster_1d])
    @pytest.mark.parametrize("n_qubits", [2, 3, 4])
    def test_ideal_preparation(self, prepare, n_qubits):
        outcome = prepare(n_qubits)
        assert outcome.fidelity == pytest.approx(1.0, abs=1e-12)
        assert outcome.total_probability() == pytest.approx(1.0)
        assert len(outcome.branches) == 2
        for branch in outcome.branches:
            assert branch.probability == pytest.approx(0.5)

    def test_ghz_corrections(self):
        outcome = prepare_ghz(3)
        assert outcome.branch_probabilities.keys() == {("photon:down",), ("photon:up",)}
        corrections = {branch.record[0]: branch.corrections for branch in outcome.branches}
        assert corrections["photon:up"] == ("X:q1",)
        assert corrections["photon:down"] == ()

    def test_detuned_cluster(self):
        assert prepare_cluster_1d(3, delta_p=0.1).fidelity < 1.0

    def test_too_small(self):
        with pytest.raises(InvalidParameters):
            prepare_ghz(1)
