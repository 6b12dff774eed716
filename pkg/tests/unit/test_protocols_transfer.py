import numpy as np
import pytest

from qnet.exceptions import InvalidParameters
from qnet.protocols import (
    controlled_z_subcircuit,
    qst_entanglement_fidelity,
    qst_fidelity_closed_form,
    run_heralded_retry,
    run_state_transfer,
    transfer_network,
)
from qnet.slh import DOWN, UP


class TestClosedForm:
    def test_resonant(self):
        assert qst_fidelity_closed_form(0.0) == pytest.approx(1.0)

    def test_known_value(self):
        assert qst_fidelity_closed_form(0.1) == pytest.approx(0.977538, abs=1e-6)

    def test_scales_with_gamma(self):
        assert qst_fidelity_closed_form(0.2, 2.0) == pytest.approx(qst_fidelity_closed_form(0.1, 1.0))

    def test_vectorized(self):
        values = qst_fidelity_closed_form(np.array([0.0, 0.1]))
        assert values.shape == (2,)

    def test_invalid_rate(self):
        with pytest.raises(InvalidParameters):
            qst_fidelity_closed_form(0.1, 0.0)


class TestStateTransfer:
    def test_controlled_z(self):
        blocks = controlled_z_subcircuit(0.0)
        for line in (DOWN, UP):
            assert np.allclose(blocks[line], np.diag([1, 1, 1, -1]))

    @pytest.mark.parametrize("delta_p", [0.0, 0.1, 0.4, -0.25])
    def test_simulation_matches_closed_form(self, delta_p):
        simulated = qst_entanglement_fidelity(transfer_network(2), delta_p)
        assert simulated == pytest.approx(qst_fidelity_closed_form(delta_p), abs=1e-9)

    @pytest.mark.parametrize("input_state", [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8j)])
    def test_ideal_transfer(self, input_state):
        outcome = run_state_transfer(transfer_network(2), input_state)
        assert outcome.fidelity == pytest.approx(1.0, abs=1e-12)
        assert outcome.total_probability() == pytest.approx(1.0)
        assert len(outcome.branches) == 4

    def test_transfer_across_idle_nodes(self):
        outcome = run_state_transfer(transfer_network(4), (0.6, 0.8))
        assert outcome.fidelity > 0.999
        assert outcome.state.space.labels == ("q4",)

    def test_general_backend(self):
        outcome = run_state_transfer(transfer_network(2), (0.8, -0.6), backend="general")
        assert outcome.fidelity == pytest.approx(1.0, abs=1e-9)

    def test_needs_two_nodes(self):
        with pytest.raises(InvalidParameters):
            transfer_network(1)


class TestHeraldedRetry:
    def test_without_loss(self):
        outcome = run_heralded_retry(0.0, (0.6, 0.8), seed=1, runs=5)
        assert list(outcome.data["trials"]) == [1] * 5
        assert outcome.branch_probabilities == {("trials:1",): 1.0}
        assert outcome.data["min_fidelity"] == pytest.approx(1.0, abs=1e-12)

    def test_loss_is_recovered(self):
        outcome = run_heralded_retry(0.5, (0.6, 0.8j), seed=4, runs=200)
        assert outcome.data["min_fidelity"] == pytest.approx(1.0, abs=1e-9)
        assert outcome.data["expected_trials"] == pytest.approx(2.0)
        assert 1.5 < outcome.data["mean_trials"] < 2.6
        assert outcome.total_probability() == pytest.approx(1.0)
        assert outcome.fidelity == pytest.approx(1.0, abs=1e-9)

    def test_reproducible(self):
        first = run_heralded_retry(0.3, seed=9, runs=20)
        second = run_heralded_retry(0.3, seed=9, runs=20)
        assert np.array_equal(first.data["trials"], second.data["trials"])

    @pytest.mark.parametrize(("loss", "runs"), [(1.0, 1), (-0.1, 1), (0.2, 0)])
    def test_invalid(self, loss, runs):
        with pytest.raises(InvalidParameters):
            run_heralded_retry(loss, runs=runs)
