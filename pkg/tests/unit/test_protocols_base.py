import numpy as np
import pytest

from qnet.exceptions import DimensionMismatch, InvalidParameters, UnknownSubsystem
from qnet.protocols import (
    Branch,
    ProtocolOutcome,
    Register,
    detection_probability,
    line_diagonals,
    photon_detector,
    resonant_node,
)
from qnet.protocols.base import CNOT, HADAMARD, MINUS, PAULI_X, PLUS, chained_beamsplitters, mixture, parity_spec
from qnet.scatter import RIGHT, ideal_scattering
from qnet.slh import DOWN, UP, NetworkSpec


class TestRegister:
    def test_product_order(self):
        register = Register.product({"a": [0.0, 1.0], "b": [1.0, 0.0]})
        assert register.labels == ("a", "b")
        assert register.vector[2] == 1.0

    def test_invalid(self):
        with pytest.raises(InvalidParameters):
            Register(("a", "a"), np.ones(4) / 2)
        with pytest.raises(DimensionMismatch):
            Register(("a",), np.ones(4) / 2)
        with pytest.raises(InvalidParameters):
            Register.product({"a": [1.0, 1.0]})
        with pytest.raises(UnknownSubsystem):
            Register.product({"a": PLUS}).axis("b")

    def test_apply_targets_one_axis(self):
        register = Register.product({"a": [1.0, 0.0], "b": [1.0, 0.0]}).apply(PAULI_X, "b")
        assert register.vector[1] == 1.0

    def test_bell_pair(self):
        register = Register.product({"a": [1.0, 0.0], "b": [1.0, 0.0]})
        bell = register.apply(HADAMARD, "a").apply_two(CNOT, "a", "b")
        assert np.allclose(bell.vector, np.array([1, 0, 0, 1]) / np.sqrt(2))
        assert np.allclose(bell.density(["a"]), np.eye(2) / 2)

    def test_apply_diagonal(self):
        register = Register.product({"a": PLUS, "b": PLUS, "c": PLUS})
        flipped = register.apply_diagonal(np.array([1, 1, 1, -1]), ["c", "a"])
        # sign on a = c = 1, i.e. indices 0b101 and 0b111
        signs = np.sign(np.real(flipped.vector))
        assert list(np.flatnonzero(signs < 0)) == [5, 7]

    def test_project_and_drop(self):
        register = Register.product({"a": [0.6, 0.8], "b": PLUS})
        probability, projected = register.project("a", 1)
        assert probability == pytest.approx(0.64)
        assert projected.probability("a", 1) == pytest.approx(1.0)
        remaining = projected.without("a", 1)
        assert remaining.labels == ("b",)
        assert np.allclose(remaining.vector, PLUS)

    def test_with_qubit_and_reset(self):
        register = Register.product({"a": PLUS}).with_qubit("z", [0.0, 1.0])
        assert register.labels == ("z", "a")
        assert register.reset("z", 1).probability("z", 0) == pytest.approx(1.0)


class TestOutcome:
    def test_probabilities(self):
        outcome = ProtocolOutcome(
            "test",
            (Branch(("photon:down",), 0.25, None), Branch(("photon:up",), 0.5, Register.product({"a": PLUS}))),
        )
        assert outcome.total_probability() == pytest.approx(0.75)
        assert outcome.branch_probabilities[("photon:up",)] == 0.5
        assert len(outcome.detected()) == 1

    def test_mixture_is_conditioned_on_detection(self):
        branches = [
            Branch(("x",), 0.2, Register.product({"a": PLUS})),
            Branch(("y",), 0.2, Register.product({"a": MINUS})),
            Branch(("lost",), 0.6, None),
        ]
        assert np.allclose(mixture(branches, ["a"]).matrix, np.eye(2) / 2)
        assert mixture(branches[2:], ["a"]) is None


class TestLines:
    def test_parity_diagonals(self):
        diagonals = line_diagonals(parity_spec(2), 0.0)
        assert np.allclose(np.abs(diagonals[DOWN]), [1, 0, 0, 1])
        assert np.allclose(np.abs(diagonals[UP]), [0, 1, 1, 0])

    def test_backends_agree(self):
        ideal = line_diagonals(parity_spec(2), 0.2)
        general = line_diagonals(parity_spec(2), 0.2, backend="general")
        for line in (DOWN, UP):
            assert np.allclose(ideal[line], general[line], atol=1e-9)

    def test_unknown_backend(self):
        with pytest.raises(InvalidParameters):
            line_diagonals(parity_spec(2), 0.0, backend="fast")

    def test_logical_basis_is_flipped(self):
        spec = NetworkSpec((resonant_node(1.0),), chained_beamsplitters(1, PAULI_X, np.eye(2)))
        assert np.allclose(line_diagonals(spec, 0.0)[UP], [1, -1])
        assert np.allclose(ideal_scattering(spec, 0.0).diagonal(RIGHT, UP, DOWN), [-1, 1])


class TestDetector:
    @pytest.mark.parametrize(("delta_p", "p_click"), [(0.0, 1.0), (1.0, 0.2), (-1.0, 0.2)])
    def test_click_probability(self, delta_p, p_click):
        response = photon_detector(delta_p, 1.0)
        assert response.p_click == pytest.approx(p_click)
        assert response.p_click + response.p_no_click == pytest.approx(1.0)

    @pytest.mark.parametrize("delta_p", [0.0, 0.3, 1.7])
    def test_closed_form(self, delta_p):
        gamma_r = 2.0
        assert photon_detector(delta_p, gamma_r).p_click == pytest.approx(detection_probability(delta_p, gamma_r))

    def test_spectral_factors(self):
        response = photon_detector(0.4, 1.0)
        assert abs(response.click_factor) ** 2 == pytest.approx(response.p_click)
        assert abs(response.no_click_factor) ** 2 == pytest.approx(response.p_no_click)
