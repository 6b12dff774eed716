import warnings

import numpy as np
import pytest

from qnet.exceptions import CodeSpaceError, CodeSpaceWarning, InvalidParameters, PreconditionError, SizeLimitExceeded
from qnet.protocols import (
    Register,
    ToricLattice,
    code_state,
    logical_sign_table,
    solve_gf2,
    stabilizer_values,
    toric_generate,
    toric_logical,
)
from qnet.protocols.base import PAULI_Z
from qnet.protocols.toric import check_code_space, gf2_rank


class TestLattice:
    def test_counts(self, small_lattice):
        assert small_lattice.n_qubits == 8
        assert small_lattice.independent_stabilizers == 6
        assert small_lattice.code_dimension == 4

    def test_every_edge_in_two_plaquettes(self, small_lattice):
        assert list(small_lattice.incidence("plaquette").sum(axis=0)) == [2] * 8
        assert list(small_lattice.incidence("vertex").sum(axis=0)) == [2] * 8

    def test_invalid(self, small_lattice):
        with pytest.raises(InvalidParameters):
            ToricLattice(1)
        with pytest.raises(InvalidParameters):
            small_lattice.incidence("edge")

    def test_size_cap(self):
        with pytest.raises(SizeLimitExceeded):
            code_state(ToricLattice(4), 1)


class TestGf2:
    def test_rank(self):
        assert gf2_rank(np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])) == 2

    def test_solve(self):
        matrix = np.array([[1, 1, 0], [0, 1, 1]])
        solution = solve_gf2(matrix, [1, 0])
        assert list(matrix @ solution % 2) == [1, 0]

    def test_inconsistent(self):
        matrix = np.array([[1, 1], [1, 1]])
        with pytest.raises(PreconditionError):
            solve_gf2(matrix, [1, 0])
        assert solve_gf2(matrix, [1, 0], strict=False).shape == (2,)


class TestCodeStates:
    def test_stabilizers(self, small_lattice):
        for index in (1, 2, 3, 4):
            plaquettes, vertices = stabilizer_values(code_state(small_lattice, index), small_lattice)
            assert np.allclose(plaquettes, 1.0)
            assert np.allclose(vertices, 1.0)

    def test_orthonormal(self, small_lattice):
        vectors = np.array([code_state(small_lattice, index).vector for index in (1, 2, 3, 4)])
        assert np.allclose(vectors.conj() @ vectors.T, np.eye(4))

    def test_sign_table(self, small_lattice):
        assert np.allclose(logical_sign_table(small_lattice), [[1, -1, 1, -1], [1, 1, -1, -1]])

    def test_invalid_index(self, small_lattice):
        with pytest.raises(InvalidParameters):
            code_state(small_lattice, 5)


class TestCodeSpace:
    def test_leak_is_projected(self, small_lattice):
        state = code_state(small_lattice, 1)
        leaked = state.apply(PAULI_Z, "q1")
        mixed = Register(state.labels, (state.amplitudes + 0.1 * leaked.amplitudes) / np.sqrt(1.01))
        with pytest.warns(CodeSpaceWarning):
            projected = check_code_space(mixed, small_lattice)
        assert abs(np.vdot(state.vector, projected.vector)) == pytest.approx(1.0)

    def test_orthogonal_state(self, small_lattice):
        leaked = code_state(small_lattice, 1).apply(PAULI_Z, "q1")
        with pytest.raises(CodeSpaceError):
            check_code_space(leaked, small_lattice)

    def test_code_state_unchanged(self, small_lattice):
        state = code_state(small_lattice, 2)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert check_code_space(state, small_lattice) is state


class TestGeneration:
    def test_all_branches(self, small_lattice):
        outcome = toric_generate(small_lattice)
        assert outcome.fidelity == pytest.approx(1.0, abs=1e-12)
        assert outcome.total_probability() == pytest.approx(1.0)
        # The last plaquette outcome is fixed by the other three
        assert len(outcome.branches) == 8
        assert outcome.data["independent_stabilizers"] == 6
        assert outcome.data["min_stabilizer"] == pytest.approx(1.0)

    def test_sampled_branch(self, small_lattice):
        outcome = toric_generate(small_lattice, seed=3)
        assert len(outcome.branches) == 1
        assert outcome.branches[0].probability == 1.0
        assert outcome.data["record_probability"] == pytest.approx(0.125)
        assert outcome.fidelity == pytest.approx(1.0, abs=1e-12)

    def test_corrections_match_syndrome(self, small_lattice):
        for branch in toric_generate(small_lattice).branches:
            flips = sum(record.endswith("-1") for record in branch.record)
            assert (flips == 0) == (branch.corrections == ())


class TestLogical:
    @pytest.mark.parametrize(("action", "eigenvalue"), [("X1", 1.0), ("X2", 1.0), ("Z1", 0.0)])
    def test_strings_on_first_code_state(self, small_lattice, action, eigenvalue):
        outcome = toric_logical(small_lattice, action)
        assert outcome.data["eigenvalue"] == pytest.approx(eigenvalue, abs=1e-12)

    @pytest.mark.parametrize(("index", "expected"), [(1, 1.0), (2, -1.0)])
    def test_measure_x1(self, small_lattice, index, expected):
        outcome = toric_logical(small_lattice, "measure", state=code_state(small_lattice, index), string="X1")
        assert outcome.data["expectation"] == pytest.approx(expected)

    def test_exp_string_rotates_code_states(self, small_lattice):
        outcome = toric_logical(small_lattice, "exp_string", phi=np.pi / 2, string="Z1")
        assert outcome.fidelity == pytest.approx(1.0, abs=1e-12)
        target = code_state(small_lattice, 2).vector
        for branch in outcome.detected():
            assert abs(np.vdot(target, branch.state.vector)) == pytest.approx(1.0)

    @pytest.mark.parametrize("action", ["write_in", "round_trip"])
    def test_write_and_read(self, small_lattice, action):
        outcome = toric_logical(small_lattice, action, amplitudes=(0.6, 0.8))
        assert outcome.fidelity == pytest.approx(1.0, abs=1e-12)
        assert outcome.total_probability() == pytest.approx(1.0)

    def test_round_trip_restores_ancilla(self, small_lattice):
        outcome = toric_logical(small_lattice, "round_trip", amplitudes=(0.8, -0.6))
        assert np.allclose(outcome.state.matrix, np.outer([0.8, -0.6], [0.8, -0.6]))

    def test_unknown_action(self, small_lattice):
        with pytest.raises(InvalidParameters):
            toric_logical(small_lattice, "braid")
