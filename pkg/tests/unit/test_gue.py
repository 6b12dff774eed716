import numpy as np
import pytest
from scipy.integrate import solve_ivp

from qnet import gue
from qnet.conf import settings
from qnet.exceptions import InvalidParameters
from qnet.gue import (
    GueParams,
    averaged_directionality,
    build_coupling_ops,
    build_hamiltonian,
    collective_commutator,
    delocalized_states,
    directionality,
    optimal_gue,
    optimal_params,
    single_excitation_generator,
)


class TestParams:
    @pytest.mark.parametrize(
        "changes",
        [{"gamma1": -1.0}, {"r2": 1.0}, {"u1": -0.1}, {"chi": -1.0}, {"n_max": 1}],
    )
    def test_invalid(self, changes):
        with pytest.raises(InvalidParameters):
            GueParams(**changes)

    def test_mirrored(self):
        p = GueParams(delta1=1.0, gamma1=2.0, gamma2=3.0, r1=0.1, r2=-0.2)
        mirrored = p.mirrored()
        assert (mirrored.delta2, mirrored.gamma1, mirrored.gamma2) == (1.0, 3.0, 2.0)
        assert (mirrored.r1, mirrored.r2) == (-0.2, 0.1)
        assert mirrored.mirrored() == p
        assert not p.is_symmetric

    def test_optimal_without_cross_coupling(self):
        opt = optimal_params(0.0, 1.5)
        assert opt.phi_opt == pytest.approx(np.pi / 2)
        assert opt.j_opt == pytest.approx(-1.5)
        assert opt.gamma_r == pytest.approx(3.0)
        assert opt.delta_shift == pytest.approx(0.0)

    @pytest.mark.parametrize(("r", "gamma"), [(1.0, 1.0), (0.1, 0.0)])
    def test_optimal_invalid(self, r, gamma):
        with pytest.raises(InvalidParameters):
            optimal_params(r, gamma)

    def test_optimal_gue_is_symmetric(self, symmetric_gue):
        assert symmetric_gue.is_symmetric
        assert symmetric_gue.delta1 == symmetric_gue.delta2


class TestOperators:
    def test_hamiltonian_is_hermitian(self, symmetric_gue):
        hamiltonian = build_hamiltonian(symmetric_gue.replace(u1=0.3, u2=0.2, chi=0.1))
        assert np.allclose(hamiltonian.matrix, hamiltonian.matrix.conj().T)

    def test_left_coupling_annihilates_right_state(self):
        p = optimal_gue(0.0, 1.0, n_max=2)
        right, left = delocalized_states(p)
        ops = build_coupling_ops(p)
        assert np.allclose(ops.ll.matrix @ right.vector, 0.0)
        assert not np.allclose(ops.lr.matrix @ right.vector, 0.0)
        assert abs(right.overlap(left)) == pytest.approx(0.0)

    def test_single_excitation_block(self, symmetric_gue):
        # |10> and |01> sit at indices n_max and 1 of the two-mode space
        indices = [symmetric_gue.n_max, 1]
        ops = build_coupling_ops(symmetric_gue)
        hamiltonian = build_hamiltonian(symmetric_gue).matrix[np.ix_(indices, indices)]
        decay = (ops.lr.dag() @ ops.lr + ops.ll.dag() @ ops.ll).matrix[np.ix_(indices, indices)]
        generator, _, _ = single_excitation_generator(symmetric_gue)
        assert np.allclose(generator, -(1j * hamiltonian + 0.5 * decay))

    @pytest.mark.parametrize("r", [0.0, 0.2, 0.5])
    def test_collective_modes_orthogonal_at_optimum(self, r):
        assert collective_commutator(optimal_gue(r, 1.0)) <= 1e-12

    def test_unequal_rates_break_orthogonality(self, symmetric_gue):
        unequal = symmetric_gue.replace(gamma1=1.2 * symmetric_gue.gamma2)
        assert collective_commutator(unequal) > 1e-3 * symmetric_gue.gamma2

    def test_commutator_below_truncation(self, symmetric_gue):
        p = symmetric_gue.replace(gamma1=1.2 * symmetric_gue.gamma2, n_max=3)
        ops = build_coupling_ops(p)
        _, row_r, row_l = single_excitation_generator(p)
        # Fock states where neither mode sits on the highest kept level
        low = [n1 * p.n_max + n2 for n1 in range(p.n_max - 1) for n2 in range(p.n_max - 1)]
        block = (ops.ll.dag() @ ops.lr - ops.lr @ ops.ll.dag()).matrix[np.ix_(low, low)]
        assert np.allclose(block, -np.vdot(row_l, row_r) * np.eye(len(low)))
        assert collective_commutator(p) == pytest.approx(abs(np.vdot(row_l, row_r)))


class TestDirectionality:
    @pytest.mark.parametrize("r", [0.0, 0.2, -0.3])
    def test_optimal_point_is_unidirectional(self, r):
        assert directionality(optimal_gue(r, 1.0), "R", "exact") == pytest.approx(1.0, abs=1e-9)

    def test_ode_matches_exact(self, symmetric_gue):
        assert directionality(symmetric_gue, "R", "ode") == pytest.approx(1.0, abs=1e-6)

    def test_without_hopping(self):
        # At r = 0 and J = 0 the emission amplitude is sqrt(2 gamma) cos(gamma t) exp(-gamma t)
        p = optimal_gue(0.0, 1.0).replace(j_hop=0.0)
        assert directionality(p, "R", "exact") == pytest.approx(0.75)
        assert directionality(p, "R", "ode") == pytest.approx(0.75, rel=1e-6)

    @pytest.mark.parametrize("r", [0.0, 0.2])
    @pytest.mark.parametrize("dj", [-0.1, 0.1])
    def test_robust_to_hopping_error(self, r, dj):
        p = optimal_gue(r, 1.0)
        assert directionality(p.replace(j_hop=p.j_hop + dj), "R", "exact") > 0.99

    def test_ode_tolerances_from_settings(self, symmetric_gue, monkeypatch):
        calls = []

        def recording_solve_ivp(*args, **kwargs):
            calls.append((kwargs["rtol"], kwargs["atol"]))
            return solve_ivp(*args, **kwargs)

        monkeypatch.setattr(gue, "solve_ivp", recording_solve_ivp)
        with settings.override(QNET_DIRECTIONALITY_RTOL=1e-9, QNET_DIRECTIONALITY_ATOL=1e-11):
            directionality(symmetric_gue, "R", "ode")
        assert calls == [(1e-9, 1e-11)]

    @pytest.mark.parametrize(("direction", "method"), [("up", "exact"), ("R", "fast")])
    def test_invalid_arguments(self, symmetric_gue, direction, method):
        with pytest.raises(InvalidParameters):
            directionality(symmetric_gue, direction, method)


class TestAveragedDirectionality:
    def test_without_fluctuations(self):
        mean, sem = averaged_directionality(0.2, 1.0, 0.0, 0.0, samples=4, seed=1, method="exact")
        assert mean == pytest.approx(1.0, abs=1e-9)
        assert sem == pytest.approx(0.0, abs=1e-9)

    def test_fluctuations_reduce_directionality(self):
        mean, sem = averaged_directionality(0.2, 1.0, 0.05, 0.05, samples=16, seed=2, method="exact")
        assert mean < 1.0
        assert sem > 0.0

    @pytest.mark.parametrize("seed", [0, 11])
    def test_robust_to_fabrication_disorder(self, seed):
        mean, sem = averaged_directionality(0.2, 1.0, 0.02, 0.05, samples=500, seed=seed, method="exact")
        assert mean > 0.99
        assert sem < 0.002

    def test_independent_of_jobs(self):
        kwargs = {"samples": 8, "seed": 3, "method": "exact"}
        serial = averaged_directionality(0.1, 1.0, 0.05, 0.1, jobs=1, **kwargs)
        parallel = averaged_directionality(0.1, 1.0, 0.05, 0.1, jobs=3, **kwargs)
        assert serial == parallel

    def test_single_sample(self):
        assert averaged_directionality(0.0, 1.0, 0.0, 0.0, samples=1, seed=0, method="exact") == pytest.approx(
            (1.0, 0.0)
        )

    @pytest.mark.parametrize(("sd_r", "samples"), [(-0.1, 4), (0.1, 0)])
    def test_invalid(self, sd_r, samples):
        with pytest.raises(InvalidParameters):
            averaged_directionality(0.0, 1.0, sd_r, 0.0, samples=samples, seed=0)
