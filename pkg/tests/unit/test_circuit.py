import dataclasses

import numpy as np
import pytest

from qnet.circuit import (
    CircuitParams,
    InterfaceParams,
    balanced_coupler_energy,
    capacitance_for,
    charging_energy,
    chi_sweep,
    coupler_energy_for_v,
    design_circuit,
    effective_model,
    interface_model,
    renormalized_hamiltonian,
    subradiance,
)
from qnet.exceptions import InvalidDimension, InvalidParameters, PreconditionError, WeakCouplingWarning

TWO_PI_GHZ = 2 * np.pi * 1e9


@pytest.fixture
def qubit_interface():
    """Qubit transmon at 5 GHz with E_J/E_C = 50 and weak coupling SQUIDs on both GUE transmons"""
    e_cq = 0.25 * TWO_PI_GHZ
    cq_eff = capacitance_for(e_cq)
    ccc = 0.01 * cq_eff
    ejq = 50 * e_cq
    return InterfaceParams(ejq=ejq, cq=cq_eff - 2 * ccc, ejc1=0.01 * ejq, ejc2=0.01 * ejq, ccc1=ccc, ccc2=ccc)


class TestCircuitParams:
    def test_charging_energy(self):
        assert charging_energy(capacitance_for(0.3 * TWO_PI_GHZ)) == pytest.approx(0.3 * TWO_PI_GHZ)

    def test_weak_coupling_flags(self, weak_circuit):
        assert weak_circuit.weak_coupling == {"capacitive": True, "inductive": True, "transmon": True}
        assert weak_circuit.check_regime()

    def test_strong_coupling_warns(self, weak_circuit):
        strong = weak_circuit.replace(cc=0.5 * weak_circuit.c1)
        with pytest.warns(WeakCouplingWarning):
            assert not strong.check_regime()

    @pytest.mark.parametrize(("name", "value"), [("ej1", 0.0), ("c2", -1e-15), ("ejc", -1.0), ("omega0", 0.0)])
    def test_invalid(self, weak_circuit, name, value):
        with pytest.raises(InvalidParameters):
            weak_circuit.replace(**{name: value})


class TestEffectiveModel:
    def test_weak_circuit(self, weak_circuit):
        model = effective_model(weak_circuit)
        e_c = 0.3 * TWO_PI_GHZ
        assert model.omega1 == pytest.approx(weak_circuit.omega0)
        assert model.u1 == pytest.approx(e_c)
        assert model.chi == pytest.approx(0.04 * e_c)
        assert model.r1 == pytest.approx(0.01)
        assert model.j == pytest.approx(-0.005 * weak_circuit.omega0)
        assert model.gamma1 == pytest.approx(model.gamma2)
        assert model.gamma1 > 0

    def test_decoupled_transmons(self, weak_circuit):
        model = effective_model(weak_circuit.replace(ejc=0.0, cc=0.0))
        assert (model.chi, model.j_i, model.j_c, model.r1, model.r2) == (0.0, 0.0, 0.0, 0.0, 0.0)

    def test_to_gue(self, weak_circuit):
        model = effective_model(weak_circuit)
        gue = model.to_gue(weak_circuit.omega0)
        assert gue.delta1 == pytest.approx(0.0, abs=1e-6 * weak_circuit.omega0)
        assert gue.j_hop == model.j
        assert gue.phi == pytest.approx(np.pi / 2)

    def test_design(self):
        params = design_circuit(100.0, 6 * TWO_PI_GHZ, 0.05)
        model = effective_model(params)
        assert model.omega1 == pytest.approx(6 * TWO_PI_GHZ)
        assert model.r1 == pytest.approx(0.05)
        # E_J bar = r E_J balances the capacitive and inductive hoppings
        assert model.j == pytest.approx(0.0, abs=1e-9 * model.omega1)

    @pytest.mark.parametrize(("ratio", "r"), [(0.0, 0.1), (100.0, 1.0), (100.0, -0.1)])
    def test_invalid_design(self, ratio, r):
        with pytest.raises(InvalidParameters):
            design_circuit(ratio, TWO_PI_GHZ, r)


class TestRenormalization:
    def test_chi_matches_analytic(self, weak_circuit):
        _, extracted = renormalized_hamiltonian(weak_circuit, 6)
        analytic = effective_model(weak_circuit).chi
        assert extracted["chi"] == pytest.approx(analytic, rel=0.15)

    def test_operator(self, weak_circuit):
        operator, extracted = renormalized_hamiltonian(weak_circuit, 4, assignment="diagonal")
        assert operator.matrix.shape == (16, 16)
        assert np.allclose(operator.matrix, operator.matrix.conj().T)
        assert extracted["ambiguous"] is False

    def test_invalid(self, weak_circuit):
        with pytest.raises(InvalidDimension):
            renormalized_hamiltonian(weak_circuit, 3)
        with pytest.raises(InvalidParameters):
            renormalized_hamiltonian(weak_circuit, 6, assignment="eigen")

    def test_chi_decreases_with_ratio(self):
        sweep = chi_sweep([50.0, 100.0], 6 * TWO_PI_GHZ, 0.05, n_max=5, optimize_each=False)
        assert sweep.chi_analytic[1] < sweep.chi_analytic[0]
        assert sweep.chi_numeric[1] < sweep.chi_numeric[0]
        assert np.polyfit(np.log(sweep.ratios), np.log(sweep.chi_analytic), 1)[0] == pytest.approx(-0.5)

    def test_optimized_chi_trend(self):
        sweep = chi_sweep([50.0, 100.0, 200.0, 400.0], 6 * TWO_PI_GHZ, 0.05, n_max=6)
        assert np.all(np.diff(sweep.chi_numeric) < 0)
        assert -0.85 <= sweep.slope <= -0.45


class TestInterface:
    def test_weak_interface(self, weak_circuit, qubit_interface):
        model = interface_model(qubit_interface, weak_circuit)
        assert model.rotating_wave
        assert model.omega_q == pytest.approx(5 * TWO_PI_GHZ)
        assert model.v1 == pytest.approx(model.v2)
        assert model.gamma_q1_eff >= model.gamma_q1

    def test_balanced_coupler_removes_exchange(self, weak_circuit, qubit_interface):
        balanced = dataclasses.replace(
            qubit_interface,
            ejc1=balanced_coupler_energy(qubit_interface, weak_circuit, 1),
            ejc2=balanced_coupler_energy(qubit_interface, weak_circuit, 2),
        )
        model = interface_model(balanced, weak_circuit)
        assert model.exchange_residuals == pytest.approx((0.0, 0.0), abs=1e-9 * model.jc1)
        assert model.gamma_q1_eff == pytest.approx(model.gamma_q1)

    def test_coupler_for_v(self, weak_circuit, qubit_interface):
        target = 0.05 * TWO_PI_GHZ
        ejc = coupler_energy_for_v(target, qubit_interface, weak_circuit, 1)
        model = interface_model(dataclasses.replace(qubit_interface, ejc1=ejc), weak_circuit)
        assert model.v1 == pytest.approx(target)

    def test_resonant_qubit(self, weak_circuit, qubit_interface):
        with pytest.raises(PreconditionError):
            interface_model(dataclasses.replace(qubit_interface, omega_q=weak_circuit.omega0), weak_circuit)


class TestSubradiance:
    def test_dark_at_pi(self):
        delta_q, gamma_q = subradiance(np.pi, 0.3, 0.3)
        assert gamma_q == pytest.approx(0.0, abs=1e-15)
        assert delta_q == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("phase", [0.0, 0.4, 2.0])
    def test_periodic(self, phase):
        assert subradiance(phase + 2 * np.pi, 0.2, 0.5) == pytest.approx(subradiance(phase, 0.2, 0.5))

    def test_bright_at_zero(self):
        assert subradiance(0.0, 0.2, 0.2) == pytest.approx((0.0, 0.8))

    def test_negative_rate(self):
        with pytest.raises(InvalidParameters):
            subradiance(0.0, -0.1, 0.2)
