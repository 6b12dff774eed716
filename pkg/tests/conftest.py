import json

import numpy as np
import pytest

from qnet.circuit import CircuitParams, capacitance_for
from qnet.core import registry
from qnet.gue import optimal_gue
from qnet.protocols import ToricLattice, resonant_node

TWO_PI_GHZ = 2 * np.pi * 1e9


@pytest.fixture
def symmetric_gue():
    """Symmetric GUE with r = 0.2 and gamma = 1, tuned to the unidirectional point"""
    return optimal_gue(0.2, 1.0, n_max=2)


@pytest.fixture
def node():
    """Resonant node with gamma_r = 1 and V = gamma_r"""
    return resonant_node(1.0)


@pytest.fixture(scope="session")
def small_lattice():
    """Toric code on a 2x2 torus: 8 qubits, 6 independent stabilizers"""
    return ToricLattice(2)


@pytest.fixture
def weak_circuit():
    """Symmetric transmon pair with E_J/E_C = 200, E_C = 2pi x 300 MHz and a weak SQUID coupler"""
    e_c = 0.3 * TWO_PI_GHZ
    c_eff = capacitance_for(e_c)
    cc, cp = 0.01 * c_eff, 0.02 * c_eff
    ej = 200 * e_c
    return CircuitParams(
        ej1=ej,
        ej2=ej,
        ejc=0.02 * ej,
        c1=c_eff - cc - cp,
        c2=c_eff - cc - cp,
        cc=cc,
        cp1=cp,
        cp2=cp,
        omega0=np.sqrt(8 * ej * e_c),
    )


@pytest.fixture
def clean_registry():
    """Empty the command registry during the test, and restore it afterwards"""
    saved = dict(registry._registry)
    registry.reset()
    yield registry
    registry.reset()
    registry._registry.update(saved)


@pytest.fixture
def write_config(tmp_path):
    """Write a configuration document to a temporary file and return its path"""

    def _write(document, name="config.json"):
        path = tmp_path / name
        path.write_text(document if isinstance(document, str) else json.dumps(document), encoding="utf-8")
        return path

    return _write
