"""
Superconducting circuit implementation of a GUE: two transmons joined by a SQUID coupler, and the qubit interface.

All energies and rates are angular frequencies (hbar = 1, rad/s); capacitances are in farads and the line impedance in
ohms. Charging energies follow E_C = e^2 / (2 C).

:func:`effective_model` gives the leading-order analytic mapping of the weak-coupling regime.
:func:`renormalized_hamiltonian` builds the cosine potentials expanded to fourth order on truncated Fock spaces, folds
the excitation-number changing terms in at second order and reads the effective parameters back from the levels.
"""

from __future__ import annotations

import dataclasses
import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants, linalg, optimize

from qnet.conf import settings
from qnet.exceptions import (
    ConvergenceError,
    InvalidDimension,
    InvalidParameters,
    PreconditionError,
    WeakCouplingWarning,
)
from qnet.gue import GueParams, optimal_params
from qnet.qops import HilbertSpace, Operator, truncated_boson

logger = logging.getLogger(__name__)

# e^2 / hbar, in siemens: multiplied by an impedance it gives the dimensionless line coupling
CONDUCTANCE_QUANTUM = constants.e**2 / constants.hbar

# Weak-coupling regime: coupler elements below this fraction of the transmon ones, E_J / E_C above the ratio
WEAK_COUPLING_FRACTION = 0.1
TRANSMON_RATIO = 20.0


def charging_energy(capacitance: float) -> float:
    """E_C = e^2 / (2 C), in rad/s"""
    return constants.e**2 / (2 * capacitance * constants.hbar)


def capacitance_for(charging: float) -> float:
    """Capacitance giving the charging energy ``charging`` (rad/s)"""
    return constants.e**2 / (2 * charging * constants.hbar)


@dataclass(frozen=True)
class CircuitParams:
    """Two transmons (E_J^k, C_k), a SQUID coupler (E_J bar, C bar) and coupling capacitances c'_k to the line"""

    ej1: float
    ej2: float
    ejc: float
    c1: float
    c2: float
    cc: float
    cp1: float
    cp2: float
    omega0: float
    z0: float = 50.0

    def __post_init__(self):
        positive = {name: getattr(self, name) for name in ("ej1", "ej2", "c1", "c2", "cp1", "cp2", "omega0", "z0")}
        for name, value in positive.items():
            if value <= 0:
                raise InvalidParameters(f"{name} must be > 0, got {value}")
        if self.ejc < 0 or self.cc < 0:
            raise InvalidParameters(f"coupler energy and capacitance must be >= 0, got {self.ejc}, {self.cc}")

    def replace(self, **changes) -> CircuitParams:
        return dataclasses.replace(self, **changes)

    @property
    def c_eff(self) -> tuple[float, float]:
        """C_k + c'_k + C bar"""
        return self.c1 + self.cp1 + self.cc, self.c2 + self.cp2 + self.cc

    @property
    def e_c(self) -> tuple[float, float]:
        return charging_energy(self.c_eff[0]), charging_energy(self.c_eff[1])

    def inverse_capacitance(self) -> np.ndarray:
        """Inverse of the transmon node capacitance matrix"""
        matrix = np.array([[self.c1 + self.cp1 + self.cc, -self.cc], [-self.cc, self.c2 + self.cp2 + self.cc]])
        return np.linalg.inv(matrix)

    @property
    def weak_coupling(self) -> dict[str, bool]:
        e_c1, e_c2 = self.e_c
        return {
            "capacitive": self.cc < WEAK_COUPLING_FRACTION * min(self.c1, self.c2),
            "inductive": self.ejc < WEAK_COUPLING_FRACTION * min(self.ej1, self.ej2),
            "transmon": min(self.ej1 / e_c1, self.ej2 / e_c2) > TRANSMON_RATIO,
        }

    def check_regime(self) -> bool:
        """Warn with a WeakCouplingWarning for each violated weak-coupling condition"""
        violated = [name for name, ok in self.weak_coupling.items() if not ok]
        for name in violated:
            warnings.warn(f"circuit leaves the weak-coupling regime ({name} condition)", WeakCouplingWarning)
        return not violated


@dataclass(frozen=True)
class EffectiveModel:
    omega1: float
    omega2: float
    u1: float
    u2: float
    j_c: float
    j_i: float
    chi: float
    gamma1: float
    gamma2: float
    r1: float
    r2: float

    @property
    def j(self) -> float:
        return self.j_c - self.j_i

    def to_gue(self, omega_ref: float, phi: float = np.pi / 2, n_max: int = 3) -> GueParams:
        """GUE parameters in the frame rotating at ``omega_ref``"""
        return GueParams(
            delta1=omega_ref - self.omega1,
            delta2=omega_ref - self.omega2,
            u1=self.u1,
            u2=self.u2,
            j_hop=self.j,
            chi=self.chi,
            gamma1=self.gamma1,
            gamma2=self.gamma2,
            r1=self.r1,
            r2=self.r2,
            phi=phi,
            n_max=n_max,
        )


def effective_model(cp: CircuitParams) -> EffectiveModel:
    """Leading-order parameters of the GUE Hamiltonian and of its waveguide couplings"""
    cp.check_regime()
    (c1, c2), (e_c1, e_c2) = cp.c_eff, cp.e_c
    ratio1, ratio2 = cp.ej1 / e_c1, cp.ej2 / e_c2
    if abs(ratio1 - ratio2) > 0.1 * max(ratio1, ratio2):
        logger.warning("E_J/E_C differ between transmons (%.1f, %.1f): line couplings are approximate", ratio1, ratio2)
    line = cp.omega0 * CONDUCTANCE_QUANTUM * cp.z0
    return EffectiveModel(
        omega1=np.sqrt(8 * cp.ej1 * e_c1),
        omega2=np.sqrt(8 * cp.ej2 * e_c2),
        u1=e_c1,
        u2=e_c2,
        j_c=cp.omega0 * cp.cc / (2 * np.sqrt(c1 * c2)),
        j_i=cp.omega0 * cp.ejc / (2 * np.sqrt(cp.ej1 * cp.ej2)),
        chi=2 * cp.ejc * np.sqrt(e_c1 * e_c2 / (cp.ej1 * cp.ej2)),
        gamma1=(cp.cp1 / c1) ** 2 * line * np.sqrt(ratio1 / 8),
        gamma2=(cp.cp2 / c2) ** 2 * line * np.sqrt(ratio2 / 8),
        r1=cp.cc / c1,
        r2=cp.cc / c2,
    )


def _fock_labels(n_max: int) -> tuple[tuple[int, int], ...]:
    return tuple((n1, n2) for n1 in range(n_max) for n2 in range(n_max))


def _full_hamiltonian(cp: CircuitParams, dim: int) -> np.ndarray:
    """Quantized circuit Hamiltonian with cosines expanded to fourth order, on ``dim`` Fock states per transmon"""
    inverse = cp.inverse_capacitance()
    a = truncated_boson(dim).matrix
    eye = np.eye(dim)
    phases, charges = [], []
    for k, ej in enumerate((cp.ej1, cp.ej2)):
        e_c = constants.e**2 * inverse[k, k] / (2 * constants.hbar)
        xi = (2 * e_c / ej) ** 0.25
        s = (ej / (32 * e_c)) ** 0.25
        phases.append(xi * (a + a.T))
        charges.append(1j * s * (a.T - a))
    x1, x2 = np.kron(phases[0], eye), np.kron(eye, phases[1])
    n1, n2 = np.kron(charges[0], eye), np.kron(eye, charges[1])
    # Charge couplings Q^T C^{-1} Q / 2, with Q = 2e n
    charge_scale = 2 * constants.e**2 / constants.hbar
    hamiltonian = charge_scale * (inverse[0, 0] * n1 @ n1 + inverse[1, 1] * n2 @ n2 + 2 * inverse[0, 1] * n1 @ n2)

    def cosine(x: np.ndarray) -> np.ndarray:
        x2 = x @ x
        return x2 / 2 - x2 @ x2 / 24

    hamiltonian += cp.ej1 * cosine(x1) + cp.ej2 * cosine(x2) + cp.ejc * cosine(x2 - x1)
    return 0.5 * (hamiltonian + hamiltonian.conj().T)


def _second_order(hamiltonian: np.ndarray, excitations: np.ndarray, omega0: float) -> np.ndarray:
    """H^(2) = sum_n P_n H P_n - sum_{n' != n} P_n H P_n' H P_n / (omega0 (n' - n))"""
    gaps = excitations[None, :] - excitations[:, None]
    weights = np.zeros(gaps.shape)
    off = gaps != 0
    weights[off] = 1.0 / (omega0 * gaps[off])
    correction = (hamiltonian * weights) @ hamiltonian
    same = ~off
    return np.where(same, hamiltonian - correction, 0.0)


def _block_levels(block: np.ndarray, use_overlap: bool) -> tuple[np.ndarray, float]:
    """Energies assigned to the Fock labels of ``block``, and the smallest eigenvector overlap used"""
    if not use_overlap:
        return np.real(np.diag(block)), 1.0
    energies, vectors = linalg.eigh(block)
    overlaps = np.abs(vectors) ** 2
    assignment = np.argmax(overlaps, axis=1)
    if len(set(assignment)) != len(assignment):
        return np.real(np.diag(block)), float(np.min(np.max(overlaps, axis=1)))
    return energies[assignment], float(np.min(overlaps[np.arange(len(assignment)), assignment]))


def renormalized_hamiltonian(
    cp: CircuitParams, n_max: int = 6, assignment: str = "overlap"
) -> tuple[Operator, dict[str, float | bool]]:
    """Second-order renormalized circuit Hamiltonian on ``n_max`` Fock states per transmon, and the parameters read
    from its lowest levels.

    Levels are matched to the Fock labels (n1, n2) by eigenvector overlap (``assignment="overlap"``). When a match
    falls below QNET_LEVEL_OVERLAP_MIN, ``ambiguous`` is set and the diagonal elements of the excitation-number blocks
    are used instead, which is also what ``assignment="diagonal"`` does.
    """
    if n_max < 4:
        raise InvalidDimension(f"renormalization needs n_max >= 4 Fock states per transmon, got {n_max}")
    if assignment not in ("overlap", "diagonal"):
        raise InvalidParameters(f'level assignment is "overlap" or "diagonal", got "{assignment}"')
    # Fourth-order terms connect each kept state to states up to four excitations above it
    padded = n_max + 4
    full = _full_hamiltonian(cp, padded)
    padded_labels = _fock_labels(padded)
    excitations = np.array([n1 + n2 for n1, n2 in padded_labels])
    renormalized = _second_order(full, excitations, cp.omega0)

    kept = [index for index, (n1, n2) in enumerate(padded_labels) if n1 < n_max and n2 < n_max]
    matrix = renormalized[np.ix_(kept, kept)]
    space = HilbertSpace((("a1", n_max), ("a2", n_max)))
    operator = Operator(space, 0.5 * (matrix + matrix.conj().T), hermitian=True)

    index = {label: position for position, label in enumerate(_fock_labels(n_max))}
    use_overlap = assignment == "overlap"
    levels: dict[tuple[int, int], float] = {}
    min_overlap = 1.0
    for block_labels in (((0, 0),), ((1, 0), (0, 1)), ((2, 0), (1, 1), (0, 2))):
        positions = [index[label] for label in block_labels]
        energies, overlap = _block_levels(operator.matrix[np.ix_(positions, positions)], use_overlap)
        min_overlap = min(min_overlap, overlap)
        levels.update(zip(block_labels, energies))
    ambiguous = use_overlap and min_overlap < settings.QNET_LEVEL_OVERLAP_MIN
    if ambiguous:
        logger.debug("Level assignment ambiguous (overlap %.3f), using block diagonals", min_overlap)
        for block_labels in (((1, 0), (0, 1)), ((2, 0), (1, 1), (0, 2))):
            positions = [index[label] for label in block_labels]
            levels.update(zip(block_labels, np.real(np.diag(operator.matrix[np.ix_(positions, positions)]))))

    e00 = levels[(0, 0)]
    omega1, omega2 = levels[(1, 0)] - e00, levels[(0, 1)] - e00
    extracted: dict[str, float | bool] = {
        "omega1": omega1,
        "omega2": omega2,
        "u1": 2 * omega1 - (levels[(2, 0)] - e00),
        "u2": 2 * omega2 - (levels[(0, 2)] - e00),
        "j": float(np.real(operator.matrix[index[(1, 0)], index[(0, 1)]])),
        "chi": -(levels[(1, 1)] - levels[(1, 0)] - levels[(0, 1)] + e00),
        "ambiguous": bool(ambiguous),
        "min_overlap": min_overlap,
    }
    return operator, extracted


@dataclass(frozen=True)
class InterfaceParams:
    """Qubit transmon (E_J^q, C_q) attached to transmon k of the GUE through a SQUID (E_J bar_k, C bar_k)"""

    ejq: float
    cq: float
    ejc1: float
    ejc2: float
    ccc1: float
    ccc2: float
    phase_qd: float = np.pi
    omega_q: float | None = None

    def __post_init__(self):
        if self.ejq <= 0 or self.cq <= 0:
            raise InvalidParameters(f"qubit E_J and capacitance must be > 0, got {self.ejq}, {self.cq}")
        if min(self.ejc1, self.ejc2, self.ccc1, self.ccc2) < 0:
            raise InvalidParameters("coupling SQUID energies and capacitances must be >= 0")
        if self.omega_q is not None and self.omega_q <= 0:
            raise InvalidParameters(f"omega_q must be > 0, got {self.omega_q}")

    @property
    def cq_eff(self) -> float:
        return self.cq + self.ccc1 + self.ccc2

    @property
    def e_cq(self) -> float:
        return charging_energy(self.cq_eff)


@dataclass(frozen=True)
class InterfaceModel:
    omega_q: float
    v1: float
    v2: float
    jc1: float
    jc2: float
    ji1: float
    ji2: float
    gamma_q1: float
    gamma_q2: float
    gamma_q1_eff: float
    gamma_q2_eff: float
    delta_q: float
    gamma_q: float
    rotating_wave: bool = True

    @property
    def exchange_residuals(self) -> tuple[float, float]:
        """J_C,k - J_I,k, the qubit-GUE exchange left by the coupling SQUIDs"""
        return self.jc1 - self.ji1, self.jc2 - self.ji2


def subradiance(omega_q_phase: float, geff1: float, geff2: float) -> tuple[float, float]:
    """Lamb shift and decay rate of a qubit coupled to the line at two points: (delta_q, gamma_q)"""
    if geff1 < 0 or geff2 < 0:
        raise InvalidParameters(f"rates must be >= 0, got {geff1}, {geff2}")
    interference = 2 * np.sqrt(geff1 * geff2)
    return interference * np.sin(omega_q_phase), geff1 + geff2 + interference * np.cos(omega_q_phase)


def interface_model(ip: InterfaceParams, cp: CircuitParams) -> InterfaceModel:
    """Cross-Kerr shifts V_k, exchange couplings and line emission of the qubit"""
    e_cq = ip.e_cq
    omega_q = ip.omega_q if ip.omega_q is not None else np.sqrt(8 * ip.ejq * e_cq)
    if np.isclose(omega_q, cp.omega0, rtol=1e-9, atol=0.0):
        raise PreconditionError("the qubit must be detuned from the GUE frequency")
    gue = effective_model(cp)
    prefactor = np.sqrt(cp.omega0 * omega_q) / 2
    couplings = []
    rotating_wave = True
    for ej, c_eff, e_c, gamma, ejc, ccc in zip(
        (cp.ej1, cp.ej2), cp.c_eff, cp.e_c, (gue.gamma1, gue.gamma2), (ip.ejc1, ip.ejc2), (ip.ccc1, ip.ccc2)
    ):
        v = 2 * ejc * np.sqrt(e_c * e_cq / (ej * ip.ejq))
        if v >= np.sqrt(e_c * e_cq):
            rotating_wave = False
            logger.warning("V = %.4g is not small against sqrt(E_C E_C^q) = %.4g", v, np.sqrt(e_c * e_cq))
        jc = prefactor * ccc / np.sqrt(ip.cq_eff * c_eff)
        ji = prefactor * ejc / np.sqrt(ip.ejq * ej)
        gamma_q = gamma * omega_q / cp.omega0 * np.sqrt(e_c * ip.ejq / (ej * e_cq)) * (ccc / ip.cq) ** 2
        gamma_q_eff = gamma_q + gamma * ((jc - ji) / (cp.omega0 - omega_q)) ** 2
        couplings.append((v, jc, ji, gamma_q, gamma_q_eff))
    (v1, jc1, ji1, g1, geff1), (v2, jc2, ji2, g2, geff2) = couplings
    delta_q, gamma_q = subradiance(ip.phase_qd, geff1, geff2)
    return InterfaceModel(
        omega_q, v1, v2, jc1, jc2, ji1, ji2, g1, g2, geff1, geff2, delta_q, gamma_q, rotating_wave=rotating_wave
    )


def balanced_coupler_energy(ip: InterfaceParams, cp: CircuitParams, k: int) -> float:
    """E_J bar_k cancelling the qubit-GUE exchange (J_C,k = J_I,k) for the coupling capacitance of ``ip``"""
    ej, c_eff = ((cp.ej1, cp.c_eff[0]), (cp.ej2, cp.c_eff[1]))[k - 1]
    ccc = (ip.ccc1, ip.ccc2)[k - 1]
    return ccc * np.sqrt(ip.ejq * ej / (ip.cq_eff * c_eff))


def coupler_energy_for_v(v: float, ip: InterfaceParams, cp: CircuitParams, k: int) -> float:
    """E_J bar_k producing the cross-Kerr shift ``v`` between the qubit and transmon k"""
    ej, e_c = ((cp.ej1, cp.e_c[0]), (cp.ej2, cp.e_c[1]))[k - 1]
    return v / (2 * np.sqrt(e_c * ip.e_cq / (ej * ip.ejq)))


def _bracketed_root(function, guess: float, lower: float = 0.0) -> float:
    """Root of an increasing or decreasing ``function``, bracketed by expanding around ``guess``"""
    low, high = max(lower, guess / 2), guess * 2
    for _ in range(40):
        if np.sign(function(low)) != np.sign(function(high)):
            return optimize.brentq(function, low, high, xtol=1e-12 * guess, rtol=1e-13)
        low, high = max(lower, low / 2), high * 2
    raise ConvergenceError(f"no sign change found around {guess:.6g}")


def optimize_circuit(
    cp: CircuitParams, n_max: int = 6, rtol: float = 1e-9, max_iter: int = 50
) -> tuple[CircuitParams, dict[str, float | bool]]:
    """Tune E_J^1, E_J^2 and E_J bar so that the renormalized model has omega_k = omega0 and J = J_opt.

    Each parameter is found by a bracketed root find with the others fixed; the sweeps repeat until the relative
    change of every parameter is below ``rtol``.
    """

    def extracted(params: CircuitParams) -> dict[str, float | bool]:
        return renormalized_hamiltonian(params, n_max, assignment="diagonal")[1]

    current = cp
    for iteration in range(max_iter):
        previous = current
        for name, key in (("ej1", "omega1"), ("ej2", "omega2")):
            e_c = current.e_c[0 if name == "ej1" else 1]
            guess = current.omega0**2 / (8 * e_c)
            value = _bracketed_root(
                lambda ej: extracted(current.replace(**{name: ej}))[key] - current.omega0,  # noqa: B023
                guess,
            )
            current = current.replace(**{name: value})
        model = effective_model(current)
        target = optimal_params(0.5 * (model.r1 + model.r2), 0.5 * (model.gamma1 + model.gamma2)).j_opt
        guess = max(current.ejc, 2 * np.sqrt(current.ej1 * current.ej2) * (model.j_c - target) / current.omega0)
        ejc = _bracketed_root(lambda e: extracted(current.replace(ejc=e))["j"] - target, guess)  # noqa: B023
        current = current.replace(ejc=ejc)
        change = max(
            abs(getattr(current, name) - getattr(previous, name)) / abs(getattr(current, name))
            for name in ("ej1", "ej2", "ejc")
        )
        logger.debug("Circuit optimization sweep %d: relative change %.3e", iteration, change)
        if change < rtol:
            result = extracted(current)
            result["j_opt"] = target
            return current, result
    raise ConvergenceError(f"circuit optimization did not reach rtol={rtol} in {max_iter} sweeps")


@dataclass(frozen=True, eq=False)
class ChiSweep:
    ratios: np.ndarray
    chi_analytic: np.ndarray
    chi_numeric: np.ndarray
    u_numeric: np.ndarray

    @property
    def slope(self) -> float:
        """Log-log slope of the numerical chi against E_J / E_C"""
        return float(np.polyfit(np.log(self.ratios), np.log(self.chi_numeric), 1)[0])


def design_circuit(
    ratio: float, omega0: float, r: float, line_fraction: float = 0.05, z0: float = 50.0
) -> CircuitParams:
    """Symmetric circuit with E_J / E_C = ``ratio`` at frequency ~``omega0`` and cross-coupling r = C bar / C_eff.

    The coupler E_J bar starts at r E_J, where the capacitive and inductive hoppings cancel.
    """
    if ratio <= 0 or omega0 <= 0 or not 0 <= r < 1 or not 0 < line_fraction < 1:
        raise InvalidParameters(f"invalid circuit design ratio={ratio}, omega0={omega0}, r={r}")
    e_c = omega0 / np.sqrt(8 * ratio)
    c_eff = capacitance_for(e_c)
    cc, cp_line = r * c_eff, line_fraction * c_eff
    c = c_eff - cc - cp_line
    if c <= 0:
        raise InvalidParameters("cross-coupling and line capacitances exceed the transmon capacitance")
    ej = ratio * e_c
    return CircuitParams(ej1=ej, ej2=ej, ejc=r * ej, c1=c, c2=c, cc=cc, cp1=cp_line, cp2=cp_line, omega0=omega0, z0=z0)


def chi_sweep(ratios, omega0: float, r: float, n_max: int = 6, optimize_each: bool = True) -> ChiSweep:
    """Cross-Kerr frequency along E_J / E_C at fixed omega0 and r, the circuit pinned to omega_k = omega0 and J_opt"""
    ratios = np.asarray(ratios, dtype=float)
    analytic, numeric, anharmonicity = [], [], []
    for ratio in ratios:
        params = design_circuit(ratio, omega0, r)
        if optimize_each:
            params, values = optimize_circuit(params, n_max)
        else:
            values = renormalized_hamiltonian(params, n_max, assignment="diagonal")[1]
        analytic.append(effective_model(params).chi)
        numeric.append(float(values["chi"]))
        anharmonicity.append(0.5 * (float(values["u1"]) + float(values["u2"])))
        logger.debug("E_J/E_C = %.1f: chi %.6g (analytic %.6g)", ratio, numeric[-1], analytic[-1])
    return ChiSweep(ratios, np.array(analytic), np.array(numeric), np.array(anharmonicity))
