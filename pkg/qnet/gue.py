"""
Giant unidirectional emitter (GUE): two transmons, coupled to each other and to a waveguide at two points.

All frequencies are angular (rad/s, or any consistent unit with hbar = 1), and Hamiltonians are written in the frame
rotating at the reference frequency omega_0, so ``delta_k = omega_0 - omega_k``.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_continuous_lyapunov

from qnet.conf import settings
from qnet.exceptions import ConvergenceError, InvalidParameters
from qnet.helpers import uniform_bounds
from qnet.qops import HilbertSpace, Operator, StateVector, basis_state, embed, truncated_boson

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GueParams:
    delta1: float = 0.0
    delta2: float = 0.0
    u1: float = 0.0
    u2: float = 0.0
    j_hop: float = 0.0
    chi: float = 0.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    r1: float = 0.0
    r2: float = 0.0
    phi: float = np.pi / 2
    n_max: int = 3

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise InvalidParameters(f"coupling rates must be >= 0, got {self.gamma1}, {self.gamma2}")
        if self.u1 < 0 or self.u2 < 0 or self.chi < 0:
            raise InvalidParameters("anharmonicities and cross-Kerr frequency must be >= 0")
        if abs(self.r1) >= 1 or abs(self.r2) >= 1:
            raise InvalidParameters(f"cross-coupling coefficients must satisfy |r| < 1, got {self.r1}, {self.r2}")
        if self.n_max < 2:
            raise InvalidParameters(f"Fock cutoff must be >= 2, got {self.n_max}")

    def replace(self, **changes) -> GueParams:
        return dataclasses.replace(self, **changes)

    def mirrored(self) -> GueParams:
        """Exchange the roles of the two transmons"""
        return self.replace(
            delta1=self.delta2,
            delta2=self.delta1,
            u1=self.u2,
            u2=self.u1,
            gamma1=self.gamma2,
            gamma2=self.gamma1,
            r1=self.r2,
            r2=self.r1,
        )

    @property
    def is_symmetric(self) -> bool:
        return self.gamma1 == self.gamma2 and self.r1 == self.r2


@dataclass(frozen=True)
class OptimalParams:
    phi_opt: float
    j_opt: float
    gamma_r: float
    delta_shift: float


class CouplingOps(NamedTuple):
    l1: Operator
    l2: Operator
    lr: Operator
    ll: Operator


def optimal_params(r: float, gamma: float) -> OptimalParams:
    """Propagation phase, hopping rate and detuning offset making a symmetric GUE unidirectional"""
    if abs(r) >= 1:
        raise InvalidParameters(f"|r| must be < 1, got {r}")
    if gamma <= 0:
        raise InvalidParameters(f"gamma must be > 0, got {gamma}")
    phi_opt = np.pi / 2 + 2 * np.arctan(r)
    return OptimalParams(
        phi_opt=phi_opt,
        j_opt=-gamma * (1 + r**2) * np.sin(phi_opt),
        gamma_r=2 * gamma * (1 + 2 * r * np.cos(phi_opt) + r**2),
        delta_shift=2 * r * gamma * np.sin(phi_opt),
    )


def optimal_gue(r: float, gamma: float, delta: float = 0.0, **kwargs) -> GueParams:
    """Symmetric GUE tuned to the unidirectional point, with |R> and |L> at energy -delta"""
    opt = optimal_params(r, gamma)
    return GueParams(
        delta1=delta + opt.delta_shift,
        delta2=delta + opt.delta_shift,
        j_hop=opt.j_opt,
        gamma1=gamma,
        gamma2=gamma,
        r1=r,
        r2=r,
        phi=opt.phi_opt,
        **kwargs,
    )


def gue_space(p: GueParams, prefix: str = "") -> HilbertSpace:
    return HilbertSpace(((f"{prefix}a1", p.n_max), (f"{prefix}a2", p.n_max)))


def mode_operators(p: GueParams, prefix: str = "") -> tuple[Operator, Operator]:
    space = gue_space(p, prefix)
    boson = truncated_boson(p.n_max)
    return embed(boson, space, f"{prefix}a1"), embed(boson, space, f"{prefix}a2")


def build_coupling_ops(p: GueParams, prefix: str = "") -> CouplingOps:
    """Waveguide coupling operators of each coupling point and their right/left collective combinations"""
    a1, a2 = mode_operators(p, prefix)
    l1 = np.sqrt(p.gamma1) * (a1 + p.r2 * a2)
    l2 = np.sqrt(p.gamma2) * (a2 + p.r1 * a1)
    phase = np.exp(1j * p.phi)
    return CouplingOps(l1=l1, l2=l2, lr=phase * l1 + l2, ll=l1 + phase * l2)


def build_hamiltonian(p: GueParams, prefix: str = "") -> Operator:
    """Effective Hamiltonian, including the waveguide-mediated exchange between the two coupling points"""
    a1, a2 = mode_operators(p, prefix)
    n1 = a1.dag() @ a1
    n2 = a2.dag() @ a2
    ops = build_coupling_ops(p, prefix)

    hamiltonian = (
        -p.delta1 * n1
        - p.delta2 * n2
        - (p.u1 / 2) * (a1.dag() @ a1.dag() @ a1 @ a1)
        - (p.u2 / 2) * (a2.dag() @ a2.dag() @ a2 @ a2)
        - p.chi * (n1 @ n2)
        + p.j_hop * (a1.dag() @ a2 + a2.dag() @ a1)
        + np.sin(p.phi) * (ops.l2.dag() @ ops.l1 + ops.l1.dag() @ ops.l2)
    )
    return hamiltonian.as_hermitian()


def delocalized_states(p: GueParams, prefix: str = "") -> tuple[StateVector, StateVector]:
    """Single excitations |R> = a_R^dagger|G> and |L> = a_L^dagger|G> of the collective modes.

    With a_R proportional to i a_1 + a_2, |R> = (-i|10> + |01>)/sqrt(2), and |L> = (|10> - i|01>)/sqrt(2).
    """
    space = gue_space(p, prefix)
    one_zero = basis_state(space, (1, 0)).vector
    zero_one = basis_state(space, (0, 1)).vector
    right = StateVector(space, (-1j * one_zero + zero_one) / np.sqrt(2))
    left = StateVector(space, (one_zero - 1j * zero_one) / np.sqrt(2))
    return right, left


def single_excitation_generator(p: GueParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Restriction of -(iH + 1/2 (L_R^dagger L_R + L_L^dagger L_L)) to the states a_1^dagger|G>, a_2^dagger|G>.

    Returns the 2x2 generator and the row vectors <G|L_R and <G|L_L in that basis.
    Anharmonicities and cross-Kerr terms do not act on this subspace.
    """
    phase = np.exp(1j * p.phi)
    sg1, sg2 = np.sqrt(p.gamma1), np.sqrt(p.gamma2)
    l1 = np.array([sg1, sg1 * p.r2], dtype=np.complex128)
    l2 = np.array([sg2 * p.r1, sg2], dtype=np.complex128)
    row_r = phase * l1 + l2
    row_l = l1 + phase * l2

    exchange = np.sin(p.phi) * (np.outer(l2.conj(), l1) + np.outer(l1.conj(), l2))
    hamiltonian = np.array([[-p.delta1, p.j_hop], [p.j_hop, -p.delta2]], dtype=np.complex128) + exchange
    decay = np.outer(row_r.conj(), row_r) + np.outer(row_l.conj(), row_l)
    return -(1j * hamiltonian + 0.5 * decay), row_r, row_l


def collective_commutator(p: GueParams) -> float:
    """Norm of [L_L^dagger, L_R] on untruncated modes.

    Both operators are linear in a_1, a_2, so the commutator is -<c_L, c_R> times the identity, where c_R and c_L are
    their coefficient vectors. It vanishes when the right and left channels address orthogonal collective modes.
    The truncated operators of :func:`build_coupling_ops` add a term on the highest Fock level that is left out here.
    """
    _, row_r, row_l = single_excitation_generator(p)
    return float(abs(np.vdot(row_l, row_r)))


def _initial_amplitudes(direction: str) -> np.ndarray:
    if direction == "R":
        return np.array([-1j, 1.0], dtype=np.complex128) / np.sqrt(2)
    if direction == "L":
        return np.array([1.0, -1j], dtype=np.complex128) / np.sqrt(2)
    raise InvalidParameters(f'direction must be "R" or "L", got "{direction}"')


def _directionality_ode(generator: np.ndarray, row: np.ndarray, psi0: np.ndarray, horizon: float) -> float:
    # State: the two complex amplitudes, followed by the accumulated |f(t)|^2
    def rhs(_t, y):
        psi = y[:2]
        flux = abs(row @ psi) ** 2
        return np.concatenate([generator @ psi, [flux]])

    y0 = np.concatenate([psi0, [0.0]]).astype(np.complex128)
    solution = solve_ivp(
        rhs,
        (0.0, horizon),
        y0,
        method="DOP853",
        rtol=settings.QNET_DIRECTIONALITY_RTOL,
        atol=settings.QNET_DIRECTIONALITY_ATOL,
    )
    if not solution.success:
        raise ConvergenceError(f"directionality integration failed: {solution.message}")
    remaining = float(np.sum(np.abs(solution.y[:2, -1]) ** 2))
    if remaining > settings.QNET_DIRECTIONALITY_RESIDUAL:
        raise ConvergenceError(
            f"excitation probability {remaining:.3e} left at the horizon t={horizon:.3e}",
            data={"remaining": remaining, "horizon": horizon},
        )
    return float(np.real(solution.y[2, -1]))


def _directionality_exact(generator: np.ndarray, row: np.ndarray, psi0: np.ndarray) -> float:
    # int_0^inf psi(t) psi(t)^dagger dt = X solves G X + X G^dagger = -psi0 psi0^dagger
    if np.max(np.real(np.linalg.eigvals(generator))) >= 0:
        raise ConvergenceError("single-excitation generator has a non-decaying mode, flux integral diverges")
    gram = solve_continuous_lyapunov(generator, -np.outer(psi0, psi0.conj()))
    return float(np.real(row @ gram @ row.conj()))


def directionality(p: GueParams, direction: str = "R", method: str | None = None) -> float:
    """Fraction of a single spontaneously emitted photon leaving in ``direction``, starting from that direction's
    delocalized excitation. ``method`` is "ode" (time-domain integration) or "exact" (Lyapunov solve)."""
    method = method or settings.QNET_DIRECTIONALITY_METHOD
    generator, row_r, row_l = single_excitation_generator(p)
    psi0 = _initial_amplitudes(direction)
    row = row_r if direction == "R" else row_l

    if method == "exact":
        return _directionality_exact(generator, row, psi0)
    if method != "ode":
        raise InvalidParameters(f'unknown directionality method "{method}"')
    slowest = min(p.gamma1, p.gamma2)
    if slowest <= 0:
        raise ConvergenceError("a vanishing coupling rate gives an infinite emission time")
    return _directionality_ode(generator, row, psi0, settings.QNET_DIRECTIONALITY_HORIZON / slowest)


def _draw_sample(seed: int, index: int, bounds: dict[str, tuple[float, float]]) -> dict[str, float]:
    rng = np.random.default_rng([seed, index])
    return {name: float(rng.uniform(low, high)) for name, (low, high) in bounds.items()}


def averaged_directionality(
    mean_r: float,
    mean_gamma: float,
    sd_r: float,
    sd_gamma: float,
    samples: int,
    seed: int,
    jobs: int = 1,
    method: str | None = None,
) -> tuple[float, float]:
    """Monte-Carlo average of the directionality over uniformly distributed r_1, r_2, gamma_1 and gamma_2.

    J and phi are set to their optimal values for the mean parameters, and detunings are zero.
    Sample ``i`` draws from its own generator seeded by ``(seed, i)``, so results do not depend on ``jobs``.
    Returns the mean and its standard error.
    """
    if sd_r < 0 or sd_gamma < 0:
        raise InvalidParameters("standard deviations must be >= 0")
    if samples < 1:
        raise InvalidParameters(f"at least one sample is required, got {samples}")

    opt = optimal_params(mean_r, mean_gamma)
    bounds = {
        "r1": uniform_bounds(mean_r, sd_r),
        "r2": uniform_bounds(mean_r, sd_r),
        "gamma1": uniform_bounds(mean_gamma, sd_gamma),
        "gamma2": uniform_bounds(mean_gamma, sd_gamma),
    }

    def evaluate(index: int) -> float:
        draw = _draw_sample(seed, index, bounds)
        params = GueParams(j_hop=opt.j_opt, phi=opt.phi_opt, n_max=2, **draw)
        return directionality(params, "R", method)

    logger.debug("Averaging directionality over %d samples with %d jobs", samples, jobs)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            values = np.array(list(executor.map(evaluate, range(samples))))
    else:
        values = np.array([evaluate(index) for index in range(samples)])

    if samples == 1:
        return float(values[0]), 0.0
    return float(np.mean(values)), float(np.std(values, ddof=1) / np.sqrt(samples))
