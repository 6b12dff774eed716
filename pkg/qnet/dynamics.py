"""
Driven-dissipative dynamics.

A :class:`MasterEquation` stores the non-Hermitian effective Hamiltonian ``H_nh = H - i/2 sum_k J_k^dagger J_k``, the
jump operators ``J_k``, and a coherent drive entering through the right-moving collective coupling ``L_R``. The
right-hand side is ``-i(H_nh rho - rho H_nh^dagger) + sum_k J_k rho J_k^dagger - i[H_d(t), rho]`` with
``H_d = -i alpha L_R^dagger + i alpha^* L_R``. The cascaded two-level model is the special case where ``H_nh`` is
given directly.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.linalg import null_space, svd

from qnet.conf import settings
from qnet.exceptions import (
    ConvergenceError,
    DegenerateSteadyState,
    DimensionMismatch,
    InvalidParameters,
    SizeLimitExceeded,
    StiffnessError,
)
from qnet.gue import GueParams, build_coupling_ops, build_hamiltonian, delocalized_states, mode_operators
from qnet.qops import (
    DensityMatrix,
    HilbertSpace,
    Operator,
    StateVector,
    basis_state,
    dissipator_apply,
    embed,
    expectation,
    lift,
    partial_trace,
)
from qnet.slh import SlhTriplet, chain_prefix, compose_gue_chain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DriveSpec:
    """Coherent drive amplitude alpha(t), constant or sampled on a time grid (linear interpolation)"""

    alpha: complex = 0.0
    times: tuple[float, ...] | None = None
    alphas: tuple[complex, ...] | None = None

    def __post_init__(self):
        if self.times is not None or self.alphas is not None:
            if self.times is None or self.alphas is None or len(self.times) != len(self.alphas):
                raise InvalidParameters("a sampled drive needs matching times and alphas")
            if len(self.times) < 2 or np.any(np.diff(self.times) <= 0):
                raise InvalidParameters("drive sample times must be strictly increasing")
            if not np.all(np.isfinite(self.alphas)):
                raise InvalidParameters("drive amplitudes must be finite")
        elif not np.isfinite(self.alpha):
            raise InvalidParameters("drive amplitude must be finite")

    @classmethod
    def from_rabi(cls, omega_rabi: float, gamma_r: float) -> DriveSpec:
        """Constant drive with Rabi frequency omega_rabi = sqrt(gamma_r) alpha"""
        if gamma_r <= 0:
            raise InvalidParameters(f"gamma_r must be > 0, got {gamma_r}")
        return cls(alpha=omega_rabi / np.sqrt(gamma_r))

    @property
    def is_constant(self) -> bool:
        return self.times is None

    def alpha_at(self, t: float) -> complex:
        if self.times is None or self.alphas is None:
            return complex(self.alpha)
        samples = np.asarray(self.alphas, dtype=np.complex128)
        return complex(np.interp(t, self.times, samples.real) + 1j * np.interp(t, self.times, samples.imag))


@dataclass(frozen=True)
class NoiseSpec:
    gamma_phi: float = 0.0
    gamma_nr: float = 0.0

    def __post_init__(self):
        if self.gamma_phi < 0 or self.gamma_nr < 0:
            raise InvalidParameters("noise rates must be >= 0")

    def jump_operators(self, modes: Sequence[Operator]) -> list[Operator]:
        """Dephasing sqrt(2 gamma_phi) a^dagger a and decay sqrt(gamma_nr) a, for each lowering operator"""
        jumps = []
        for mode in modes:
            if self.gamma_phi > 0:
                jumps.append(np.sqrt(2 * self.gamma_phi) * (mode.dag() @ mode))
            if self.gamma_nr > 0:
                jumps.append(np.sqrt(self.gamma_nr) * mode)
        return jumps


@dataclass(frozen=True)
class TwoLevelChain:
    n_emitters: int
    omega_rabi: float
    delta: float
    gamma_r: float
    phi_tilde: float = 0.0
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self):
        if self.n_emitters < 1:
            raise InvalidParameters(f"a chain needs at least one emitter, got {self.n_emitters}")
        if self.gamma_r <= 0:
            raise InvalidParameters(f"gamma_r must be > 0, got {self.gamma_r}")


@dataclass(frozen=True, eq=False)
class MasterEquation:
    space: HilbertSpace
    h_nh: np.ndarray
    jumps: tuple[np.ndarray, ...] = ()
    lr: np.ndarray | None = None
    drive: DriveSpec = field(default_factory=DriveSpec)

    @classmethod
    def from_lindblad(
        cls,
        hamiltonian: Operator,
        jump_ops: Sequence[Operator],
        drive: DriveSpec | None = None,
        noise: NoiseSpec | None = None,
        lr: Operator | None = None,
        modes: Sequence[Operator] = (),
    ) -> MasterEquation:
        """Lindblad generator with Hermitian ``hamiltonian``, explicit jumps and per-mode noise"""
        space = hamiltonian.space
        jumps = list(jump_ops) + (noise or NoiseSpec()).jump_operators(modes)
        for op in [*jumps, *([lr] if lr is not None else [])]:
            if op.space != space:
                raise DimensionMismatch("all operators of a master equation must share one Hilbert space")
        h_nh = hamiltonian.matrix.copy()
        for jump in jumps:
            h_nh = h_nh - 0.5j * (jump.matrix.conj().T @ jump.matrix)
        return cls(
            space=space,
            h_nh=h_nh,
            jumps=tuple(jump.matrix for jump in jumps),
            lr=None if lr is None else lr.matrix,
            drive=drive or DriveSpec(),
        )

    @classmethod
    def from_gue(
        cls, p: GueParams, drive: DriveSpec | None = None, noise: NoiseSpec | None = None
    ) -> MasterEquation:
        """Full model of one driven GUE: decay into both directions plus per-transmon dephasing and decay"""
        ops = build_coupling_ops(p)
        return cls.from_lindblad(
            build_hamiltonian(p), [ops.lr, ops.ll], drive=drive, noise=noise, lr=ops.lr, modes=mode_operators(p)
        )

    @classmethod
    def from_triplet(
        cls,
        triplet: SlhTriplet,
        drive: DriveSpec | None = None,
        noise: NoiseSpec | None = None,
        modes: Sequence[Operator] = (),
    ) -> MasterEquation:
        """Generator of a composed network; the drive enters through the first channel"""
        return cls.from_lindblad(
            triplet.hamiltonian, list(triplet.couplings), drive=drive, noise=noise, lr=triplet.couplings[0], modes=modes
        )

    @classmethod
    def from_nodes(
        cls,
        gues: Sequence[GueParams],
        phi_tilde: float,
        drive: DriveSpec | None = None,
        noise: NoiseSpec | None = None,
    ) -> MasterEquation:
        """Cascade of full GUE models on one waveguide, each transmon carrying its own noise"""
        triplet = compose_gue_chain(gues, phi_tilde)
        modes = [
            lift(mode, triplet.space)
            for n, p in enumerate(gues, start=1)
            for mode in mode_operators(p, chain_prefix(n))
        ]
        return cls.from_triplet(triplet, drive=drive, noise=noise, modes=modes)

    @classmethod
    def from_chain(cls, chain: TwoLevelChain) -> MasterEquation:
        """Cascaded two-level chain, with dephasing 2 gamma_phi D[sigma_+ sigma_-] and decay gamma_nr D[sigma_-]"""
        h_nh, lr = cascaded_two_level(chain, include_drive=False)
        modes = [embed(_lowering(chain.phi_tilde, n), h_nh.space, f"q{n}") for n in range(1, chain.n_emitters + 1)]
        noise_jumps = chain.noise.jump_operators(modes)
        matrix = h_nh.matrix.copy()
        for jump in noise_jumps:
            matrix = matrix - 0.5j * (jump.matrix.conj().T @ jump.matrix)
        return cls(
            space=h_nh.space,
            h_nh=matrix,
            jumps=(lr.matrix, *(jump.matrix for jump in noise_jumps)),
            lr=lr.matrix,
            drive=DriveSpec.from_rabi(chain.omega_rabi, chain.gamma_r),
        )

    @property
    def dim(self) -> int:
        return self.space.dim

    def effective_hamiltonian(self, t: float = 0.0) -> np.ndarray:
        if self.lr is None:
            return self.h_nh
        alpha = self.drive.alpha_at(t)
        if alpha == 0:
            return self.h_nh
        drive = -1j * alpha * self.lr.conj().T + 1j * np.conj(alpha) * self.lr
        return self.h_nh + drive

    def apply(self, rho: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Matrix-free evaluation of d rho / dt"""
        h_eff = self.effective_hamiltonian(t)
        result = -1j * (h_eff @ rho - rho @ h_eff.conj().T)
        for jump in self.jumps:
            result = result + jump @ rho @ jump.conj().T
        return result

    def superoperator(self, t: float = 0.0) -> np.ndarray:
        """Dense Liouvillian acting on row-major vectorized density matrices: vec(A rho B) = (A kron B^T) vec(rho)"""
        h_eff = self.effective_hamiltonian(t)
        eye = np.eye(self.dim)
        liouvillian = -1j * np.kron(h_eff, eye) + 1j * np.kron(eye, h_eff.conj())
        for jump in self.jumps:
            liouvillian = liouvillian + np.kron(jump, jump.conj())
        return liouvillian

    def rate_scale(self) -> float:
        """Largest frequency scale of the generator, used to make residual tolerances relative"""
        scale = float(np.max(np.abs(self.effective_hamiltonian()))) if self.dim else 0.0
        return max(1.0, scale)

    def residual(self, rho: np.ndarray) -> float:
        return float(np.linalg.norm(self.apply(rho), "fro"))


def liouvillian_apply(
    h_eff: Operator,
    jump_ops: Sequence[Operator],
    drive: DriveSpec,
    noise: NoiseSpec,
    rho: DensityMatrix | np.ndarray,
    lr: Operator,
    modes: Sequence[Operator] = (),
    t: float = 0.0,
) -> np.ndarray:
    """d rho / dt of the driven master equation, evaluated without building any superoperator"""
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if matrix.shape != h_eff.matrix.shape:
        raise DimensionMismatch(f"density matrix of shape {matrix.shape}, Hamiltonian of dimension {h_eff.dim}")
    alpha = drive.alpha_at(t)
    hamiltonian = h_eff - 1j * alpha * lr.dag() + 1j * np.conj(alpha) * lr
    result = -1j * (hamiltonian.matrix @ matrix - matrix @ hamiltonian.matrix)
    for jump in [*jump_ops, *noise.jump_operators(modes)]:
        result = result + dissipator_apply(jump, matrix)
    return result


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    expectations: np.ndarray
    trace: np.ndarray
    purity: np.ndarray
    states: tuple[np.ndarray, ...] = ()

    @property
    def trace_drift(self) -> float:
        return float(np.max(np.abs(self.trace - 1.0)))

    def final_state(self) -> np.ndarray:
        if not self.states:
            raise InvalidParameters("trajectory was computed without keeping states")
        return self.states[-1]


def _as_matrix(rho0: DensityMatrix | StateVector | np.ndarray) -> np.ndarray:
    if isinstance(rho0, DensityMatrix):
        return np.array(rho0.matrix)
    if isinstance(rho0, StateVector):
        return rho0.projector()
    return np.asarray(rho0, dtype=np.complex128)


def evolve(
    generator: MasterEquation,
    rho0: DensityMatrix | StateVector | np.ndarray,
    t_grid: Sequence[float],
    observables: Sequence[Operator] = (),
    keep_states: bool = False,
) -> Trajectory:
    """Integrate the master equation and sample expectation values, trace and purity on ``t_grid``"""
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) <= 0):
        raise InvalidParameters("t_grid must be a non-empty increasing sequence")
    dim = generator.dim
    rho_init = _as_matrix(rho0)
    if rho_init.shape != (dim, dim):
        raise DimensionMismatch(f"initial state of shape {rho_init.shape} for a generator of dimension {dim}")

    def rhs(t, y):
        return generator.apply(y.reshape(dim, dim), t).reshape(-1)

    if times.size == 1 or times[-1] == times[0]:
        samples = np.repeat(rho_init.reshape(-1, 1), times.size, axis=1)
    else:
        solution = solve_ivp(
            rhs,
            (times[0], times[-1]),
            rho_init.reshape(-1),
            method="RK45",
            t_eval=times,
            rtol=settings.QNET_ODE_RTOL,
            atol=settings.QNET_ODE_ATOL,
        )
        if solution.status == -1:
            raise StiffnessError(solution.message, data={"t": float(solution.t[-1]) if solution.t.size else None})
        samples = solution.y

    states = [samples[:, k].reshape(dim, dim) for k in range(times.size)]
    expectations = np.array([[expectation(obs, state) for state in states] for obs in observables], dtype=complex)
    trace = np.array([np.real(np.trace(state)) for state in states])
    purity = np.array([np.real(np.trace(state @ state)) for state in states])
    trajectory = Trajectory(times, expectations.reshape(len(observables), times.size), trace, purity)
    if trajectory.trace_drift > settings.QNET_TRACE_DRIFT:
        raise ConvergenceError(f"trace drifted by {trajectory.trace_drift:.3e} over the trajectory")
    if keep_states:
        trajectory = Trajectory(times, trajectory.expectations, trace, purity, tuple(states))
    return trajectory


def _normalize_state(rho: np.ndarray) -> np.ndarray:
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def _null_space_steady_state(generator: MasterEquation) -> np.ndarray:
    dim = generator.dim
    liouvillian = generator.superoperator()
    kernel = null_space(liouvillian, rcond=settings.QNET_NULLSPACE_RCOND)
    if kernel.shape[1] > 1:
        raise DegenerateSteadyState(kernel.shape[1])
    if kernel.shape[1] == 0:
        # Numerically the smallest singular value may sit just above the threshold
        _, _, vh = svd(liouvillian)
        vector = vh[-1].conj()
    else:
        vector = kernel[:, 0]
    return _normalize_state(vector.reshape(dim, dim))


def _integrated_steady_state(generator: MasterEquation, rate: float, rho0: np.ndarray) -> np.ndarray:
    horizon = settings.QNET_STEADY_STATE_HORIZON / rate
    rho = rho0
    tolerance = settings.QNET_INTEGRATION_RESIDUAL * generator.rate_scale()
    while True:
        logger.debug("Steady state by integration up to t=%.3e", horizon)
        trajectory = evolve(generator, rho, [0.0, horizon], keep_states=True)
        rho = _normalize_state(trajectory.final_state())
        residual = generator.residual(rho)
        if residual <= tolerance:
            return rho
        if horizon >= settings.QNET_STEADY_STATE_MAX_HORIZON / rate:
            raise ConvergenceError(
                f"steady state residual {residual:.3e} above {tolerance:.3e} after t={horizon:.3e}",
                data={"residual": residual},
            )
        horizon *= 2


def steady_state(
    generator: MasterEquation,
    rate: float | None = None,
    rho0: DensityMatrix | StateVector | np.ndarray | None = None,
) -> DensityMatrix:
    """Stationary state of a time-independent generator.

    Small spaces are solved exactly from the null space of the dense Liouvillian. Larger ones are integrated for
    ``QNET_STEADY_STATE_HORIZON / rate``, doubling the horizon until the residual check passes.
    """
    if not generator.drive.is_constant:
        raise InvalidParameters("steady states require a time-independent drive")
    if generator.dim <= settings.QNET_NULLSPACE_MAX_DIM:
        rho = _null_space_steady_state(generator)
        tolerance = settings.QNET_STEADY_STATE_RESIDUAL * generator.rate_scale()
    else:
        if rate is None:
            decay = sum((jump.conj().T @ jump for jump in generator.jumps), np.zeros((generator.dim, generator.dim)))
            rate = float(np.max(np.linalg.eigvalsh(decay))) if generator.jumps else 0.0
        if rate <= 0:
            raise InvalidParameters("a positive relaxation rate is needed to integrate towards the steady state")
        start = _as_matrix(rho0) if rho0 is not None else np.eye(generator.dim) / generator.dim
        rho = _integrated_steady_state(generator, rate, start)
        tolerance = settings.QNET_INTEGRATION_RESIDUAL * generator.rate_scale()

    residual = generator.residual(rho)
    if residual > tolerance:
        message = f"steady state residual {residual:.3e} above {tolerance:.3e}"
        raise ConvergenceError(message, data={"residual": residual})
    logger.debug("Steady state of dimension %d found, residual %.3e", generator.dim, residual)
    return DensityMatrix(generator.space, rho)


@functools.lru_cache(maxsize=None)
def _lowering(phi_tilde: float, n: int) -> Operator:
    # sigma_-^n = exp(-i phi_tilde n) |G><R|, with |G> = level 0 and |R> = level 1
    return Operator(HilbertSpace((("q", 2),)), [[0.0, np.exp(-1j * phi_tilde * n)], [0.0, 0.0]])


def chain_space(n_emitters: int) -> HilbertSpace:
    return HilbertSpace(tuple((f"q{n}", 2) for n in range(1, n_emitters + 1)))


def cascaded_two_level(chain: TwoLevelChain, include_drive: bool = True) -> tuple[Operator, Operator]:
    """Non-Hermitian Hamiltonian and collective coupling of a cascaded chain of two-level emitters.

    H_nh = -delta sum n_n - i omega sum (s+ - s-) - i gamma_r/2 sum n_n - i gamma_r sum_{n>m} s+^n s-^m,
    L_R = sqrt(gamma_r) sum s-^n, with s+^n = exp(i phi_tilde n)|R>_n<G|.
    """
    n_emitters = chain.n_emitters
    if n_emitters > settings.QNET_MAX_CASCADE_EMITTERS:
        raise SizeLimitExceeded(
            f"{n_emitters} emitters exceed the dense cap of {settings.QNET_MAX_CASCADE_EMITTERS}",
            data={"n_emitters": n_emitters},
        )
    space = chain_space(n_emitters)
    lowering = [embed(_lowering(chain.phi_tilde, n), space, f"q{n}") for n in range(1, n_emitters + 1)]
    raising = [op.dag() for op in lowering]
    dim = space.dim

    h_nh = np.zeros((dim, dim), dtype=np.complex128)
    for n in range(n_emitters):
        number = raising[n].matrix @ lowering[n].matrix
        h_nh += (-chain.delta - 0.5j * chain.gamma_r) * number
        if include_drive:
            h_nh += -1j * chain.omega_rabi * (raising[n].matrix - lowering[n].matrix)
        for m in range(n):
            h_nh += -1j * chain.gamma_r * (raising[n].matrix @ lowering[m].matrix)

    lr = np.sqrt(chain.gamma_r) * sum(lowering[1:], lowering[0])
    return Operator(space, h_nh), lr


def dimer_state(omega_rabi: float, gamma_r: float, phi_tilde: float = 0.0, first: int = 1) -> StateVector:
    """Dark state of a driven cascaded pair: |GG> - 2 sqrt(2) (omega/gamma_r) |S>, normalized.

    ``first`` is the chain index of the upstream emitter; it fixes the phases of the local |R> states.
    """
    if gamma_r <= 0:
        raise InvalidParameters(f"gamma_r must be > 0, got {gamma_r}")
    space = chain_space(2)
    ground = basis_state(space, (0, 0)).vector
    excited_first = np.exp(1j * phi_tilde * first) * basis_state(space, (1, 0)).vector
    excited_second = np.exp(1j * phi_tilde * (first + 1)) * basis_state(space, (0, 1)).vector
    singlet = (excited_first - excited_second) / np.sqrt(2)
    return StateVector.normalize(space, ground - 2 * np.sqrt(2) * (omega_rabi / gamma_r) * singlet)


def product_dimers(omega_rabi: float, gamma_r: float, n_emitters: int, phi_tilde: float = 0.0) -> StateVector:
    """Tensor product of dimers (1,2), (3,4), ... for an even chain"""
    if n_emitters % 2:
        raise InvalidParameters("dimerization needs an even number of emitters")
    vector = np.ones(1, dtype=np.complex128)
    for first in range(1, n_emitters, 2):
        vector = np.kron(vector, dimer_state(omega_rabi, gamma_r, phi_tilde, first).vector)
    return StateVector(chain_space(n_emitters), vector)


def flux_ratio(rho: DensityMatrix, ops_left: Operator, ops_right: Operator) -> float:
    """Intensity ratio <L_L^dagger L_L> / <L_R^dagger L_R> of the photons emitted by the atoms"""
    left = np.real(expectation(ops_left.dag() @ ops_left, rho))
    right = np.real(expectation(ops_right.dag() @ ops_right, rho))
    if right <= 0:
        raise InvalidParameters("no right-moving emission, flux ratio undefined")
    return float(left / right)


def reduced_purity(rho: DensityMatrix | np.ndarray, space: HilbertSpace, keep: Sequence[str]) -> float:
    reduced = partial_trace(rho, space, keep)
    return float(np.real(np.trace(reduced @ reduced)))


def dark_state_infidelity(chain: TwoLevelChain) -> float:
    """1 - <D|rho_ss|D> for an even cascaded chain, against the product of dimers"""
    rho = steady_state(MasterEquation.from_chain(chain))
    dark = product_dimers(chain.omega_rabi, chain.gamma_r, chain.n_emitters, chain.phi_tilde)
    return 1.0 - rho.fidelity(dark)


def cutoff_convergence(
    p: GueParams,
    drive: DriveSpec,
    noise: NoiseSpec,
    observable: Callable[[GueParams, DensityMatrix], float],
) -> tuple[float, float]:
    """Evaluate a steady-state observable at ``p.n_max`` and ``p.n_max + 1``.

    Returns the value at the requested cutoff and its shift when the cutoff is raised.
    """
    values = []
    for n_max in (p.n_max, p.n_max + 1):
        params = p.replace(n_max=n_max)
        rho = steady_state(MasterEquation.from_gue(params, drive, noise))
        values.append(observable(params, rho))
    shift = abs(values[1] - values[0])
    if shift > settings.QNET_CUTOFF_SHIFT:
        logger.warning("Observable shifts by %.3e when the Fock cutoff is raised above %d", shift, p.n_max)
    return values[0], shift


def emitted_flux(p: GueParams, direction: str = "R", points: int = 2001) -> tuple[float, float]:
    """Photon numbers emitted to the right and to the left by an undriven GUE prepared in a delocalized state.

    Integrates <L_R^dagger L_R> and <L_L^dagger L_L> over the full master-equation trajectory, so it checks
    :func:`qnet.gue.directionality` without the single-excitation reduction.
    """
    if direction not in ("R", "L"):
        raise InvalidParameters(f'direction must be "R" or "L", got "{direction}"')
    slowest = min(p.gamma1, p.gamma2)
    if slowest <= 0:
        raise ConvergenceError("a vanishing coupling rate gives an infinite emission time")
    right, left = delocalized_states(p)
    ops = build_coupling_ops(p)
    times = np.linspace(0.0, settings.QNET_DIRECTIONALITY_HORIZON / slowest, points)
    trajectory = evolve(
        MasterEquation.from_gue(p),
        right if direction == "R" else left,
        times,
        observables=[ops.lr.dag() @ ops.lr, ops.ll.dag() @ ops.ll],
    )
    flux = np.real(trajectory.expectations)
    return float(simpson(flux[0], x=times)), float(simpson(flux[1], x=times))
