from __future__ import annotations

# Maximal |A - A^dagger| entry accepted for operators flagged Hermitian (scaled by the largest entry when > 1)
QNET_HERMITIAN_ATOL = 1e-12
# Maximal |U U^dagger - 1| entry accepted for scattering matrices and beamsplitters
QNET_UNITARY_ATOL = 1e-12
# Norm tolerance of state vectors flagged as normalized
QNET_NORM_ATOL = 1e-12

# Density matrix validation: Hermiticity, unit trace and positivity tolerances
QNET_DENSITY_HERMITIAN_ATOL = 1e-10
QNET_DENSITY_TRACE_ATOL = 1e-8
QNET_DENSITY_EIG_ATOL = 1e-8

# Steady states are computed from the Liouvillian null space up to this Hilbert space dimension,
# and by long-time integration above it
QNET_NULLSPACE_MAX_DIM = 32
# Relative singular value threshold used to detect the null space
QNET_NULLSPACE_RCOND = 1e-10
# Maximal Frobenius norm of the generator applied to a steady state
QNET_STEADY_STATE_RESIDUAL = 1e-9
# Integration fallback horizon, in units of 1/rate, and the largest horizon reached by doubling
QNET_STEADY_STATE_HORIZON = 200.0
QNET_STEADY_STATE_MAX_HORIZON = 1600.0
# Residual accepted, relative to the generator scale, when the steady state comes from integration
QNET_INTEGRATION_RESIDUAL = 1e-6
# Largest change of an observable tolerated when the Fock cutoff is raised by one
QNET_CUTOFF_SHIFT = 1e-4

# Adaptive Runge-Kutta tolerances for master equation trajectories
QNET_ODE_RTOL = 1e-8
QNET_ODE_ATOL = 1e-10
# Maximal trace drift accepted over a trajectory
QNET_TRACE_DRIFT = 1e-6

# Directionality integration horizon, in units of 1/min(gamma_1, gamma_2)
QNET_DIRECTIONALITY_HORIZON = 50.0
# Remaining excitation probability tolerated at the horizon
QNET_DIRECTIONALITY_RESIDUAL = 1e-8
# Default directionality evaluation: "ode" (time domain) or "exact" (Lyapunov solve)
QNET_DIRECTIONALITY_METHOD = "ode"
# Adaptive Runge-Kutta tolerances of the time-domain directionality
QNET_DIRECTIONALITY_RTOL = 1e-10
QNET_DIRECTIONALITY_ATOL = 1e-12

# Largest cascaded two-level chain built as a dense 2^N matrix
QNET_MAX_CASCADE_EMITTERS = 12

# Detuning, in units of gamma_r, used for nodes that do not take part in a protocol
QNET_FAR_DETUNING = 1e3

# Minimal eigenvector overlap with a Fock label before a level assignment is flagged as ambiguous
QNET_LEVEL_OVERLAP_MIN = 0.7

# Version written in every dataset produced by the command line
QNET_SCHEMA_VERSION = "1.0"

# Set to False if you need to disable exception logging in the command line
QNET_LOG_EXCEPTIONS = True

# Default number of workers used by parameter sweeps
QNET_DEFAULT_JOBS = 1

# Measurement branches below this probability are dropped when protocols enumerate their outcomes
QNET_BRANCH_CUTOFF = 1e-14
# Largest qubit register whose conditioned density matrix is attached to a protocol outcome
QNET_MAX_DENSITY_QUBITS = 10
# Largest toric code register simulated as a dense state vector
QNET_MAX_TORIC_QUBITS = 18

# Time samples of a truncated Gaussian pulse and the zero padding factor of its Fourier transform
QNET_PULSE_SAMPLES = 1024
QNET_PULSE_PADDING = 8
# Spectral weights below this value are left out of pulse averages
QNET_PULSE_WEIGHT_CUTOFF = 1e-13
