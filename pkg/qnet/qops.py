"""
Operator algebra over finite tensor-product Hilbert spaces.

Every object defined here is immutable: matrices are copied to ``complex128`` arrays and flagged read-only at
construction, so instances can be shared between threads freely. Tensor products always follow the declaration
order of the :class:`HilbertSpace` subsystems.
"""

from __future__ import annotations

import functools
import logging
import operator
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from qnet.conf import settings
from qnet.exceptions import DimensionMismatch, InvalidDimension, UnknownSubsystem
from qnet.helpers import hermitian_defect

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex]


def _frozen_array(data, ndim: int) -> np.ndarray:
    array = np.array(data, dtype=np.complex128)
    if array.ndim != ndim:
        raise InvalidDimension(f"expected a {ndim}-dimensional array, got shape {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered tensor product of labelled finite-dimensional subsystems"""

    subsystems: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        subsystems = tuple((str(label), int(dim)) for label, dim in self.subsystems)
        labels = [label for label, _ in subsystems]
        if len(set(labels)) != len(labels):
            raise InvalidDimension(f"subsystem labels must be unique, got {labels}")
        for label, dim in subsystems:
            if dim < 1:
                raise InvalidDimension(f'subsystem "{label}" has dimension {dim}')
        object.__setattr__(self, "subsystems", subsystems)

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> HilbertSpace:
        return cls(tuple(pairs))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def dim(self) -> int:
        return functools.reduce(operator.mul, self.dims, 1)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def __len__(self) -> int:
        return len(self.subsystems)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownSubsystem(label) from None

    def local_dim(self, label: str) -> int:
        return self.dims[self.index(label)]

    def union(self, other: HilbertSpace) -> HilbertSpace:
        """Subsystems of self, followed by the subsystems of other not already present.

        A label present in both spaces must have the same dimension in each of them.
        """
        extra = []
        for label, dim in other.subsystems:
            if label in self:
                if self.local_dim(label) != dim:
                    raise DimensionMismatch(f'subsystem "{label}" has dimensions {self.local_dim(label)} and {dim}')
            else:
                extra.append((label, dim))
        return HilbertSpace(self.subsystems + tuple(extra))

    def product(self, other: HilbertSpace) -> HilbertSpace:
        """Tensor product with a space sharing no label with self"""
        return HilbertSpace(self.subsystems + other.subsystems)


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix acting on a :class:`HilbertSpace`"""

    space: HilbertSpace
    matrix: np.ndarray
    hermitian: bool = False

    # Let numpy scalars defer to our reflected operators
    __array_ufunc__ = None

    def __post_init__(self):
        matrix = _frozen_array(self.matrix, 2)
        if matrix.shape != (self.space.dim, self.space.dim):
            raise InvalidDimension(f"matrix of shape {matrix.shape} does not match space dimension {self.space.dim}")
        object.__setattr__(self, "matrix", matrix)
        if self.hermitian:
            scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
            defect = hermitian_defect(matrix)
            if defect > settings.QNET_HERMITIAN_ATOL * scale:
                raise InvalidDimension(f"operator flagged Hermitian deviates by {defect:.3e}")

    @property
    def dim(self) -> int:
        return self.space.dim

    def _check_space(self, other: Operator) -> None:
        if self.space != other.space:
            raise DimensionMismatch(f"operators act on {self.space.subsystems} and {other.space.subsystems}")

    def __add__(self, other: Operator) -> Operator:
        self._check_space(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: Operator) -> Operator:
        self._check_space(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __neg__(self) -> Operator:
        return Operator(self.space, -self.matrix, hermitian=self.hermitian)

    def __mul__(self, scalar: Scalar) -> Operator:
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return Operator(self.space, complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other: Operator) -> Operator:
        self._check_space(other)
        return Operator(self.space, self.matrix @ other.matrix)

    def dag(self) -> Operator:
        return Operator(self.space, self.matrix.conj().T, hermitian=self.hermitian)

    def as_hermitian(self) -> Operator:
        """Same operator, flagged (and verified) Hermitian. The anti-Hermitian rounding residue is removed."""
        return Operator(self.space, 0.5 * (self.matrix + self.matrix.conj().T), hermitian=True)

    def norm(self) -> float:
        """Spectral norm"""
        if self.matrix.size == 0:
            return 0.0
        return float(np.linalg.norm(self.matrix, 2))

    def allclose(self, other: Operator, atol: float = 1e-12) -> bool:
        return self.space == other.space and bool(np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"Operator(space={self.space.subsystems}, hermitian={self.hermitian})"


@dataclass(frozen=True, eq=False)
class StateVector:
    space: HilbertSpace
    vector: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        vector = _frozen_array(self.vector, 1)
        if vector.shape[0] != self.space.dim:
            raise InvalidDimension(f"vector of length {vector.shape[0]} does not match dimension {self.space.dim}")
        if self.normalized and abs(np.linalg.norm(vector) - 1.0) > settings.QNET_NORM_ATOL:
            raise InvalidDimension(f"state flagged normalized has norm {np.linalg.norm(vector):.15f}")
        object.__setattr__(self, "vector", vector)

    @classmethod
    def normalize(cls, space: HilbertSpace, vector) -> StateVector:
        vector = np.asarray(vector, dtype=np.complex128)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise InvalidDimension("cannot normalize the zero vector")
        return cls(space, vector / norm)

    def overlap(self, other: StateVector) -> complex:
        if self.space != other.space:
            raise DimensionMismatch("states live in different spaces")
        return complex(np.vdot(self.vector, other.vector))

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: HilbertSpace
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        matrix = _frozen_array(self.matrix, 2)
        if matrix.shape != (self.space.dim, self.space.dim):
            raise InvalidDimension(f"matrix of shape {matrix.shape} does not match space dimension {self.space.dim}")
        object.__setattr__(self, "matrix", matrix)
        if self.validate:
            self._check_physical()

    def _check_physical(self) -> None:
        defect = hermitian_defect(self.matrix)
        if defect > settings.QNET_DENSITY_HERMITIAN_ATOL:
            raise InvalidDimension(f"density matrix is not Hermitian (defect {defect:.3e})")
        trace = np.trace(self.matrix)
        if abs(trace - 1.0) > settings.QNET_DENSITY_TRACE_ATOL:
            raise InvalidDimension(f"density matrix has trace {trace}")
        lowest = float(np.min(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))))
        if lowest < -settings.QNET_DENSITY_EIG_ATOL:
            raise InvalidDimension(f"density matrix has negative eigenvalue {lowest:.3e}")

    @classmethod
    def from_state(cls, state: StateVector) -> DensityMatrix:
        return cls(state.space, state.projector())

    @classmethod
    def maximally_mixed(cls, space: HilbertSpace) -> DensityMatrix:
        return cls(space, np.eye(space.dim) / space.dim)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def fidelity(self, state: StateVector) -> float:
        """Overlap <psi|rho|psi> with a pure state"""
        return float(np.real(np.vdot(state.vector, self.matrix @ state.vector)))


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.dim), hermitian=True)


def zero(space: HilbertSpace) -> Operator:
    return Operator(space, np.zeros((space.dim, space.dim)), hermitian=True)


def truncated_boson(n_max: int, label: str = "a") -> Operator:
    """Lowering operator of a bosonic mode truncated to its ``n_max`` lowest Fock states"""
    if n_max < 2:
        raise InvalidDimension(f"a truncated boson needs n_max >= 2, got {n_max}")
    matrix = np.diag(np.sqrt(np.arange(1, n_max, dtype=float)), k=1)
    return Operator(HilbertSpace(((label, n_max),)), matrix)


def sigma_z(label: str = "q") -> Operator:
    return Operator(HilbertSpace(((label, 2),)), np.diag([1.0, -1.0]), hermitian=True)


def sigma_x(label: str = "q") -> Operator:
    return Operator(HilbertSpace(((label, 2),)), [[0.0, 1.0], [1.0, 0.0]], hermitian=True)


def sigma_y(label: str = "q") -> Operator:
    return Operator(HilbertSpace(((label, 2),)), [[0.0, -1j], [1j, 0.0]], hermitian=True)


def projector(label: str, dim: int, level: int) -> Operator:
    matrix = np.zeros((dim, dim))
    matrix[level, level] = 1.0
    return Operator(HilbertSpace(((label, dim),)), matrix, hermitian=True)


def relabel(op: Operator, label: str) -> Operator:
    """Move a single-subsystem operator onto a subsystem named ``label``"""
    if len(op.space) != 1:
        raise InvalidDimension("only single-subsystem operators can be relabelled")
    return Operator(HilbertSpace(((label, op.dim),)), op.matrix, hermitian=op.hermitian)


def lift(op: Operator, space: HilbertSpace) -> Operator:
    """Extend an operator defined on a subset of the subsystems of ``space`` with identities.

    Subsystems of ``op.space`` may appear in any order inside ``space``.
    """
    if op.space == space:
        return op
    for label, dim in op.space.subsystems:
        if space.local_dim(label) != dim:
            raise DimensionMismatch(f'subsystem "{label}" has dimension {dim}, expected {space.local_dim(label)}')
    rest = [label for label in space.labels if label not in op.space]
    rest_dim = functools.reduce(operator.mul, (space.local_dim(label) for label in rest), 1)
    full = np.kron(op.matrix, np.eye(rest_dim))

    order = list(op.space.labels) + rest
    dims = [space.local_dim(label) for label in order]
    perm = [order.index(label) for label in space.labels]
    n_sub = len(order)
    tensor = full.reshape(dims + dims).transpose(perm + [p + n_sub for p in perm])
    return Operator(space, tensor.reshape(space.dim, space.dim), hermitian=op.hermitian)


def embed(op: Operator, space: HilbertSpace, target_label: str) -> Operator:
    """Return op acting on ``target_label``, tensored with identities on every other subsystem of ``space``"""
    local = space.local_dim(target_label)
    if op.dim != local:
        raise DimensionMismatch(f'operator of dimension {op.dim} cannot act on "{target_label}" (dimension {local})')
    return lift(Operator(HilbertSpace(((target_label, local),)), op.matrix, hermitian=op.hermitian), space)


def tensor(*ops: Operator) -> Operator:
    """Kronecker product of operators on disjoint spaces, in argument order"""
    space = HilbertSpace()
    matrix = np.eye(1, dtype=np.complex128)
    for op in ops:
        space = space.product(op.space)
        matrix = np.kron(matrix, op.matrix)
    return Operator(space, matrix)


def basis_state(space: HilbertSpace, levels: Mapping[str, int] | Sequence[int]) -> StateVector:
    """Product Fock state. ``levels`` gives the occupation of each subsystem, by label or in declaration order."""
    if isinstance(levels, Mapping):
        unknown = set(levels) - set(space.labels)
        if unknown:
            raise UnknownSubsystem(", ".join(sorted(unknown)))
        occupations = [levels.get(label, 0) for label in space.labels]
    else:
        occupations = list(levels)
        if len(occupations) != len(space):
            raise DimensionMismatch(f"{len(occupations)} levels given for {len(space)} subsystems")
    for occupation, dim in zip(occupations, space.dims):
        if not 0 <= occupation < dim:
            raise InvalidDimension(f"level {occupation} outside of a {dim}-dimensional subsystem")
    index = int(np.ravel_multi_index(occupations, space.dims)) if len(space) else 0
    vector = np.zeros(space.dim, dtype=np.complex128)
    vector[index] = 1.0
    return StateVector(space, vector)


def _matrix_of(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)


def dissipator_apply(jump: Operator, rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Lindblad dissipator D[L]rho = L rho L^dagger - 1/2 {L^dagger L, rho}"""
    matrix = _matrix_of(rho)
    if matrix.shape != jump.matrix.shape:
        raise DimensionMismatch(f"jump operator of dimension {jump.dim} applied to a {matrix.shape} matrix")
    lop = jump.matrix
    ldag_l = lop.conj().T @ lop
    return lop @ matrix @ lop.conj().T - 0.5 * (ldag_l @ matrix + matrix @ ldag_l)


def expectation(op: Operator, state: StateVector | DensityMatrix | np.ndarray) -> complex:
    if isinstance(state, StateVector):
        vector = state.vector
    elif isinstance(state, DensityMatrix):
        vector = None
    else:
        vector = np.asarray(state) if np.ndim(state) == 1 else None

    if vector is not None:
        if vector.shape[0] != op.dim:
            raise DimensionMismatch(f"state of dimension {vector.shape[0]}, operator of dimension {op.dim}")
        return complex(np.vdot(vector, op.matrix @ vector))

    matrix = _matrix_of(state)  # type: ignore[arg-type]
    if matrix.shape != op.matrix.shape:
        raise DimensionMismatch(f"density matrix of shape {matrix.shape}, operator of dimension {op.dim}")
    return complex(np.trace(op.matrix @ matrix))


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def partial_trace(rho: DensityMatrix | np.ndarray, space: HilbertSpace, keep: Iterable[str]) -> np.ndarray:
    """Reduced density matrix on the subsystems listed in ``keep`` (kept in the order of ``space``)"""
    keep_set = set(keep)
    for label in keep_set:
        space.index(label)
    matrix = _matrix_of(rho)
    n_sub = len(space)
    tensor_ = matrix.reshape(space.dims + space.dims)
    kept = [i for i, label in enumerate(space.labels) if label in keep_set]
    traced = [i for i in range(n_sub) if i not in kept]
    # Move traced axes to the end, then contract them pairwise
    tensor_ = tensor_.transpose(kept + [i + n_sub for i in kept] + traced + [i + n_sub for i in traced])
    kept_dim = functools.reduce(operator.mul, (space.dims[i] for i in kept), 1)
    traced_dim = functools.reduce(operator.mul, (space.dims[i] for i in traced), 1)
    tensor_ = tensor_.reshape(kept_dim, kept_dim, traced_dim, traced_dim)
    return np.einsum("ijkk->ij", tensor_)
