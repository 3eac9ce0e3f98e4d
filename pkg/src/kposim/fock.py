"""Operator algebra and state construction on truncated Fock spaces.

All matrices are dense complex arrays; truncation is per mode with basis
|0> ... |n_max-1>, and two-mode objects live on the Kronecker-product space
(mode 0 is the slow index).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import sqrt

import numpy as np
from scipy.linalg import expm

from .errors import ParameterError, TruncationError, TruncationWarning

HERMITICITY_TOL = 1e-12
#: pre-normalization tail weight above which a coherent state is flagged
TAIL_WEIGHT_TOL = 1e-8


@dataclass(frozen=True)
class FockSpace:
    """Truncated Fock space, possibly a tensor product of two modes."""

    n_max: int
    n_modes: int = 1

    def __post_init__(self):
        if self.n_max < 2:
            raise ParameterError(f"n_max must be >= 2, got {self.n_max}")
        if self.n_modes not in (1, 2):
            raise ParameterError(f"n_modes must be 1 or 2, got {self.n_modes}")

    @property
    def dim(self) -> int:
        return self.n_max**self.n_modes

    def single_mode(self) -> "FockSpace":
        return FockSpace(self.n_max, 1)


class OperatorMatrix:
    """Dense operator on a FockSpace."""

    __slots__ = ("space", "mat")

    def __init__(self, space: FockSpace, mat: np.ndarray):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (space.dim, space.dim):
            raise ParameterError(
                f"matrix shape {mat.shape} does not match space dim {space.dim}"
            )
        self.space = space
        self.mat = mat

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.mat.conj().T)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        scale = max(np.abs(self.mat).max(), 1.0)
        return np.abs(self.mat - self.mat.conj().T).max() <= tol * scale

    def __add__(self, other):
        self._check(other)
        return OperatorMatrix(self.space, self.mat + other.mat)

    def __sub__(self, other):
        self._check(other)
        return OperatorMatrix(self.space, self.mat - other.mat)

    def __mul__(self, scalar):
        return OperatorMatrix(self.space, self.mat * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return OperatorMatrix(self.space, -self.mat)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.space, self.mat @ other.mat)
        if isinstance(other, StateVector):
            if other.space != self.space:
                raise ParameterError("operator and state live on different spaces")
            return StateVector(self.space, self.mat @ other.vec, normalized=False)
        return NotImplemented

    def _check(self, other):
        if not isinstance(other, OperatorMatrix) or other.space != self.space:
            raise ParameterError("operators live on different spaces")

    def __repr__(self):
        return f"OperatorMatrix(dim={self.space.dim})"


class StateVector:
    """Pure state on a FockSpace; normalized unless told otherwise."""

    __slots__ = ("space", "vec")

    def __init__(self, space: FockSpace, vec: np.ndarray, normalized: bool = True):
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (space.dim,):
            raise ParameterError(
                f"vector shape {vec.shape} does not match space dim {space.dim}"
            )
        self.space = space
        self.vec = vec
        if normalized:
            n = np.linalg.norm(vec)
            if n == 0.0:
                raise ParameterError("cannot normalize a zero state vector")
            if abs(n - 1.0) > 1e-10:
                self.vec = vec / n

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def overlap(self, other: "StateVector") -> complex:
        if other.space != self.space:
            raise ParameterError("states live on different spaces")
        return complex(np.vdot(self.vec, other.vec))

    def expect(self, op: OperatorMatrix) -> complex:
        if op.space != self.space:
            raise ParameterError("operator and state live on different spaces")
        return complex(np.vdot(self.vec, op.mat @ self.vec))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.space, np.outer(self.vec, self.vec.conj()))

    def __repr__(self):
        return f"StateVector(dim={self.space.dim})"


class DensityMatrix:
    """Mixed state on a FockSpace."""

    __slots__ = ("space", "mat")

    def __init__(self, space: FockSpace, mat: np.ndarray):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (space.dim, space.dim):
            raise ParameterError(
                f"matrix shape {mat.shape} does not match space dim {space.dim}"
            )
        self.space = space
        self.mat = mat

    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def validate(self, herm_tol=1e-10, trace_tol=1e-8, eig_tol=1e-8) -> None:
        if np.abs(self.mat - self.mat.conj().T).max() > herm_tol:
            raise ParameterError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > trace_tol:
            raise ParameterError(f"density matrix trace {self.trace()} != 1")
        if np.linalg.eigvalsh(self.mat).min() < -eig_tol:
            raise ParameterError("density matrix has a negative eigenvalue")

    def expect(self, op: OperatorMatrix) -> complex:
        if op.space != self.space:
            raise ParameterError("operator and state live on different spaces")
        return complex(np.trace(op.mat @ self.mat))

    def purity(self) -> float:
        return float(np.trace(self.mat @ self.mat).real)

    def __repr__(self):
        return f"DensityMatrix(dim={self.space.dim})"


def _single_mode_a(n_max: int) -> np.ndarray:
    a = np.zeros((n_max, n_max), dtype=complex)
    for n in range(1, n_max):
        a[n - 1, n] = sqrt(n)
    return a


def _embed(space: FockSpace, single: np.ndarray, mode: int) -> np.ndarray:
    if space.n_modes == 1:
        return single
    eye = np.eye(space.n_max, dtype=complex)
    if mode == 0:
        return np.kron(single, eye)
    return np.kron(eye, single)


def annihilation_op(space: FockSpace, mode: int = 0) -> OperatorMatrix:
    """Ladder operator a for the given mode, embedded on the full space."""
    if not 0 <= mode < space.n_modes:
        raise ParameterError(f"mode {mode} out of range for {space.n_modes} modes")
    return OperatorMatrix(space, _embed(space, _single_mode_a(space.n_max), mode))


def creation_op(space: FockSpace, mode: int = 0) -> OperatorMatrix:
    return annihilation_op(space, mode).dag()


def number_op(space: FockSpace, mode: int = 0) -> OperatorMatrix:
    if not 0 <= mode < space.n_modes:
        raise ParameterError(f"mode {mode} out of range for {space.n_modes} modes")
    diag = np.arange(space.n_max, dtype=float)
    return OperatorMatrix(space, _embed(space, np.diag(diag).astype(complex), mode))


def identity_op(space: FockSpace) -> OperatorMatrix:
    return OperatorMatrix(space, np.eye(space.dim, dtype=complex))


def fock_state(space: FockSpace, n, mode_n2: int | None = None) -> StateVector:
    """|n> (single mode) or |n1,n2> (two modes)."""
    vec = np.zeros(space.dim, dtype=complex)
    if space.n_modes == 1:
        vec[n] = 1.0
    else:
        vec[n * space.n_max + mode_n2] = 1.0
    return StateVector(space, vec)


def coherent_amplitudes(n_max: int, alpha: complex) -> tuple[np.ndarray, float]:
    """Truncated coherent amplitudes and the pre-normalization tail weight."""
    c = np.zeros(n_max, dtype=complex)
    c[0] = np.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(1, n_max):
        c[n] = c[n - 1] * alpha / sqrt(n)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(c) ** 2)))
    return c, tail


def _check_truncation(tail: float, what: str, strict: bool) -> None:
    if tail > TAIL_WEIGHT_TOL:
        msg = f"{what}: truncated tail weight {tail:.3e} exceeds {TAIL_WEIGHT_TOL:.0e}"
        if strict:
            raise TruncationError(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=3)


def coherent_state(space: FockSpace, alpha: complex, strict: bool = False) -> StateVector:
    """|alpha>, renormalized after truncation. Single-mode spaces only."""
    if space.n_modes != 1:
        raise ParameterError("coherent_state builds single-mode states; use product_state")
    c, tail = coherent_amplitudes(space.n_max, alpha)
    _check_truncation(tail, f"coherent_state(alpha={alpha})", strict)
    return StateVector(space, c)


def cat_state(space: FockSpace, alpha: complex, parity: str = "even",
              strict: bool = False) -> StateVector:
    """(|alpha> +/- |-alpha>) normalized; even cats live on even Fock levels."""
    if space.n_modes != 1:
        raise ParameterError("cat_state builds single-mode states")
    if parity not in ("even", "odd"):
        raise ParameterError(f"parity must be 'even' or 'odd', got {parity!r}")
    c, tail = coherent_amplitudes(space.n_max, alpha)
    _check_truncation(tail, f"cat_state(alpha={alpha})", strict)
    vec = c.copy()
    if parity == "even":
        vec[1::2] = 0.0
    else:
        vec[0::2] = 0.0
    if np.linalg.norm(vec) < 1e-300:
        raise ParameterError(f"{parity} cat with alpha={alpha} is the zero vector")
    return StateVector(space, vec)


def displacement_op(space: FockSpace, xi: complex, strict: bool = False) -> OperatorMatrix:
    """D(xi) = exp(xi a^dag - xi* a) via scaling-and-squaring matrix exponential."""
    if space.n_modes != 1:
        raise ParameterError("displacement_op is single-mode")
    _, tail = coherent_amplitudes(space.n_max, xi)
    _check_truncation(tail, f"displacement_op(xi={xi})", strict)
    a = _single_mode_a(space.n_max)
    return OperatorMatrix(space, expm(xi * a.conj().T - np.conj(xi) * a))


def parity_op(space: FockSpace, mode: int = 0) -> OperatorMatrix:
    """Photon-number parity exp(i pi a^dag a): diagonal (-1)^n."""
    diag = np.where(np.arange(space.n_max) % 2 == 0, 1.0, -1.0)
    return OperatorMatrix(space, _embed(space, np.diag(diag).astype(complex), mode))


def tensor(op_a: OperatorMatrix, op_b: OperatorMatrix) -> OperatorMatrix:
    """Kronecker product of two single-mode operators on the same cutoff."""
    sa, sb = op_a.space, op_b.space
    if sa.n_modes != 1 or sb.n_modes != 1:
        raise ParameterError("tensor expects single-mode operators")
    if sa.n_max != sb.n_max:
        raise ParameterError(
            f"tensor factors must share n_max, got {sa.n_max} and {sb.n_max}"
        )
    space = FockSpace(sa.n_max, 2)
    return OperatorMatrix(space, np.kron(op_a.mat, op_b.mat))


def product_state(psi_a: StateVector, psi_b: StateVector) -> StateVector:
    """|psi_a> (x) |psi_b> on the two-mode space."""
    sa, sb = psi_a.space, psi_b.space
    if sa.n_modes != 1 or sb.n_modes != 1 or sa.n_max != sb.n_max:
        raise ParameterError("product_state expects single-mode states with equal n_max")
    space = FockSpace(sa.n_max, 2)
    return StateVector(space, np.kron(psi_a.vec, psi_b.vec))
