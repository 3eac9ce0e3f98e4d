"""Time-dependent Hamiltonians of the one- and two-KPO system.

Everything is expressed in the rotating frame with hbar = 1 and rates in
units of K. Detuning-like terms enter as +d(t) * a^dag a, so the ideal
counter-diabatic drive corresponds to d(t) = -xi_cd * thetadot(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError
from .fock import FockSpace, OperatorMatrix, StateVector, coherent_state
from .schedules import Schedule


@dataclass(frozen=True)
class KpoSystemParams:
    """Physical parameters of the one- or two-KPO model, in units of K.

    Decay (kappa) and dephasing (gamma_p) apply to both modes alike, matching
    the simplification used throughout the source protocols.
    """

    k: float = 1.0
    p: float = 0.0
    j: float = 0.0
    r: float = 1.0
    xi_cd: float = 1.0
    delta_err: float = 0.0
    kappa: float = 0.0
    gamma_p: float = 0.0
    n_max: int = 30

    def __post_init__(self):
        if self.k <= 0:
            raise ParameterError(f"K must be > 0, got {self.k}")
        if self.p < 0:
            raise ParameterError(f"p must be >= 0, got {self.p}")
        if self.r <= 0:
            raise ParameterError(f"r must be > 0, got {self.r}")
        if self.xi_cd < 0:
            raise ParameterError(f"xi_cd must be >= 0, got {self.xi_cd}")
        if self.kappa < 0 or self.gamma_p < 0:
            raise ParameterError("decay/dephasing rates must be >= 0")
        if self.n_max < 2:
            raise ParameterError(f"n_max must be >= 2, got {self.n_max}")

    @property
    def alpha1(self) -> float:
        return math.sqrt(self.p / self.k)

    @property
    def alpha2(self) -> float:
        return math.sqrt(self.p / (self.r * self.k))

    def with_(self, **kw) -> "KpoSystemParams":
        return replace(self, **kw)


# ---------------------------------------------------------------------------
# sparse building blocks


def _a(n_max: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n_max)), 1, dtype=complex).tocsr()


def _embed(n_max: int, single: sp.spmatrix, mode: int, n_modes: int) -> sp.csr_matrix:
    if n_modes == 1:
        return single.tocsr()
    eye = sp.identity(n_max, dtype=complex, format="csr")
    if mode == 0:
        return sp.kron(single, eye, format="csr")
    return sp.kron(eye, single, format="csr")


def _kerr(n_max: int) -> sp.csr_matrix:
    n = np.arange(n_max, dtype=float)
    return sp.diags((n * (n - 1)).astype(complex)).tocsr()


def _number(n_max: int) -> sp.csr_matrix:
    return sp.diags(np.arange(n_max, dtype=float).astype(complex)).tocsr()


class TimeDependentHamiltonian:
    """H(t) = static + sum_k [c_k(t) A_k + c_k(t)* A_k^dag] + sum_m d_m(t) B_m.

    The A_k carry complex coefficients and are completed to Hermitian pairs;
    the B_m are Hermitian with real coefficients. The decomposition is fixed
    at construction so the integrator never rebuilds matrices.
    """

    def __init__(self, space: FockSpace, static: sp.spmatrix,
                 pair_terms: list[tuple[sp.spmatrix, Callable[[float], complex]]] = (),
                 herm_terms: list[tuple[sp.spmatrix, Callable[[float], float]]] = ()):
        self.space = space
        self.static = static.tocsr()
        self.pair_terms = [(m.tocsr(), f) for m, f in pair_terms]
        self.pair_dags = [m.conj().T.tocsr() for m, _ in self.pair_terms]
        self.herm_terms = [(m.tocsr(), f) for m, f in herm_terms]

    def apply(self, t: float, vec: np.ndarray) -> np.ndarray:
        out = self.static @ vec
        for (mat, coeff), dag in zip(self.pair_terms, self.pair_dags):
            c = coeff(t)
            out += c * (mat @ vec) + np.conj(c) * (dag @ vec)
        for mat, coeff in self.herm_terms:
            out += coeff(t) * (mat @ vec)
        return out

    def sparse(self, t: float) -> sp.csr_matrix:
        out = self.static.copy()
        for (mat, coeff), dag in zip(self.pair_terms, self.pair_dags):
            c = coeff(t)
            out = out + c * mat + np.conj(c) * dag
        for mat, coeff in self.herm_terms:
            out = out + coeff(t) * mat
        return out

    def matrix(self, t: float) -> OperatorMatrix:
        return OperatorMatrix(self.space, self.sparse(t).toarray())

    def __call__(self, t: float) -> OperatorMatrix:
        return self.matrix(t)


# ---------------------------------------------------------------------------
# single KPO


def _kpo_sparse(n_max: int, k: float, p: float, theta: float,
                delta: float) -> sp.csr_matrix:
    a = _a(n_max)
    ad2 = (a.conj().T @ a.conj().T).tocsr()
    h = (k / 2.0) * _kerr(n_max) + delta * _number(n_max)
    pump = -(p / 2.0) * np.exp(2j * theta)
    return (h + pump * ad2 + np.conj(pump) * ad2.conj().T).tocsr()


def kpo_hamiltonian(params: KpoSystemParams, theta: float = 0.0,
                    delta: float = 0.0, space: FockSpace | None = None
                    ) -> OperatorMatrix:
    """Single-KPO Hamiltonian
    H = (K/2) a^dag2 a^2 - (p/2)(a^dag2 e^{2i theta} + h.c.) + delta a^dag a."""
    space = space or FockSpace(params.n_max)
    if space.n_modes != 1:
        raise ParameterError("kpo_hamiltonian is single-mode")
    return OperatorMatrix(
        space, _kpo_sparse(space.n_max, params.k, params.p, theta, delta).toarray())


def cd_modified_hamiltonian(params: KpoSystemParams, theta_schedule: Schedule,
                            space: FockSpace | None = None
                            ) -> TimeDependentHamiltonian:
    """H'(t) = H(theta(t)) - xi_cd * thetadot(t) * a^dag a."""
    space = space or FockSpace(params.n_max)
    if space.n_modes != 1:
        raise ParameterError("cd_modified_hamiltonian is single-mode")
    n_max = space.n_max
    a = _a(n_max)
    ad2 = (a.conj().T @ a.conj().T).tocsr()
    static = (params.k / 2.0) * _kerr(n_max)
    p = params.p
    pump = lambda t: -(p / 2.0) * np.exp(2j * theta_schedule.value(t))
    xi = params.xi_cd
    cd = lambda t: -xi * theta_schedule.derivative(t)
    return TimeDependentHamiltonian(space, static,
                                    pair_terms=[(ad2, pump)],
                                    herm_terms=[(_number(n_max), cd)])


# ---------------------------------------------------------------------------
# two KPOs


def _two_mode_base(params: KpoSystemParams) -> tuple[FockSpace, sp.csr_matrix, dict]:
    """Static Kerr + coupling + detuning-error part shared by all two-KPO
    Hamiltonians, plus the sparse primitives keyed by name."""
    n_max = params.n_max
    space = FockSpace(n_max, 2)
    a = _a(n_max)
    a1 = _embed(n_max, a, 0, 2)
    a2 = _embed(n_max, a, 1, 2)
    prims = {
        "ad1sq": (a1.conj().T @ a1.conj().T).tocsr(),
        "ad2sq": (a2.conj().T @ a2.conj().T).tocsr(),
        "n1": _embed(n_max, _number(n_max), 0, 2),
        "n2": _embed(n_max, _number(n_max), 1, 2),
        "hop": (a1 @ a2.conj().T + a1.conj().T @ a2).tocsr(),
    }
    static = (params.k / 2.0) * _embed(n_max, _kerr(n_max), 0, 2) \
        + (params.r * params.k / 2.0) * _embed(n_max, _kerr(n_max), 1, 2) \
        + params.delta_err * prims["n2"]
    return space, static.tocsr(), prims


def two_kpo_hamiltonian(params: KpoSystemParams, theta1_schedule: Schedule,
                        theta2: float = 0.0) -> TimeDependentHamiltonian:
    """Coupled-KPO Hamiltonian with the pump phase of KPO 1 modulated, the
    always-on hopping J, the CD term on mode 1 and the constant detuning
    error on mode 2."""
    space, static, prims = _two_mode_base(params)
    static = static + params.j * prims["hop"]
    p = params.p
    pump2 = -(p / 2.0) * np.exp(2j * theta2)
    static = static + pump2 * prims["ad2sq"] + np.conj(pump2) * prims["ad2sq"].conj().T
    pump1 = lambda t: -(p / 2.0) * np.exp(2j * theta1_schedule.value(t))
    xi = params.xi_cd
    cd = lambda t: -xi * theta1_schedule.derivative(t)
    return TimeDependentHamiltonian(space, static.tocsr(),
                                    pair_terms=[(prims["ad1sq"], pump1)],
                                    herm_terms=[(prims["n1"], cd)])


def beam_splitter_hamiltonian(params: KpoSystemParams, g_schedule: Schedule
                              ) -> TimeDependentHamiltonian:
    """Baseline with ideally tunable hopping g(t)(a1 a2^dag + h.c.), both pump
    phases fixed to zero and no CD term."""
    space, static, prims = _two_mode_base(params)
    p = params.p
    for key in ("ad1sq", "ad2sq"):
        static = static + (-(p / 2.0)) * (prims[key] + prims[key].conj().T)
    return TimeDependentHamiltonian(
        space, static.tocsr(),
        herm_terms=[(prims["hop"], g_schedule.value)])


def loading_hamiltonian(params: KpoSystemParams, pump_schedule: Schedule,
                        detuning_schedule: Schedule | None = None,
                        theta1: float = math.pi / 2, theta2: float = 0.0
                        ) -> TimeDependentHamiltonian:
    """Two-KPO Hamiltonian with both pump amplitudes ramped by p(t) and an
    optional common detuning ramp +Delta(t) (a1^dag a1 + a2^dag a2)."""
    space, static, prims = _two_mode_base(params)
    static = static + params.j * prims["hop"]
    pair_terms = []
    for key, theta in (("ad1sq", theta1), ("ad2sq", theta2)):
        phase = np.exp(2j * theta)
        pair_terms.append(
            (prims[key], lambda t, ph=phase: -(pump_schedule.value(t) / 2.0) * ph))
    herm_terms = []
    if detuning_schedule is not None:
        n_tot = (prims["n1"] + prims["n2"]).tocsr()
        herm_terms.append((n_tot, detuning_schedule.value))
    return TimeDependentHamiltonian(space, static.tocsr(), pair_terms, herm_terms)


# ---------------------------------------------------------------------------
# effective potential


def effective_potential(params: KpoSystemParams, alpha: complex,
                        theta: float = 0.0) -> float:
    """Closed form V(alpha) = |alpha|^2 ((K/2)|alpha|^2 - p cos(2(arg(alpha) - theta)))."""
    mag2 = abs(alpha) ** 2
    if mag2 == 0.0:
        return 0.0
    theta_alpha = math.atan2(alpha.imag, alpha.real) if isinstance(alpha, complex) \
        else (0.0 if alpha > 0 else math.pi)
    return mag2 * (params.k / 2.0 * mag2
                   - params.p * math.cos(2.0 * (theta_alpha - theta)))


def effective_potential_numeric(params: KpoSystemParams, alpha: complex,
                                theta: float = 0.0,
                                n_max: int | None = None) -> float:
    """Cross-check path: <alpha| H(theta) |alpha> on a truncated space."""
    space = FockSpace(n_max or params.n_max)
    psi = coherent_state(space, alpha)
    return psi.expect(kpo_hamiltonian(params, theta, space=space)).real


def rotation_unitary(space: FockSpace, theta: float, mode: int = 0) -> OperatorMatrix:
    """Phase-space rotation U(theta) = exp(i theta a^dag a)."""
    diag = np.exp(1j * theta * np.arange(space.n_max))
    if space.n_modes == 1:
        return OperatorMatrix(space, np.diag(diag))
    full = np.diag(diag)
    return OperatorMatrix(space, _embed(space.n_max, sp.csr_matrix(full), mode,
                                        2).toarray())


def rotate_state(psi: StateVector, theta: float, mode: int = 0) -> StateVector:
    """Apply U(theta) to a state without building the matrix."""
    phases = np.exp(1j * theta * np.arange(psi.space.n_max))
    if psi.space.n_modes == 1:
        return StateVector(psi.space, phases * psi.vec, normalized=False)
    n = psi.space.n_max
    grid = psi.vec.reshape(n, n)
    out = phases[:, None] * grid if mode == 0 else grid * phases[None, :]
    return StateVector(psi.space, out.reshape(-1), normalized=False)
