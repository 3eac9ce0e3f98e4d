"""Time evolution: unitary Schrodinger integration and the Lindblad master
equation, with conservation monitoring.

The master-equation dissipator is implemented exactly as the source model
states it: kappa/2 ([a rho, a^dag] + [a, rho a^dag]) plus
gamma_p ([n rho, n] + [n, rho n]) -- note the dephasing term carries no 1/2
prefactor, which doubles its rate relative to the textbook convention. The
conventional half-weight form is available behind ``dephasing_half=True``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, ParameterError
from .fock import DensityMatrix, FockSpace, StateVector
from .hamiltonians import KpoSystemParams, TimeDependentHamiltonian, _a, _embed

log = logging.getLogger(__name__)

NORM_DRIFT_LIMIT = 1e-6
TRACE_DRIFT_LIMIT = 1e-6
MIN_EIGENVALUE_LIMIT = -1e-6
#: monitor intervals used by the adaptive integrators
ADAPTIVE_MONITORS = 20


@dataclass(frozen=True)
class EvolutionConfig:
    duration: float
    method: str = "rk4_fixed"
    step: float = 1e-4
    tol: float = 1e-10
    renormalize: bool = False
    monitor_stride: int = 100

    def __post_init__(self):
        if self.duration <= 0:
            raise ParameterError(f"duration must be > 0, got {self.duration}")
        if self.method not in ("rk4_fixed", "rk_adaptive"):
            raise ParameterError(f"unknown method {self.method!r}")
        if self.method == "rk4_fixed":
            if self.step <= 0:
                raise ParameterError("step must be > 0")
            n = max(1, round(self.duration / self.step))
            if abs(n * self.step - self.duration) > 1e-9 * max(1.0, self.duration):
                raise ParameterError(
                    f"step {self.step} does not divide duration {self.duration}")
        else:
            if not 1e-14 <= self.tol <= 1e-6:
                raise ParameterError("adaptive tolerance must be in [1e-14, 1e-6]")
        if self.monitor_stride < 1:
            raise ParameterError("monitor_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, round(self.duration / self.step))


@dataclass
class EvolutionRecord:
    final_state: object
    times: np.ndarray
    norms: np.ndarray  # state norms, or traces for density matrices
    photon_numbers: np.ndarray  # shape (n_samples, n_modes)
    n_steps: int
    n_rhs: int
    method: str
    extras: dict = field(default_factory=dict)

    @property
    def norm_drift(self) -> float:
        return float(np.abs(self.norms - self.norms[0]).max())


def _photon_diags(space: FockSpace) -> list[np.ndarray]:
    n = np.arange(space.n_max, dtype=float)
    if space.n_modes == 1:
        return [n]
    ones = np.ones(space.n_max)
    return [np.kron(n, ones), np.kron(ones, n)]


def schrodinger_evolve(h: TimeDependentHamiltonian, psi0: StateVector,
                       config: EvolutionConfig) -> EvolutionRecord:
    """Integrate i d|psi>/dt = H(t)|psi> over [0, T]."""
    if psi0.space != h.space:
        raise ParameterError("state and Hamiltonian live on different spaces")
    n_diags = _photon_diags(h.space)
    duration = config.duration

    times, norms, photons = [], [], []

    def monitor(t, vec):
        times.append(t)
        norms.append(float(np.linalg.norm(vec)))
        prob = np.abs(vec) ** 2
        photons.append([float(np.dot(d, prob)) for d in n_diags])

    if config.method == "rk4_fixed":
        n = config.n_steps
        dt = duration / n
        vec = psi0.vec.astype(complex).copy()
        monitor(0.0, vec)
        n_rhs = 0
        for i in range(n):
            t = i * dt
            k1 = -1j * h.apply(t, vec)
            k2 = -1j * h.apply(t + dt / 2, vec + dt / 2 * k1)
            k3 = -1j * h.apply(t + dt / 2, vec + dt / 2 * k2)
            k4 = -1j * h.apply(t + dt, vec + dt * k3)
            vec += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            n_rhs += 4
            if (i + 1) % config.monitor_stride == 0 or i == n - 1:
                if config.renormalize:
                    vec /= np.linalg.norm(vec)
                monitor((i + 1) * dt, vec)
        n_steps = n
    else:
        t_eval = np.linspace(0.0, duration, ADAPTIVE_MONITORS + 1)
        sol = solve_ivp(lambda t, y: -1j * h.apply(t, y), (0.0, duration),
                        psi0.vec.astype(complex), method="DOP853",
                        rtol=config.tol, atol=config.tol * 1e-2, t_eval=t_eval)
        if not sol.success:
            raise IntegrationError(f"adaptive integration failed: {sol.message}")
        for t, y in zip(sol.t, sol.y.T):
            monitor(float(t), y)
        vec = sol.y[:, -1].copy()
        if config.renormalize:
            vec /= np.linalg.norm(vec)
        n_steps = len(sol.t)
        n_rhs = int(sol.nfev)

    norms_arr = np.asarray(norms)
    drift = float(np.abs(norms_arr - 1.0).max())
    if not config.renormalize and not drift <= NORM_DRIFT_LIMIT:
        raise IntegrationError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_LIMIT:.0e}; "
            "reduce the step or tighten the tolerance")

    final = StateVector(h.space, vec, normalized=False)
    return EvolutionRecord(final, np.asarray(times), norms_arr,
                           np.asarray(photons), n_steps, n_rhs, config.method,
                           extras={"norm_drift": drift})


class _LindbladRhs:
    """Right-hand side of the master equation with structured dissipators.

    The collapse channels act through sparse products and diagonal
    broadcasts, so each evaluation costs two sparse-dense products for the
    commutator plus O(dim^2) work for the dissipators.
    """

    def __init__(self, h: TimeDependentHamiltonian, params: KpoSystemParams,
                 dephasing_half: bool):
        space = h.space
        self.h = h
        self.dim = space.dim
        a_single = _a(space.n_max)
        self.modes = []
        for mode in range(space.n_modes):
            a_l = _embed(space.n_max, a_single, mode, space.n_modes)
            nvec = _photon_diags(space)[mode]
            self.modes.append((a_l, a_l.conj().T.tocsr(), nvec, nvec**2))
        self.kappa = params.kappa
        self.gamma_p = params.gamma_p
        # the source model writes the dephasing dissipator without the 1/2;
        # dephasing_half selects the textbook normalization instead
        self.gamma_weight = 1.0 if dephasing_half else 2.0

    def __call__(self, t: float, rho: np.ndarray) -> np.ndarray:
        hs = self.h.sparse(t)
        out = -1j * ((hs @ rho) - (hs.T @ rho.T).T)
        for a_l, ad_l, nvec, n2vec in self.modes:
            if self.kappa > 0.0:
                out += self.kappa * ((a_l @ rho) @ ad_l
                                     - 0.5 * (nvec[:, None] * rho + rho * nvec[None, :]))
            if self.gamma_p > 0.0:
                g = self.gamma_p * self.gamma_weight
                out += g * ((nvec[:, None] * rho) * nvec[None, :]
                            - 0.5 * (n2vec[:, None] * rho + rho * n2vec[None, :]))
        return out


def lindblad_evolve(h: TimeDependentHamiltonian, params: KpoSystemParams,
                    rho0: DensityMatrix, config: EvolutionConfig,
                    dephasing_half: bool = False) -> EvolutionRecord:
    """Integrate the master equation for the density matrix over [0, T]."""
    if rho0.space != h.space:
        raise ParameterError("state and Hamiltonian live on different spaces")
    rhs = _LindbladRhs(h, params, dephasing_half)
    dim = h.space.dim
    n_diags = _photon_diags(h.space)
    duration = config.duration

    times, traces, photons = [], [], []

    def monitor(t, rho):
        times.append(t)
        traces.append(float(np.trace(rho).real))
        diag = np.diag(rho).real
        photons.append([float(np.dot(d, diag)) for d in n_diags])

    rho = rho0.mat.astype(complex).copy()
    monitor(0.0, rho)
    n_rhs = 0
    n_steps = 0

    if config.method == "rk4_fixed":
        n = config.n_steps
        dt = duration / n
        for i in range(n):
            t = i * dt
            k1 = rhs(t, rho)
            k2 = rhs(t + dt / 2, rho + dt / 2 * k1)
            k3 = rhs(t + dt / 2, rho + dt / 2 * k2)
            k4 = rhs(t + dt, rho + dt * k3)
            rho += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            n_rhs += 4
            if (i + 1) % config.monitor_stride == 0 or i == n - 1:
                rho = 0.5 * (rho + rho.conj().T)
                if config.renormalize:
                    rho /= np.trace(rho).real
                monitor((i + 1) * dt, rho)
        n_steps = n
    else:
        checkpoints = np.linspace(0.0, duration, ADAPTIVE_MONITORS + 1)
        for t0, t1 in zip(checkpoints[:-1], checkpoints[1:]):
            sol = solve_ivp(
                lambda t, y: rhs(t, y.reshape(dim, dim)).reshape(-1),
                (t0, t1), rho.reshape(-1), method="RK45",
                rtol=config.tol, atol=config.tol * 1e-2)
            if not sol.success:
                raise IntegrationError(f"adaptive integration failed: {sol.message}")
            rho = sol.y[:, -1].reshape(dim, dim)
            rho = 0.5 * (rho + rho.conj().T)
            if config.renormalize:
                rho /= np.trace(rho).real
            monitor(float(t1), rho)
            n_steps += len(sol.t) - 1
            n_rhs += int(sol.nfev)

    traces_arr = np.asarray(traces)
    drift = float(np.abs(traces_arr - 1.0).max())
    if not config.renormalize and not drift <= TRACE_DRIFT_LIMIT:
        raise IntegrationError(
            f"trace drift {drift:.3e} exceeds {TRACE_DRIFT_LIMIT:.0e}; "
            "tighten the tolerance or reduce the step")
    min_eig = float(np.linalg.eigvalsh(rho).min())
    if min_eig < MIN_EIGENVALUE_LIMIT:
        raise IntegrationError(
            f"density matrix developed eigenvalue {min_eig:.3e} below "
            f"{MIN_EIGENVALUE_LIMIT:.0e}")

    final = DensityMatrix(h.space, rho)
    return EvolutionRecord(final, np.asarray(times), traces_arr,
                           np.asarray(photons), n_steps, n_rhs, config.method,
                           extras={"trace_drift": drift, "min_eigenvalue": min_eig})


def fidelity(state, target: StateVector) -> float:
    """|<target|psi>|^2 for pure states, <target|rho|target> for mixed."""
    if target.space != state.space:
        raise ParameterError("state and target live on different spaces")
    if isinstance(state, StateVector):
        value = abs(np.vdot(target.vec, state.vec)) ** 2
    elif isinstance(state, DensityMatrix):
        value = float(np.real(np.vdot(target.vec, state.mat @ target.vec)))
    else:
        raise ParameterError(f"unsupported state type {type(state).__name__}")
    if value > 1.0 + 1e-9 or value < -1e-9:
        log.warning("fidelity %.12g clamped to [0, 1]", value)
    return min(max(value, 0.0), 1.0)
