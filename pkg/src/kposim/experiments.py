"""Named-experiment registry, parallel parameter sweeps and CSV/manifest
emission.

Every experiment maps one registered name to a grid of independent points; a
point runner evolves the system and returns plotted metrics (fidelity,
log10(1-F), relative phases). Outputs are deterministic: identical config
gives a byte-identical CSV regardless of worker count.
"""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    QubitFrame,
    extract_phases,
    gate_phase_pattern,
    ideal_gate_target,
    wigner,
    wrap_phase,
)
from .dynamics import (
    EvolutionConfig,
    fidelity,
    lindblad_evolve,
    schrodinger_evolve,
)
from .errors import ConfigError, KposimError, TruncationError, TruncationWarning
from .fock import FockSpace, OperatorMatrix, StateVector, fock_state, parity_op
from .hamiltonians import (
    KpoSystemParams,
    beam_splitter_hamiltonian,
    cd_modified_hamiltonian,
    kpo_hamiltonian,
    loading_hamiltonian,
    rotate_state,
    two_kpo_hamiltonian,
)
from .schedules import (
    Schedule,
    analytic_gate_phase,
    calibrate_theta_amp,
    gate_phase_schedule,
    loading_schedules,
    rotation_schedule,
)

SCHEMA_VERSION = 1
DEGENERACY_GAP = 1e-8
AUDIT_FIDELITY_TOL = 1e-6
AUDIT_PHASE_TOL = 1e-4
TAIL_OCCUPANCY_LIMIT = 1e-6

# fixed CSV schema; one row per grid point, blanks for inapplicable fields
CSV_COLUMNS = [
    "experiment", "grid_index", "cd", "scheme", "channel", "T", "theta_amp",
    "p", "j", "r", "kappa", "gamma_p", "xi_cd", "delta_err", "delta_max",
    "target_rel_phase", "initial_state", "frame", "fidelity", "infidelity",
    "log10_infidelity", "phi_00", "phi_01", "phi_10", "phi_11", "rel_phi_01",
    "rel_phi_10", "rel_phi_11", "rel_phi_pred", "overlap_min", "gs_overlap",
    "wigner_file", "w_min", "w_max", "n_max", "method", "step", "tol",
    "n_steps", "n_rhs", "status", "error",
]

COLUMN_NOTES = {
    "cd": "true when the velocity-proportional detuning (CD) term is applied",
    "scheme": "coupling scheme: cd or beam-splitter",
    "channel": "decoherence channel for single-channel sweeps: decay or dephasing",
    "T": "control duration in units of 1/K",
    "log10_infidelity": "log10(1 - fidelity), precomputed for plotting",
    "frame": ("computational basis for gate rows: coherent products, or their "
              "projection onto the ground manifold of H(t=0)"),
    "rel_phi_10": "phi_10 - phi_00 wrapped to (-pi, pi]",
    "rel_phi_pred": "quadrature prediction of rel_phi_10 from the pump-phase integral",
    "overlap_min": "smallest of the four |<ij|Psi(T)>|^2 when phases were extracted",
    "gs_overlap": "squared overlap of the row's final ground state with the J=0 one",
    "status": "ok or failed; failed rows keep the grid point and an error column",
}


# ---------------------------------------------------------------------------
# config handling


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = val
    return out


def build_config(name: str, overrides: dict | None = None) -> dict:
    if name not in REGISTRY:
        raise ConfigError(f"unknown experiment {name!r}; see the registry list")
    cfg = _deep_merge(REGISTRY[name].defaults, overrides or {})
    validate_config(name, cfg)
    return cfg


def validate_config(name: str, cfg: dict) -> None:
    exp = REGISTRY.get(name)
    if exp is None:
        raise ConfigError(f"unknown experiment {name!r}")
    allowed = set(exp.defaults) | {"schema_version"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(
            f"unknown config keys for {name}: {sorted(unknown)}; "
            f"allowed: {sorted(allowed)}")
    for key, val in cfg.items():
        if key.endswith("_grid") or key in ("cd", "schemes", "channels"):
            if not isinstance(val, (list, tuple)) or len(val) == 0:
                raise ConfigError(f"{key} must be a non-empty list")
            if key not in ("schemes", "channels") and not all(
                    isinstance(v, (int, float, bool)) and math.isfinite(float(v))
                    for v in val):
                raise ConfigError(f"{key} must contain finite numbers")
    try:
        _params_from(cfg)
        if "evolution" in cfg:
            _evolution_config(cfg, duration=1.0)
    except (KposimError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid config for {name}: {exc}") from exc


def _params_from(cfg: dict, **overrides) -> KpoSystemParams:
    fields = dict(cfg.get("params", {}))
    fields.update(overrides)
    return KpoSystemParams(**fields)


def _evolution_config(cfg: dict, duration: float, **overrides) -> EvolutionConfig:
    fields = dict(cfg.get("evolution", {}))
    fields.update(overrides)
    method = fields.get("method", "rk4_fixed")
    if method == "rk4_fixed":
        # snap the step so it divides the duration exactly
        base = fields.get("step", 1e-4)
        fields["step"] = duration / max(1, round(duration / base))
    return EvolutionConfig(duration=duration, **fields)


# ---------------------------------------------------------------------------
# shared physics helpers


def ground_state(h: OperatorMatrix) -> tuple[float, list[StateVector]]:
    """Lowest eigenpair by dense Hermitian diagonalization; returns the full
    near-degenerate subspace when the gap is below DEGENERACY_GAP."""
    if not h.is_hermitian(tol=1e-9):
        raise KposimError("ground_state requires a Hermitian operator")
    vals, vecs = np.linalg.eigh(h.mat)
    states = [StateVector(h.space, vecs[:, 0])]
    k = 1
    while k < len(vals) and vals[k] - vals[0] < DEGENERACY_GAP:
        states.append(StateVector(h.space, vecs[:, k]))
        k += 1
    return float(vals[0]), states


def _subspace_fidelity(state: StateVector, states: list[StateVector]) -> float:
    return float(min(sum(abs(s.overlap(state)) ** 2 for s in states), 1.0))


def sector_ground_state(h: OperatorMatrix) -> StateVector:
    """Even/even-parity member of the low quartet of a two-KPO Hamiltonian —
    the state adiabatic loading from vacuum tracks, since the pump terms
    conserve the photon parity of each mode (the hopping admixes the odd/odd
    block only perturbatively)."""
    space = h.space
    sign = np.where(np.arange(space.n_max) % 2 == 0, 1.0, -1.0)
    parity1 = np.kron(sign, np.ones(space.n_max))
    _, vecs = np.linalg.eigh(h.mat)
    best = max(range(4), key=lambda k: float(
        np.dot(parity1, np.abs(vecs[:, k]) ** 2)))
    return StateVector(space, vecs[:, best])


def even_cat_ground_state(params: KpoSystemParams, theta: float = 0.0
                          ) -> StateVector:
    """Even-parity member of the single-KPO ground doublet, numerically exact
    in the truncated space."""
    space = FockSpace(params.n_max, 1)
    h = kpo_hamiltonian(params, theta=theta, space=space)
    vals, vecs = np.linalg.eigh(h.mat)
    parity = parity_op(space).mat.diagonal().real
    for k in (0, 1):
        state = StateVector(space, vecs[:, k])
        if float(np.dot(parity, np.abs(state.vec) ** 2)) > 0:
            return state
    raise KposimError("no even-parity state in the ground doublet")


def _tail_weight(state, n_levels: int = 2) -> float:
    """Probability weight in the top Fock levels of any mode."""
    space = state.space
    n_max = space.n_max
    if isinstance(state, StateVector):
        probs = np.abs(state.vec) ** 2
    else:
        probs = np.diag(state.mat).real
    if space.n_modes == 1:
        return float(probs[n_max - n_levels:].sum())
    grid = probs.reshape(n_max, n_max)
    edge = grid[n_max - n_levels:, :].sum() + grid[:n_max - n_levels,
                                                   n_max - n_levels:].sum()
    return float(edge)


def _check_truncation(state, strict: bool) -> None:
    tail = _tail_weight(state)
    if tail > TAIL_OCCUPANCY_LIMIT:
        msg = (f"final state puts {tail:.3e} weight in the top Fock levels; "
               "increase n_max")
        if strict:
            raise TruncationError(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=2)


def _resolve_theta_amp(cfg: dict, params: KpoSystemParams, duration: float
                       ) -> tuple[float, float | None]:
    """Fixed theta_amp from config, or calibrated to the target relative
    phase when the config specifies one."""
    target = cfg.get("target_rel_phase")
    if target is not None:
        return calibrate_theta_amp(params, duration, target), float(target)
    return float(cfg["theta_amp"]), None


def _initial_state(cfg: dict, frame: QubitFrame) -> tuple[str, StateVector]:
    label = cfg.get("initial_state", "psi_s")
    if label == "psi_s":
        return label, frame.psi_s
    try:
        key = (int(label[0]), int(label[1]))
        return label, frame.basis[key]
    except (ValueError, KeyError, IndexError, TypeError):
        raise ConfigError(
            f"initial_state must be 'psi_s' or one of 00/01/10/11, got {label!r}")


# ---------------------------------------------------------------------------
# point runners (module-level, picklable for the worker pool)


def _finish_row(row: dict, record, final_state, target, strict: bool) -> dict:
    f = fidelity(final_state, target)
    row.update(fidelity=f, infidelity=1.0 - f,
               log10_infidelity=math.log10(1.0 - f) if f < 1.0 else -math.inf,
               n_steps=record.n_steps, n_rhs=record.n_rhs)
    _check_truncation(final_state, strict)
    return row


def run_rotation_point(cfg: dict, point: dict, strict: bool = False) -> dict:
    params = _params_from(cfg)
    if not point["cd"]:
        params = params.with_(xi_cd=0.0)
    duration = point["T"]
    psi0 = even_cat_ground_state(params, theta=0.0)
    h = cd_modified_hamiltonian(params, rotation_schedule(duration))
    record = schrodinger_evolve(h, psi0, _evolution_config(cfg, duration))
    target = rotate_state(psi0, math.pi / 2)
    return _finish_row({"initial_state": "even_cat"}, record,
                       record.final_state, target, strict)


def _gate_frame(params: KpoSystemParams, scheme: str, kind: str,
                h) -> QubitFrame:
    theta_ref = math.pi / 2 if scheme == "cd" else 0.0
    frame = QubitFrame.from_params(params, theta_ref=theta_ref)
    if kind == "ground-manifold":
        # basis the loading protocol actually prepares: coherent products
        # projected onto the four lowest eigenstates of H(t=0)
        _, vecs = np.linalg.eigh(h.matrix(0.0).mat)
        frame.project_onto(vecs[:, :4])
    elif kind != "coherent":
        raise ConfigError(f"unknown frame {kind!r}; "
                          "use 'coherent' or 'ground-manifold'")
    return frame


def _gate_hamiltonian(params: KpoSystemParams, scheme: str, schedule: Schedule):
    if scheme == "cd":
        return two_kpo_hamiltonian(params, schedule)
    if scheme == "beam-splitter":
        j = params.j
        g = Schedule(
            kind="bs_gain", duration=schedule.duration,
            value=lambda t: j * math.cos(schedule.value(t)),
            derivative=lambda t: -j * math.sin(schedule.value(t))
            * schedule.derivative(t),
            params={"j": j})
        return beam_splitter_hamiltonian(params, g)
    raise ConfigError(f"unknown scheme {scheme!r}")


def run_gate_point(cfg: dict, point: dict, strict: bool = False) -> dict:
    """One Rzz-gate evolution: fidelity against the ideal phase gate, and the
    extracted per-branch phases when the point asks for them."""
    overrides = {k: point[k] for k in ("p", "kappa", "gamma_p", "xi_cd",
                                       "delta_err") if k in point}
    params = _params_from(cfg, **overrides)
    scheme = point.get("scheme", "cd")
    if scheme == "cd" and not point.get("cd", True):
        params = params.with_(xi_cd=0.0)
    duration = point["T"]
    theta_amp = point.get("theta_amp")
    target_rel = None
    if theta_amp is None:
        # calibration always uses the ideal-coupling parameters of the point
        theta_amp, target_rel = _resolve_theta_amp(cfg, params, duration)
    schedule = gate_phase_schedule(duration, theta_amp)
    phi = analytic_gate_phase(params, schedule)
    h = _gate_hamiltonian(params, scheme, schedule)
    frame_kind = cfg.get("frame", "coherent")
    frame = _gate_frame(params, scheme, frame_kind, h)
    label, psi0 = _initial_state(cfg, frame)
    target = ideal_gate_target(psi0, frame, gate_phase_pattern(phi),
                               residual_tol=1e-2)
    evo = _evolution_config(cfg, duration)

    row = {"theta_amp": theta_amp, "initial_state": label,
           "frame": frame_kind, "rel_phi_pred": wrap_phase(-2.0 * phi)}
    if target_rel is not None:
        row["target_rel_phase"] = target_rel

    lindblad = params.kappa > 0 or params.gamma_p > 0
    if lindblad:
        record = lindblad_evolve(h, params, psi0.to_density(), evo)
    else:
        record = schrodinger_evolve(h, psi0, evo)
    row = _finish_row(row, record, record.final_state, target, strict)

    if point.get("phases") and not lindblad:
        finals = {}
        for key in frame.basis:
            rec = schrodinger_evolve(h, frame.basis[key], evo)
            finals[key] = rec.final_state
            row["n_rhs"] += rec.n_rhs
        out = extract_phases(finals, frame)
        for (i, j), val in out.phases.items():
            row[f"phi_{i}{j}"] = val
        for (i, j), val in out.relative.items():
            if (i, j) != (0, 0):
                row[f"rel_phi_{i}{j}"] = val
        row["overlap_min"] = min(out.overlaps.values())
    return row


def run_loading_point(cfg: dict, point: dict, strict: bool = False) -> dict:
    p_max = cfg["p_max"]
    params = _params_from(cfg, p=p_max, j=point["j"])
    duration, delta_max = point["T"], point["delta_max"]
    pump, detuning = loading_schedules(duration, p_max, delta_max)
    h = loading_hamiltonian(params, pump,
                            detuning if delta_max > 0 else None)
    space = h.space
    vacuum = fock_state(space, 0, mode_n2=0)
    record = schrodinger_evolve(h, vacuum, _evolution_config(cfg, duration))
    # fidelity to the even-sector ground state of the ramp-complete
    # Hamiltonian, the state the protocol is meant to prepare
    gs = sector_ground_state(h.matrix(duration))
    f = fidelity(record.final_state, gs)
    # cross-coupling ground-state overlap against the J=0 reference
    h0 = loading_hamiltonian(params.with_(j=0.0), pump, None)
    gs0 = sector_ground_state(h0.matrix(duration))
    gs_overlap = float(min(abs(gs0.overlap(gs)) ** 2, 1.0))
    _check_truncation(record.final_state, strict)
    return {
        "initial_state": "vacuum", "fidelity": f, "infidelity": 1.0 - f,
        "log10_infidelity": math.log10(1.0 - f) if f < 1.0 else -math.inf,
        "gs_overlap": gs_overlap, "n_steps": record.n_steps,
        "n_rhs": record.n_rhs,
    }


def run_wigner_point(cfg: dict, point: dict, strict: bool = False) -> dict:
    """Prepare one snapshot state and evaluate its Wigner map; the grid values
    are returned in-row for the writer to emit as a side-car CSV."""
    spec = point["snapshot"]
    params = _params_from(cfg)
    kind = spec.get("kind", "cat")
    extras = {}
    if kind == "cat":
        state = even_cat_ground_state(params, theta=spec.get("theta", 0.0))
        extras["theta_amp"] = ""
    elif kind == "rotation-final":
        run_params = params if spec.get("cd", True) else params.with_(xi_cd=0.0)
        duration = spec["T"]
        psi0 = even_cat_ground_state(run_params, theta=0.0)
        h = cd_modified_hamiltonian(run_params, rotation_schedule(duration))
        record = schrodinger_evolve(h, psi0,
                                    _evolution_config(cfg, duration))
        state = record.final_state
        extras = {"T": duration, "cd": spec.get("cd", True)}
    else:
        raise ConfigError(f"unknown snapshot kind {kind!r}")
    wcfg = cfg.get("wigner", {})
    eval_n_max = int(wcfg.get("eval_n_max", 160))
    if eval_n_max > state.space.n_max:
        padded = np.zeros(eval_n_max, dtype=complex)
        padded[:state.space.n_max] = state.vec
        state = StateVector(FockSpace(eval_n_max, 1), padded)
    axis = np.linspace(-wcfg.get("extent", 6.0), wcfg.get("extent", 6.0),
                       int(wcfg.get("points", 121)))
    grid = wigner(state, axis, axis)
    row = {"initial_state": spec["label"],
           "w_min": float(grid.values.min()),
           "w_max": float(grid.values.max()),
           "wigner_file": f"wigner_{spec['label']}.csv",
           "_wigner_grid": grid}
    row.update(extras)
    return row


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    defaults: dict
    build_grid: object  # cfg -> list of point dicts
    run_point: object  # (cfg, point, strict) -> metrics dict


def _product_grid(**axes) -> list[dict]:
    points = [{}]
    for key, values in axes.items():
        points = [dict(pt, **{key: v}) for pt in points for v in values]
    return points


_PURE_EVO = {"method": "rk4_fixed", "step": 1e-4}
_MIXED_EVO = {"method": "rk_adaptive", "tol": 1e-8}
_GATE_PARAMS = {"p": 7.0, "j": 0.2, "n_max": 30}
_HALF_PI = -math.pi / 2

REGISTRY: dict[str, Experiment] = {}


def _register(name, description, defaults, build_grid, run_point):
    REGISTRY[name] = Experiment(name, description, defaults, build_grid,
                                run_point)


_register(
    "rotation-sweep-T",
    "Single-KPO cat rotation by pi/2: fidelity vs duration, with and "
    "without the velocity-proportional detuning.",
    {"params": {"p": 7.0, "n_max": 30}, "evolution": dict(_PURE_EVO),
     "t_grid": [0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0, 1.5],
     "cd": [True, False]},
    lambda cfg: _product_grid(T=cfg["t_grid"], cd=cfg["cd"]),
    run_rotation_point,
)

_register(
    "gate-sweep-T",
    "Two-KPO entangling-gate fidelity vs duration at fixed pump-phase "
    "swing, with and without the CD term.",
    {"params": dict(_GATE_PARAMS), "evolution": dict(_PURE_EVO),
     "theta_amp": 0.1, "initial_state": "psi_s", "frame": "coherent",
     "t_grid": [round(v, 6) for v in np.geomspace(0.2, 3.0, 15)],
     "cd": [True, False]},
    lambda cfg: _product_grid(T=cfg["t_grid"], cd=cfg["cd"]),
    run_gate_point,
)

_register(
    "gate-sweep-theta-amp",
    "Gate fidelity and acquired phases vs the pump-phase swing at fixed "
    "duration; phases are extracted on the CD branch.",
    {"params": dict(_GATE_PARAMS), "evolution": dict(_PURE_EVO),
     "duration": 1.0, "initial_state": "psi_s", "frame": "coherent",
     "theta_amp_grid": [0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2,
                        0.225, 0.25],
     "cd": [True, False]},
    lambda cfg: [dict(T=cfg["duration"], theta_amp=amp, cd=cd,
                      phases=bool(cd))
                 for amp in cfg["theta_amp_grid"] for cd in cfg["cd"]],
    run_gate_point,
)

_register(
    "gate-sweep-T-by-p",
    "Gate fidelity vs duration for several pump amplitudes, with the "
    "pump-phase swing calibrated so the relative phase hits -pi/2.",
    {"params": {"j": 0.2, "n_max": 30}, "evolution": dict(_PURE_EVO),
     "initial_state": "psi_s", "frame": "ground-manifold",
     "target_rel_phase": _HALF_PI,
     "p_grid": [5.0, 6.0, 7.0], "t_grid": [0.7, 1.0, 1.4, 2.0],
     "cd": [True, False]},
    lambda cfg: _product_grid(p=cfg["p_grid"], T=cfg["t_grid"], cd=cfg["cd"]),
    run_gate_point,
)

_register(
    "gate-decoherence",
    "Calibrated gate under simultaneous decay and dephasing at equal rates; "
    "infidelity vs duration for each rate and pump amplitude.",
    {"params": {"j": 0.2, "n_max": 30}, "evolution": dict(_MIXED_EVO),
     "initial_state": "psi_s", "frame": "ground-manifold",
     "target_rel_phase": _HALF_PI,
     "p_grid": [5.0, 7.0], "kappa_grid": [1e-3, 1e-4],
     "t_grid": [0.7, 1.0, 1.5, 2.2, 3.2], "cd": [True, False]},
    lambda cfg: [dict(p=p, kappa=k, gamma_p=k, T=t, cd=cd)
                 for p in cfg["p_grid"] for k in cfg["kappa_grid"]
                 for t in cfg["t_grid"] for cd in cfg["cd"]],
    run_gate_point,
)

_register(
    "beam-splitter-compare",
    "Calibrated gate driven by the pump-phase scheme vs an ideally tunable "
    "hopping of the same envelope.",
    {"params": {"j": 0.2, "n_max": 30}, "evolution": dict(_PURE_EVO),
     "initial_state": "psi_s", "frame": "ground-manifold",
     "target_rel_phase": _HALF_PI,
     "p_grid": [4.0, 6.0], "t_grid": [1.0, 1.4, 2.0, 3.0],
     "schemes": ["cd", "beam-splitter"]},
    lambda cfg: _product_grid(p=cfg["p_grid"], T=cfg["t_grid"],
                              scheme=cfg["schemes"]),
    run_gate_point,
)

_register(
    "pure-decay-vs-dephasing",
    "Calibrated CD gate under a single decoherence channel: photon decay "
    "only vs dephasing only at the same rate.",
    {"params": dict(_GATE_PARAMS), "evolution": dict(_MIXED_EVO),
     "initial_state": "psi_s", "frame": "ground-manifold",
     "target_rel_phase": _HALF_PI,
     "rate_grid": [1e-4], "t_grid": [0.7, 1.0, 1.5, 2.2, 3.2],
     "channels": ["decay", "dephasing"]},
    lambda cfg: [dict(T=t, channel=ch,
                      kappa=(rate if ch == "decay" else 0.0),
                      gamma_p=(rate if ch == "dephasing" else 0.0))
                 for rate in cfg["rate_grid"] for t in cfg["t_grid"]
                 for ch in cfg["channels"]],
    run_gate_point,
)

_register(
    "cd-error-sweep",
    "Calibrated gate with a mis-scaled CD coefficient xi; xi=1 is ideal and "
    "xi=0 recovers the control without the CD term.",
    {"params": dict(_GATE_PARAMS), "evolution": dict(_PURE_EVO),
     "initial_state": "psi_s", "frame": "coherent",
     "target_rel_phase": _HALF_PI, "duration": 1.0,
     "xi_grid": [round(0.1 * k, 6) for k in range(13)]},
    lambda cfg: [dict(T=cfg["duration"], xi_cd=xi) for xi in cfg["xi_grid"]],
    run_gate_point,
)

_register(
    "detuning-error-sweep",
    "Calibrated CD gate with a constant stray detuning on the un-modulated "
    "KPO, modelling a resonance-frequency error.",
    {"params": dict(_GATE_PARAMS), "evolution": dict(_PURE_EVO),
     "initial_state": "psi_s", "frame": "coherent",
     "target_rel_phase": _HALF_PI, "duration": 1.0,
     "delta_err_grid": [round(v, 6) for v in np.linspace(-0.1, 0.1, 9)]},
    lambda cfg: [dict(T=cfg["duration"], delta_err=d)
                 for d in cfg["delta_err_grid"]],
    run_gate_point,
)

_register(
    "loading",
    "Adiabatic loading of both KPOs from vacuum by a pump ramp, with and "
    "without an auxiliary detuning ramp and the always-on coupling.",
    {"params": {"n_max": 20}, "evolution": dict(_PURE_EVO), "p_max": 4.0,
     "j_grid": [0.0, 0.2], "delta_max_grid": [0.0, 3.0],
     "t_grid": [1.0, 2.0, 3.0, 5.0, 8.0]},
    lambda cfg: _product_grid(j=cfg["j_grid"], delta_max=cfg["delta_max_grid"],
                              T=cfg["t_grid"]),
    run_loading_point,
)

_register(
    "wigner-snapshot",
    "Wigner maps of cat ground states for two pump phases and of "
    "rotation-control final states.",
    {"params": {"p": 7.0, "n_max": 30}, "evolution": dict(_PURE_EVO),
     "wigner": {"extent": 6.0, "points": 121, "eval_n_max": 160},
     "snapshots": [
         {"label": "cat_theta0", "kind": "cat", "theta": 0.0},
         {"label": "cat_theta_pi4", "kind": "cat", "theta": math.pi / 4},
         {"label": "rotation_nocd_T0.6", "kind": "rotation-final", "T": 0.6,
          "cd": False},
         {"label": "rotation_nocd_T1.5", "kind": "rotation-final", "T": 1.5,
          "cd": False},
     ]},
    lambda cfg: [dict(snapshot=s) for s in cfg["snapshots"]],
    run_wigner_point,
)


def list_experiments() -> list[tuple[str, str]]:
    return [(name, exp.description) for name, exp in REGISTRY.items()]


# ---------------------------------------------------------------------------
# sweep driver


@dataclass
class RunResult:
    experiment: str
    config: dict
    columns: list
    rows: list
    manifest: dict
    n_failed: int
    audit_flags: list = field(default_factory=list)
    wigner_grids: dict = field(default_factory=dict)


def _run_point_task(args):
    name, cfg, index, point, strict = args
    exp = REGISTRY[name]
    started = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", TruncationWarning)
            metrics = exp.run_point(cfg, point, strict)
        for w in caught:
            if issubclass(w.category, TruncationWarning):
                metrics.setdefault("error", f"truncation: {w.message}")
        metrics["status"] = "ok"
    except KposimError as exc:
        metrics = {"status": "failed",
                   "error": f"{type(exc).__name__}: {exc}"}
    metrics["_wall_time"] = time.perf_counter() - started
    return index, metrics


def _make_row(name, cfg, index, point, metrics) -> dict:
    params = cfg.get("params", {})
    row = {col: "" for col in CSV_COLUMNS}
    row.update(experiment=name, grid_index=index,
               n_max=params.get("n_max", 30),
               method=cfg.get("evolution", {}).get("method", "rk4_fixed"),
               step=cfg.get("evolution", {}).get("step", ""),
               tol=cfg.get("evolution", {}).get("tol", ""))
    for key in ("p", "j", "r", "kappa", "gamma_p", "xi_cd", "delta_err"):
        if key in params:
            row[key] = params[key]
    if "target_rel_phase" in cfg:
        row["target_rel_phase"] = cfg["target_rel_phase"]
    for key, val in point.items():
        if key in CSV_COLUMNS:
            row[key] = val
    for key, val in metrics.items():
        if key in CSV_COLUMNS:
            row[key] = val
    return row


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def run_experiment(name: str, overrides: dict | None = None,
                   out_dir=None, workers: int = 1, audit: bool = False,
                   strict_truncation: bool = False) -> RunResult:
    cfg = build_config(name, overrides)
    exp = REGISTRY[name]
    grid = exp.build_grid(cfg)
    if not grid:
        raise ConfigError(f"experiment {name} produced an empty grid")

    started = time.perf_counter()
    tasks = [(name, cfg, i, pt, strict_truncation)
             for i, pt in enumerate(grid)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(_run_point_task, tasks))
    else:
        results = dict(map(_run_point_task, tasks))

    rows, wigner_grids, point_times = [], {}, []
    n_failed = 0
    for i, point in enumerate(grid):
        metrics = results[i]
        point_times.append(metrics.pop("_wall_time"))
        grid_out = metrics.pop("_wigner_grid", None)
        if grid_out is not None:
            wigner_grids[metrics["wigner_file"]] = grid_out
        if metrics.get("status") == "failed":
            n_failed += 1
        rows.append(_make_row(name, cfg, i, point, metrics))

    audit_flags = convergence_audit(name, cfg, grid, rows) if audit else []

    manifest = {
        "experiment": name,
        "description": exp.description,
        "schema_version": SCHEMA_VERSION,
        "code_version": __version__,
        "config": cfg,
        "columns": CSV_COLUMNS,
        "column_notes": COLUMN_NOTES,
        "units": "all rates and times in units where the Kerr coefficient K=1 "
                 "(times in 1/K)",
        "determinism": "CSV bytes are a pure function of the config; wall "
                       "times are recorded here only",
        "grid_note": "default grids are desk-scale choices, not prescribed "
                     "by the reproduced protocols",
        "n_points": len(grid),
        "n_failed": n_failed,
        "wall_time_s": time.perf_counter() - started,
        "point_wall_times_s": point_times,
        "audit": {"ran": audit, "flags": audit_flags},
    }

    result = RunResult(name, cfg, CSV_COLUMNS, rows, manifest, n_failed,
                       audit_flags, wigner_grids)
    if out_dir is not None:
        write_outputs(result, out_dir)
    return result


def write_outputs(result: RunResult, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{result.experiment}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_fmt(row[c]) for c in result.columns])
    with open(out / f"{result.experiment}.manifest.json", "w") as fh:
        json.dump(result.manifest, fh, indent=2, default=str)
        fh.write("\n")
    for fname, grid in result.wigner_grids.items():
        with open(out / fname, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "y", "W"])
            for iy, y in enumerate(grid.ys):
                for ix, x in enumerate(grid.xs):
                    writer.writerow([_fmt(float(x)), _fmt(float(y)),
                                     _fmt(float(grid.values[iy, ix]))])


# ---------------------------------------------------------------------------
# convergence audit


def _audit_refined_config(cfg: dict) -> dict:
    refined = json.loads(json.dumps(cfg))
    params = refined.setdefault("params", {})
    params["n_max"] = 2 * params.get("n_max", 30)
    evo = refined.setdefault("evolution", {})
    if evo.get("method", "rk4_fixed") == "rk4_fixed":
        evo["step"] = evo.get("step", 1e-4) / 2.0
    else:
        evo["tol"] = max(evo.get("tol", 1e-8) / 100.0, 1e-14)
    return refined


_PHASE_COLUMNS = ["phi_00", "phi_01", "phi_10", "phi_11"]


def convergence_audit(name: str, cfg: dict, grid: list, rows: list) -> list:
    """Re-run the first and last grid points with n_max doubled and the step
    halved; flag metric shifts beyond the audit tolerances."""
    refined_cfg = _audit_refined_config(cfg)
    flags = []
    for index in sorted({0, len(grid) - 1}):
        if rows[index]["status"] != "ok":
            continue
        _, refined = _run_point_task((name, refined_cfg, index, grid[index],
                                      False))
        if refined.get("status") != "ok":
            flags.append({"grid_index": index, "metric": "status",
                          "base": "ok", "refined": refined.get("error", "")})
            continue
        base_row = rows[index]
        shift = abs(refined["fidelity"] - base_row["fidelity"])
        if shift > AUDIT_FIDELITY_TOL:
            flags.append({"grid_index": index, "metric": "fidelity",
                          "base": base_row["fidelity"],
                          "refined": refined["fidelity"], "shift": shift})
        for col in _PHASE_COLUMNS:
            if base_row[col] == "" or col not in refined:
                continue
            dphi = abs(wrap_phase(refined[col] - base_row[col]))
            if dphi > AUDIT_PHASE_TOL:
                flags.append({"grid_index": index, "metric": col,
                              "base": base_row[col], "refined": refined[col],
                              "shift": dphi})
    return flags
