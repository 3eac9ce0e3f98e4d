"""CSV schema constants shared by all plot scripts.

GENERATED by gen_schema.py from the simulator's documented CSV schema —
do not edit by hand.
"""

SCHEMA_VERSION = 1

CSV_COLUMNS = [
    'experiment',
    'grid_index',
    'cd',
    'scheme',
    'channel',
    'T',
    'theta_amp',
    'p',
    'j',
    'r',
    'kappa',
    'gamma_p',
    'xi_cd',
    'delta_err',
    'delta_max',
    'target_rel_phase',
    'initial_state',
    'frame',
    'fidelity',
    'infidelity',
    'log10_infidelity',
    'phi_00',
    'phi_01',
    'phi_10',
    'phi_11',
    'rel_phi_01',
    'rel_phi_10',
    'rel_phi_11',
    'rel_phi_pred',
    'overlap_min',
    'gs_overlap',
    'wigner_file',
    'w_min',
    'w_max',
    'n_max',
    'method',
    'step',
    'tol',
    'n_steps',
    'n_rhs',
    'status',
    'error',
]

COLUMN_NOTES = {
    'cd': 'true when the velocity-proportional detuning (CD) term is applied',
    'scheme': 'coupling scheme: cd or beam-splitter',
    'channel': 'decoherence channel for single-channel sweeps: decay or dephasing',
    'T': 'control duration in units of 1/K',
    'log10_infidelity': 'log10(1 - fidelity), precomputed for plotting',
    'frame': 'computational basis for gate rows: coherent products, or their projection onto the ground manifold of H(t=0)',
    'rel_phi_10': 'phi_10 - phi_00 wrapped to (-pi, pi]',
    'rel_phi_pred': 'quadrature prediction of rel_phi_10 from the pump-phase integral',
    'overlap_min': 'smallest of the four |<ij|Psi(T)>|^2 when phases were extracted',
    'gs_overlap': "squared overlap of the row's final ground state with the J=0 one",
    'status': 'ok or failed; failed rows keep the grid point and an error column',
}
