"""Discrete-event simulator for entanglement-based quantum networks."""

from ._core import (
    AttemptRecord,
    DejmpsMap,
    ExperimentResult,
    ExperimentSpec,
    NoiseChannel,
    PairState,
    RequestOutcome,
    RequestSummary,
    RngStream,
    RunResult,
    SweepRow,
    Topology,
    apply_correction,
    apply_noise,
    bell_diagonal,
    choi_apply,
    default_spec,
    dejmps_map,
    derive_seed,
    fidelity_to_phi_plus,
    load_experiment_spec,
    load_topology,
    load_topology_file,
    pauli_twirl,
    qber_sample,
    run_experiment,
    run_simulation,
    shor_decode,
    swap_branches,
    sweep_csv_header,
    sweep_csv_row,
    teleport_choi,
    template_names,
    write_experiment_outputs,
    write_run_outputs,
)

__all__ = [
    "AttemptRecord",
    "DejmpsMap",
    "ExperimentResult",
    "ExperimentSpec",
    "NoiseChannel",
    "PairState",
    "RequestOutcome",
    "RequestSummary",
    "RngStream",
    "RunResult",
    "SweepRow",
    "Topology",
    "apply_correction",
    "apply_noise",
    "bell_diagonal",
    "choi_apply",
    "default_spec",
    "dejmps_map",
    "derive_seed",
    "fidelity_to_phi_plus",
    "load_experiment_spec",
    "load_topology",
    "load_topology_file",
    "pauli_twirl",
    "qber_sample",
    "run_experiment",
    "run_simulation",
    "shor_decode",
    "swap_branches",
    "sweep_csv_header",
    "sweep_csv_row",
    "teleport_choi",
    "template_names",
    "write_experiment_outputs",
    "write_run_outputs",
]
