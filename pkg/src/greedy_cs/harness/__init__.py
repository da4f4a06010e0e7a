"""Instance generation, sweeps, reports and the command line tool."""
from .ensembles import (EnsembleKind, EnsembleSpec, ValueModel, derive_seed,
                        generate_dictionary, generate_sparse_signal, make_rng,
                        random_noise)
from .report import emit_report, plot_table, records_from_csv, records_to_csv
from .separation import (SeparationInstance, coherence_window,
                         find_separation_instance, load_instance,
                         planted_cluster, save_instance)
from .sweep import SweepConfig, TrialRecord, run_sweep, summarize
