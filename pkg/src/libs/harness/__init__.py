from .reduction import (
    ReductionContext, ReductionOutput, Transcript, reduce, hint_for_isomorphic, mixture_hint, default_block,
    UNIFORM, ERDOS_RENYI,
)
from .estimators import (
    EstimatorMode, EstimatorReport, aut_generators, log_orbit_overestimate, entropy_underestimate,
    estimate_theta, EXHAUSTIVE, SAMPLING,
)
from .instances import random_graph, random_object, relabel, rigid_pair, graph_pair, mixed_pairs, random_graph_with_aut
from .experiment import (
    Verdict, DecisionMode, DecisionRecord, ExperimentConfig, ExperimentRow, ExperimentResult, decide,
    decide_with_record, parse_experiment_config, run_experiment, write_csv, ground_truth, check_row, CSV_COLUMNS,
)
