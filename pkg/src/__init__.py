from .config import DEFAULT_KERNEL, DEFAULT_SEED, solver_settings, load_config_file
from .errors import (ArgumentError, InvalidKernelError, SingularPointError, DegenerateGapError,
                     SamplerError, ProblemTooLargeError, OracleTooLargeError, FlowSolverError,
                     ExperimentError)
from .kernels import KernelKind, KernelProfile, NormalizedKernel, profile_by_name, unit_ball_volume
from .measures import DiscreteMeasure, DiscreteVarifold, load_csv, save_csv
from .geometry import ShapeModel, shape_by_name
from .sampling import SampleBatch, SplitSample, SpatialIndex, sample, sample_split, split
from .estimators import (EstimatorConfig, VarifoldVariant, bandwidth_rule, density_estimate,
                         measure_estimate, varifold_estimate, split_varifold_estimate,
                         projector_truncate, snap_to_projector)
from .metrics import (Ball, FlatMetricProblem, MetricSpaceView, bl_distance, bl_distance_localized,
                      coarsen, flat_norm, lp_oracle, varifold_metric)
from .harness import (ExperimentConfig, RateResult, emit_results, run_density_experiment,
                      run_fluctuation_experiment, run_measure_experiment, run_rate_experiment, run_tangent_experiment)
from .interface import UserInterface, ConsoleInterface
from .utils import normalize_shape_name

__all__ = [
    "DEFAULT_KERNEL", "DEFAULT_SEED", "solver_settings", "load_config_file",
    "ArgumentError", "InvalidKernelError", "SingularPointError", "DegenerateGapError",
    "SamplerError", "ProblemTooLargeError", "OracleTooLargeError", "FlowSolverError",
    "ExperimentError",
    "KernelKind", "KernelProfile", "NormalizedKernel", "profile_by_name", "unit_ball_volume",
    "DiscreteMeasure", "DiscreteVarifold", "load_csv", "save_csv",
    "ShapeModel", "shape_by_name",
    "SampleBatch", "SplitSample", "SpatialIndex", "sample", "sample_split", "split",
    "EstimatorConfig", "VarifoldVariant", "bandwidth_rule", "density_estimate", "measure_estimate",
    "varifold_estimate", "split_varifold_estimate", "projector_truncate", "snap_to_projector",
    "Ball", "FlatMetricProblem", "MetricSpaceView", "bl_distance", "bl_distance_localized",
    "coarsen", "flat_norm", "lp_oracle", "varifold_metric",
    "ExperimentConfig", "RateResult", "emit_results", "run_density_experiment", "run_fluctuation_experiment",
    "run_measure_experiment", "run_rate_experiment", "run_tangent_experiment",
    "UserInterface", "ConsoleInterface", "normalize_shape_name",
]
