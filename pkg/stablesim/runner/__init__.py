from stablesim.runner.config_parser import (
    RunConfig, DEFAULT_TOLERANCES, EXPERIMENT_PARAMS, parse_config, load_config, grid_times,
)
from stablesim.runner.cache import EnsembleCache, read_envelope, write_envelope
from stablesim.runner.experiments import EXPERIMENTS, VERDICTS, ExperimentResult, RunContext
from stablesim.runner.orchestrator import RunReport, resolve_experiments, run
from stablesim.runner.reports import load_report, rederive_verdicts, write_report
