"""
Single Experiment
-----------------
Builds the problem instance and communication graph from a validated
configuration, runs RCPP, and writes ``<name>.csv`` (and ``<name>.svg``)
to the output directory. A diverged run leaves its partial trace and a
``<name>.divergence.ckpt`` checkpoint behind and reports status 1.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Optional

from algorithm.checkpoint import save_checkpoint
from algorithm.rcpp import DivergenceError, run
from graph.digraph import generate_digraph
from graph.io import read_edge_list
from graph.mixing import MixingPair, build_mixing_pair, check_assumption_one
from harness.config import ConfigError, ExperimentConfig
from harness.csv_io import trace_frame, write_trace_csv
from harness.plots import metric_for_mode, plot_traces
from metrics.records import MetricsRecord
from problems.base import initial_point
from problems.io import load_dataset
from problems.logistic import LogisticProblem, generate_problem
from problems.reference import ReferenceSolution, solve_reference

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Instance:
    problem: LogisticProblem
    pair: MixingPair
    reference: Optional[ReferenceSolution] = None


@dataclass
class ExperimentResult:
    name: str
    status: int
    trace: list[MetricsRecord] = field(default_factory=list)
    csv_path: Optional[str] = None
    svg_path: Optional[str] = None
    checkpoint_path: Optional[str] = None


def build_problem(config: ExperimentConfig) -> LogisticProblem:
    pc = config.problem
    if pc.dataset:
        prob = load_dataset(pc.dataset)
        if (prob.n_agents, prob.samples_per_agent, prob.dim) != (pc.n, pc.J, pc.p):
            raise ConfigError(
                f"Dataset {pc.dataset} has (n, J, p) = {(prob.n_agents, prob.samples_per_agent, prob.dim)}, "
                f"config says {(pc.n, pc.J, pc.p)}"
            )
        if prob.rho != pc.rho or prob.regularizer != pc.regularizer:
            raise ConfigError(
                f"Dataset {pc.dataset} has rho={prob.rho:g} with the {prob.regularizer.value} regularizer, "
                f"config says rho={pc.rho:g} with the {pc.regularizer.value} regularizer"
            )
        return prob
    return generate_problem(pc.p, pc.n, pc.J, pc.sigma, pc.rho, pc.regularizer, pc.seed)


def build_pair(config: ExperimentConfig) -> MixingPair:
    gc = config.graph
    if gc.edge_list:
        graph = read_edge_list(gc.edge_list)
        if graph.n != config.problem.n:
            raise ConfigError(f"Edge list {gc.edge_list} has {graph.n} nodes, config says n={config.problem.n}")
    else:
        graph = generate_digraph(config.problem.n, gc.extra_edge_prob, gc.seed)
    pair = build_mixing_pair(graph)
    report = check_assumption_one(pair)
    if not report.ok:
        raise ConfigError("Mixing matrices violate the connectivity assumptions: " + "; ".join(report.failures))
    logger.info(f"Graph: n={graph.n}, {len(graph.edges)} edges (self-loops included)")
    return pair


def build_instance(config: ExperimentConfig, with_reference: bool = True) -> Instance:
    """Problem, mixing pair and (in residual mode) the centralized reference solution."""
    problem = build_problem(config)
    pair = build_pair(config)
    reference = None
    if with_reference and config.experiment.mode == "convex_residual":
        reference = solve_reference(problem, tol=config.experiment.reference_tol)
        logger.info(f"Reference: f*={reference.f_star:.12g} after {reference.iterations} iterations")
    return Instance(problem, pair, reference)


def run_experiment(
    config: ExperimentConfig,
    out_dir: Optional[str] = None,
    svg: Optional[bool] = None,
    instance: Optional[Instance] = None,
) -> ExperimentResult:
    out_dir = out_dir or config.experiment.out_dir
    svg = config.experiment.svg if svg is None else svg
    name = config.experiment.name
    os.makedirs(out_dir, exist_ok=True)

    if instance is None:
        instance = build_instance(config)
    X0 = initial_point(instance.problem.n_agents, instance.problem.dim, config.experiment.seed, config.experiment.shared_init)
    checkpoint_path = os.path.join(out_dir, f"{name}.ckpt") if config.experiment.checkpoint_every else None

    result = ExperimentResult(name=name, status=0)
    try:
        result.trace = run(
            instance.problem,
            instance.pair,
            config.algorithm,
            X0,
            seed=config.experiment.seed,
            reference=instance.reference,
            timing=config.experiment.wall_time,
            checkpoint_path=checkpoint_path,
            checkpoint_every=config.experiment.checkpoint_every,
        )
        result.checkpoint_path = checkpoint_path
    except DivergenceError as e:
        result.status = 1
        result.trace = e.trace
        result.checkpoint_path = os.path.join(out_dir, f"{name}.divergence.ckpt")
        if e.streams is not None:
            save_checkpoint(e.state, e.streams, result.checkpoint_path)
        logger.error(f"{name}: {e}; last finite state saved to {result.checkpoint_path}")

    result.csv_path = os.path.join(out_dir, f"{name}.csv")
    write_trace_csv(result.csv_path, config, result.trace)
    if svg and result.trace:
        result.svg_path = os.path.join(out_dir, f"{name}.svg")
        plot_traces({name: trace_frame(result.trace)}, metric_for_mode(config.experiment.mode), result.svg_path, name)
    return result
