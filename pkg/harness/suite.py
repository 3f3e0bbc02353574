"""
Experiment Suites
-----------------
A suite runs several named variants of one base experiment on the same
problem instance and graph, optionally across a list of seeds. Members may
override algorithm and experiment settings but never ``problem.*`` or
``graph.*``. Members run in parallel under joblib (``N_JOBS``); every member
is deterministic on its own, so results do not depend on the worker count.

Outputs: one CSV (and SVG) per member and seed, ``comparison.csv`` (all
traces in long form), ``summary.csv`` (final metric and bits per seed plus
their mean and min) and ``overlay.svg``.
"""

import logging
import os
from typing import Any, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from harness.config import ConfigError, ExperimentConfig, format_errors, apply_overrides, read_yaml, validate_config
from harness.csv_io import atomic_write_text, frame_to_csv, trace_frame
from harness.experiment import ExperimentResult, build_instance, run_experiment
from harness.plots import metric_for_mode, plot_traces

logger = logging.getLogger(__name__)

SHARED_SECTIONS = ("problem.", "graph.")


class SuiteMember(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., min_length=1)
    overrides: dict[str, Any] = Field(default_factory=dict, description="Dotted keys applied to the base config")

    @field_validator("overrides")
    @classmethod
    def check_shared(cls, v):
        for key in v:
            if key.startswith(SHARED_SECTIONS) or key in ("problem", "graph"):
                raise ValueError(f"Override '{key}' would change the shared problem or graph")
        return v


class SuiteConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "suite"
    base: str = Field(..., description="Base experiment config, relative to the suite file")
    base_overrides: dict[str, Any] = Field(default_factory=dict)
    members: list[SuiteMember] = Field(..., min_length=1)
    seeds: Optional[list[int]] = None
    out_dir: str = "outputs/suite"
    svg: bool = True

    @model_validator(mode="after")
    def check_names(self):
        names = [m.name for m in self.members]
        if len(set(names)) != len(names):
            raise ValueError(f"Member names must be unique: {names}")
        if self.seeds is not None and (not self.seeds or len(set(self.seeds)) != len(self.seeds)):
            raise ValueError("seeds must be a non-empty list of distinct integers")
        return self


def load_suite(path: str, overrides: Optional[dict[str, Any]] = None) -> tuple[SuiteConfig, ExperimentConfig]:
    """Suite definition and its validated base experiment (``overrides`` apply to the base)."""
    data, root = read_yaml(path)
    try:
        suite = SuiteConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(format_errors(e, path, root)) from e
    base_path = os.path.join(os.path.dirname(os.path.abspath(path)), suite.base)
    base_data, base_root = read_yaml(base_path)
    merged = apply_overrides(base_data, {**suite.base_overrides, **(overrides or {})})
    return suite, validate_config(merged, base_path, base_root)


def member_configs(suite: SuiteConfig, base: ExperimentConfig) -> list[tuple[str, int, ExperimentConfig]]:
    """(member, seed, config) for every run, in member then seed order."""
    seeds = suite.seeds if suite.seeds is not None else [base.experiment.seed]
    runs = []
    for member in suite.members:
        for seed in seeds:
            name = member.name if suite.seeds is None else f"{member.name}_seed{seed}"
            data = apply_overrides(base.to_dict(), member.overrides)
            data = apply_overrides(data, {"experiment.name": name, "experiment.seed": seed})
            try:
                runs.append((member.name, seed, ExperimentConfig.model_validate(data)))
            except ValidationError as e:
                raise ConfigError(f"Suite member '{member.name}': {e}") from e
    return runs


def _summary(runs, results: list[ExperimentResult], metric: str) -> pd.DataFrame:
    rows = {}
    for (member, seed, _), res in zip(runs, results):
        row = rows.setdefault(member, {"member": member})
        last = res.trace[-1] if res.trace else None
        row[f"final_{metric}_seed{seed}"] = getattr(last, metric) if last else np.nan
        row[f"bits_seed{seed}"] = last.cumulative_bits if last else 0
        row["diverged"] = row.get("diverged", False) or res.status != 0
    df = pd.DataFrame(list(rows.values()))
    finals = df[[c for c in df.columns if c.startswith(f"final_{metric}_seed")]]
    bits = df[[c for c in df.columns if c.startswith("bits_seed")]]
    df[f"final_{metric}_mean"] = finals.mean(axis=1)
    df[f"final_{metric}_min"] = finals.min(axis=1)
    df["bits_mean"] = bits.mean(axis=1)
    return df


def run_suite(
    suite: SuiteConfig,
    base: ExperimentConfig,
    out_dir: Optional[str] = None,
    svg: Optional[bool] = None,
    n_jobs: Optional[int] = None,
) -> tuple[int, list[ExperimentResult]]:
    """Run every member; returns (status, results) with status 1 if any member diverged."""
    out_dir = out_dir or suite.out_dir
    svg = suite.svg if svg is None else svg
    n_jobs = n_jobs if n_jobs is not None else int(os.environ.get("N_JOBS", 1))
    os.makedirs(out_dir, exist_ok=True)

    runs = member_configs(suite, base)
    instance = build_instance(base)
    logger.info(f"Suite '{suite.name}': {len(runs)} runs on {n_jobs} worker(s)")
    results = Parallel(n_jobs=n_jobs)(
        delayed(run_experiment)(cfg, out_dir, svg, instance) for _, _, cfg in runs
    )

    metric = metric_for_mode(base.experiment.mode)
    frames = []
    for (member, seed, _), res in zip(runs, results):
        df = trace_frame(res.trace)
        df.insert(0, "seed", seed)
        df.insert(0, "member", member)
        frames.append(df)
    atomic_write_text(os.path.join(out_dir, "comparison.csv"), frame_to_csv(pd.concat(frames, ignore_index=True)))
    atomic_write_text(os.path.join(out_dir, "summary.csv"), frame_to_csv(_summary(runs, results, metric)))

    if svg:
        first_seed = {}
        for (member, _, _), res in zip(runs, results):
            first_seed.setdefault(member, trace_frame(res.trace))
        plot_traces(first_seed, metric, os.path.join(out_dir, "overlay.svg"), suite.name)

    failed = [r.name for r in results if r.status != 0]
    if failed:
        logger.error(f"Diverged runs: {failed}")
    logger.info(f"Suite '{suite.name}' complete; outputs in {out_dir}")
    return (1 if failed else 0), results
