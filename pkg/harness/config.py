"""
Experiment Configuration
------------------------
YAML experiment files validated into pydantic models. Validation errors are
reported with the file and line of the offending key. Dotted overrides
(``algorithm.gamma_x=0.3``) are applied to the raw mapping before
validation so they pass the same checks as file values.
"""

import copy
import logging
import os
from typing import Any, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from algorithm.params import RcppParams
from problems.logistic import Regularizer

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid or inconsistent configuration; the message carries path:line where known."""


class ExperimentSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "experiment"
    mode: Literal["convex_residual", "nonconvex_gradnorm"] = "convex_residual"
    seed: int = Field(0, ge=0, description="Seeds the initial point and the per-agent compression streams")
    shared_init: bool = Field(False, description="Give every agent the same initial point")
    out_dir: str = "outputs"
    svg: bool = True
    wall_time: bool = Field(False, description="Fill wall_ms; traces are then no longer byte-reproducible")
    checkpoint_every: int = Field(0, ge=0)
    reference_tol: float = Field(1e-10, gt=0)


class ProblemSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    p: int = Field(50, ge=1)
    n: int = Field(20, ge=1)
    J: int = Field(10, ge=1)
    sigma: float = Field(1.0, ge=0)
    rho: float = Field(0.01, ge=0)
    regularizer: Regularizer = Regularizer.CONVEX
    seed: int = Field(1, ge=0)
    dataset: Optional[str] = Field(None, description="Binary dataset to load instead of generating one")


class GraphSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    extra_edge_prob: float = Field(0.1, ge=0, le=1)
    seed: int = Field(3, ge=0)
    edge_list: Optional[str] = Field(None, description="Edge-list file to load instead of generating a graph")


class TheorySection(BaseModel):
    """Norm and compression constants for the step-size bound report. No defaults are assumed."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    theta_R: Optional[float] = None
    theta_C: Optional[float] = None
    delta_R2: Optional[float] = None
    delta_C2: Optional[float] = None
    C: Optional[float] = None
    delta: Optional[float] = None
    sigma2: Optional[float] = None
    sigma2_r: Optional[float] = None


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    problem: ProblemSection = Field(default_factory=ProblemSection)
    graph: GraphSection = Field(default_factory=GraphSection)
    algorithm: RcppParams = Field(default_factory=RcppParams)
    theory: Optional[TheorySection] = None

    @model_validator(mode="after")
    def check_consistency(self):
        if self.experiment.mode == "convex_residual":
            if self.problem.regularizer != Regularizer.CONVEX:
                raise ValueError("convex_residual mode requires the convex regularizer")
            if self.problem.rho <= 0:
                raise ValueError("convex_residual mode requires rho > 0")
        if isinstance(self.algorithm.step_size, list) and len(self.algorithm.step_size) != self.problem.n:
            raise ValueError(f"{len(self.algorithm.step_size)} step-sizes given for n={self.problem.n} agents")
        return self

    def to_dict(self) -> dict:
        return self.model_dump(mode="json")


def set_dotted(data: dict, dotted_key: str, value: Any) -> None:
    """data["a"]["b"] = value for key "a.b", creating intermediate mappings."""
    keys = dotted_key.split(".")
    node = data
    for key in keys[:-1]:
        if not isinstance(node.get(key), dict):
            node[key] = {}
        node = node[key]
    node[keys[-1]] = value


def apply_overrides(data: dict, overrides: dict[str, Any]) -> dict:
    merged = copy.deepcopy(data)
    for key, value in overrides.items():
        set_dotted(merged, key, value)
    return merged


def parse_override(text: str) -> tuple[str, Any]:
    """'algorithm.gamma_x=0.3' -> ('algorithm.gamma_x', 0.3); values are parsed as YAML scalars."""
    if "=" not in text:
        raise ConfigError(f"Override '{text}' must look like key.path=value")
    key, raw = text.split("=", 1)
    return key.strip(), yaml.safe_load(raw)


def _line_of(node, loc: tuple) -> Optional[int]:
    if node is None:
        return None
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                if k.value == str(key):
                    node = v
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
    return node.start_mark.line + 1


def format_errors(err: ValidationError, path: str, root) -> str:
    lines = []
    for e in err.errors():
        loc = tuple(e["loc"])
        line = _line_of(root, loc)
        where = f"{path}:{line}" if line is not None else path
        lines.append(f"{where}: {'.'.join(str(p) for p in loc) or '<root>'}: {e['msg']}")
    return "\n".join(lines)


def read_yaml(path: str) -> tuple[dict, Any]:
    """Parsed mapping and its node tree (for line numbers)."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config not found: {path}")
    with open(path, "r") as f:
        text = f.read()
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark is not None else path
        raise ConfigError(f"{where}: YAML parse error: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}:1: top level must be a mapping")
    return data, root


def validate_config(data: dict, path: str = "<config>", root=None) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(format_errors(e, path, root)) from e


def load_config(path: str, overrides: Optional[dict[str, Any]] = None) -> ExperimentConfig:
    data, root = read_yaml(path)
    if overrides:
        data = apply_overrides(data, overrides)
    config = validate_config(data, path, root)
    logger.info(f"Loaded config {path} ({config.experiment.name})")
    return config


def dump_config(config: ExperimentConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=False, default_flow_style=False)
