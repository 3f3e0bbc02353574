import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from graph.digraph import generate_digraph  # noqa: E402
from graph.mixing import build_mixing_pair  # noqa: E402
from problems.logistic import Regularizer, generate_problem  # noqa: E402
from problems.reference import solve_reference  # noqa: E402


@pytest.fixture
def small_problem():
    # n=5 agents, J=4 samples each, p=6 features
    return generate_problem(p=6, n=5, J=4, sigma=1.0, rho=0.1, regularizer=Regularizer.CONVEX, seed=11)


@pytest.fixture
def small_nonconvex_problem():
    return generate_problem(p=6, n=5, J=4, sigma=1.0, rho=0.1, regularizer=Regularizer.NONCONVEX, seed=11)


@pytest.fixture
def small_pair():
    return build_mixing_pair(generate_digraph(5, 0.3, seed=2))


@pytest.fixture(scope="session")
def small_reference():
    prob = generate_problem(p=6, n=5, J=4, sigma=1.0, rho=0.1, regularizer=Regularizer.CONVEX, seed=11)
    return solve_reference(prob)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config_path(tmp_path):
    """A fast experiment config on a small instance, written to disk."""
    text = """
experiment:
  name: tiny
  mode: convex_residual
  seed: 3
  out_dir: {out}
  svg: false
problem:
  p: 6
  n: 5
  J: 4
  sigma: 1.0
  rho: 0.1
  regularizer: convex
  seed: 11
graph:
  extra_edge_prob: 0.3
  seed: 2
algorithm:
  alpha_x: 0.5
  alpha_y: 0.5
  gamma_x: 0.5
  gamma_y: 0.5
  step_size: 0.2
  schedule:
    a0: 1.0
    a: 0.9
  x_compressor:
    kind: inf_norm_quant
    bits: 2
  y_compressor:
    kind: inf_norm_quant
    bits: 2
  iterations: 60
  record_every: 5
""".format(out=tmp_path / "out")
    path = tmp_path / "experiment.yaml"
    path.write_text(text)
    return path
