"""
Dataset Serialization
---------------------
Binary layout (little-endian):

  8 bytes   magic b"LOGREGD1"
  uint64    n, J, p, seed, regularizer (0 convex, 1 nonconvex)
  float64   rho, sigma
  float64   features (n * J * p), labels (n * J), ground truth (p)
"""

import logging
import os

import numpy as np

from problems.logistic import LogisticProblem, Regularizer

logger = logging.getLogger(__name__)

MAGIC = b"LOGREGD1"
_REGULARIZER_CODES = {Regularizer.CONVEX: 0, Regularizer.NONCONVEX: 1}


def save_dataset(prob: LogisticProblem, path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    n, J, p = prob.features.shape
    header = np.array([n, J, p, prob.seed, _REGULARIZER_CODES[prob.regularizer]], dtype="<u8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(header.tobytes())
        f.write(np.array([prob.rho, prob.sigma], dtype="<f8").tobytes())
        for block in (prob.features, prob.labels, prob.ground_truth):
            f.write(np.ascontiguousarray(block, dtype="<f8").tobytes())
    logger.info(f"Dataset saved: {path} (n={n}, J={J}, p={p})")


def load_dataset(path: str) -> LogisticProblem:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Dataset not found: {path}")
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:8] != MAGIC:
        raise ValueError(f"{path} is not a dataset file (bad magic)")
    n, J, p, seed, reg_code = (int(v) for v in np.frombuffer(raw, dtype="<u8", count=5, offset=8))
    floats = np.frombuffer(raw, dtype="<f8", offset=48)
    expected = 2 + n * J * p + n * J + p
    if floats.size != expected:
        raise ValueError(f"{path} holds {floats.size} floats, expected {expected}")
    rho, sigma = float(floats[0]), float(floats[1])
    features = floats[2:2 + n * J * p].reshape(n, J, p).copy()
    labels = floats[2 + n * J * p:2 + n * J * p + n * J].reshape(n, J).copy()
    ground_truth = floats[2 + n * J * p + n * J:].copy()
    regularizer = {v: k for k, v in _REGULARIZER_CODES.items()}[reg_code]
    return LogisticProblem(
        features=features,
        labels=labels,
        rho=rho,
        regularizer=regularizer,
        seed=seed,
        sigma=sigma,
        ground_truth=ground_truth,
    )
