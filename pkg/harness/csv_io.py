"""
Trace CSV I/O
-------------
One CSV per run. The file opens with the fully resolved configuration as
``# ``-prefixed YAML lines, so a run can be regenerated from its output
alone, followed by a header row and one row per recorded iteration.
"""

import io
import logging
import os
import tempfile
from typing import Sequence

import pandas as pd
import yaml

from harness.config import ExperimentConfig, dump_config, validate_config
from metrics.records import COLUMNS, MetricsRecord

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
HEADER_PREFIX = "# "


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def trace_frame(trace: Sequence[MetricsRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.as_row() for r in trace], columns=COLUMNS)


def frame_to_csv(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")


def write_trace_csv(path: str, config: ExperimentConfig, trace: Sequence[MetricsRecord]) -> None:
    header = "".join(f"{HEADER_PREFIX}{line}\n" for line in dump_config(config).splitlines())
    atomic_write_text(path, header + frame_to_csv(trace_frame(trace)))
    logger.info(f"Wrote {len(trace)} records to {path}")


def _split(path: str) -> tuple[str, str]:
    with open(path, "r") as f:
        lines = f.read().splitlines(keepends=True)
    n_header = 0
    while n_header < len(lines) and lines[n_header].startswith("#"):
        n_header += 1
    header = "".join(line[len(HEADER_PREFIX):] if line.startswith(HEADER_PREFIX) else line[1:] for line in lines[:n_header])
    return header, "".join(lines[n_header:])


def read_trace_csv(path: str) -> tuple[dict, pd.DataFrame]:
    """(embedded config mapping, trace frame)."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Trace not found: {path}")
    header, body = _split(path)
    config = yaml.safe_load(header) or {}
    df = pd.read_csv(io.StringIO(body))
    missing = [c for c in COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    return config, df


def load_config_from_csv(path: str) -> ExperimentConfig:
    header, _ = _split(path)
    if not header.strip():
        raise ValueError(f"{path}: no embedded configuration")
    return validate_config(yaml.safe_load(header), path)
