"""
Checkpoint Format
-----------------
Little-endian binary snapshot of an RcppState plus its random streams:

  8 bytes   magic b"RCPPCKP1"
  uint64    n, p, k, cumulative_bits
  float64   X, Y, H_x, H_y, H_R, H_C, grad  (each n * p, row-major)
  uint64    byte length of the stream-state JSON
  bytes     UTF-8 JSON list of PCG64 states (x-chain streams then y-chain streams)
"""

import json
import logging
import os
import tempfile

import numpy as np

from algorithm.state import RcppState, RngStreams

logger = logging.getLogger(__name__)

MAGIC = b"RCPPCKP1"
_MATRICES = ("X", "Y", "H_x", "H_y", "H_R", "H_C", "grad")


def save_checkpoint(state: RcppState, streams: RngStreams, path: str) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    blob = json.dumps(streams.get_state()).encode("utf-8")
    header = np.array([state.n, state.dim, state.k, state.cumulative_bits], dtype="<u8")
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(MAGIC)
            f.write(header.tobytes())
            for name in _MATRICES:
                f.write(np.ascontiguousarray(getattr(state, name), dtype="<f8").tobytes())
            f.write(np.array([len(blob)], dtype="<u8").tobytes())
            f.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.debug(f"Checkpoint saved at k={state.k}: {path}")


def load_checkpoint(path: str) -> tuple[RcppState, RngStreams]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:8] != MAGIC:
        raise ValueError(f"{path} is not a checkpoint (bad magic)")
    n, p, k, bits = (int(v) for v in np.frombuffer(raw, dtype="<u8", count=4, offset=8))
    offset = 40
    block = n * p * 8
    matrices = {}
    for name in _MATRICES:
        matrices[name] = np.frombuffer(raw, dtype="<f8", count=n * p, offset=offset).reshape(n, p).copy()
        offset += block
    (blob_len,) = np.frombuffer(raw, dtype="<u8", count=1, offset=offset)
    offset += 8
    blob = raw[offset:offset + int(blob_len)]
    if len(blob) != int(blob_len):
        raise ValueError(f"{path} is truncated")
    streams = RngStreams.from_state(json.loads(blob.decode("utf-8")))
    state = RcppState(k=k, cumulative_bits=bits, **matrices)
    return state, streams
