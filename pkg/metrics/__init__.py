"""Per-iteration trace metrics."""

from metrics.records import (
    COLUMNS,
    MetricsRecord,
    consensus_error,
    record,
    tracking_error,
    tracking_gap,
    weighted_average,
)

__all__ = [
    "COLUMNS",
    "MetricsRecord",
    "consensus_error",
    "record",
    "tracking_error",
    "tracking_gap",
    "weighted_average",
]
