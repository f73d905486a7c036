"""CSV emission for aggregated results."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .runner import AggregatedResult

__all__ = ["emit_csv", "format_csv", "HEADER"]

HEADER = ["t", "policy", "mean_cum_regret", "std_cum_regret"]


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def format_csv(result: AggregatedResult) -> str:
    """CSV text: one row per (policy, t), ordered by policy then t."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    timing = result.has_timing
    writer.writerow(HEADER + (["mean_select_ms"] if timing else []))
    for name in result.policies:
        mean, std = result.mean_curve(name), result.std_curve(name)
        ms = result.mean_select_ms(name) if timing else None
        for t in range(result.horizon):
            row = [t + 1, name, _fmt(mean[t]), _fmt(std[t])]
            if timing:
                row.append(_fmt(ms[t]))
            writer.writerow(row)
    return buf.getvalue()


def emit_csv(result: AggregatedResult, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(result))
    return path
