"""CSV writers for distributions, spread trajectories and interval scans."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from .observables import Distribution, SpreadRecord
from .scan import ScanResult

__all__ = [
    "fmt",
    "emit_distribution",
    "emit_trajectory",
    "emit_scan",
    "read_csv",
    "DISTRIBUTION_HEADER",
    "TRAJECTORY_HEADER",
    "SCAN_HEADER",
    "SURFACE_HEADER",
]

DISTRIBUTION_HEADER = ["offset", "prob"]
TRAJECTORY_HEADER = ["step", "mean", "stddev", "rms", "norm_error"]
SCAN_HEADER = ["k", "tau_over_T", "stddev", "alpha", "label"]
SURFACE_HEADER = ["k", "tau_over_T", "step", "stddev", "stddev_over_sqrt_t"]


def fmt(x) -> str:
    """17 significant digits, enough to round-trip any double; ints stay ints."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return format(float(x) + 0.0, ".17g")


def _writer(sink: TextIO, comments: Iterable[str]):
    for line in comments:
        sink.write(f"# {line}\n")
    return csv.writer(sink, lineterminator="\n")


def emit_distribution(dist: Distribution, sink: TextIO, classical: Optional[Distribution] = None,
                      comments: Sequence[str] = ()) -> None:
    """
    Write ``offset,prob[,classical_prob]`` rows in increasing offset.

    Only offsets with the parity of the step count are written; the classical
    overlay must be for the same step count.
    """
    w = _writer(sink, comments)
    mask = dist.parity_mask()
    header = DISTRIBUTION_HEADER + (["classical_prob"] if classical is not None else [])
    w.writerow(header)
    ref = None
    if classical is not None:
        if classical.step != dist.step:
            raise ValueError("classical overlay is for a different step count")
        ref = dict(zip(classical.offsets.tolist(), classical.probabilities.tolist()))
    for off, p in zip(dist.offsets[mask], dist.probabilities[mask]):
        row = [fmt(off), fmt(p)]
        if ref is not None:
            row.append(fmt(ref.get(int(off), 0.0)))
        w.writerow(row)


def emit_trajectory(records: Sequence[SpreadRecord], sink: TextIO, comments: Sequence[str] = ()) -> None:
    if not records:
        raise ValueError("no records to write")
    w = _writer(sink, comments)
    w.writerow(TRAJECTORY_HEADER)
    for r in records:
        w.writerow([fmt(r.step), fmt(r.mean), fmt(r.stddev), fmt(r.rms_displacement), fmt(r.norm_error)])


def emit_scan(result: ScanResult, sink: TextIO, surface: bool = False, comments: Sequence[str] = ()) -> None:
    """
    Write a scan table, or with ``surface=True`` one row per (cell, step).

    Failed cells are written with empty numeric fields and label ``error``.
    """
    w = _writer(sink, comments)
    if not surface:
        w.writerow(SCAN_HEADER)
        for c in result.cells:
            if c.error is not None:
                w.writerow([fmt(c.k), fmt(c.tau_over_T), "", "", "error"])
                continue
            w.writerow([fmt(c.k), fmt(c.tau_over_T), fmt(c.final.stddev),
                        fmt(c.alpha) if c.alpha is not None else "", c.label or ""])
        return
    w.writerow(SURFACE_HEADER)
    for c in result.cells:
        if c.records is None:
            if c.error is None:
                raise ValueError("surface output needs per-step records (record_per_step=True)")
            continue
        for r in c.records:
            norm = r.stddev / np.sqrt(r.step) if r.step > 0 else 0.0
            w.writerow([fmt(c.k), fmt(c.tau_over_T), fmt(r.step), fmt(r.stddev), fmt(norm)])


def read_csv(source) -> tuple[list[str], list[list[str]], list[str]]:
    """
    Parse a file written by this module.

    Returns ``(header, rows, comments)`` with comment text stripped of the ``# `` prefix.
    """
    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    comments, body = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line[2:] if line.startswith("# ") else line[1:])
        elif line:
            body.append(line)
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return rows[0], rows[1:], comments
