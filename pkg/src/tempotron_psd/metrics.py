"""Evaluation results and their serialized forms.

All exports are byte-deterministic: a fixed key order for JSON, fixed
headers for CSV, and shortest-roundtrip float formatting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import Empty, InvalidConfig, LengthMismatch
from .fileio import write_text_atomic
from .neuron import MembraneTrace
from .training import TrainLog


@dataclass(frozen=True)
class EvalReport:
    """Accuracy and confusion counts of one labeled evaluation.

    ``confusion[truth][predicted]``: row 0 is neutrons, row 1 gammas.
    """

    accuracy: float
    confusion: np.ndarray
    n: int
    method: str = ""
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        confusion = np.asarray(self.confusion, dtype=np.int64)
        if confusion.shape != (2, 2):
            raise InvalidConfig("confusion matrix must be 2x2")
        confusion = confusion.copy()
        confusion.setflags(write=False)
        object.__setattr__(self, "confusion", confusion)


def _check_binary(values: np.ndarray, what: str) -> np.ndarray:
    values = np.asarray(values)
    if values.size == 0:
        raise Empty(f"no {what}")
    if not np.isin(values, (0, 1)).all():
        raise InvalidConfig(f"{what} must be 0 or 1")
    return values.astype(np.int64)


def evaluate(predicted, truth, method: str = "", config: dict | None = None) -> EvalReport:
    """Confusion counts and accuracy of binary predictions."""
    predicted = _check_binary(predicted, "predictions")
    truth = _check_binary(truth, "labels")
    if predicted.size != truth.size:
        raise LengthMismatch(f"{predicted.size} predictions for {truth.size} labels")
    confusion = np.bincount(truth * 2 + predicted, minlength=4).reshape(2, 2)
    return EvalReport(
        accuracy=float(np.trace(confusion) / truth.size),
        confusion=confusion,
        n=int(truth.size),
        method=method,
        config=dict(config or {}),
    )


def agreement(a, b) -> float:
    """Fraction of positions where two prediction vectors agree."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size != b.size:
        raise LengthMismatch(f"prediction lengths differ: {a.size} vs {b.size}")
    if a.size == 0:
        raise Empty("nothing to compare")
    return float(np.mean(a == b))


def report_to_dict(report: EvalReport) -> dict:
    out = {
        "method": report.method,
        "accuracy": report.accuracy,
        "n": report.n,
        "confusion": [[int(c) for c in row] for row in report.confusion],
    }
    if report.config:
        out["config"] = report.config
    return out


def _f(x: float) -> str:
    return repr(float(x))


def _report_csv(report: EvalReport) -> str:
    head = "method,accuracy,n,true_neutron,false_gamma,false_neutron,true_gamma"
    c = report.confusion
    row = f"{report.method},{_f(report.accuracy)},{report.n},{c[0, 0]},{c[0, 1]},{c[1, 0]},{c[1, 1]}"
    return head + "\n" + row + "\n"


def _log_csv(log: TrainLog) -> str:
    lines = ["epoch,lr,train_loss,val_loss"]
    for e in range(log.epochs):
        lines.append(f"{e + 1},{_f(log.lr[e])},{_f(log.train_loss[e])},{_f(log.val_loss[e])}")
    return "\n".join(lines) + "\n"


def _log_dict(log: TrainLog) -> dict:
    return {
        "epochs": log.epochs,
        "best_epoch": log.best_epoch,
        "lr": [float(x) for x in log.lr],
        "train_loss": [float(x) for x in log.train_loss],
        "val_loss": [float(x) for x in log.val_loss],
    }


def _hist_csv(edges: np.ndarray, counts: np.ndarray) -> str:
    lines = ["bin_low,bin_high,count"]
    for i in range(len(counts)):
        lines.append(f"{_f(edges[i])},{_f(edges[i + 1])},{int(counts[i])}")
    return "\n".join(lines) + "\n"


def _trace_csv(trace: MembraneTrace) -> str:
    lines = ["t,V"]
    for t, v in zip(trace.times, trace.potentials):
        lines.append(f"{_f(t)},{_f(v)}")
    return "\n".join(lines) + "\n"


def _trace_dict(trace: MembraneTrace) -> dict:
    return {
        "t": [float(x) for x in trace.times],
        "V": [float(x) for x in trace.potentials],
        "v_max": float(trace.v_max),
        "t_max": float(trace.t_max),
        "fired": bool(trace.fired),
    }


def export_report(obj, path, format: str = "json") -> None:
    """Write a report, train log, histogram pair, or membrane trace.

    CSV layouts: reports are one header plus one row; logs are
    ``epoch,lr,train_loss,val_loss``; histograms are
    ``bin_low,bin_high,count``; traces are ``t,V``.
    """
    if format not in ("json", "csv"):
        raise InvalidConfig(f"format must be json or csv, got {format!r}")
    if isinstance(obj, EvalReport):
        payload = report_to_dict(obj) if format == "json" else None
        text = _report_csv(obj) if format == "csv" else None
    elif isinstance(obj, TrainLog):
        payload = _log_dict(obj) if format == "json" else None
        text = _log_csv(obj) if format == "csv" else None
    elif isinstance(obj, MembraneTrace):
        payload = _trace_dict(obj) if format == "json" else None
        text = _trace_csv(obj) if format == "csv" else None
    elif isinstance(obj, tuple) and len(obj) == 2:
        edges, counts = np.asarray(obj[0]), np.asarray(obj[1])
        if edges.size != counts.size + 1:
            raise InvalidConfig("histogram needs bins+1 edges")
        payload = {"edges": [float(x) for x in edges], "counts": [int(x) for x in counts]}
        text = _hist_csv(edges, counts)
        if format == "json":
            text = None
    else:
        raise InvalidConfig(f"cannot export object of type {type(obj).__name__}")
    if format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    write_text_atomic(path, text)
