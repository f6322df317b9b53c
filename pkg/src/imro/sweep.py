"""One-parameter sensitivity sweeps over the planners."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .influence import make_params
from .netgraph import SocialGraph, load_graph
from .planner import CampaignConfig, plan_value

SWEEPABLE = ("p0", "alpha", "beta")
CSV_HEADER = ["param", "value", "model", "method", "expected_clicks"]


@dataclass
class SweepSpec:
    parameter: str
    values: list
    model: str = "gim"
    method: str = "sdp"
    graph_ref: str = "synth1"
    stages: int = 3
    budget: int = 5
    fixed_params: dict = field(default_factory=lambda: {"p0": 0.25, "alpha": 0.25, "beta": 0.0})

    def __post_init__(self):
        self.model = self.model.lower()
        self.method = self.method.lower()
        if self.parameter not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.parameter!r}; choose from {SWEEPABLE}")
        if not self.values:
            raise ValueError("sweep values must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        if self.parameter == "beta" and self.model != "nim":
            raise ValueError("a beta sweep requires the NIM model")

    def params_at(self, value: float):
        p = dict(self.fixed_params)
        p[self.parameter] = value
        return make_params(self.model, p.get("p0", 0.25), p.get("alpha", 0.0), p.get("beta", 0.0))


def _row(spec: SweepSpec, graph: SocialGraph, value: float) -> float:
    cfg = CampaignConfig(spec.stages, spec.budget, spec.params_at(value))
    return plan_value(spec.method, cfg, graph).expected_clicks


def _row_task(args):
    return _row(*args)


def run_sweep(spec: SweepSpec, graph: SocialGraph | None = None, workers: int = 1) -> list:
    """Return ``[(value, expected_clicks), ...]`` in the order of ``spec.values``."""
    if graph is None:
        graph = load_graph(spec.graph_ref)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            clicks = list(pool.map(_row_task, [(spec, graph, v) for v in spec.values]))
    else:
        clicks = [_row(spec, graph, v) for v in spec.values]
    return list(zip(spec.values, clicks))


def sweep_csv(spec: SweepSpec, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for value, clicks in rows:
        w.writerow([spec.parameter, repr(float(value)), spec.model.upper(), spec.method.upper(),
                    repr(float(clicks))])
    return buf.getvalue()


def parse_values(text: str) -> list:
    """Parse ``lo:hi:step`` (inclusive, 1e-9 tolerance) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range {text!r} must be lo:hi:step")
        lo, hi, step = (float(x) for x in parts)
        if step <= 0:
            raise ValueError("range step must be positive")
        out = []
        k = 0
        while lo + k * step <= hi + 1e-9:
            out.append(round(lo + k * step, 12))
            k += 1
        return out
    return [float(x) for x in text.split(",") if x.strip()]
