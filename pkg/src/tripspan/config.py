from __future__ import annotations

import os
from dataclasses import dataclass, field

BUDGET_ENV = "TRIPSPAN_NODE_BUDGET"
DEFAULT_NODE_BUDGET = 50_000_000

FORMATS = ("json", "csv", "svg")


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_NODE_BUDGET
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{BUDGET_ENV} must be positive, got {raw!r}")
    return value


@dataclass(frozen=True)
class RunConfig:
    node_budget: int = field(default_factory=default_budget)
    worker_count: int = 1
    window_radius: int = 3
    seed: int = 0
    output_format: str = "json"

    def __post_init__(self):
        if self.node_budget <= 0:
            raise ValueError("node_budget must be positive")
        if self.worker_count <= 0:
            raise ValueError("worker_count must be positive")
        if self.window_radius <= 0:
            raise ValueError("window_radius must be positive")
        if self.output_format not in FORMATS:
            raise ValueError(f"unknown output format {self.output_format!r}")
