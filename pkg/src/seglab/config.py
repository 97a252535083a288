"""Central defaults for every tunable the package exposes.

All solver and game constants live here so the CLI, the server and the
library agree on one schema.  A JSON config file may override any field;
explicit CLI flags override the file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

# Sentinel scale for "unreachable / excluded" field values.
LARGE = 1e9
# Values at or above this threshold are treated as unreachable.
UNREACHABLE = 1e8

# Velocity regularization: blend width is EPS_CELLS * h, floor speed V_MIN.
EPS_CELLS = 16.0
V_MIN = 1.0 / 100.0

# Explicit time stepping: dt <= h / (CFL_DENOM * max speed).
CFL_DENOM = 16.0
# Stationary-pursuer experiments step at h / STATIONARY_DT_DENOM.
STATIONARY_DT_DENOM = 20.0

# Discrete game: one turn lasts ACTION_DT_FACTOR * h / f_e so the slower
# evader can reach its full 8-neighborhood.
ACTION_DT_FACTOR = 1.5

# Softmax guard: exponents are clamped here before exponentiation.
SOFTMAX_CLAMP = 50.0

# Fast sweeping stopping rule.
SWEEP_TOL = 1e-12
SWEEP_MAX = 1000

# Iterative value solves stop when the per-step L1 change drops below this.
STOP_TOL = 1e-5

# 4-D solves above this resolution need an explicit override.
MAX_VALUE_GRID = 32

# Sampled-boundary signed distance for rotated primitives.
BOUNDARY_SAMPLES = 10_000

# Gradient norms below this are treated as zero (no preferred direction).
GRAD_EPS = 1e-9


@dataclass
class RunConfig:
    """One bag of defaults shared by CLI subcommands."""

    m: int = 64
    f_p: float = 2.0
    f_e: float = 1.0
    horizon: float = 10.0
    dt: float | None = None
    stop_tol: float = STOP_TOL
    k_max: int = 100
    seed: int = 0
    # parallel sweep processes; 0 means one per available core
    workers: int = 0
    mcts_iterations: int = 1000
    mcts_epsilon: float = 0.25
    mcts_alpha: float = 0.3
    mcts_tau: float = 1.0
    aux_mode: str = "visibility"
    allow_large: bool = False

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        raw = json.loads(Path(path).read_text())
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def override(self, **kwargs) -> "RunConfig":
        """Return a copy with every non-None kwarg applied."""
        out = RunConfig(**self.__dict__)
        for key, val in kwargs.items():
            if val is not None:
                if not hasattr(out, key):
                    raise ValueError(f"unknown config key: {key}")
                setattr(out, key, val)
        return out
