"""Shared numeric limits and tolerances.

The dense-matrix qubit cap can be raised or lowered per process with the
``GAPFORGE_NMAX`` environment variable; everything else is a constant.
"""

import os

DEFAULT_N_MAX = 12

# Structural checks (Hermiticity, embedding identities) run at 1e-12;
# spectral comparisons leave headroom above eigensolver error.
STRUCT_TOL = 1e-12
SPECTRAL_TOL = 1e-8
PSD_TOL = 1e-10
RESIDUAL_TOL = 1e-9

# Exhaustive adversary enumeration is capped at 2**ADVERSARY_CAP replays;
# past the cap callers fall back to seeded sampling.
ADVERSARY_CAP = 14
ADVERSARY_SAMPLES = 1000

# Path-tree depth guard for adaptive machines.
Q_MAX_LIMIT = 20


def n_max() -> int:
    """Largest qubit count for which dense embedding is allowed."""
    raw = os.environ.get("GAPFORGE_NMAX", "")
    if raw.strip():
        try:
            value = int(raw)
        except ValueError as exc:
            raise ValueError(f"GAPFORGE_NMAX must be an integer, got {raw!r}") from exc
        if value < 1:
            raise ValueError(f"GAPFORGE_NMAX must be positive, got {value}")
        return value
    return DEFAULT_N_MAX
