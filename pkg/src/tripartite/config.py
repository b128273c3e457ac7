"""Numerical tolerances shared by the classifier and the command line.

Defaults can be overridden per call by passing a :class:`Tolerances`
instance, or process-wide through ``TRIPARTITE_EPS_RANK``,
``TRIPARTITE_EPS_TAU`` and ``TRIPARTITE_EPS_DISC``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

EPS_RANK = 1e-9
EPS_TAU = 1e-10
EPS_DISC = 1e-9

ENV_PREFIX = "TRIPARTITE_"


@dataclass(frozen=True)
class Tolerances:
    eps_rank: float = EPS_RANK
    eps_tau: float = EPS_TAU
    eps_disc: float = EPS_DISC

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ValueError(f"{f.name} must be positive, got {value!r}")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "Tolerances":
        """Build tolerances from ``TRIPARTITE_*`` variables; explicit overrides win."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                values[f.name] = float(raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


DEFAULT_TOLERANCES = Tolerances()
