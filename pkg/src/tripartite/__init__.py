"""Entanglement classification and measures for three-qubit pure states.

The classifier itself lives in :mod:`tripartite.classify` (``classify.classify``).
"""

from importlib.resources import files

from .classify import SloccLabel, ghz_canonical, tensor_rank, w_canonical
from .config import Tolerances
from .measures import measure_report, three_tangle
from .states import PureState, ghz, load_state, w, w_n

__version__ = "0.1.0"

SHIPPED_STATES = ("ghz", "w", "product", "a_bc", "b_ac", "c_ab")


def data_path(name: str):
    """Path of a shipped representative state file, e.g. ``data_path("ghz")``."""
    if name not in SHIPPED_STATES:
        raise KeyError(f"no shipped state {name!r}; choose from {SHIPPED_STATES}")
    return files(__package__) / "data" / f"{name}.json"


__all__ = [
    "PureState", "SloccLabel", "Tolerances", "data_path", "ghz", "ghz_canonical",
    "load_state", "measure_report", "tensor_rank", "three_tangle", "w", "w_canonical", "w_n",
]
