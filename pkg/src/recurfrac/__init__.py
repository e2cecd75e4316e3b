"""Exact and Monte Carlo tools for recurrence of the shift on self-similar Cantor sets."""

__version__ = "0.1.0"

from .errors import RecurFracError  # noqa: E402
from .ifs import MIDDLE_THIRD, THREE_FIFTHS, IFSConfig, Interval, load_config, validate_config  # noqa: E402

__all__ = [
    "__version__",
    "IFSConfig",
    "Interval",
    "MIDDLE_THIRD",
    "RecurFracError",
    "THREE_FIFTHS",
    "load_config",
    "validate_config",
]
