"""decolab: a numerical laboratory for environment-induced decoherence."""

from . import hilbert, premeasure, localization, scenarios, runner  # noqa: F401

__version__ = "0.1.0"
