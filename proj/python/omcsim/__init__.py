"""Frequency-domain quantum-noise model of a detuned optomechanical cavity."""

from ._omcsim import *  # noqa: F401,F403

__version__ = "0.1.0"
