"""Single-partition adaptive Q-learning (SPAQL), the adaptive Q-learning (AQL)
baseline, the oil discovery and ambulance environments, and the experiment
harness used to compare them."""

from ._core import *  # noqa: F401,F403
