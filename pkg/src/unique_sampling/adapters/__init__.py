"""Choice-source implementations bridging random generators and recorded traces."""

from .probe import ProbeResult, ProbeSource, probe
from .random import IidSample, RandomSource, sample_iid
from .replay import ReplaySource

__all__ = ["IidSample", "ProbeResult", "ProbeSource", "RandomSource", "ReplaySource", "probe", "sample_iid"]
