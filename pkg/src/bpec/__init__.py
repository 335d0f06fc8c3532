"""Capacity-region bounds and queue-based coding for two-receiver broadcast
packet erasure channels with Markov memory and ACK/NACK feedback."""

from .channel import (
    ChannelError,
    ChannelModel,
    ErasureProfile,
    GilbertElliottParams,
    erasure_profile,
    from_gilbert_elliott,
    long_run_erasure,
    memoryless,
    sample_step,
    stationary_distribution,
)
from .geometry import Polygon, hausdorff, minkowski_sum
from .regions import (
    Region,
    boundary,
    in_inner,
    in_outer,
    memoryless_fb_region,
    memoryless_nofb_region,
    minkowski_region,
    sweep,
    symmetric_point,
)
from .scheduler import Action, PolicySpec, QueueState, apply_action, max_weight_decide, probabilistic_from_region_point
from .simulator import SimConfig, SimStats, run, stability_verdict, throughput_check

__version__ = "0.1.0"
