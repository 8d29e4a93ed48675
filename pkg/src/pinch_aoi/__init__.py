"""Average age of information for a pinching-antenna powered sensor link."""

from .analytic import INF, ModelVariant, average_aoi, config_average_aoi, renewal_moments
from .config import default_config, load_config, save_config
from .model import Device, SystemConfig, link_budget
from .placement import Objective, PlacementSpec, fixed_antenna_baseline, optimize_position
from .sim import SimMode, SimSpec, simulate

__version__ = "0.1.0"

__all__ = [
    "INF", "ModelVariant", "average_aoi", "config_average_aoi", "renewal_moments",
    "default_config", "load_config", "save_config", "Device", "SystemConfig", "link_budget",
    "Objective", "PlacementSpec", "fixed_antenna_baseline", "optimize_position",
    "SimMode", "SimSpec", "simulate",
]
