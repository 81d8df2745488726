"""DDSAT: a deterministic simulator and protocol library for a
distributed dynamic-spectrum-access TDMA MAC with cooperative energy
detection and priority-based channel/slot allocation."""

__version__ = "0.1.0"

from .core import FramePhase, PhaseKind, SuperFrameClock, TrafficClass  # noqa: F401
from .scenario import ScenarioConfig, parse_scenario, render_scenario  # noqa: F401
from .sim import Engine, RunResult, run  # noqa: F401
