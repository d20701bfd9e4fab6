from .world import Mobility
from .world import Metric
from .world import Uplink
from .world import SimSettings
from .world import SimWorld
from .world import place_nodes
from .world import renew_sources
from .world import distances

from .mobility import step_mobility
from .mobility import reflect
from .mobility import wrap
from .mobility import travel

from .slot import SlotRecord
from .slot import run_slot

from .stats import TrialStats

from .runner import run_experiment

from .diagnostics import HomogeneityReport
from .diagnostics import homogeneity_diagnostics
