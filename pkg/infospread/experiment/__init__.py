from .config import Grid
from .config import Sample
from .config import Condition
from .config import Config
from .config import ExperimentConfig
from .config import PRESETS
from .config import get_preset

from .sweep import optimizer_sweep
