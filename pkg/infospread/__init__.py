from .version import __version__

from .errors import InfospreadError
from .errors import ConfigError
from .errors import ClosedFormError
from .errors import Infeasible
from .errors import DegenerateDenominator
from .errors import OracleMismatch
from .errors import QuadratureError
from .errors import InsufficientData

from .network import Mode
from .network import Regime
from .network import NetworkConfig

from .analytic import CoverageCurve
from .analytic import coverage_curve

from .optimizer import PowerSchedule
from .optimizer import OptimizationResult

from .logger import Logger

SEEDS = [1084389005, 1096831319, 1107694401, 1117177635, 1129282672,
         1140653297, 1150794856, 1160564931, 1172473350, 1182646876,
         1194869402, 1204124363, 1215002816, 1224696448, 1234004931,
         1244955702, 1253984800, 1264542370, 1275783021, 1286407000]
