from .describe import Describe
from .describe import describe
