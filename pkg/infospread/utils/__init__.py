from .seeding import Seeder

from .colorize import color_str
from .colorize import color_verdict

from .timing import timed

from .serialize import pickle_load
from .serialize import pickle_dump
from .serialize import yaml_load
from .serialize import yaml_dump
from .serialize import to_plain
from .serialize import CloudpickleWrapper
