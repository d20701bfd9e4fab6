from collections import OrderedDict

import numpy as np

from .utils import pickle_dump


def _format(value, digits):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_format(x, digits) for x in value]
    if isinstance(value, bool) or digits is None:
        return value
    if isinstance(value, float):
        return float(f'{value:.{digits}g}')
    return value


class Logger(object):
    r"""Collects the quantities of a report under named keys.

    A key logged more than once keeps every value in order. Every command line report (predictions,
    oracle deviations, optimizer results, simulation summaries) is assembled with a logger, printed with
    :meth:`dump` and written to the YAML sidecar through :meth:`summary`.

    Example:

    * Default::

        >>> logger = Logger()
        >>> logger('slot', 1)
        >>> logger('covered_ratio', 0.069)
        >>> logger('slot', 2)
        >>> logger('covered_ratio', 0.1334)

        >>> logger.dump()
        Slot: [1, 2]
        Covered Ratio: [0.069, 0.1334]

    * With specific keys and index::

        >>> logger.dump(keys=['slot'], index=-1)
        Slot: 2

    * Rounded for display::

        >>> logger('p_suc', 0.0704137712)
        >>> logger.dump(keys=['p_suc'], digits=4)
        P Suc: 0.07041

    """
    def __init__(self):
        self.logs = OrderedDict()

    def __call__(self, key, value):
        r"""Log ``value`` under ``key``, a lowercase name with words separated by ``_``. """
        assert isinstance(key, str) and key, f'expected a non-empty string key, got {key!r}'
        if key not in self.logs:
            self.logs[key] = []

        self.logs[key].append(value)

    def last(self, key):
        r"""Returns the most recently logged value of ``key``. """
        return self.logs[key][-1]

    def summary(self):
        r"""Dictionary of the last value of every key, numbers as plain Python scalars. """
        out = OrderedDict()
        for key, values in self.logs.items():
            value = values[-1]
            if isinstance(value, np.generic):
                value = value.item()
            out[key] = value
        return dict(out)

    def dump(self, keys=None, index=None, indent=0, border='', digits=None):
        r"""Print the logged values, one key per line.

        Args:
            keys (list, optional): a list of selected keys. If ``None``, then use all keys. Default: ``None``
            index (int/list, optional): the index of logged values. It has following use cases:

                - ``scalar``: a specific index. If ``-1``, then use last element.
                - ``list``: a list of indicies.
                - ``None``: all indicies; single-valued keys are printed unwrapped.

            indent (int, optional): the number of tab indentation. Default: ``0``
            border (str, optional): the string to print as header and footer
            digits (int, optional): significant digits of real values. If ``None``, values print as logged.
        """
        if keys is None:
            keys = list(self.logs.keys())
        assert isinstance(keys, list), f'expected list, got {type(keys)}'

        if border:
            print(border)
        for key in keys:
            values = self.logs[key]
            if index is None:
                value = values[0] if len(values) == 1 else values
            elif isinstance(index, int):
                value = values[index]
            else:
                value = [values[i] for i in index]
            value = _format(value, digits)

            name = key.strip().replace('_', ' ').title()
            print('\t'*indent + f'{name}: {value}')
        if border:
            print(border)

    def save(self, f):
        r"""Pickle the logs to ``f`` (``.pkl`` is appended). Returns the written path. """
        return pickle_dump(obj=self.logs, f=f, ext='.pkl')

    def __repr__(self):
        return repr(self.logs)
