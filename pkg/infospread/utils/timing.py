from contextlib import contextmanager

from time import perf_counter
from datetime import timedelta
from datetime import datetime

from .colorize import color_str


def _report(label, t0, color, bold):
    elapsed = timedelta(seconds=round(perf_counter() - t0, 1))
    timestamp = datetime.now().isoformat(' ', 'seconds')
    print(color_str(string=f'\n{label}: {elapsed} at {timestamp}', color=color, bold=bold))


@contextmanager
def timed(label='Total time', color='green', bold=False):
    r"""A context manager printing the wall time spent in its body. 
    
    Args:
        label (str, optional): printed prefix. Default: 'Total time'
        color (str, optional): color name. Default: 'green'
        bold (bool, optional): if ``True``, then the verbose is bolded. Default: ``False``
    """
    t0 = perf_counter()
    yield
    _report(label, t0, color, bold)
