from dataclasses import dataclass
import numpy as np


@dataclass
class Describe:
    count: int
    mean: object
    std: object
    se: object
    min: object
    max: object
    repr_indent: int = 0
    repr_prefix: str = None
        
    def __repr__(self):
        s = ''
        if self.repr_prefix is not None:
            s += self.repr_prefix
        ind = '\t'*self.repr_indent
        s += ind + f'count: {self.count}\n'
        s += ind + f'mean: {self.mean}\n'
        s += ind + f'std: {self.std}\n'
        s += ind + f'se: {self.se}\n'
        s += ind + f'min: {self.min}\n'
        s += ind + f'max: {self.max}'
        return s


def describe(x, axis=0, repr_indent=0, repr_prefix=None):
    r"""Summary statistics of Monte Carlo samples along ``axis`` (trials by default).
    
    The standard deviation uses one degree of freedom (sample estimate) and the standard error is
    ``std / sqrt(count)``. With a single sample both are zero. 
    
    Returns:
        Describe: summary, or ``None`` for empty input
    """
    if x is None or np.size(x) == 0:
        return None
    x = np.asarray(x, dtype=np.float64)
    count = x.shape[axis]
    mean = x.mean(axis)
    std = x.std(axis, ddof=1) if count > 1 else np.zeros_like(mean)
    se = std/np.sqrt(count)
    return Describe(count, mean, std, se, x.min(axis), x.max(axis), repr_indent, repr_prefix)
