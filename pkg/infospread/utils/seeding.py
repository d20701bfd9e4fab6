import numpy as np


class Seeder(object):
    r"""A splittable source of random streams.
    
    Given a root seed, the seeder derives independent child streams with :class:`numpy.random.SeedSequence`
    and wraps each in the counter-based :class:`numpy.random.Philox` bit generator. Child ``i`` depends only on
    the root seed and ``i``, so a Monte Carlo trial draws the same numbers no matter which process runs it or
    in which order trials are scheduled. 
    
    .. note::
    
        The seeder never touches the global ``np.random`` state. 
    
    Example::
    
        >>> seeder = Seeder(init_seed=0)
        >>> rngs = seeder.spawn(3)
        >>> rngs[1].uniform() == Seeder(0).generator(1).uniform()
        True
        
    Args:
        init_seed (int, optional): nonnegative root seed. Default: ``0``
    """
    def __init__(self, init_seed=0):
        assert isinstance(init_seed, (int, np.integer)) and init_seed >= 0, f'expected non-negative integer, got {init_seed}'
        self.init_seed = int(init_seed)
        
    def generator(self, index):
        r"""Returns the generator of the ``index``-th child stream.
        
        Args:
            index (int): child stream index
            
        Returns:
            Generator: a Philox-backed generator
        """
        assert index >= 0, f'expected non-negative index, got {index}'
        child = np.random.SeedSequence(self.init_seed, spawn_key=(int(index),))
        return np.random.Generator(np.random.Philox(child))
    
    def spawn(self, n, start=0):
        r"""Returns generators for child streams ``start, ..., start + n - 1``. """
        return [self.generator(i) for i in range(start, start + n)]
