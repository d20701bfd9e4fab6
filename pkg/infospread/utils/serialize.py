from pathlib import Path
from enum import Enum
from dataclasses import is_dataclass
from dataclasses import fields

import pickle
import cloudpickle

import numpy as np
import yaml


def _as_path(f, ext=''):
    f = Path(f)
    if ext and f.suffix != ext:
        f = f.with_name(f.name + ext)
    return f


def pickle_load(f):
    r"""Read pickled data from a file. 

    Args:
        f (str/Path): file path
    """
    with open(_as_path(f), 'rb') as file:
        return cloudpickle.load(file)


def pickle_dump(obj, f, ext='.pkl'):
    r"""Serialize an object with cloudpickle (highest protocol) and save it in a file. 
    
    The extension is appended only if the path does not already carry it. 
    
    Args:
        obj (object): a serializable object
        f (str/Path): file path
        ext (str, optional): file extension. Default: .pkl
        
    Returns:
        Path: the written file
    """
    f = _as_path(f, ext)
    with open(f, 'wb') as file:
        cloudpickle.dump(obj=obj, file=file, protocol=pickle.HIGHEST_PROTOCOL)
    return f


def to_plain(obj):
    r"""Convert results into YAML-safe builtins.
    
    Dataclasses become dicts, enums their value, numpy scalars and arrays become Python numbers and lists. 
    """
    if is_dataclass(obj) and not isinstance(obj, type):
        return {field.name: to_plain(getattr(obj, field.name)) for field in fields(obj)}
    elif isinstance(obj, Enum):
        return obj.value
    elif isinstance(obj, dict):
        return {str(key): to_plain(value) for key, value in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [to_plain(x) for x in obj]
    elif isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    elif isinstance(obj, np.generic):
        return obj.item()
    elif isinstance(obj, Path):
        return obj.as_posix()
    return obj


def yaml_load(f):
    r"""Read data from a YAML file. 

    Args:
        f (str/Path): file path
    """
    with open(_as_path(f), 'r') as file:
        return yaml.safe_load(file)


def yaml_dump(obj, f, ext='.yml'):
    r"""Save a small summary (resolved configuration, optimizer result, verification verdict) as YAML. 
    
    The object is passed through :func:`to_plain` first, so dataclasses and numpy values are accepted. 
        
    Args:
        obj (object): a serializable object
        f (str/Path): file path
        ext (str, optional): file extension. Default: .yml
        
    Returns:
        Path: the written file
    """
    f = _as_path(f, ext)
    with open(f, 'w') as file:
        yaml.safe_dump(to_plain(obj), file, sort_keys=False)
    return f

    
class CloudpickleWrapper(object):
    r"""Uses cloudpickle to serialize a callable so that closures survive process pools
    (multiprocessing uses pickle by default). 
    """
    def __init__(self, x):
        self.x = x
        
    def __call__(self, *args, **kwargs):
        return self.x(*args, **kwargs)
    
    def __getstate__(self):
        return cloudpickle.dumps(self.x)
    
    def __setstate__(self, ob):
        self.x = pickle.loads(ob)
