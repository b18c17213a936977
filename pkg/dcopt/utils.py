"""Logging, hashing of configs, JSON output and folder handling"""
import datetime
import json
import logging
import os
import sys
import typing as ty
from base64 import b32encode
from collections.abc import Mapping
from hashlib import sha1

import numpy as np
from immutabledict import immutabledict


def exporter(export_self=False):
    """Export utility modified from https://stackoverflow.com/a/41895194
    Returns export decorator, __all__ list
    stolen from
    https://github.com/AxFoundation/strax/blob/d3608efc77acd52e1d5a208c3092b6b45b27a6e2/strax/utils.py#46
    """
    all_ = []
    if export_self:
        all_.append('exporter')

    def decorator(obj):
        all_.append(obj.__name__)
        return obj

    return decorator, all_


export, __all__ = exporter(export_self=True)


def check_folder_for_file(file_path: str):
    """
    Make the folder(s) file_path should be written to

    :param file_path: path with zero or more subfolders
    """
    last_folder = os.path.split(file_path)[0]
    if not last_folder:
        return
    log.debug(f'making path for {file_path}. Requested folder is {last_folder}')
    os.makedirs(last_folder, exist_ok=True)
    if not os.path.exists(last_folder):
        raise OSError(f'Could not make {last_folder} for saving {file_path}')


def verbosity_to_level(verbose: ty.Union[bool, int]) -> str:
    """Map a verbose flag (0, 1, 2+) to a logging level name"""
    if verbose > 1:
        return 'DEBUG'
    if verbose:
        return 'INFO'
    return 'WARNING'


@export
def get_logger(name: str, level: str = 'INFO', path: ty.Optional[str] = None) -> logging.Logger:
    """
    Get logger with handler in nice format

    :param name: name of the logger
    :param level: logging level
    :param path: if given, also append the records to this file
    :return: logger
    """
    level = level.upper()
    if not hasattr(logging, level):
        raise ValueError(f'{level} is invalid for logging')
    new_log = logging.getLogger(name)
    new_log.setLevel(getattr(logging, level))
    new_log.handlers = [FormattedHandler(path=path)]
    new_log.propagate = False
    return new_log


class FormattedHandler(logging.Handler):
    """Formatted records go to stderr (stdout carries the CLI reports)"""

    def __init__(self, *args, path=None, **kwargs):
        super().__init__(*args, **kwargs)
        self.path = path

    def emit(self, record):
        m = self.formatted_message(record)
        if self.path is not None:
            with open(self.path, 'a') as f:
                f.write(m)
        sys.stderr.write(m)

    @staticmethod
    def formatted_message(record) -> str:
        func_line = f'{record.funcName} (L{record.lineno})'
        date = datetime.datetime.fromtimestamp(record.created)
        return (f"{date.isoformat(sep=' ')} | "
                f"{record.name[:16]:16} | "
                f"{record.levelname.upper():8} | "
                f"{func_line:24} | "
                f"{record.getMessage()}\n"
                )


def immutable_to_dict(some_dict: Mapping) -> dict:
    """Recursively convert (nested) immutabledicts and tuples to dicts and lists"""
    new_dict = {}
    for k, v in some_dict.items():
        if isinstance(v, Mapping):
            v = immutable_to_dict(v)
        elif isinstance(v, (list, tuple)):
            v = [immutable_to_dict(item) if isinstance(item, Mapping) else item
                 for item in v]
        new_dict[k] = v
    return new_dict


def freeze(obj):
    """Recursively convert dicts and lists to immutabledicts and tuples"""
    if isinstance(obj, Mapping):
        return immutabledict({k: freeze(v) for k, v in obj.items()})
    if isinstance(obj, (list, tuple)):
        return tuple(freeze(v) for v in obj)
    return obj


class NumpyJSONEncoder(json.JSONEncoder):
    """JSON encoder for numpy scalars/arrays, frozen configs and other iterables"""

    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, Mapping):
            return dict(obj)
        try:
            iterable = iter(obj)
        except TypeError:
            pass
        else:
            return list(iterable)
        return json.JSONEncoder.default(self, obj)


@export
def deterministic_hash(thing, length: int = 10) -> str:
    """
    Return a base32 lowercase string of length determined from hashing
    a container hierarchy (keys sorted, so insertion order does not matter)
    """
    jsonned = json.dumps(thing, cls=NumpyJSONEncoder, sort_keys=True)
    digest = sha1(jsonned.encode('utf-8')).digest()
    return b32encode(digest)[:length].decode('ascii').lower()


def dump_json(obj, path: ty.Optional[str] = None, indent: int = 2) -> str:
    """Serialize obj (numpy and immutabledict aware), write to path if given"""
    text = json.dumps(obj, cls=NumpyJSONEncoder, indent=indent, sort_keys=True)
    if path is not None:
        check_folder_for_file(path)
        with open(path, 'w') as f:
            f.write(text + '\n')
    return text


log = get_logger('dcopt', os.environ.get('DCOPT_LOGLEVEL', 'INFO'))
