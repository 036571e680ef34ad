"""Backend selection for the hot loops.

The compiled ``_ckernels`` extension is used when it imports; otherwise (or
when the ``CFINTERP_PURE_PYTHON`` environment variable is non-empty) the
pure-Python ``_pykernels`` module is used. Both expose the same functions.
"""

import importlib
import os

from . import _pykernels

BACKENDS = ("cython", "python")


def _load(name):
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("cfinterp._ckernels")
    raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")


def available_backends():
    out = []
    for name in BACKENDS:
        try:
            _load(name)
        except ImportError:
            continue
        out.append(name)
    return out


if os.environ.get("CFINTERP_PURE_PYTHON"):
    impl = _pykernels
    backend_name = "python"
else:
    try:
        impl = _load("cython")
        backend_name = "cython"
    except ImportError:
        impl = _pykernels
        backend_name = "python"


def set_backend(name):
    """Switch the active backend process-wide; returns the previous name."""
    global impl, backend_name
    previous = backend_name
    impl = _load(name)
    backend_name = name
    return previous
