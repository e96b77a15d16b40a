"""Float kernel backend, chosen once at import.

The compiled extension is used when it was built; otherwise the numpy twin in
``_pykernels`` takes over with identical semantics. Setting the environment
variable ``HITSRANK_BACKEND=python`` forces the fallback. ``BACKEND`` names the
one in use and ``get_backend(name)`` returns either explicitly.
"""

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if os.environ.get("HITSRANK_BACKEND", "").lower() == "python":
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_active = _compiled if _compiled is not None else _pykernels


def available_backends():
    return ["cython", "python"] if _compiled is not None else ["python"]


def get_backend(name=None):
    if name is None:
        return _active
    if name == "python":
        return _pykernels
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def score_steps(*args, backend=None):
    return get_backend(backend).score_steps(*args)


def rank_scan(*args, backend=None):
    return get_backend(backend).rank_scan(*args)
