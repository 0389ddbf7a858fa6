"""Backend selection for the stepping kernel.

The compiled core is used when it imports; set ``DCAT_PURE_PYTHON=1`` to
force the pure-Python twin.
"""

import importlib
import os

_MODULES = {"compiled": "dcat._core", "python": "dcat._pycore"}


def load_backend(name):
    """Return the ``advance`` function of backend ``name`` ("compiled" or "python")."""
    return importlib.import_module(_MODULES[name]).advance


def available_backends():
    found = []
    for name in _MODULES:
        try:
            load_backend(name)
        except ImportError:
            continue
        found.append(name)
    return found


if os.environ.get("DCAT_PURE_PYTHON", "").strip() not in ("", "0"):
    BACKEND = "python"
else:
    try:
        load_backend("compiled")
        BACKEND = "compiled"
    except ImportError:
        BACKEND = "python"

advance = load_backend(BACKEND)
