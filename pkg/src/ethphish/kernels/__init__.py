"""Hot graph kernels with a numba backend and a numpy fallback.

The backend is chosen once at import from the ``ETHPHISH_KERNELS`` environment
variable: ``numba`` (default) or ``numpy``. If numba cannot be imported the
numpy backend is used and a warning is issued. Both backends produce identical
results; ``load_backend`` gives direct access to either for comparison.
"""

import importlib
import os
import warnings

ENV_FLAG = "ETHPHISH_KERNELS"
BACKENDS = ("numba", "numpy")


def load_backend(name):
    if name not in BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; choose from {BACKENDS}")
    return importlib.import_module(f"{__name__}._{name}")


def _select():
    requested = os.environ.get(ENV_FLAG, "numba").strip().lower() or "numba"
    if requested not in BACKENDS:
        raise ValueError(f"{ENV_FLAG}={requested!r}; expected one of {BACKENDS}")
    if requested == "numba":
        try:
            return "numba", load_backend("numba")
        except ImportError as exc:
            warnings.warn(f"numba unavailable ({exc}); falling back to numpy kernels",
                          RuntimeWarning, stacklevel=2)
    return "numpy", load_backend("numpy")


BACKEND, _impl = _select()

walk_steps = _impl.walk_steps
weak_component_labels = _impl.weak_component_labels
top_k_row = _impl.top_k_row
ego_expand = _impl.ego_expand

__all__ = ["BACKEND", "BACKENDS", "ENV_FLAG", "load_backend", "walk_steps",
           "weak_component_labels", "top_k_row", "ego_expand"]
