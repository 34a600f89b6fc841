"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import InvalidSystemError


def check_points(X) -> np.ndarray:
    """Return ``X`` as a finite float array of shape ``(n, 2)``; a single pair is promoted."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    X = check_array(X, dtype=float, ensure_all_finite=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected points with 2 columns, got {X.shape[1]}")
    return X


def check_system(system, structured: bool = False):
    """Accept a system object, a gallery name or a system-file dict."""
    from .system import PlanarSystem, StructuredSystem

    if isinstance(system, str):
        from .gallery import get
        system = get(system)
    elif isinstance(system, dict):
        from .io import system_from_dict
        system = system_from_dict(system)
    if not isinstance(system, PlanarSystem):
        raise InvalidSystemError(f"expected a planar system, got {type(system).__name__}")
    if structured and not isinstance(system, StructuredSystem):
        raise InvalidSystemError("this operation needs a structured (Lienard-type) system")
    return system


def check_window(window):
    (x0, x1), (y0, y1) = window
    window = ((float(x0), float(x1)), (float(y0), float(y1)))
    if not (window[0][0] < window[0][1] and window[1][0] < window[1][1]):
        raise ValueError(f"degenerate window {window}")
    return window
