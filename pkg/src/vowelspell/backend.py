"""Numeric-kernel backend selection.

The hot inner loop (the SMO dual solver) ships in two builds from a single
source: a numba ``@njit`` compile and the plain numpy/Python fallback.
``VOWELSPELL_BACKEND`` forces one (``numba`` or ``numpy``); the default is
numba when importable.
"""

import os

_ENV_VAR = "VOWELSPELL_BACKEND"
_VALID = ("numba", "numpy")


def _numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def active_backend():
    """Resolve the backend name, honoring the environment override."""
    forced = os.environ.get(_ENV_VAR, "").strip().lower()
    if forced:
        if forced not in _VALID:
            raise ValueError(
                f"{_ENV_VAR} must be one of {_VALID}, got {forced!r}"
            )
        if forced == "numba" and not _numba_available():
            raise RuntimeError(f"{_ENV_VAR}=numba but numba is not importable")
        return forced
    return "numba" if _numba_available() else "numpy"
