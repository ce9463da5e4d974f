"""Detection kernel backends.

The hot loop of the Monte Carlo BEP estimator is the per-symbol metric
minimization. A compiled Cython kernel is used when the extension built;
otherwise a NumPy implementation with the exact same floating-point
operation order takes over. The two are bit-identical by construction and
a parity test enforces it.
"""

from ._detect_np import detect_symbols as detect_symbols_numpy

try:
    from ._detect_cy import detect_symbols as detect_symbols_cython
except ImportError:
    detect_symbols_cython = None

if detect_symbols_cython is not None:
    detect_symbols = detect_symbols_cython
    BACKEND = "cython"
else:
    detect_symbols = detect_symbols_numpy
    BACKEND = "numpy"


def backend_name() -> str:
    """Name of the active detection backend ("cython" or "numpy")."""
    return BACKEND


__all__ = [
    "detect_symbols",
    "detect_symbols_numpy",
    "detect_symbols_cython",
    "backend_name",
    "BACKEND",
]
