"""NumPy detection kernel, operation-order-matched to the Cython one.

The antenna axis is accumulated with an explicit Python loop rather than
a vectorized sum: NumPy's pairwise summation would group the additions
differently from the compiled kernel's sequential loop and the two
backends are required to agree bit for bit.
"""

import numpy as np


def detect_symbols(y: np.ndarray, ref: np.ndarray, ln_sig2: np.ndarray,
                   sig2: np.ndarray) -> np.ndarray:
    """Minimum-metric detection for a batch of received vectors.

    Args:
        y: (n, n_rx) complex received vectors.
        ref: (m, n_rx) complex references sqrt(gamma)*C*h*s_k per point k.
        ln_sig2: (m,) additive metric offsets ln(sigma_e,k^2).
        sig2: (m,) metric denominators sigma_e,k^2.

    Returns:
        (n,) int64 indices of the metric-minimizing point, first minimum
        winning ties.
    """
    n, n_rx = y.shape
    m = ref.shape[0]
    acc = np.zeros((n, m))
    for r in range(n_rx):
        d = y[:, r, None] - ref[None, :, r]
        re = d.real
        im = d.imag
        acc += re * re + im * im
    metric = ln_sig2[None, :] + acc / sig2[None, :]
    return np.argmin(metric, axis=1).astype(np.int64)
