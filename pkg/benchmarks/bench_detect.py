"""Throughput comparison of the two detection kernels.

Runs the compiled kernel against the numpy fallback on identical inputs,
checks the outputs agree exactly, and prints symbols/second for a few
batch sizes and constellation orders.

Usage: python3 benchmarks/bench_detect.py [--repeats N]
"""

import argparse
import time

import numpy as np

from uavlink import load_fixture, make_qam, make_psk
from uavlink._kernels import _detect_np

try:
    from uavlink._kernels import _detect_cy
except ImportError:
    _detect_cy = None


def _inputs(order: int, n: int, seed: int):
    fx = load_fixture("case1")
    c = make_qam(order) if order > 2 else make_psk(order)
    gamma, acf = 277.136, 0.97
    rng = np.random.default_rng(seed)
    n_rx = fx.estimate.h.size
    tx = rng.integers(0, order, size=n)
    h_rd = (rng.standard_normal((n, n_rx))
            + 1j * rng.standard_normal((n, n_rx))) * np.sqrt(0.5)
    noise = (rng.standard_normal((n, n_rx))
             + 1j * rng.standard_normal((n, n_rx))) * np.sqrt(0.5)
    h_t = fx.estimate.h[None, :] * acf + h_rd * np.sqrt(1 - acf ** 2)
    y = np.sqrt(gamma) * h_t * c.points[tx, None] + noise
    ref = np.ascontiguousarray(np.sqrt(gamma) * acf
                               * np.outer(c.points, fx.estimate.h))
    sig2 = gamma * (1 - acf ** 2) * np.abs(c.points) ** 2 + 1.0
    return np.ascontiguousarray(y), ref, np.log(sig2), sig2


def _time(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if _detect_cy is None:
        print("compiled kernel not available; showing numpy fallback only")

    print(f"{'order':>5} {'batch':>8} {'numpy Msym/s':>13} "
          f"{'cython Msym/s':>14} {'speedup':>8}")
    for order in (4, 16, 64):
        for n in (2_000, 8_192, 65_536):
            inp = _inputs(order, n, seed=order * n)
            out_np = _detect_np.detect_symbols(*inp)
            t_np = _time(_detect_np.detect_symbols, inp, args.repeats)
            row = f"{order:>5} {n:>8} {n / t_np / 1e6:>13.2f}"
            if _detect_cy is not None:
                out_cy = _detect_cy.detect_symbols(*inp)
                if not np.array_equal(out_np, out_cy):
                    raise AssertionError(
                        f"kernel outputs differ at order={order} n={n}")
                t_cy = _time(_detect_cy.detect_symbols, inp, args.repeats)
                row += f" {n / t_cy / 1e6:>14.2f} {t_np / t_cy:>7.2f}x"
            print(row)
    print("outputs identical across backends" if _detect_cy is not None
          else "")


if __name__ == "__main__":
    main()
