#!/usr/bin/env python3
"""Benchmark the screenshot downscale kernel: numba vs pure numpy.

Covers the realistic capture shapes: integral factor (retina 2x), fractional
factor (full-HD to model space), and a large 4k frame. Run:

    python benchmarks/bench_downscale.py [--repeat 20]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from deskagent import kernels

CASES = [
    ("2732x1536 -> 1366x768 (integral 2x)", (2732, 1536), (1366, 768)),
    ("1920x1080 -> 1366x768 (fractional)", (1920, 1080), (1366, 768)),
    ("3840x2160 -> 1366x768 (4k source)", (3840, 2160), (1366, 768)),
    ("1512x982 -> 1344x756 (macbook to model)", (1512, 982), (1344, 756)),
]


def run_case(name, src, dst, repeat, backends):
    rng = np.random.default_rng(7)
    frame = rng.integers(0, 256, size=(src[1], src[0], 3), dtype=np.uint8)
    print(f"\n{name}")
    timings = {}
    outputs = {}
    for backend in backends:
        kernels.downscale_area(frame, dst, backend=backend)  # warm (JIT, caches)
        t0 = time.perf_counter()
        for _ in range(repeat):
            outputs[backend] = kernels.downscale_area(frame, dst, backend=backend)
        per_call = (time.perf_counter() - t0) / repeat
        timings[backend] = per_call
        print(f"  {backend:<6} {per_call * 1000:8.2f} ms/frame {1 / per_call:8.1f} fps")
    if len(outputs) == 2:
        diff = np.abs(
            outputs["numba"].astype(int) - outputs["numpy"].astype(int)
        ).max()
        ratio = timings["numpy"] / timings["numba"]
        print(f"  max |numba - numpy| = {diff} (rounding boundary only)")
        print(f"  speedup numba vs numpy: {ratio:.2f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    backends = list(kernels.available_backends())
    print(f"kernel backends available: {backends}")
    print(f"active by default: {kernels.select_backend()}")
    for name, src, dst in CASES:
        run_case(name, src, dst, args.repeat, backends)


if __name__ == "__main__":
    main()
