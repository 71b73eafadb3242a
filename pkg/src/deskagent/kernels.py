"""Area-averaging image downscale, the one hot numeric loop in the runtime.

Every captured frame is reduced from physical to model resolution here, so the
kernel has a numba-compiled path with a pure-numpy fallback. Selection order:
explicit ``backend=`` argument, then the ``DESKAGENT_KERNELS`` environment
variable (``auto`` | ``numba`` | ``numpy``), then auto (numba when importable).
``benchmarks/bench_downscale.py`` compares the two paths.

Box weights are built with integer arithmetic (cell boundaries are rationals
with denominator n_out), so both paths see bit-identical weight tables.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

ENV_FLAG = "DESKAGENT_KERNELS"

try:  # compiled path is optional at runtime
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag instead
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def deco(fn):
            return fn

        return deco if not (args and callable(args[0])) else args[0]


@lru_cache(maxsize=32)
def _axis_weights(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per output cell: first input index, padded weights, weight count.

    Output cell i covers the half-open span [i*n_in/n_out, (i+1)*n_in/n_out).
    Weights are overlap lengths normalized to sum to 1 per cell.
    """
    starts = np.zeros(n_out, dtype=np.int64)
    counts = np.zeros(n_out, dtype=np.int64)
    spans: list[np.ndarray] = []
    for i in range(n_out):
        lo_num = i * n_in  # denominator n_out
        hi_num = (i + 1) * n_in
        j0 = lo_num // n_out
        j1 = (hi_num + n_out - 1) // n_out  # exclusive
        overlap = np.empty(j1 - j0, dtype=np.float64)
        for k, j in enumerate(range(j0, j1)):
            num = min(hi_num, (j + 1) * n_out) - max(lo_num, j * n_out)
            overlap[k] = num / n_in
        starts[i] = j0
        counts[i] = j1 - j0
        spans.append(overlap)
    max_span = max(len(s) for s in spans)
    weights = np.zeros((n_out, max_span), dtype=np.float64)
    for i, s in enumerate(spans):
        weights[i, : len(s)] = s
    return starts, weights, counts


@lru_cache(maxsize=32)
def _axis_matrix(n_in: int, n_out: int) -> np.ndarray:
    starts, weights, counts = _axis_weights(n_in, n_out)
    m = np.zeros((n_out, n_in), dtype=np.float64)
    for i in range(n_out):
        c = int(counts[i])
        m[i, int(starts[i]) : int(starts[i]) + c] = weights[i, :c]
    return m


def _quantize(acc: np.ndarray) -> np.ndarray:
    # round half away from zero, matching coordinate scaling
    return np.clip(np.floor(acc + 0.5), 0, 255).astype(np.uint8)


def _downscale_numpy(frame: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    in_h, in_w = frame.shape[:2]
    if in_h % out_h == 0 and in_w % out_w == 0:
        fy, fx = in_h // out_h, in_w // out_w
        acc = (
            frame.reshape(out_h, fy, out_w, fx, frame.shape[2])
            .astype(np.float64)
            .mean(axis=(1, 3))
        )
        return _quantize(acc)
    my = _axis_matrix(in_h, out_h)
    mx = _axis_matrix(in_w, out_w)
    acc = np.tensordot(my, frame.astype(np.float64), axes=(1, 0))
    acc = np.tensordot(acc, mx, axes=(1, 1)).transpose(0, 2, 1)
    return _quantize(acc)


@njit(cache=True)
def _weighted_box_sum(frame, y_starts, y_weights, y_counts, x_starts, x_weights, x_counts, out):
    out_h, out_w, channels = out.shape
    for oy in range(out_h):
        y0 = y_starts[oy]
        yc = y_counts[oy]
        for ox in range(out_w):
            x0 = x_starts[ox]
            xc = x_counts[ox]
            for ch in range(channels):
                acc = 0.0
                for i in range(yc):
                    wy = y_weights[oy, i]
                    row = y0 + i
                    for j in range(xc):
                        acc += wy * x_weights[ox, j] * frame[row, x0 + j, ch]
                out[oy, ox, ch] = acc


def _downscale_numba(frame: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    in_h, in_w = frame.shape[:2]
    y_starts, y_weights, y_counts = _axis_weights(in_h, out_h)
    x_starts, x_weights, x_counts = _axis_weights(in_w, out_w)
    acc = np.empty((out_h, out_w, frame.shape[2]), dtype=np.float64)
    _weighted_box_sum(
        frame, y_starts, y_weights, y_counts, x_starts, x_weights, x_counts, acc
    )
    return _quantize(acc)


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if _HAVE_NUMBA else ("numpy",)


def select_backend(backend: str | None = None) -> str:
    """Resolve the kernel backend: argument > env flag > auto."""
    choice = backend or os.environ.get(ENV_FLAG, "auto").strip().lower()
    if choice in ("auto", ""):
        return "numba" if _HAVE_NUMBA else "numpy"
    if choice == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    if choice not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {choice!r}")
    return choice


def downscale_area(
    frame: np.ndarray, out_size: tuple[int, int], backend: str | None = None
) -> np.ndarray:
    """Downscale an (H, W, C) uint8 frame to out_size=(width, height).

    Area averaging: each output pixel is the exact box average of the input
    region it covers, quantized half away from zero.
    """
    if frame.ndim != 3:
        raise ValueError(f"expected (H, W, C) frame, got shape {frame.shape}")
    if frame.dtype != np.uint8:
        raise ValueError(f"expected uint8 frame, got {frame.dtype}")
    out_w, out_h = out_size
    if out_w < 1 or out_h < 1:
        raise ValueError(f"bad output size {out_size}")
    if (out_w, out_h) == (frame.shape[1], frame.shape[0]):
        return frame.copy()
    if select_backend(backend) == "numba":
        return _downscale_numba(frame, out_w, out_h)
    return _downscale_numpy(frame, out_w, out_h)
