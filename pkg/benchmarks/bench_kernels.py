#!/usr/bin/env python3
"""Benchmark the hot kernels under both backends.

Spawns one child interpreter per backend (RADARKAT_BACKEND=numba / numpy) so
each measures a clean import, then prints a side-by-side table.  Run it from
the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 50
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import textwrap

_CHILD = textwrap.dedent(
    """
    import json
    import time

    import numpy as np

    from radarkat import chain, kernels
    from radarkat.backend import backend_name
    from radarkat.chain import ChainConfig, Window
    from radarkat.device import Device, Mode
    from radarkat.harness import _program_config
    from radarkat.memimage import MemoryImage, region_for, write_region

    REPEATS = int(__import__("sys").argv[1])
    rng = np.random.default_rng(1)
    cfg = ChainConfig(window=Window.HANN)

    samples = rng.integers(-(2**15), 2**15, size=(48, 64), dtype=np.int64)
    series = rng.integers(-(2**23), 2**23, size=(96, 16, 2), dtype=np.int64)
    xs = rng.integers(-(2**23), 2**23, size=100_000, dtype=np.int64)
    ys = rng.integers(-(2**23), 2**23, size=100_000, dtype=np.int64)
    mag_map = rng.integers(0, 2**23, size=(32, 16), dtype=np.int64)
    adc = rng.integers(-(2**12), 2**12, size=(3, 17, 64), dtype=np.int64)

    dev = Device()
    _program_config(dev, cfg)
    write_region(dev.mem["adc"], region_for("adc", cfg), adc)

    cases = {
        "rfft_batch 48x64": lambda: chain.rfft_batch(samples, cfg),
        "cfft_batch 96x16": lambda: chain.cfft_batch(series, cfg),
        "cordic 100k pts": lambda: kernels.cordic_vectoring_arr(xs, ys),
        "cfar_thresholds 32x16": lambda: kernels.cfar_thresholds(mag_map, 1, 4, 0x0600),
        "device full frame": lambda: dev.run_frame(),
    }

    results = {}
    for name, fn in cases.items():
        fn()  # warm-up (jit compilation lands here on the numba path)
        t0 = time.perf_counter()
        for _ in range(REPEATS):
            fn()
        results[name] = (time.perf_counter() - t0) / REPEATS * 1e3
    print(json.dumps({"backend": backend_name(), "ms": results}))
    """
)


def run_backend(backend: str, repeats: int) -> dict:
    env = dict(os.environ, RADARKAT_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", _CHILD, str(repeats)],
        env=env,
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"{backend} run failed:\n{proc.stderr}")
    return json.loads(proc.stdout.splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    rows = {}
    for backend in ("numpy", "numba"):
        try:
            out = run_backend(backend, args.repeats)
        except RuntimeError as exc:
            print(exc)
            continue
        for name, ms in out["ms"].items():
            rows.setdefault(name, {})[out["backend"]] = ms

    width = max(len(n) for n in rows)
    print(f"{'kernel':<{width}}  {'numpy ms':>10}  {'numba ms':>10}  {'speedup':>8}")
    for name, times in rows.items():
        np_ms = times.get("numpy")
        nb_ms = times.get("numba")
        speedup = f"{np_ms / nb_ms:7.1f}x" if np_ms and nb_ms else "     n/a"
        np_s = f"{np_ms:10.3f}" if np_ms else "       n/a"
        nb_s = f"{nb_ms:10.3f}" if nb_ms else "       n/a"
        print(f"{name:<{width}}  {np_s}  {nb_s}  {speedup}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
