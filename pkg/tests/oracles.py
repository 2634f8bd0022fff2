"""Independent reference computations shared by the test modules."""

from fractions import Fraction

import numpy as np

from radarkat.kernels import Q23_MAX, cordic_vectoring_arr


def dft_matrix(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n)


def bruteforce_cfar_detections(maps: np.ndarray, cfg) -> set[tuple[int, int]]:
    """CA-CFAR detection set recomputed cell by cell.

    Magnitudes use the (separately verified) CORDIC primitive; the window
    membership, truncation, mean and threshold roundings are re-derived
    here with plain loops and exact Fraction arithmetic.
    """
    r, nk, nd, _ = maps.shape
    mags = np.zeros((r, nk, nd), dtype=np.int64)
    for ch in range(r):
        m, _ = cordic_vectoring_arr(maps[ch, ..., 0], maps[ch, ..., 1])
        mags[ch] = m
    cell = np.minimum(mags.sum(axis=0), Q23_MAX).tolist()

    hits = set()
    g, w = cfg.cfar_guard, cfg.cfar_window
    for k in range(nk):
        idx = [
            kk
            for off in range(1, w + 1)
            for kk in (k - g - off, k + g + off)
            if 0 <= kk < nk
        ]
        if not idx:
            continue
        for d in range(1, nd):
            window = [cell[kk][d] for kk in idx]
            mean = round(Fraction(sum(window), len(window)))
            thr = min(round(Fraction(mean * cfg.cfar_alpha_raw, 256)), Q23_MAX)
            if cell[k][d] > thr:
                hits.add((k, d))
    return hits
