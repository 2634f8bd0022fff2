"""Integer kernels for the hot loops: FFT stages, CORDIC, CFAR windows.

Everything here operates on int64 raw values with round-to-nearest-even and
explicit saturation, so results are bit-exact regardless of backend.  The
numba path compiles the per-element loops; the numpy path vectorizes the
same arithmetic.  `RADARKAT_BACKEND=numpy` selects the fallback.

Internal precision:
  - FFT butterflies run at Q0.27 (4 guard bits below the Q0.23 memory word),
    with twiddles held at the same precision (plus one integer bit so that
    +1.0 is exact).
  - CORDIC runs 20 vectoring iterations with 8 guard bits and a Q2.28 phase
    accumulator, quantized once to Q2.21 at the end.
"""

from __future__ import annotations

import math

import numpy as np

from .backend import USE_NUMBA

# ---------------------------------------------------------------------------
# constants

FFT_FRAC = 27                 # internal FFT fraction bits
FFT_GUARD = FFT_FRAC - 23     # guard bits below the Q0.23 word

CORDIC_ITERS = 20
CORDIC_GUARD = 8
PHASE_ACC_FRAC = 28           # internal phase accumulator fraction bits

Q23_MAX = (1 << 23) - 1
Q23_MIN = -(1 << 23)

PI_Q21 = round(math.pi * (1 << 21))
TWO_PI_Q21 = round(2.0 * math.pi * (1 << 21))
_HALF_PI_ACC = round(0.5 * math.pi * (1 << PHASE_ACC_FRAC))

_ATAN_ACC = np.array(
    [round(math.atan(2.0 ** -i) * (1 << PHASE_ACC_FRAC)) for i in range(CORDIC_ITERS)],
    dtype=np.int64,
)

_CORDIC_GAIN = math.prod(math.sqrt(1.0 + 2.0 ** (-2 * i)) for i in range(CORDIC_ITERS))
INV_GAIN_Q23 = round((1 << 23) / _CORDIC_GAIN)


def phase_delta_q21(a: int, b: int) -> int:
    """Circular difference a-b of Q2.21 phases, in (-pi, pi] raw units."""
    d = (a - b) % TWO_PI_Q21
    if d > TWO_PI_Q21 // 2:
        d -= TWO_PI_Q21
    return d


# ---------------------------------------------------------------------------
# elementwise helpers (numpy arrays or scalars)

def rne_shift_arr(v: np.ndarray, shift: int) -> np.ndarray:
    """Arithmetic right shift with round-to-nearest-even, elementwise."""
    if shift <= 0:
        return v << (-shift)
    q = v >> shift
    r = v - (q << shift)
    half = np.int64(1) << (shift - 1)
    inc = (r > half) | ((r == half) & ((q & 1) == 1))
    return q + inc


def sat_q23_arr(v: np.ndarray) -> np.ndarray:
    return np.clip(v, Q23_MIN, Q23_MAX)


def rne_div_nonneg(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Round-to-nearest-even division for non-negative numerators."""
    den_safe = np.where(den > 0, den, 1)
    q = num // den_safe
    r = num - q * den_safe
    twice = r << 1
    inc = (twice > den_safe) | ((twice == den_safe) & ((q & 1) == 1))
    return np.where(den > 0, q + inc, 0)


# ---------------------------------------------------------------------------
# table caches

_TWIDDLE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_BITREV_CACHE: dict[int, np.ndarray] = {}
_HANN_CACHE: dict[int, np.ndarray] = {}


def twiddles(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Q0.27 twiddle ROM for e^{-j 2 pi k / n}, k in [0, n/2)."""
    if n not in _TWIDDLE_CACHE:
        k = np.arange(n // 2)
        theta = 2.0 * math.pi * k / n
        scale = float(1 << FFT_FRAC)
        twr = np.array([round(c) for c in np.cos(theta) * scale], dtype=np.int64)
        twi = np.array([round(s) for s in -np.sin(theta) * scale], dtype=np.int64)
        _TWIDDLE_CACHE[n] = (twr, twi)
    return _TWIDDLE_CACHE[n]


def bitrev_permutation(n: int) -> np.ndarray:
    if n not in _BITREV_CACHE:
        bits = n.bit_length() - 1
        perm = np.zeros(n, dtype=np.int64)
        for i in range(n):
            rev = 0
            v = i
            for _ in range(bits):
                rev = (rev << 1) | (v & 1)
                v >>= 1
            perm[i] = rev
        _BITREV_CACHE[n] = perm
    return _BITREV_CACHE[n]


def hann_q27(n: int) -> np.ndarray:
    """Periodic Hann window quantized to the FFT's internal precision."""
    if n not in _HANN_CACHE:
        w = 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(n) / n)
        scale = float(1 << FFT_FRAC)
        _HANN_CACHE[n] = np.array([round(x) for x in w * scale], dtype=np.int64)
    return _HANN_CACHE[n]


# ---------------------------------------------------------------------------
# numpy backend

def _fft_stages_np(re: np.ndarray, im: np.ndarray, twr: np.ndarray, twi: np.ndarray) -> None:
    n = re.shape[1]
    size = 2
    while size <= n:
        half = size >> 1
        step = n // size
        j = np.arange(half)
        starts = np.arange(0, n, size)
        ia = (starts[:, None] + j[None, :]).reshape(-1)
        ib = ia + half
        wr = np.tile(twr[j * step], starts.size)
        wi = np.tile(twi[j * step], starts.size)
        br = re[:, ib]
        bi = im[:, ib]
        tr = rne_shift_arr(br * wr - bi * wi, FFT_FRAC)
        ti = rne_shift_arr(br * wi + bi * wr, FFT_FRAC)
        ar = re[:, ia]
        ai = im[:, ia]
        re[:, ia] = rne_shift_arr(ar + tr, 1)
        im[:, ia] = rne_shift_arr(ai + ti, 1)
        re[:, ib] = rne_shift_arr(ar - tr, 1)
        im[:, ib] = rne_shift_arr(ai - ti, 1)
        size <<= 1


def _cordic_np(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    zero = (x == 0) & (y == 0)
    X = x << CORDIC_GUARD
    Y = y << CORDIC_GUARD
    neg = X < 0
    up = Y >= 0
    Xp = np.where(neg, np.where(up, Y, -Y), X)
    Z = np.where(neg, np.where(up, _HALF_PI_ACC, -_HALF_PI_ACC), 0).astype(np.int64)
    Y = np.where(neg, np.where(up, -X, X), Y)
    X = Xp
    for i in range(CORDIC_ITERS):
        pos = Y >= 0
        xs = X >> i
        ys = Y >> i
        Xn = np.where(pos, X + ys, X - ys)
        Yn = np.where(pos, Y - xs, Y + xs)
        Z = np.where(pos, Z + _ATAN_ACC[i], Z - _ATAN_ACC[i])
        X, Y = Xn, Yn
    mag = rne_shift_arr(X * INV_GAIN_Q23, 23 + CORDIC_GUARD)
    mag = np.clip(mag, 0, Q23_MAX)
    ph = rne_shift_arr(Z, PHASE_ACC_FRAC - 21)
    ph = np.where(ph > PI_Q21, ph - TWO_PI_Q21, ph)
    ph = np.where(ph < -PI_Q21, ph + TWO_PI_Q21, ph)
    mag = np.where(zero, 0, mag)
    ph = np.where(zero, 0, ph)
    return mag, ph


def _cfar_window_np(mag: np.ndarray, guard: int, window: int) -> tuple[np.ndarray, np.ndarray]:
    nk, _ = mag.shape
    csum = np.zeros((nk + 1, mag.shape[1]), dtype=np.int64)
    np.cumsum(mag, axis=0, out=csum[1:])
    k = np.arange(nk)

    def seg(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lo_c = np.clip(lo, 0, nk)
        hi_c = np.maximum(np.clip(hi, 0, nk), lo_c)
        return csum[hi_c] - csum[lo_c], hi_c - lo_c

    lsum, lcnt = seg(k - guard - window, k - guard)
    rsum, rcnt = seg(k + guard + 1, k + guard + 1 + window)
    total = lsum + rsum
    count = lcnt + rcnt
    return total, count


# ---------------------------------------------------------------------------
# numba backend

if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _rne_shift_s(v: np.int64, shift: np.int64) -> np.int64:
        q = v >> shift
        r = v - (q << shift)
        half = 1 << (shift - 1)
        if r > half or (r == half and (q & 1) == 1):
            q += 1
        return q

    @njit(cache=True)
    def _fft_stages_nb(re, im, twr, twi):
        batch, n = re.shape
        for b in range(batch):
            size = 2
            while size <= n:
                half = size >> 1
                step = n // size
                for start in range(0, n, size):
                    for j in range(half):
                        wr = twr[j * step]
                        wi = twi[j * step]
                        br = re[b, start + j + half]
                        bi = im[b, start + j + half]
                        tr = _rne_shift_s(br * wr - bi * wi, FFT_FRAC)
                        ti = _rne_shift_s(br * wi + bi * wr, FFT_FRAC)
                        ar = re[b, start + j]
                        ai = im[b, start + j]
                        re[b, start + j] = _rne_shift_s(ar + tr, 1)
                        im[b, start + j] = _rne_shift_s(ai + ti, 1)
                        re[b, start + j + half] = _rne_shift_s(ar - tr, 1)
                        im[b, start + j + half] = _rne_shift_s(ai - ti, 1)
                size <<= 1

    @njit(cache=True)
    def _cordic_nb(x, y, atan_acc, out_mag, out_ph):
        for idx in range(x.size):
            xi = x[idx]
            yi = y[idx]
            if xi == 0 and yi == 0:
                out_mag[idx] = 0
                out_ph[idx] = 0
                continue
            X = xi << CORDIC_GUARD
            Y = yi << CORDIC_GUARD
            Z = np.int64(0)
            if X < 0:
                if Y >= 0:
                    X, Y, Z = Y, -X, np.int64(_HALF_PI_ACC)
                else:
                    X, Y, Z = -Y, X, np.int64(-_HALF_PI_ACC)
            for i in range(CORDIC_ITERS):
                xs = X >> i
                ys = Y >> i
                if Y >= 0:
                    X = X + ys
                    Y = Y - xs
                    Z = Z + atan_acc[i]
                else:
                    X = X - ys
                    Y = Y + xs
                    Z = Z - atan_acc[i]
            mag = _rne_shift_s(X * INV_GAIN_Q23, 23 + CORDIC_GUARD)
            if mag > Q23_MAX:
                mag = Q23_MAX
            elif mag < 0:
                mag = 0
            ph = _rne_shift_s(Z, PHASE_ACC_FRAC - 21)
            if ph > PI_Q21:
                ph -= TWO_PI_Q21
            elif ph < -PI_Q21:
                ph += TWO_PI_Q21
            out_mag[idx] = mag
            out_ph[idx] = ph

    @njit(cache=True)
    def _cfar_window_nb(mag, guard, window):
        nk, nd = mag.shape
        total = np.zeros((nk, nd), dtype=np.int64)
        count = np.zeros(nk, dtype=np.int64)
        for k in range(nk):
            cells = 0
            for off in range(1, window + 1):
                lo = k - guard - off
                hi = k + guard + off
                if lo >= 0:
                    cells += 1
                    for d in range(nd):
                        total[k, d] += mag[lo, d]
                if hi < nk:
                    cells += 1
                    for d in range(nd):
                        total[k, d] += mag[hi, d]
            count[k] = cells
        return total, count


# ---------------------------------------------------------------------------
# public entry points (backend dispatch)

def fft_fixed(re27: np.ndarray, im27: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Radix-2 DIT FFT with per-stage 1/2 scaling on Q0.27 raw batches.

    Input shape (batch, n), natural order; returns new arrays, same shape.
    """
    n = re27.shape[1]
    perm = bitrev_permutation(n)
    re = np.ascontiguousarray(re27[:, perm])
    im = np.ascontiguousarray(im27[:, perm])
    twr, twi = twiddles(n)
    if USE_NUMBA:
        _fft_stages_nb(re, im, twr, twi)
    else:
        _fft_stages_np(re, im, twr, twi)
    return re, im


def cordic_vectoring_arr(x23: np.ndarray, y23: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectoring-mode CORDIC on Q0.23 raw arrays -> (Q0.23 magnitude, Q2.21 phase)."""
    x = np.ascontiguousarray(x23, dtype=np.int64).reshape(-1)
    y = np.ascontiguousarray(y23, dtype=np.int64).reshape(-1)
    if USE_NUMBA:
        mag = np.empty_like(x)
        ph = np.empty_like(x)
        _cordic_nb(x, y, _ATAN_ACC, mag, ph)
    else:
        mag, ph = _cordic_np(x, y)
    shape = np.shape(x23)
    return mag.reshape(shape), ph.reshape(shape)


def cfar_window_sums(mag: np.ndarray, guard: int, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Training-window sums along the range axis for every cell.

    Returns (total[k, d], count[k]): W cells each side beyond G guard cells,
    truncated at the map edges.
    """
    m = np.ascontiguousarray(mag, dtype=np.int64)
    if USE_NUMBA:
        return _cfar_window_nb(m, guard, window)
    return _cfar_window_np(m, guard, window)


def cfar_thresholds(mag: np.ndarray, guard: int, window: int, alpha_raw: int) -> tuple[np.ndarray, np.ndarray]:
    """CA-CFAR thresholds: alpha * mean(training window), both fixed-point.

    The mean uses RNE division; the scaling mirrors sat_mul into Q0.23.
    Returns (threshold[k, d], count[k]).
    """
    total, count = cfar_window_sums(mag, guard, window)
    mean = rne_div_nonneg(total, count[:, None])
    thr = np.clip(rne_shift_arr(mean * np.int64(alpha_raw), 8), 0, Q23_MAX)
    return thr, count
