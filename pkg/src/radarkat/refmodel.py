"""Floating-point golden model of the DSP chain.

Each calc_* method is the exact real-arithmetic counterpart of one device
step, double precision throughout.  With the quantization toggle on, results
are snapped to the step's memory format at the step boundary, which is what
scenario expectation files store and what the device sees between steps.
The methods are stand-alone but cascade naturally (run_chain).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import ChainConfig, Direction, Window
from .fixedpoint import Q0_23, Q2_21, Q12_4, QFormat


@dataclass
class ModelConfig:
    chain: ChainConfig = field(default_factory=ChainConfig)
    quantize: bool = True


def quantize_raw(x: np.ndarray, fmt: QFormat) -> np.ndarray:
    """RNE-round float values onto a Q-format grid, saturated, as raw int64."""
    raw = np.rint(np.asarray(x, dtype=np.float64) * fmt.scale)
    return np.clip(raw, fmt.raw_min, fmt.raw_max).astype(np.int64)


def snap(x: np.ndarray, fmt: QFormat) -> np.ndarray:
    """Quantize float values in place on the format grid, still as floats."""
    return quantize_raw(x, fmt) / fmt.scale


def snap_complex(x: np.ndarray, fmt: QFormat) -> np.ndarray:
    return snap(x.real, fmt) + 1j * snap(x.imag, fmt)


def hann_window(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


@dataclass(frozen=True)
class ModelTarget:
    range_bin: int
    doppler_bin: int
    magnitude: float
    magnitude_raw: int


@dataclass(frozen=True)
class ModelAngle:
    range_bin: int
    doppler_bin: int
    az_phase: float
    el_phase: float
    az_phase_raw: int
    el_phase_raw: int
    direction: Direction


def calc_mti_result(data: np.ndarray, mc: ModelConfig) -> np.ndarray:
    """Consecutive-burst difference, (R, M, N) -> (R, M-1, N)."""
    cfg = mc.chain
    data = np.asarray(data, dtype=np.float64)
    if data.shape != (cfg.r, cfg.m, cfg.n):
        raise ValueError(f"expected {(cfg.r, cfg.m, cfg.n)}, got {data.shape}")
    out = data[:, 1:, :] - data[:, :-1, :] if cfg.mti_enabled else data[:, 1:, :]
    if mc.quantize:
        out = snap(out, Q12_4)
    return out


def calc_range_fft_result(data: np.ndarray, mc: ModelConfig) -> np.ndarray:
    """Windowed real-input DFT scaled by 1/N, bins 0..N/2-1.

    Input is in Q12.4 value units; output lives in Q0.23 units, i.e. the
    input is normalized by 2^11 so full scale maps into (-1, 1).
    """
    cfg = mc.chain
    data = np.asarray(data, dtype=np.float64)
    n = cfg.n
    x = data / 2.0 ** 11
    if cfg.window == Window.HANN:
        x = x * hann_window(n)
    bins = np.fft.fft(x, axis=-1)[..., : n // 2] / n
    if mc.quantize:
        bins = snap_complex(bins, Q0_23)
    return bins


def calc_doppler_fft_result(data: np.ndarray, mc: ModelConfig) -> np.ndarray:
    """Per range bin, complex DFT across bursts scaled by 1/(M-1).

    Input (R, M-1, N/2) -> output (R, N/2, M-1), matching the memory layout.
    """
    cfg = mc.chain
    data = np.asarray(data, dtype=np.complex128)
    d = cfg.doppler_bins
    series = np.swapaxes(data, -1, -2)
    bins = np.fft.fft(series, axis=-1) / d
    if mc.quantize:
        bins = snap_complex(bins, Q0_23)
    return bins


def _cfar_internals(
    data: np.ndarray, mc: ModelConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Summed magnitude map, threshold map, and training-cell counts."""
    cfg = mc.chain
    mag = np.abs(np.asarray(data, dtype=np.complex128)).sum(axis=0)
    nk = cfg.range_bins
    g, w = cfg.cfar_guard, cfg.cfar_window
    csum = np.zeros((nk + 1, mag.shape[1]))
    np.cumsum(mag, axis=0, out=csum[1:])
    k = np.arange(nk)

    def seg(lo, hi):
        lo_c = np.clip(lo, 0, nk)
        hi_c = np.maximum(np.clip(hi, 0, nk), lo_c)
        return csum[hi_c] - csum[lo_c], hi_c - lo_c

    lsum, lcnt = seg(k - g - w, k - g)
    rsum, rcnt = seg(k + g + 1, k + g + 1 + w)
    count = lcnt + rcnt
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(count[:, None] > 0, (lsum + rsum) / np.maximum(count, 1)[:, None], 0.0)
    alpha = cfg.cfar_alpha_raw / 256.0
    return mag, alpha * mean, count


def calc_cfar_result(data: np.ndarray, mc: ModelConfig) -> list[ModelTarget]:
    """CA-CFAR with exact magnitudes and exact means; same detection rule,
    exclusions, ordering and cap as the device."""
    cfg = mc.chain
    mag, thr, count = _cfar_internals(data, mc)
    det = (mag > thr) & (count[:, None] > 0)
    det[:, 0] = False
    hits = [
        ModelTarget(int(k), int(d), float(mag[k, d]), int(quantize_raw(mag[k, d], Q0_23)))
        for k, d in zip(*np.nonzero(det))
    ]
    hits.sort(key=lambda t: (-t.magnitude, t.range_bin, t.doppler_bin))
    return hits[: cfg.max_targets]


def calc_angle_result(
    data: np.ndarray, mc: ModelConfig, targets: list[ModelTarget] | None = None
) -> list[ModelAngle]:
    """Exact complex-argument phase differences for each detected target."""
    cfg = mc.chain
    if cfg.r < 3:
        raise ValueError("angle estimation requires 3 RX channels")
    if targets is None:
        targets = calc_cfar_result(data, mc)
    data = np.asarray(data, dtype=np.complex128)
    half = cfg.doppler_bins // 2
    out: list[ModelAngle] = []
    for t in targets:
        k, d = t.range_bin, t.doppler_bin
        ref = data[0, k, d]
        az = float(np.angle(data[1, k, d] * np.conj(ref)))
        el = float(np.angle(data[2, k, d] * np.conj(ref)))
        if d == half:
            direction = Direction.STATIC
        elif d < half:
            direction = Direction.APPROACHING
        else:
            direction = Direction.RECEDING
        out.append(
            ModelAngle(
                k,
                d,
                az,
                el,
                int(quantize_raw(az, Q2_21)),
                int(quantize_raw(el, Q2_21)),
                direction,
            )
        )
    return out


@dataclass
class ModelFrame:
    mti: np.ndarray
    rfft: np.ndarray
    cfft: np.ndarray
    targets: list[ModelTarget]
    angles: list[ModelAngle]


def run_chain(adc: np.ndarray, mc: ModelConfig) -> ModelFrame:
    """Cascade all steps; intermediate results quantize at each boundary
    when the toggle is on, exactly as the device's memory hand-off does."""
    mti = calc_mti_result(adc, mc)
    rfft = calc_range_fft_result(mti, mc)
    cfft = calc_doppler_fft_result(rfft, mc)
    targets = calc_cfar_result(cfft, mc)
    angles = calc_angle_result(cfft, mc, targets) if mc.chain.r == 3 else []
    return ModelFrame(mti, rfft, cfft, targets, angles)
