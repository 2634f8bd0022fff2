"""Bit-accurate fixed-point model of the five-step radar DSP chain.

Data conventions: everything is int64 raw values.  ADC/MTI samples are
Q12.4 (16-bit), FFT bins and magnitudes Q0.23 (24-bit, complex data carries
a trailing axis of size 2 for real/imag), phases Q2.21.  All operations are
pure functions of their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import kernels
from .fixedpoint import Q12_4, rne_shift
from .kernels import FFT_FRAC, Q23_MAX, rne_shift_arr, sat_q23_arr

Q12_MAX = Q12_4.raw_max
Q12_MIN = Q12_4.raw_min


class Window(IntEnum):
    NONE = 0
    HANN = 1


class Step(IntEnum):
    MTI = 0
    RFFT = 1
    CFFT = 2
    CFAR = 3
    AE = 4


class Direction(IntEnum):
    APPROACHING = 0
    RECEDING = 1
    STATIC = 2


STEP_NAMES = {s: s.name.lower() for s in Step}


@dataclass
class ChainConfig:
    """Frame geometry and detection parameters of the modeled device."""

    n: int = 64                 # samples per burst
    m: int = 17                 # bursts per frame
    r: int = 3                  # RX channels
    mti_enabled: bool = True
    window: Window = Window.HANN
    cfar_alpha_raw: int = 0x0400  # Q8.8, 4.0
    cfar_guard: int = 1
    cfar_window: int = 4
    max_targets: int = 8
    consec_hits: int = 2

    def validate(self) -> None:
        def power_of_two(v: int) -> bool:
            return v > 0 and (v & (v - 1)) == 0

        if not power_of_two(self.n) or not 16 <= self.n <= 256:
            raise ValueError(f"n must be a power of two in [16, 256], got {self.n}")
        if not power_of_two(self.m - 1) or self.m - 1 < 2:
            raise ValueError(f"m-1 must be a power of two >= 2, got {self.m - 1}")
        if not 1 <= self.r <= 3:
            raise ValueError(f"r must be in [1, 3], got {self.r}")
        if self.cfar_guard < 0:
            raise ValueError("cfar_guard must be >= 0")
        if self.cfar_window < 1:
            raise ValueError("cfar_window must be >= 1")
        if not 1 <= self.max_targets <= 16:
            raise ValueError("max_targets must be in [1, 16] (result register capacity)")
        if not 0 < self.cfar_alpha_raw <= 0x7FFF:
            raise ValueError("cfar_alpha_raw must be a positive Q8.8 value")
        if self.consec_hits < 1:
            raise ValueError("consec_hits must be >= 1")
        # The fixed region bases cap how large a frame fits in memory.
        from .memimage import region_for

        for step in ("adc", "mti", "rfft", "cfft"):
            region_for(step, self)

    @property
    def doppler_bins(self) -> int:
        return self.m - 1

    @property
    def range_bins(self) -> int:
        return self.n // 2


@dataclass(frozen=True)
class Target:
    range_bin: int
    doppler_bin: int
    magnitude_raw: int


@dataclass(frozen=True)
class AngleResult:
    range_bin: int
    doppler_bin: int
    az_phase_raw: int
    el_phase_raw: int
    direction: Direction


# ---------------------------------------------------------------------------
# MTI

def mti(bursts: np.ndarray, cfg: ChainConfig) -> np.ndarray:
    """Burst-to-burst saturating difference; pass-through of bursts 1..M-1
    when disabled (dimensions stay config-independent)."""
    bursts = np.asarray(bursts, dtype=np.int64)
    if bursts.shape != (cfg.r, cfg.m, cfg.n):
        raise ValueError(
            f"expected burst set shape {(cfg.r, cfg.m, cfg.n)}, got {bursts.shape}"
        )
    if not cfg.mti_enabled:
        return bursts[:, 1:, :].copy()
    diff = bursts[:, 1:, :] - bursts[:, :-1, :]
    return np.clip(diff, Q12_MIN, Q12_MAX)


# ---------------------------------------------------------------------------
# FFTs

def _finish_fft(re27: np.ndarray, im27: np.ndarray) -> np.ndarray:
    out = np.stack(
        (
            sat_q23_arr(rne_shift_arr(re27, FFT_FRAC - 23)),
            sat_q23_arr(rne_shift_arr(im27, FFT_FRAC - 23)),
        ),
        axis=-1,
    )
    return out


def rfft_batch(samples: np.ndarray, cfg: ChainConfig) -> np.ndarray:
    """Range FFT of Q12.4 sample bursts, shape (batch, N) -> (batch, N/2, 2).

    Input raws are normalized into Q0.23 full scale (a left shift, exact),
    the optional Hann window applied, then a radix-2 DIT FFT with per-stage
    1/2 scaling (net 1/N); bins 0..N/2-1 are returned as Q0.23 pairs.
    """
    samples = np.asarray(samples, dtype=np.int64)
    n = cfg.n
    if samples.ndim != 2 or samples.shape[1] != n:
        raise ValueError(f"expected shape (batch, {n}), got {samples.shape}")
    # Q12.4 raw -> Q0.27 raw of value/2^11: << (8 + FFT_GUARD)
    re = samples << (8 + FFT_FRAC - 23)
    if cfg.window == Window.HANN:
        re = rne_shift_arr(re * kernels.hann_q27(n), FFT_FRAC)
    im = np.zeros_like(re)
    re, im = kernels.fft_fixed(re, im)
    return _finish_fft(re[:, : n // 2], im[:, : n // 2])


def rfft(samples: np.ndarray, cfg: ChainConfig) -> np.ndarray:
    """Single-burst range FFT: (N,) Q12.4 raws -> (N/2, 2) Q0.23 raws."""
    return rfft_batch(np.asarray(samples, dtype=np.int64)[None, :], cfg)[0]


def cfft_batch(series: np.ndarray, cfg: ChainConfig) -> np.ndarray:
    """Doppler FFT of complex Q0.23 series, (batch, M-1, 2) -> same shape."""
    series = np.asarray(series, dtype=np.int64)
    d = cfg.doppler_bins
    if series.ndim != 3 or series.shape[1:] != (d, 2):
        raise ValueError(f"expected shape (batch, {d}, 2), got {series.shape}")
    re = series[..., 0] << (FFT_FRAC - 23)
    im = series[..., 1] << (FFT_FRAC - 23)
    re, im = kernels.fft_fixed(re, im)
    return _finish_fft(re, im)


def cfft(series: np.ndarray, cfg: ChainConfig) -> np.ndarray:
    """Single Doppler series: (M-1, 2) Q0.23 raws -> (M-1, 2) Q0.23 bins."""
    return cfft_batch(np.asarray(series, dtype=np.int64)[None, :, :], cfg)[0]


# ---------------------------------------------------------------------------
# CORDIC

def cordic_vectoring(x_raw: int, y_raw: int) -> tuple[int, int]:
    """Magnitude (Q0.23) and phase (Q2.21) of one Q0.23 vector; (0,0)->(0,0)."""
    mag, ph = kernels.cordic_vectoring_arr(
        np.array([x_raw], dtype=np.int64), np.array([y_raw], dtype=np.int64)
    )
    return int(mag[0]), int(ph[0])


# ---------------------------------------------------------------------------
# CFAR

def magnitude_map(maps: np.ndarray) -> np.ndarray:
    """Non-coherent channel sum of CORDIC magnitudes, saturating at Q0.23."""
    maps = np.asarray(maps, dtype=np.int64)
    mag, _ = kernels.cordic_vectoring_arr(maps[..., 0], maps[..., 1])
    summed = mag.sum(axis=0)
    return np.clip(summed, 0, Q23_MAX)


def cfar(maps: np.ndarray, cfg: ChainConfig) -> list[Target]:
    """CA-CFAR along the range axis of the summed magnitude map.

    Doppler bin 0 is excluded (static clutter), detections are sorted by
    descending magnitude with ties broken by lower range then Doppler bin,
    and the list is capped at max_targets.
    """
    maps = np.asarray(maps, dtype=np.int64)
    if maps.shape != (cfg.r, cfg.range_bins, cfg.doppler_bins, 2):
        raise ValueError(
            f"expected map shape {(cfg.r, cfg.range_bins, cfg.doppler_bins, 2)},"
            f" got {maps.shape}"
        )
    mag = magnitude_map(maps)
    thr, count = kernels.cfar_thresholds(
        mag, cfg.cfar_guard, cfg.cfar_window, cfg.cfar_alpha_raw
    )
    det = (mag > thr) & (count[:, None] > 0)
    det[:, 0] = False
    hits = [
        Target(int(k), int(d), int(mag[k, d]))
        for k, d in zip(*np.nonzero(det))
    ]
    hits.sort(key=lambda t: (-t.magnitude_raw, t.range_bin, t.doppler_bin))
    return hits[: cfg.max_targets]


# ---------------------------------------------------------------------------
# Angle estimation

def _normalize_pair(re: int, im: int) -> tuple[int, int]:
    """Scale a wide cross-product so max(|re|,|im|) sits in [2^21, 2^22)."""
    top = max(abs(re), abs(im))
    if top == 0:
        return 0, 0
    shift = 22 - top.bit_length()
    if shift >= 0:
        return re << shift, im << shift
    return rne_shift(re, -shift), rne_shift(im, -shift)


def angle_estimate(
    targets: list[Target], maps: np.ndarray, cfg: ChainConfig
) -> list[AngleResult]:
    """Azimuth/elevation phases from inter-channel products at each target.

    Channels 0/1/2 are the reference, azimuth-offset and elevation-offset
    antennas; the phase of X1*conj(X0) (resp. X2) is taken with CORDIC.
    """
    if cfg.r < 3:
        raise ValueError("angle estimation requires 3 RX channels")
    maps = np.asarray(maps, dtype=np.int64)
    half = cfg.doppler_bins // 2
    out: list[AngleResult] = []
    for t in targets:
        k, d = t.range_bin, t.doppler_bin
        x0 = maps[0, k, d]
        phases = []
        for ch in (1, 2):
            xc = maps[ch, k, d]
            re = int(xc[0]) * int(x0[0]) + int(xc[1]) * int(x0[1])
            im = int(xc[1]) * int(x0[0]) - int(xc[0]) * int(x0[1])
            re, im = _normalize_pair(re, im)
            _, ph = cordic_vectoring(re, im)
            phases.append(ph)
        if d == half:
            direction = Direction.STATIC
        elif d < half:
            direction = Direction.APPROACHING
        else:
            direction = Direction.RECEDING
        out.append(AngleResult(k, d, phases[0], phases[1], direction))
    return out


# ---------------------------------------------------------------------------
# cycle cost model

def step_duration(step: Step | str, cfg: ChainConfig, target_count: int = 0) -> int:
    """Deterministic cycle cost of a step (or 'full' for the whole chain)."""
    if isinstance(step, str) and step.lower() == "full":
        return sum(
            step_duration(s, cfg, target_count) for s in Step
        )
    if isinstance(step, str):
        step = Step[step.upper()]
    n, m, r = cfg.n, cfg.m, cfg.r
    dop = m - 1
    half = n // 2
    logn = int(math.log2(n))
    logd = int(math.log2(dop))
    if step == Step.MTI:
        return r * dop * n
    if step == Step.RFFT:
        return r * dop * half * logn
    if step == Step.CFFT:
        return r * half * (dop // 2) * logd
    if step == Step.CFAR:
        return half * dop * (r + 2 * cfg.cfar_window + 2 * cfg.cfar_guard + 18)
    if step == Step.AE:
        return 2 * 18 * target_count
    raise ValueError(f"unknown step {step!r}")
