"""Synthesize target scenes into full scenario file sets.

ADC data is built from per-channel cosines (range bin sets the fast phase
ramp, Doppler bin the burst-to-burst ramp, the channel its angle phase
offset) plus seeded Gaussian noise, then quantized to Q12.4.  The golden
model computes every expected intermediate image and the final targets and
angles.  Generation refuses scenes whose targets sit too close together or
too close to the predicted CFAR threshold, since those make pass/fail
ambiguous downstream.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import refmodel
from .chain import ChainConfig, Window
from .fixedpoint import Q0_23, Q12_4
from .memimage import MemoryImage, region_for, write_region
from .refmodel import ModelConfig, quantize_raw
from .scenario import (
    ExpectedTarget,
    Scenario,
    load_scenario,
    save_scenario,
)

SEPARATION_DB = 6.0
PRNG_NAME = "numpy-pcg64"


class SeparationError(ValueError):
    pass


@dataclass
class TargetSpec:
    range_bin: float
    doppler_bin: float
    amplitude: float
    az_phase: float = 0.0
    el_phase: float = 0.0


@dataclass
class SceneSpec:
    name: str
    description: str = ""
    targets: list[TargetSpec] = field(default_factory=list)
    noise_rms: float = 0.0
    seed: int = 1
    config: ChainConfig = field(default_factory=ChainConfig)
    tolerance_overrides: dict[str, int] = field(default_factory=dict)

    def validate(self) -> None:
        self.config.validate()
        for t in self.targets:
            if not 0.0 < t.amplitude <= 1.0:
                raise ValueError(f"amplitude {t.amplitude} outside (0, 1]")
            if not 0 <= t.range_bin < self.config.range_bins:
                raise ValueError(f"range_bin {t.range_bin} outside the map")
            if not 0 <= t.doppler_bin < self.config.doppler_bins:
                raise ValueError(f"doppler_bin {t.doppler_bin} outside the map")
        if self.noise_rms < 0:
            raise ValueError("noise_rms must be >= 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["config"] = {
            "n": self.config.n,
            "m": self.config.m,
            "r": self.config.r,
            "mti_enabled": int(self.config.mti_enabled),
            "window_sel": int(self.config.window),
            "cfar_alpha": self.config.cfar_alpha_raw,
            "cfar_guard": self.config.cfar_guard,
            "cfar_window": self.config.cfar_window,
            "max_targets": self.config.max_targets,
            "consec_hits": self.config.consec_hits,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SceneSpec":
        from .scenario import config_from_registers

        return cls(
            name=d["name"],
            description=d.get("description", ""),
            targets=[TargetSpec(**t) for t in d.get("targets", [])],
            noise_rms=float(d.get("noise_rms", 0.0)),
            seed=int(d.get("seed", 1)),
            config=config_from_registers(d["config"]),
            tolerance_overrides={k: int(v) for k, v in d.get("tolerance_overrides", {}).items()},
        )


def synthesize_adc(spec: SceneSpec) -> np.ndarray:
    """Raw ADC scene in Q12.4 value units, shape (R, M, N), floats.

    Deterministic for a given seed; the quantizer downstream saturates.
    """
    spec.validate()
    cfg = spec.config
    full_scale = 2.0 ** 11
    n_idx = np.arange(cfg.n)
    m_idx = np.arange(cfg.m)
    data = np.zeros((cfg.r, cfg.m, cfg.n))
    for t in spec.targets:
        fast = 2.0 * np.pi * t.range_bin * n_idx / cfg.n
        slow = 2.0 * np.pi * t.doppler_bin * m_idx / cfg.doppler_bins
        for ch, phase in enumerate((0.0, t.az_phase, t.el_phase)[: cfg.r]):
            arg = fast[None, :] + slow[:, None] + phase
            data[ch] += t.amplitude * full_scale * np.cos(arg)
    if spec.noise_rms > 0:
        rng = np.random.default_rng(spec.seed)
        data += rng.normal(0.0, spec.noise_rms * full_scale, size=data.shape)
    return data


def quantized_adc(spec: SceneSpec) -> np.ndarray:
    """Q12.4 raw int64 ADC samples, shape (R, M, N)."""
    return quantize_raw(synthesize_adc(spec), Q12_4)


def _predicted_maps(spec: SceneSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray, ModelConfig]:
    mc = ModelConfig(spec.config, quantize=True)
    adc = quantized_adc(spec) / Q12_4.scale
    frame = refmodel.run_chain(adc, mc)
    mag, thr, count = refmodel._cfar_internals(frame.cfft, mc)
    return mag, thr, count, mc


def check_separation(spec: SceneSpec) -> list[str]:
    """Ambiguity-margin check: any two target amplitudes within 6 dB of each
    other, or any target within 6 dB of its predicted CFAR threshold, is a
    violation."""
    spec.validate()
    violations: list[str] = []
    amps = [t.amplitude for t in spec.targets]
    for i in range(len(amps)):
        for j in range(i + 1, len(amps)):
            gap = abs(20.0 * math.log10(amps[i] / amps[j]))
            if gap < SEPARATION_DB:
                violations.append(
                    f"targets {i} and {j}: amplitudes {amps[i]} and {amps[j]} "
                    f"only {gap:.2f} dB apart (< {SEPARATION_DB} dB)"
                )
    if spec.targets:
        mag, thr, count, _ = _predicted_maps(spec)
        det = (mag > thr) & np.broadcast_to((count > 0)[:, None], mag.shape)
        det[:, 0] = False
        predicted = {(int(k), int(d)) for k, d in zip(*np.nonzero(det))}
        wanted = {
            (int(round(t.range_bin)), int(round(t.doppler_bin))) for t in spec.targets
        }
        for cell in sorted(predicted - wanted):
            violations.append(
                f"spurious detection predicted at bin {cell} (not a spec target)"
            )
        for i, t in enumerate(spec.targets):
            k = int(round(t.range_bin))
            d = int(round(t.doppler_bin))
            cell = mag[k, d]
            cell_thr = thr[k, d]
            if cell <= cell_thr:
                violations.append(
                    f"target {i}: predicted magnitude {cell:.4g} below CFAR "
                    f"threshold {cell_thr:.4g} at bin ({k}, {d})"
                )
            elif cell_thr > 0:
                margin = 20.0 * math.log10(cell / cell_thr)
                if margin < SEPARATION_DB:
                    violations.append(
                        f"target {i}: only {margin:.2f} dB above the predicted "
                        f"CFAR threshold at bin ({k}, {d})"
                    )
            if cell >= 0.98:
                violations.append(
                    f"target {i}: predicted magnitude {cell:.3f} risks saturating "
                    f"the Q0.23 sum"
                )
    return violations


def generate_scenario(spec: SceneSpec, out_dir: str | Path, force: bool = False) -> Scenario:
    """Write the complete scenario file set and return the loaded result.

    Intermediate images come from the golden model with quantization on;
    expected targets/angles from its CFAR and angle steps.
    """
    violations = check_separation(spec)
    if violations and not force:
        raise SeparationError("; ".join(violations))
    cfg = spec.config
    mc = ModelConfig(cfg, quantize=True)
    adc_raw = quantized_adc(spec)
    frame = refmodel.run_chain(adc_raw / Q12_4.scale, mc)

    adc_layout = region_for("adc", cfg)
    adc_full = write_region(MemoryImage(16), adc_layout, adc_raw)
    per_channel = cfg.m * cfg.n
    adc_images = []
    for ch in range(cfg.r):
        img = MemoryImage(16)
        start = adc_layout.base + ch * per_channel
        for addr in range(start, start + per_channel):
            img.cells[addr] = adc_full.cells[addr]
        adc_images.append(img)

    mti_img = write_region(
        MemoryImage(16), region_for("mti", cfg), quantize_raw(frame.mti, Q12_4)
    )
    rfft_img = write_region(
        MemoryImage(24),
        region_for("rfft", cfg),
        _complex_raw(frame.rfft),
    )
    cfft_img = write_region(
        MemoryImage(24),
        region_for("cfft", cfg),
        _complex_raw(frame.cfft),
    )

    angles = {(a.range_bin, a.doppler_bin): a for a in frame.angles}
    expected = []
    for t in frame.targets:
        ang = angles.get((t.range_bin, t.doppler_bin))
        expected.append(
            ExpectedTarget(
                range_bin=t.range_bin,
                doppler_bin=t.doppler_bin,
                magnitude_raw=t.magnitude_raw,
                az_phase_raw=None if ang is None else ang.az_phase_raw,
                el_phase_raw=None if ang is None else ang.el_phase_raw,
                direction=None if ang is None else ang.direction.name,
            )
        )

    from .harness import ToleranceTable

    tol = ToleranceTable.from_dict(spec.tolerance_overrides)
    scen = Scenario(
        name=spec.name,
        description=spec.description,
        config=cfg,
        adc_images=adc_images,
        mti_image=mti_img,
        rfft_image=rfft_img,
        cfft_image=cfft_img,
        expected_targets=expected,
        tolerances=tol,
        meta={
            "seed": spec.seed,
            "prng": PRNG_NAME,
            "separation_db": SEPARATION_DB,
            "forced": bool(violations),
            "scene": spec.to_dict(),
        },
    )
    save_scenario(scen, out_dir)
    return load_scenario(out_dir)


def _complex_raw(data: np.ndarray) -> np.ndarray:
    return np.stack(
        (quantize_raw(data.real, Q0_23), quantize_raw(data.imag, Q0_23)), axis=-1
    )


def builtin_specs() -> dict[str, SceneSpec]:
    """The three built-in scenes of the minimal scenario set."""
    base = dict(mti_enabled=True, window=Window.NONE, cfar_guard=1, cfar_window=4, consec_hits=2)
    single = SceneSpec(
        name="single",
        description="Strong single target in a low-noise environment.",
        targets=[TargetSpec(range_bin=7, doppler_bin=3, amplitude=0.5, az_phase=math.pi / 4, el_phase=-math.pi / 6)],
        noise_rms=0.03,
        seed=101,
        config=ChainConfig(cfar_alpha_raw=0x0600, max_targets=8, **base),
    )
    multi = SceneSpec(
        name="multi",
        description=(
            "Three targets with distinct ranges, velocities, directions and "
            "clearly separated amplitudes."
        ),
        targets=[
            TargetSpec(range_bin=7, doppler_bin=3, amplitude=0.52, az_phase=0.7, el_phase=-0.4),
            TargetSpec(range_bin=17, doppler_bin=12, amplitude=0.24, az_phase=-1.9, el_phase=1.1),
            TargetSpec(range_bin=26, doppler_bin=8, amplitude=0.11, az_phase=2.4, el_phase=-2.5),
        ],
        noise_rms=0.03,
        seed=202,
        config=ChainConfig(cfar_alpha_raw=0x0600, max_targets=5, **base),
        # Weak Hann-window cells carry proportionally more phase rounding
        # noise; feature tests that sweep the window use this headroom.
        tolerance_overrides={"phase_lsb": 64},
    )
    noise = SceneSpec(
        name="noise",
        description=(
            "High-noise environment with one marginal target; detection "
            "depends on the threshold factor (refmodel sweep puts the "
            "loss point near alpha 24)."
        ),
        targets=[TargetSpec(range_bin=13, doppler_bin=5, amplitude=0.3, az_phase=1.2, el_phase=0.9)],
        noise_rms=0.12,
        seed=303,
        config=ChainConfig(cfar_alpha_raw=0x0400, max_targets=8, **base),
    )
    return {"single": single, "multi": multi, "noise": noise}


def generate_builtins(root: str | Path, force: bool = False) -> dict[str, Scenario]:
    """Generate the built-in scenario set under root/<name>/."""
    root = Path(root)
    out = {}
    for name, spec in builtin_specs().items():
        out[name] = generate_scenario(spec, root / name, force=force)
    return out
