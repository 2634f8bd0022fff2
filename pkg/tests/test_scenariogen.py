"""Scene synthesis, separation margins, and closed-loop generation."""

import dataclasses

import numpy as np
import pytest

from radarkat import refmodel
from radarkat.chain import ChainConfig, Window
from radarkat.refmodel import ModelConfig
from radarkat.scenario import load_scenario
from radarkat.scenariogen import (
    SceneSpec,
    SeparationError,
    TargetSpec,
    builtin_specs,
    check_separation,
    generate_scenario,
    quantized_adc,
    synthesize_adc,
)


def spec_with(targets, noise=0.0, alpha=0x0600, seed=1, **cfg_kw):
    cfg = ChainConfig(window=Window.NONE, cfar_alpha_raw=alpha, **cfg_kw)
    return SceneSpec(name="t", targets=targets, noise_rms=noise, seed=seed, config=cfg)


def test_zero_targets_zero_noise_is_silent():
    spec = spec_with([])
    assert not synthesize_adc(spec).any()


def test_synthesis_deterministic_per_seed():
    spec = builtin_specs()["noise"]
    a = quantized_adc(spec)
    b = quantized_adc(spec)
    assert (a == b).all()
    other = dataclasses.replace(spec, seed=spec.seed + 1)
    assert (quantized_adc(other) != a).any()


def test_single_tone_lands_in_its_range_bin():
    spec = spec_with(
        [TargetSpec(range_bin=11, doppler_bin=4, amplitude=0.4)],
        mti_enabled=False,
    )
    adc = quantized_adc(spec) / 16.0
    mc = ModelConfig(spec.config, quantize=False)
    bins = refmodel.calc_range_fft_result(adc[:, 1:, :], mc)
    peak = np.abs(bins[0]).max(axis=0)
    assert peak.argmax() == 11


def test_channel_phase_offsets_encode_angles():
    spec = spec_with(
        [TargetSpec(range_bin=9, doppler_bin=5, amplitude=0.4, az_phase=0.8, el_phase=-1.1)]
    )
    frame = refmodel.run_chain(
        quantized_adc(spec) / 16.0, ModelConfig(spec.config, quantize=False)
    )
    angles = refmodel.calc_angle_result(frame.cfft, ModelConfig(spec.config, False))
    assert angles[0].az_phase == pytest.approx(0.8, abs=1e-3)
    assert angles[0].el_phase == pytest.approx(-1.1, abs=1e-3)


def test_separation_accepts_14db_gap():
    spec = spec_with(
        [
            TargetSpec(range_bin=7, doppler_bin=3, amplitude=0.5),
            TargetSpec(range_bin=20, doppler_bin=10, amplitude=0.1),
        ]
    )
    gaps = [v for v in check_separation(spec) if "apart" in v]
    assert gaps == []


def test_separation_rejects_2db_gap():
    spec = spec_with(
        [
            TargetSpec(range_bin=7, doppler_bin=3, amplitude=0.5),
            TargetSpec(range_bin=20, doppler_bin=10, amplitude=0.4),
        ]
    )
    assert any("dB apart" in v for v in check_separation(spec))


def test_separation_single_strong_target_ok():
    spec = spec_with([TargetSpec(range_bin=7, doppler_bin=3, amplitude=0.5)], noise=0.03)
    assert check_separation(spec) == []


def test_separation_flags_subthreshold_target():
    spec = spec_with(
        [TargetSpec(range_bin=7, doppler_bin=3, amplitude=0.002)], noise=0.1
    )
    assert any("threshold" in v for v in check_separation(spec))


def test_generate_refuses_violations_unless_forced(tmp_path):
    spec = spec_with(
        [
            TargetSpec(range_bin=7, doppler_bin=3, amplitude=0.5),
            TargetSpec(range_bin=20, doppler_bin=10, amplitude=0.4),
        ],
        noise=0.03,
    )
    with pytest.raises(SeparationError):
        generate_scenario(spec, tmp_path / "refused")
    scen = generate_scenario(spec, tmp_path / "forced", force=True)
    assert scen.meta["forced"] is True


def test_generated_scenario_loads_and_validates(builtin_scenarios):
    from radarkat.scenario import validate_scenario

    for scen in builtin_scenarios.values():
        assert scen.path is not None
        again = load_scenario(scen.path)
        assert validate_scenario(again) == []
        assert again.meta["prng"] == "numpy-pcg64"
        assert "seed" in again.meta


def test_builtin_multi_has_three_expected_targets(builtin_scenarios):
    scen = builtin_scenarios["multi"]
    assert len(scen.expected_targets) == 3
    mags = [t.magnitude_raw for t in scen.expected_targets]
    assert mags == sorted(mags, reverse=True)
    directions = {t.direction for t in scen.expected_targets}
    assert directions == {"APPROACHING", "RECEDING", "STATIC"}


def test_noise_scenario_detection_depends_on_alpha(builtin_scenarios):
    """Sweep the threshold factor in the model: the marginal target must be
    detected at the scenario's alpha and lost at a higher one."""
    spec = builtin_specs()["noise"]
    adc = quantized_adc(spec) / 16.0
    detected_at = []
    for alpha_raw in [0x0400 * k for k in (1, 2, 4, 8, 16, 24)]:
        cfg = dataclasses.replace(spec.config, cfar_alpha_raw=alpha_raw)
        frame = refmodel.run_chain(adc, ModelConfig(cfg, quantize=True))
        hit = any(
            (t.range_bin, t.doppler_bin) == (13, 5) for t in frame.targets
        )
        detected_at.append((alpha_raw / 256.0, hit))
    assert detected_at[0] == (4.0, True)
    assert detected_at[-1][1] is False
    flips = sum(1 for (_, a), (_, b) in zip(detected_at, detected_at[1:]) if a != b)
    assert flips == 1  # one loss point as alpha grows


def test_specs_passing_separation_detect_exactly_their_targets():
    """Specs the separation gate accepts yield exactly the spec's targets.

    Pure zero-noise scenes rarely pass the gate: sample quantization leaves
    deterministic crumbs that beat the near-zero CFAR thresholds of quiet
    Doppler rows, and the gate flags those predicted spurious detections.
    A little dither restores clean floors, so the property is exercised at
    both zero and small noise levels.
    """
    rng = np.random.default_rng(77)
    accepted = 0
    for noise in (0.0, 0.03):
        for trial in range(25):
            n_targets = int(rng.integers(1, 4))
            used = set()
            targets = []
            amp = float(rng.uniform(0.3, 0.6))
            for i in range(n_targets):
                while True:
                    k = int(rng.integers(2, 30))
                    d = int(rng.integers(1, 16))
                    if all(abs(k - uk) > 6 or d != ud for uk, ud in used):
                        break
                used.add((k, d))
                targets.append(TargetSpec(range_bin=k, doppler_bin=d, amplitude=amp))
                amp /= 2.2  # keep pairwise gaps above 6 dB
            spec = spec_with(
                targets, noise=noise, alpha=0x0600, seed=int(rng.integers(1, 10000))
            )
            if check_separation(spec):
                continue
            accepted += 1
            frame = refmodel.run_chain(
                quantized_adc(spec) / 16.0, ModelConfig(spec.config, quantize=True)
            )
            got = {(t.range_bin, t.doppler_bin) for t in frame.targets}
            want = {(int(t.range_bin), int(t.doppler_bin)) for t in targets}
            assert got == want
    assert accepted >= 10


def test_separation_gate_catches_quantization_spurs():
    # a zero-noise scene whose quantization crumbs would be detected
    spec = spec_with(
        [TargetSpec(range_bin=7, doppler_bin=3, amplitude=0.5)], noise=0.0
    )
    violations = check_separation(spec)
    assert any("spurious" in v for v in violations)


def test_generated_scenarios_pass_their_own_step_kats(builtin_scenarios):
    from radarkat.harness import run_step_kat

    scen = builtin_scenarios["single"]
    for step in ("mti", "rfft", "cfft", "cfar", "ae"):
        report = run_step_kat(scen, step, "backdoor")
        assert report.passed and not report.mismatches, report.summary_line()


def test_scene_spec_json_round_trip():
    spec = builtin_specs()["multi"]
    again = SceneSpec.from_dict(spec.to_dict())
    assert again.name == spec.name
    assert again.targets == spec.targets
    assert again.config == spec.config
    assert again.tolerance_overrides == spec.tolerance_overrides


def test_amplitude_bounds_enforced():
    with pytest.raises(ValueError):
        spec_with([TargetSpec(range_bin=1, doppler_bin=1, amplitude=1.5)]).validate()
    with pytest.raises(ValueError):
        spec_with([TargetSpec(range_bin=40, doppler_bin=1, amplitude=0.5)]).validate()
    with pytest.raises(ValueError):
        spec_with([], noise=-0.1).validate()
