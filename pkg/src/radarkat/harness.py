"""Test styles, tolerance-aware comparison, and the regression runner.

Four test styles run against scenarios: step KATs (DFV-isolated, preloaded
inputs, one step triggered), full-path KATs (whole frame, intermediates and
results all checked), feature tests (seeded random configs, expectations
computed by the golden model), and use-case tests (inline hard-coded
expectations).  Comparisons are tolerance-aware in LSBs of the stored
format; two targets whose magnitudes sit within the magnitude tolerance may
legitimately swap order, which reports as a warning, not a failure.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import refmodel
from .chain import ChainConfig, Direction, Step, Target, Window
from .device import (
    CONFIG_REGS,
    REG_MODE,
    REG_TARGET_COUNT,
    TARGET_BLOCK_BASE,
    TARGET_BLOCK_STRIDE,
    Device,
    Mode,
)
from .fixedpoint import Q12_4, decode_word
from .kernels import phase_delta_q21
from .memimage import MemoryImage, RegionLayout, read_region, region_for
from .refmodel import ModelConfig
from .scenario import ExpectedTarget, Scenario, config_to_registers

FEATURES = ("motion", "acquire", "angle")
_TIE_RETRIES = 8


@dataclass
class ToleranceTable:
    """Per-step comparison tolerances in LSBs of the stored formats."""

    mti_lsb: int = 0
    rfft_lsb: int = 4
    cfft_lsb: int = 8
    magnitude_lsb: int = 16
    phase_lsb: int = 16

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ToleranceTable":
        tol = cls()
        for key, value in d.items():
            if not hasattr(tol, key):
                raise ValueError(f"unknown tolerance field {key!r}")
            value = int(value)
            if value < 0:
                raise ValueError(f"tolerance {key} must be >= 0")
            setattr(tol, key, value)
        return tol

    def to_dict(self) -> dict[str, int]:
        return {
            "mti_lsb": self.mti_lsb,
            "rfft_lsb": self.rfft_lsb,
            "cfft_lsb": self.cfft_lsb,
            "magnitude_lsb": self.magnitude_lsb,
            "phase_lsb": self.phase_lsb,
        }

    def for_step(self, step: Step) -> int:
        return {
            Step.MTI: self.mti_lsb,
            Step.RFFT: self.rfft_lsb,
            Step.CFFT: self.cfft_lsb,
        }[step]


@dataclass
class Mismatch:
    kind: str          # value | unwritten | count | missing_target | ...
    where: str
    expected: Any = None
    actual: Any = None
    delta: Any = None
    severity: str = "fail"  # fail | warn

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "where": self.where,
            "expected": self.expected,
            "actual": self.actual,
            "delta": self.delta,
            "severity": self.severity,
        }


@dataclass
class KatReport:
    scenario: str
    step: str
    access: str
    passed: bool
    mismatches: list[Mismatch] = field(default_factory=list)
    skipped: str | None = None
    duration_cycles: int = 0
    wall_ms: float = 0.0

    @property
    def failures(self) -> list[Mismatch]:
        return [m for m in self.mismatches if m.severity == "fail"]

    @property
    def warnings(self) -> list[Mismatch]:
        return [m for m in self.mismatches if m.severity == "warn"]

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "step": self.step,
            "access": self.access,
            "passed": self.passed,
            "skipped": self.skipped,
            "mismatches": [m.to_dict() for m in self.mismatches],
            "duration_cycles": self.duration_cycles,
            "wall_ms": round(self.wall_ms, 3),
        }

    def summary_line(self) -> str:
        if self.skipped:
            verdict = f"SKIP ({self.skipped})"
        elif self.passed:
            verdict = "PASS"
            if self.warnings:
                verdict += f" ({len(self.warnings)} tie-ambiguous)"
        else:
            verdict = f"FAIL ({len(self.failures)} mismatches)"
        return (
            f"[{verdict:<6}] scenario={self.scenario} step={self.step} "
            f"access={self.access} cycles={self.duration_cycles}"
        )


# ---------------------------------------------------------------------------
# comparators

def compare_mem(
    actual: MemoryImage, expected: MemoryImage, tol_lsb: int
) -> list[Mismatch]:
    """Signed word comparison at every expected address.

    Addresses present only in `actual` are ignored (scratch allowance);
    expected addresses missing from `actual` flag as unwritten.
    """
    if actual.word_bits != expected.word_bits:
        raise ValueError("images differ in word width")
    bits = expected.word_bits
    out: list[Mismatch] = []
    for addr in sorted(expected.cells):
        want = decode_word(expected.cells[addr], bits)
        got_word = actual.get(addr)
        if got_word is None:
            out.append(Mismatch("unwritten", f"0x{addr:04X}", expected=want))
            continue
        got = decode_word(got_word, bits)
        delta = got - want
        if abs(delta) > tol_lsb:
            out.append(Mismatch("value", f"0x{addr:04X}", want, got, delta))
    return out


def compare_targets(
    actual_targets: list[Target],
    actual_angles: dict[tuple[int, int], tuple[int, int, int]],
    expected: list[ExpectedTarget],
    tol: ToleranceTable,
    check_phases: bool = True,
) -> list[Mismatch]:
    """Match targets by (range, Doppler) bin; magnitudes and phases compare
    within their tolerances and the count must match exactly.  An order swap
    between targets whose magnitudes lie within magnitude_lsb of each other
    is tie-ambiguous (warning); any other order mismatch fails."""
    out: list[Mismatch] = []
    if len(actual_targets) != len(expected):
        out.append(
            Mismatch("count", "target list", len(expected), len(actual_targets))
        )
    actual_by_bin = {(t.range_bin, t.doppler_bin): t for t in actual_targets}
    expected_by_bin = {(t.range_bin, t.doppler_bin): t for t in expected}
    for exp in expected:
        key = (exp.range_bin, exp.doppler_bin)
        got = actual_by_bin.get(key)
        if got is None:
            out.append(Mismatch("missing_target", f"bin {key}", expected=key))
            continue
        delta = got.magnitude_raw - exp.magnitude_raw
        if abs(delta) > tol.magnitude_lsb:
            out.append(
                Mismatch("magnitude", f"bin {key}", exp.magnitude_raw, got.magnitude_raw, delta)
            )
        if check_phases and exp.az_phase_raw is not None:
            angles = actual_angles.get(key)
            if angles is None:
                out.append(Mismatch("missing_angles", f"bin {key}"))
            else:
                az, el, direction = angles
                for label, exp_ph, got_ph in (
                    ("az", exp.az_phase_raw, az),
                    ("el", exp.el_phase_raw, el),
                ):
                    d = phase_delta_q21(got_ph, exp_ph)
                    if abs(d) > tol.phase_lsb:
                        out.append(
                            Mismatch(f"{label}_phase", f"bin {key}", exp_ph, got_ph, d)
                        )
                if exp.direction is not None and Direction(direction).name != exp.direction:
                    out.append(
                        Mismatch(
                            "direction", f"bin {key}", exp.direction, Direction(direction).name
                        )
                    )
    for t in actual_targets:
        key = (t.range_bin, t.doppler_bin)
        if key not in expected_by_bin:
            out.append(Mismatch("unexpected_target", f"bin {key}", actual=key))
    # ordering: compare the relative order of matched targets
    actual_pos = {
        (t.range_bin, t.doppler_bin): i for i, t in enumerate(actual_targets)
    }
    matched = [t for t in expected if (t.range_bin, t.doppler_bin) in actual_pos]
    for i in range(len(matched)):
        for j in range(i + 1, len(matched)):
            a = matched[i]
            b = matched[j]
            if actual_pos[(a.range_bin, a.doppler_bin)] > actual_pos[(b.range_bin, b.doppler_bin)]:
                gap = abs(a.magnitude_raw - b.magnitude_raw)
                tie = gap <= tol.magnitude_lsb
                out.append(
                    Mismatch(
                        "tie_ambiguous_order" if tie else "order",
                        f"bins {(a.range_bin, a.doppler_bin)} vs {(b.range_bin, b.doppler_bin)}",
                        delta=gap,
                        severity="warn" if tie else "fail",
                    )
                )
    return out


# ---------------------------------------------------------------------------
# device plumbing shared by the test styles

def _program_config(dev: Device, cfg: ChainConfig) -> None:
    values = config_to_registers(cfg)
    by_name = {name: addr for addr, name in CONFIG_REGS.items()}
    for name, value in values.items():
        resp = dev.bus("WRITE", by_name[name], value)
        if not resp.ok:
            raise RuntimeError(f"config write failed: {resp.error}")


def _set_mode(dev: Device, mode: Mode) -> None:
    resp = dev.bus("WRITE", REG_MODE, int(mode))
    if not resp.ok:
        raise RuntimeError(resp.error)


def _preload(dev: Device, region: str, image: MemoryImage, access: str) -> None:
    if access == "backdoor":
        dev.backdoor_deposit(region, image)
        return
    for addr in sorted(image.cells):
        resp = dev.bus("WRITE", addr, image.cells[addr])
        if not resp.ok:
            raise RuntimeError(f"frontdoor preload failed: {resp.error}")


def _readout(dev: Device, layout: RegionLayout, access: str) -> MemoryImage:
    if access == "backdoor":
        return dev.backdoor_peek(layout.name)
    img = MemoryImage(layout.word_bits)
    for addr in layout.addresses():
        resp = dev.bus("READ", addr)
        if resp.ok:
            img.cells[addr] = resp.data
    return img


def _read_results(dev: Device) -> tuple[list[Target], dict[tuple[int, int], tuple[int, int, int]]]:
    """Targets and angles out of the RESULT registers via the frontdoor."""
    count = dev.bus("READ", REG_TARGET_COUNT).data
    targets: list[Target] = []
    angles: dict[tuple[int, int], tuple[int, int, int]] = {}
    for t in range(count):
        base = TARGET_BLOCK_BASE + t * TARGET_BLOCK_STRIDE
        words = [dev.bus("READ", base + off).data for off in range(6)]
        tgt = Target(words[0], words[1], decode_word(words[2], 24))
        targets.append(tgt)
        angles[(tgt.range_bin, tgt.doppler_bin)] = (
            decode_word(words[3], 24),
            decode_word(words[4], 24),
            words[5],
        )
    return targets, angles


_STEP_INPUTS = {
    Step.MTI: ("adc", None),
    Step.RFFT: ("mti", "mti_image"),
    Step.CFFT: ("rfft", "rfft_image"),
    Step.CFAR: ("cfft", "cfft_image"),
    Step.AE: ("cfft", "cfft_image"),
}

_STEP_EXPECTED_FILE = {
    Step.MTI: "mti_image",
    Step.RFFT: "rfft_image",
    Step.CFFT: "cfft_image",
}


def run_step_kat(
    scenario: Scenario,
    step: Step | str,
    access: str = "backdoor",
    tolerances: ToleranceTable | None = None,
) -> KatReport:
    """DFV step KAT: reset, configure, preload the step's input region via
    the chosen access path, trigger just that step, and compare its output
    (memory image or result registers) against the scenario expectation.

    The AE step triggers CFAR first (its targets are AE's input) and checks
    the full result-register state.  duration_cycles sums the triggered
    steps' cycle model.
    """
    if isinstance(step, str):
        step = Step[step.upper()]
    if access not in ("frontdoor", "backdoor"):
        raise ValueError(f"access must be frontdoor or backdoor, got {access!r}")
    tol = tolerances or scenario.tolerances
    t0 = time.perf_counter()
    report = KatReport(scenario.name, step.name.lower(), access, passed=False)

    if step == Step.AE:
        if scenario.config.r < 3:
            report.skipped = "angle estimation needs 3 RX channels"
            report.passed = True
            return report
        if not any(t.az_phase_raw is not None for t in scenario.expected_targets):
            report.skipped = "scenario has no angle expectations"
            report.passed = True
            return report

    dev = Device()
    dev.reset()
    _program_config(dev, scenario.config)
    _set_mode(dev, Mode.DFV)

    region, attr = _STEP_INPUTS[step]
    image = scenario.adc_image if attr is None else getattr(scenario, attr)
    _preload(dev, region, image, access)

    cycles = 0
    steps_to_run = [Step.CFAR, Step.AE] if step == Step.AE else [step]
    for s in steps_to_run:
        result = dev.trigger_step(s)
        if not result.ok:
            report.mismatches.append(Mismatch("step_error", s.name.lower(), actual=result.error))
            report.wall_ms = (time.perf_counter() - t0) * 1e3
            return report
        cycles += result.duration_cycles
    report.duration_cycles = cycles

    if step in _STEP_EXPECTED_FILE:
        layout = region_for(step.name.lower(), scenario.config)
        actual = _readout(dev, layout, access)
        expected = getattr(scenario, _STEP_EXPECTED_FILE[step])
        report.mismatches.extend(compare_mem(actual, expected, tol.for_step(step)))
    else:
        targets, angles = _read_results(dev)
        report.mismatches.extend(
            compare_targets(
                targets,
                angles,
                scenario.expected_targets,
                tol,
                check_phases=(step == Step.AE),
            )
        )
    report.passed = not report.failures
    report.wall_ms = (time.perf_counter() - t0) * 1e3
    return report


def run_full_kat(
    scenario: Scenario,
    access: str = "frontdoor",
    tolerances: ToleranceTable | None = None,
) -> KatReport:
    """Full-path KAT: load ADC data, run a whole frame, then check the final
    targets/angles and every intermediate memory region against the
    scenario files."""
    if access not in ("frontdoor", "backdoor"):
        raise ValueError(f"access must be frontdoor or backdoor, got {access!r}")
    tol = tolerances or scenario.tolerances
    t0 = time.perf_counter()
    report = KatReport(scenario.name, "full", access, passed=False)

    dev = Device()
    dev.reset()
    _program_config(dev, scenario.config)
    _set_mode(dev, Mode.NORMAL)
    _preload(dev, "adc", scenario.adc_image, access)
    frame = dev.run_frame()
    if not frame.ok:
        report.mismatches.append(Mismatch("frame_error", "run_frame", actual=frame.error))
        report.wall_ms = (time.perf_counter() - t0) * 1e3
        return report
    report.duration_cycles = frame.total_cycles

    for step in (Step.MTI, Step.RFFT, Step.CFFT):
        layout = region_for(step.name.lower(), scenario.config)
        actual = _readout(dev, layout, access)
        expected = getattr(scenario, _STEP_EXPECTED_FILE[step])
        for m in compare_mem(actual, expected, tol.for_step(step)):
            m.where = f"{step.name.lower()} {m.where}"
            report.mismatches.append(m)

    targets, angles = _read_results(dev)
    check_phases = scenario.config.r == 3 and any(
        t.az_phase_raw is not None for t in scenario.expected_targets
    )
    report.mismatches.extend(
        compare_targets(targets, angles, scenario.expected_targets, tol, check_phases)
    )
    report.passed = not report.failures
    report.wall_ms = (time.perf_counter() - t0) * 1e3
    return report


# ---------------------------------------------------------------------------
# feature tests

_ALPHA_GRID = [0x0600 + i * 0x80 for i in range(21)]        # 6.0 .. 16.0 by 0.5
_ALPHA_GRID_ANGLE = [0x0900 + i * 0x80 for i in range(15)]  # 9.0 .. 16.0 by 0.5


def _draw_config(feature: str, base: ChainConfig, rng: random.Random) -> ChainConfig:
    cfg = replace(base)
    if feature == "motion":
        cfg.consec_hits = rng.choice([1, 2, 3, 4])
        cfg.cfar_alpha_raw = rng.choice(_ALPHA_GRID)
    elif feature == "acquire":
        cfg.cfar_alpha_raw = rng.choice(_ALPHA_GRID)
        cfg.cfar_guard = rng.choice([0, 1, 2])
        cfg.cfar_window = rng.choice([2, 3, 4, 5, 6])
        cfg.max_targets = rng.choice(range(1, 9))
    elif feature == "angle":
        cfg.cfar_alpha_raw = rng.choice(_ALPHA_GRID_ANGLE)
        cfg.window = rng.choice([Window.NONE, Window.HANN])
    else:
        raise ValueError(f"unknown feature {feature!r}")
    return cfg


def _model_expectation(adc_float: np.ndarray, cfg: ChainConfig) -> list[ExpectedTarget]:
    mc = ModelConfig(cfg, quantize=True)
    frame = refmodel.run_chain(adc_float, mc)
    angles = {(a.range_bin, a.doppler_bin): a for a in frame.angles}
    out = []
    for t in frame.targets:
        ang = angles.get((t.range_bin, t.doppler_bin))
        out.append(
            ExpectedTarget(
                t.range_bin,
                t.doppler_bin,
                t.magnitude_raw,
                None if ang is None else ang.az_phase_raw,
                None if ang is None else ang.el_phase_raw,
                None if ang is None else ang.direction.name,
            )
        )
    return out


def _all_tie_ambiguous(expected: list[ExpectedTarget], tol: ToleranceTable) -> bool:
    if len(expected) < 2:
        return False
    mags = [t.magnitude_raw for t in expected]
    return all(
        abs(a - b) <= tol.magnitude_lsb
        for i, a in enumerate(mags)
        for b in mags[i + 1 :]
    )


def run_feature_test(
    feature: str,
    scenario: Scenario,
    seed: int,
    count: int,
    tolerances: ToleranceTable | None = None,
) -> KatReport:
    """Constrained-random feature test: per iteration, draw a configuration
    from the feature's constraint set, run the device's full chain on the
    scenario's ADC data, and compare against golden-model expectations
    computed under the same configuration.

    A draw whose expected targets are tie-ambiguous across the board is
    re-drawn (bounded), mirroring the stimulus-constraint mitigation.
    """
    feature = feature.lower()
    if feature not in FEATURES:
        raise ValueError(f"feature must be one of {FEATURES}, got {feature!r}")
    tol = tolerances or scenario.tolerances
    t0 = time.perf_counter()
    report = KatReport(scenario.name, f"feature:{feature}", "frontdoor", passed=False)
    if feature == "angle" and scenario.config.r < 3:
        report.skipped = "angle feature needs 3 RX channels"
        report.passed = True
        return report

    rng = random.Random(seed)
    adc_layout = region_for("adc", scenario.config)
    adc_raw = read_region(scenario.adc_image, adc_layout)
    adc_float = adc_raw.astype(np.float64) / Q12_4.scale

    for it in range(count):
        cfg = None
        expected: list[ExpectedTarget] = []
        for _ in range(_TIE_RETRIES):
            candidate = _draw_config(feature, scenario.config, rng)
            expected = _model_expectation(adc_float, candidate)
            if not _all_tie_ambiguous(expected, tol):
                cfg = candidate
                break
        if cfg is None:
            report.skipped = f"iteration {it}: tie-ambiguity retries exhausted"
            report.passed = True
            report.wall_ms = (time.perf_counter() - t0) * 1e3
            return report

        dev = Device()
        dev.reset()
        _program_config(dev, cfg)
        _set_mode(dev, Mode.NORMAL)
        dev.backdoor_deposit("adc", scenario.adc_image)
        frames = cfg.consec_hits if feature == "motion" else 1
        frame = None
        for _ in range(frames):
            frame = dev.run_frame()
            if not frame.ok:
                break
        if frame is None or not frame.ok:
            report.mismatches.append(
                Mismatch("frame_error", f"iter {it}", actual=None if frame is None else frame.error)
            )
            continue
        report.duration_cycles += frame.total_cycles

        targets, angles = _read_results(dev)
        for m in compare_targets(
            targets, angles, expected, tol, check_phases=(feature == "angle")
        ):
            m.where = f"iter {it}: {m.where}"
            report.mismatches.append(m)
        if feature == "motion":
            want_motion = len(expected) > 0
            if frame.motion_detect != want_motion:
                report.mismatches.append(
                    Mismatch(
                        "motion_detect",
                        f"iter {it}: after {frames} frames",
                        want_motion,
                        frame.motion_detect,
                    )
                )
    report.passed = not report.failures
    report.wall_ms = (time.perf_counter() - t0) * 1e3
    return report


def run_usecase(
    scenario: Scenario,
    name: str,
    config_overrides: dict[str, Any],
    expected: list[ExpectedTarget],
    tolerances: ToleranceTable | None = None,
) -> KatReport:
    """Application use-case: a directed full-chain run against hard-coded
    expectations supplied in the suite spec."""
    from .scenario import config_from_registers, config_to_registers as c2r

    regs = c2r(scenario.config)
    regs.update({k: int(v) for k, v in config_overrides.items()})
    cfg = config_from_registers(regs)
    tol = tolerances or scenario.tolerances
    t0 = time.perf_counter()
    report = KatReport(scenario.name, f"usecase:{name}", "frontdoor", passed=False)
    dev = Device()
    dev.reset()
    _program_config(dev, cfg)
    _set_mode(dev, Mode.NORMAL)
    _preload(dev, "adc", scenario.adc_image, "frontdoor")
    frame = dev.run_frame()
    if not frame.ok:
        report.mismatches.append(Mismatch("frame_error", "run_frame", actual=frame.error))
        report.wall_ms = (time.perf_counter() - t0) * 1e3
        return report
    report.duration_cycles = frame.total_cycles
    targets, angles = _read_results(dev)
    check_phases = cfg.r == 3 and any(t.az_phase_raw is not None for t in expected)
    report.mismatches.extend(compare_targets(targets, angles, expected, tol, check_phases))
    report.passed = not report.failures
    report.wall_ms = (time.perf_counter() - t0) * 1e3
    return report


# ---------------------------------------------------------------------------
# regression suites

ALL_STEPS = ("mti", "rfft", "cfft", "cfar", "ae")


def default_suite(scenario_names: list[str]) -> list[dict[str, Any]]:
    """Step KATs on both access paths, full-path KATs, and a light feature
    sweep on the multi-target scenario."""
    tests: list[dict[str, Any]] = []
    for name in scenario_names:
        for step in ALL_STEPS:
            for access in ("backdoor", "frontdoor"):
                tests.append(
                    {"type": "step_kat", "scenario": name, "step": step, "access": access}
                )
        tests.append({"type": "full_kat", "scenario": name, "access": "frontdoor"})
    feature_scenario = "multi" if "multi" in scenario_names else (scenario_names[0] if scenario_names else None)
    if feature_scenario:
        for feature in FEATURES:
            tests.append(
                {
                    "type": "feature",
                    "feature": feature,
                    "scenario": feature_scenario,
                    "count": 10,
                }
            )
    return tests


@dataclass
class RegressionResult:
    reports: list[KatReport]
    seed: int
    scenario_filter: str | None

    @property
    def counts(self) -> dict[str, int]:
        passed = sum(1 for r in self.reports if r.passed and not r.skipped)
        failed = sum(1 for r in self.reports if not r.passed)
        skipped = sum(1 for r in self.reports if r.skipped)
        warnings = sum(len(r.warnings) for r in self.reports)
        return {
            "total": len(self.reports),
            "passed": passed,
            "failed": failed,
            "skipped": skipped,
            "tie_ambiguous_warnings": warnings,
        }

    @property
    def exit_code(self) -> int:
        return 0 if self.counts["failed"] == 0 else 1

    def to_dict(self) -> dict[str, Any]:
        from datetime import datetime, timezone

        return {
            "schema": "radarkat-report-v1",
            "created_at": datetime.now(timezone.utc).isoformat(),
            "seed": self.seed,
            "scenario_filter": self.scenario_filter,
            "summary": self.counts,
            "results": [r.to_dict() for r in self.reports],
        }


def run_regression(
    tests: list[dict[str, Any]],
    scenarios: dict[str, Scenario],
    seed: int = 0,
    scenario_filter: str | None = None,
) -> RegressionResult:
    """Execute a suite in deterministic order and aggregate the reports.

    scenario_filter follows the selection rule: an exact name restricts the
    suite to that scenario; empty or unrecognized names pick one scenario at
    seeded random.
    """
    from .scenario import select_scenario

    if scenario_filter is not None:
        chosen = select_scenario(scenario_filter, scenarios, seed)
        tests = [t for t in tests if t.get("scenario") == chosen.name]

    reports: list[KatReport] = []
    for index, test in enumerate(tests):
        kind = test["type"]
        scen_name = test.get("scenario")
        if scen_name not in scenarios:
            reports.append(
                KatReport(
                    str(scen_name), kind, test.get("access", "-"), passed=False,
                    mismatches=[Mismatch("load_error", f"unknown scenario {scen_name!r}")],
                )
            )
            continue
        scen = scenarios[scen_name]
        if kind == "step_kat":
            reports.append(
                run_step_kat(scen, test["step"], test.get("access", "backdoor"))
            )
        elif kind == "full_kat":
            reports.append(run_full_kat(scen, test.get("access", "frontdoor")))
        elif kind == "feature":
            sub_seed = test.get("seed", seed + index)
            reports.append(
                run_feature_test(
                    test["feature"], scen, sub_seed, test.get("count", 10)
                )
            )
        elif kind == "usecase":
            expected = [
                ExpectedTarget(
                    range_bin=int(e["range_bin"]),
                    doppler_bin=int(e["doppler_bin"]),
                    magnitude_raw=int(e["magnitude_raw"]),
                    az_phase_raw=e.get("az_phase_raw"),
                    el_phase_raw=e.get("el_phase_raw"),
                    direction=e.get("direction"),
                )
                for e in test.get("expected_targets", [])
            ]
            reports.append(
                run_usecase(
                    scen,
                    test.get("name", f"usecase{index}"),
                    test.get("config", {}),
                    expected,
                )
            )
        else:
            reports.append(
                KatReport(
                    scen_name, kind, "-", passed=False,
                    mismatches=[Mismatch("suite_error", f"unknown test type {kind!r}")],
                )
            )
    return RegressionResult(reports, seed, scenario_filter)
