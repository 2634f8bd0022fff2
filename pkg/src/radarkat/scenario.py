"""Data scenarios: named file sets of input data, config, and expectations.

Directory layout: `manifest.json`, `adc_rx0.memh` .. `adc_rx<R-1>.memh`,
`mti.memh`, `rfft.memh`, `cfft.memh`.  The manifest carries the scenario
description, configuration register values, expected targets/angles, and
optional per-step tolerance overrides.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .chain import ChainConfig, Window
from .memimage import MemoryImage, MemhParseError, emit_memh, parse_memh, region_for

ADC_FILE = "adc_rx{ch}.memh"
STEP_FILES = {"mti": "mti.memh", "rfft": "rfft.memh", "cfft": "cfft.memh"}


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ExpectedTarget:
    range_bin: int
    doppler_bin: int
    magnitude_raw: int
    az_phase_raw: int | None = None
    el_phase_raw: int | None = None
    direction: str | None = None


@dataclass
class Scenario:
    name: str
    description: str
    config: ChainConfig
    adc_images: list[MemoryImage]
    mti_image: MemoryImage
    rfft_image: MemoryImage
    cfft_image: MemoryImage
    expected_targets: list[ExpectedTarget]
    tolerances: "Any"  # harness.ToleranceTable
    meta: dict = field(default_factory=dict)
    path: Path | None = None

    @property
    def adc_image(self) -> MemoryImage:
        """All RX channels merged into one ADC-region image."""
        merged = MemoryImage(16)
        for img in self.adc_images:
            merged.cells.update(img.cells)
        return merged


def config_to_registers(cfg: ChainConfig) -> dict[str, int]:
    return {
        "n": cfg.n,
        "m": cfg.m,
        "r": cfg.r,
        "mti_enabled": int(cfg.mti_enabled),
        "window_sel": int(cfg.window),
        "cfar_alpha": cfg.cfar_alpha_raw,
        "cfar_guard": cfg.cfar_guard,
        "cfar_window": cfg.cfar_window,
        "max_targets": cfg.max_targets,
        "consec_hits": cfg.consec_hits,
    }


def config_from_registers(values: dict[str, Any]) -> ChainConfig:
    try:
        cfg = ChainConfig(
            n=int(values["n"]),
            m=int(values["m"]),
            r=int(values["r"]),
            mti_enabled=bool(values["mti_enabled"]),
            window=Window(int(values["window_sel"])),
            cfar_alpha_raw=int(values["cfar_alpha"]),
            cfar_guard=int(values["cfar_guard"]),
            cfar_window=int(values["cfar_window"]),
            max_targets=int(values["max_targets"]),
            consec_hits=int(values["consec_hits"]),
        )
    except KeyError as exc:
        raise ScenarioError(f"manifest config missing field {exc}") from exc
    cfg.validate()
    return cfg


def _adc_channel_addresses(cfg: ChainConfig, ch: int) -> range:
    layout = region_for("adc", cfg)
    per_channel = cfg.m * cfg.n
    start = layout.base + ch * per_channel
    return range(start, start + per_channel)


def _check_exact_extent(img: MemoryImage, addresses: range, what: str) -> None:
    have = set(img.cells)
    want = set(addresses)
    if have != want:
        missing = len(want - have)
        extra = len(have - want)
        raise ScenarioError(
            f"{what}: image does not match the configured dimensions "
            f"({missing} missing, {extra} unexpected addresses)"
        )


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario directory; tolerance defaults are filled
    from the harness table when the manifest omits them."""
    from .harness import ToleranceTable

    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.is_file():
        raise ScenarioError(f"missing manifest: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{manifest_path}: {exc}") from exc

    for fld in ("name", "config"):
        if fld not in manifest:
            raise ScenarioError(f"{manifest_path}: missing field {fld!r}")
    cfg = config_from_registers(manifest["config"])

    def load_file(filename: str, bits: int) -> MemoryImage:
        fpath = path / filename
        if not fpath.is_file():
            raise ScenarioError(f"scenario file missing: {fpath}")
        try:
            return parse_memh(fpath.read_text(), bits)
        except MemhParseError as exc:
            raise ScenarioError(f"{fpath}: {exc}") from exc

    adc_images = []
    for ch in range(cfg.r):
        img = load_file(ADC_FILE.format(ch=ch), 16)
        _check_exact_extent(img, _adc_channel_addresses(cfg, ch), ADC_FILE.format(ch=ch))
        adc_images.append(img)
    step_images = {}
    for step, filename in STEP_FILES.items():
        layout = region_for(step, cfg)
        img = load_file(filename, layout.word_bits)
        _check_exact_extent(img, layout.addresses(), filename)
        step_images[step] = img

    targets = []
    for i, entry in enumerate(manifest.get("expected_targets", [])):
        try:
            targets.append(
                ExpectedTarget(
                    range_bin=int(entry["range_bin"]),
                    doppler_bin=int(entry["doppler_bin"]),
                    magnitude_raw=int(entry["magnitude_raw"]),
                    az_phase_raw=None if entry.get("az_phase_raw") is None else int(entry["az_phase_raw"]),
                    el_phase_raw=None if entry.get("el_phase_raw") is None else int(entry["el_phase_raw"]),
                    direction=entry.get("direction"),
                )
            )
        except KeyError as exc:
            raise ScenarioError(f"expected_targets[{i}] missing field {exc}") from exc

    tol = ToleranceTable.from_dict(manifest.get("tolerances", {}))
    return Scenario(
        name=manifest["name"],
        description=manifest.get("description", ""),
        config=cfg,
        adc_images=adc_images,
        mti_image=step_images["mti"],
        rfft_image=step_images["rfft"],
        cfft_image=step_images["cfft"],
        expected_targets=targets,
        tolerances=tol,
        meta=manifest.get("generator", {}),
        path=path,
    )


def save_scenario(scen: Scenario, path: str | Path) -> Path:
    """Write the full file set in canonical form (inverse of load_scenario)."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    manifest = {
        "name": scen.name,
        "description": scen.description,
        "config": config_to_registers(scen.config),
        "expected_targets": [asdict(t) for t in scen.expected_targets],
        "tolerances": scen.tolerances.to_dict(),
    }
    if scen.meta:
        manifest["generator"] = scen.meta
    (path / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for ch, img in enumerate(scen.adc_images):
        (path / ADC_FILE.format(ch=ch)).write_text(emit_memh(img))
    (path / STEP_FILES["mti"]).write_text(emit_memh(scen.mti_image))
    (path / STEP_FILES["rfft"]).write_text(emit_memh(scen.rfft_image))
    (path / STEP_FILES["cfft"]).write_text(emit_memh(scen.cfft_image))
    return path


def discover_scenarios(root: str | Path) -> dict[str, Path]:
    """Map scenario names to directories below root (one manifest each)."""
    root = Path(root)
    found: dict[str, Path] = {}
    if not root.is_dir():
        return found
    for manifest in sorted(root.glob("*/manifest.json")):
        try:
            name = json.loads(manifest.read_text()).get("name", manifest.parent.name)
        except json.JSONDecodeError:
            continue
        found[name] = manifest.parent
    return found


def select_scenario(requested: str, available: dict[str, Any], seed: int) -> Any:
    """Exact-name match wins; empty or unrecognized names pick a seeded
    uniform-random member of the available set."""
    if not available:
        raise ScenarioError("no scenarios available")
    if requested in available:
        return available[requested]
    name = random.Random(seed).choice(sorted(available))
    return available[name]


def validate_scenario(scen: Scenario) -> list[str]:
    """Consistency and ambiguity-margin report; never raises."""
    report: list[str] = []
    try:
        scen.config.validate()
    except ValueError as exc:
        report.append(f"config: {exc}")
    for label, img, bits in (
        ("mti.memh", scen.mti_image, 16),
        ("rfft.memh", scen.rfft_image, 24),
        ("cfft.memh", scen.cfft_image, 24),
    ):
        for addr, word in img.cells.items():
            if word > (1 << bits) - 1 or word < 0:
                report.append(f"{label}: word at 0x{addr:04X} exceeds {bits} bits")
                break
    # expected targets whose magnitudes sit within the tie margin can swap
    # order between model and device
    tie = scen.tolerances.magnitude_lsb
    for i in range(len(scen.expected_targets)):
        for j in range(i + 1, len(scen.expected_targets)):
            a = scen.expected_targets[i].magnitude_raw
            b = scen.expected_targets[j].magnitude_raw
            if abs(a - b) <= tie:
                report.append(
                    f"separation: targets {i} and {j} magnitudes within "
                    f"{abs(a - b)} LSB (tie margin {tie})"
                )
    scene = scen.meta.get("scene")
    if scene is not None:
        from .scenariogen import SceneSpec, check_separation

        try:
            spec = SceneSpec.from_dict(scene)
            report.extend(check_separation(spec))
        except (ValueError, KeyError) as exc:
            report.append(f"generator.scene: cannot re-check separation ({exc})")
    return report
