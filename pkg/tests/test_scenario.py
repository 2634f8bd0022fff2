"""Scenario loading, selection, and validation."""

import json
import shutil

import pytest

from radarkat.scenario import (
    ScenarioError,
    discover_scenarios,
    load_scenario,
    save_scenario,
    select_scenario,
    validate_scenario,
)


def test_load_generated_scenario(builtin_scenarios):
    scen = builtin_scenarios["single"]
    assert scen.config.n == 64 and scen.config.r == 3
    assert len(scen.adc_images) == 3
    assert len(scen.expected_targets) == 1
    t = scen.expected_targets[0]
    assert (t.range_bin, t.doppler_bin) == (7, 3)
    assert t.direction == "APPROACHING"
    assert scen.tolerances.mti_lsb == 0


def test_save_load_round_trip(builtin_scenarios, tmp_path):
    scen = builtin_scenarios["multi"]
    out = tmp_path / "copy"
    save_scenario(scen, out)
    again = load_scenario(out)
    assert again.name == scen.name
    assert again.config == scen.config
    assert again.expected_targets == scen.expected_targets
    assert again.adc_images == scen.adc_images
    assert again.mti_image == scen.mti_image
    assert again.rfft_image == scen.rfft_image
    assert again.cfft_image == scen.cfft_image
    assert again.tolerances.to_dict() == scen.tolerances.to_dict()


def test_missing_manifest(tmp_path):
    with pytest.raises(ScenarioError, match="manifest"):
        load_scenario(tmp_path)


def test_missing_step_file_named(builtin_scenarios, tmp_path):
    src = builtin_scenarios["single"].path
    dst = tmp_path / "broken"
    shutil.copytree(src, dst)
    (dst / "cfft.memh").unlink()
    with pytest.raises(ScenarioError, match="cfft.memh"):
        load_scenario(dst)


def test_dimension_mismatch_detected(builtin_scenarios, tmp_path):
    src = builtin_scenarios["single"].path
    dst = tmp_path / "resized"
    shutil.copytree(src, dst)
    manifest = json.loads((dst / "manifest.json").read_text())
    manifest["config"]["n"] = 32  # images were generated for n=64
    (dst / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ScenarioError, match="dimensions"):
        load_scenario(dst)


def test_malformed_memh_reported_with_file(builtin_scenarios, tmp_path):
    src = builtin_scenarios["single"].path
    dst = tmp_path / "badhex"
    shutil.copytree(src, dst)
    (dst / "mti.memh").write_text("@0 GG\n")
    with pytest.raises(ScenarioError, match="mti.memh"):
        load_scenario(dst)


def test_unknown_tolerance_field_rejected(builtin_scenarios, tmp_path):
    src = builtin_scenarios["single"].path
    dst = tmp_path / "badtol"
    shutil.copytree(src, dst)
    manifest = json.loads((dst / "manifest.json").read_text())
    manifest["tolerances"] = {"bogus_lsb": 1}
    (dst / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises((ScenarioError, ValueError)):
        load_scenario(dst)


def test_discover_scenarios(scenario_root):
    found = discover_scenarios(scenario_root)
    assert set(found) == {"single", "multi", "noise"}


def test_select_exact_match():
    avail = {"single": 1, "multi": 2, "noise": 3}
    assert select_scenario("single", avail, seed=0) == 1
    assert select_scenario("multi", avail, seed=99) == 2


def test_select_empty_string_random_but_seeded():
    avail = {"single": 1, "multi": 2, "noise": 3}
    picks = {select_scenario("", avail, seed=s) for s in range(30)}
    assert len(picks) > 1  # actually random over the set
    for s in (0, 7, 123):
        assert select_scenario("", avail, s) == select_scenario("", avail, s)


def test_select_unrecognized_same_as_empty():
    avail = {"single": 1, "multi": 2, "noise": 3}
    for s in range(10):
        assert select_scenario("typo", avail, s) == select_scenario("", avail, s)


def test_select_empty_set_errors():
    with pytest.raises(ScenarioError):
        select_scenario("x", {}, 0)


def test_validate_clean_on_generator_output(builtin_scenarios):
    for scen in builtin_scenarios.values():
        assert validate_scenario(scen) == []


def test_validate_reports_tie_prone_targets(builtin_scenarios):
    import dataclasses

    scen = builtin_scenarios["multi"]
    twin = dataclasses.replace(
        scen.expected_targets[0],
        range_bin=9,
        magnitude_raw=scen.expected_targets[0].magnitude_raw + 3,
    )
    patched = dataclasses.replace(scen, expected_targets=scen.expected_targets + [twin])
    report = validate_scenario(patched)
    assert any("separation" in line for line in report)


def test_validate_reports_oversized_word(builtin_scenarios):
    import dataclasses

    scen = builtin_scenarios["single"]
    img = scen.cfft_image.copy()
    img.cells[next(iter(img.cells))] = 1 << 24  # bypass set() guard
    patched = dataclasses.replace(scen, cfft_image=img)
    report = validate_scenario(patched)
    assert any("exceeds 24 bits" in line for line in report)
