"""Component parameter validation and library round-trips."""

import json
import math
import random

import pytest

from photonlink.components import (
    LaserSpec,
    Modulation,
    ModulatorBias,
    ModulatorSpec,
    SplitterSpec,
    component_from_dict,
    component_to_dict,
    load_component_library,
    save_component_library,
    validate_component,
)
from photonlink.errors import LibraryError

from conftest import (
    mk_edfa,
    mk_fiber,
    mk_laser,
    mk_mod_direct,
    mk_mod_external,
    mk_mux,
    mk_pd,
    mk_splitter,
)


class TestLaserValidation:
    def test_reference_values_are_valid(self):
        spec = LaserSpec(output_power_w=0.1, rin_db_hz=-160.0, wavelength_nm=1550.0)
        assert validate_component(spec).ok

    def test_wavelength_below_band_flagged_only_in_wdm_plan(self):
        spec = mk_laser(nm=1250.0)
        assert validate_component(spec).ok
        report = validate_component(spec, in_wdm_plan=True)
        assert not report.ok
        assert any("below 1300 nm" in m for m in report.messages())

    def test_wavelength_above_band(self):
        report = validate_component(mk_laser(nm=1700.0), in_wdm_plan=True)
        assert any("above 1650 nm" in m for m in report.messages())

    def test_nonpositive_power_and_rin_sign(self):
        report = validate_component(mk_laser(power_w=0.0, rin=3.0))
        fields = {v.field for v in report.violations}
        assert {"output_power_w", "rin_db_hz"} <= fields


class TestModulatorValidation:
    def test_direct_scheme_must_not_carry_external_fields(self):
        spec = ModulatorSpec(Modulation.DIRECT, 20e9, v_pi_v=5.0,
                             insertion_loss_db=5.0)
        report = validate_component(spec)
        fields = {v.field for v in report.violations}
        assert {"v_pi_v", "insertion_loss_db"} <= fields

    def test_external_scheme_requires_positive_v_pi(self):
        spec = ModulatorSpec(Modulation.EXTERNAL, 20e9, v_pi_v=0.0,
                             insertion_loss_db=4.0, bias=ModulatorBias.QUADRATURE)
        report = validate_component(spec)
        assert any(v.field == "v_pi_v" for v in report.violations)

    def test_reference_external_is_valid(self):
        assert validate_component(mk_mod_external()).ok


class TestOtherComponents:
    def test_splitter_fanout_boundary(self):
        assert validate_component(SplitterSpec(fanout=1)).ok
        report = validate_component(SplitterSpec(fanout=0))
        assert any("fanout >= 1" in m for m in report.messages())

    def test_split_loss_combines_fanout_and_excess(self):
        spec = SplitterSpec(fanout=16, excess_loss_db=1.0)
        assert spec.split_loss_db == pytest.approx(10 * math.log10(16) + 1.0)

    def test_isolation_ordering(self):
        report = validate_component(mk_mux(adj=40.0, nonadj=30.0))
        assert any(v.field == "nonadjacent_isolation_db" for v in report.violations)

    def test_edfa_gain_window(self):
        report = validate_component(mk_edfa(gain=35.0, max_gain=30.0))
        assert any("exceeds max_gain_db" in m for m in report.messages())

    def test_fiber_derived_loss(self):
        assert mk_fiber(length=2000.0, attenuation=0.2).loss_db == pytest.approx(0.4)

    def test_detector_responsivity_window(self):
        report = validate_component(mk_pd(resp=1.2))
        assert any(v.field == "responsivity_a_per_w" for v in report.violations)


def test_validation_is_total_over_nan_and_inf():
    """Non-finite numbers never raise; they come back as violations."""
    rng = random.Random(20240811)
    poison = [math.nan, math.inf, -math.inf]
    factories = [mk_laser, mk_mod_external, mk_mux, mk_edfa, mk_fiber, mk_pd]
    numeric_fields = {
        mk_laser: ["output_power_w", "rin_db_hz", "wavelength_nm",
                   "slope_efficiency_w_per_a"],
        mk_mod_external: ["bandwidth_hz", "v_pi_v", "insertion_loss_db"],
        mk_mux: ["insertion_loss_db", "channel_spacing_nm",
                 "adjacent_isolation_db", "nonadjacent_isolation_db"],
        mk_edfa: ["gain_db", "max_gain_db", "noise_figure_db",
                  "saturation_output_power_dbm"],
        mk_fiber: ["length_m", "attenuation_db_per_km", "group_index"],
        mk_pd: ["responsivity_a_per_w", "saturation_power_dbm", "bandwidth_hz",
                "dark_current_a"],
    }
    import dataclasses
    for _ in range(300):
        factory = rng.choice(factories)
        spec = factory()
        field = rng.choice(numeric_fields[factory])
        spec = dataclasses.replace(spec, **{field: rng.choice(poison)})
        report = validate_component(spec, in_wdm_plan=True)
        assert not report.ok
        assert any(v.field == field for v in report.violations)


def test_serialization_round_trip_is_identity():
    rng = random.Random(7)
    samples = [
        mk_laser(power_w=rng.uniform(0.001, 0.5), rin=rng.uniform(-175, -140),
                 nm=rng.uniform(1300, 1650), slope=rng.uniform(0.1, 0.9),
                 tunable=bool(rng.getrandbits(1)))
        for _ in range(20)
    ]
    samples += [mk_mod_direct(), mk_mod_external(), mk_mux(), mk_edfa(),
                mk_splitter(), mk_fiber(length=12.5), mk_pd(sensitivity=-30.0)]
    for spec in samples:
        payload = json.loads(json.dumps(component_to_dict(spec)))
        assert component_from_dict(payload) == spec


def test_from_dict_rejects_unknown_type_and_fields():
    with pytest.raises(ValueError, match="unknown component type"):
        component_from_dict({"type": "isolator"})
    with pytest.raises(ValueError, match="unknown field"):
        component_from_dict({"type": "laser", "output_power_w": 0.1,
                             "rin_db_hz": -160, "wavelength_nm": 1550,
                             "colour": "red"})


class TestLibraryLoading:
    def test_reference_library_has_seven_entries(self, reference_components_file):
        library = load_component_library(reference_components_file)
        assert len(library) == 7
        kinds = {type(spec).__name__ for spec in library.values()}
        assert len(kinds) == 7

    def test_reference_library_round_trips(self, reference_components_file,
                                           tmp_path):
        library = load_component_library(reference_components_file)
        out = tmp_path / "copy.json"
        save_component_library(library, out)
        assert load_component_library(out) == library

    def test_duplicate_names_rejected(self, tmp_path):
        path = tmp_path / "dup.json"
        path.write_text('{"a": {"type": "splitter", "fanout": 2},'
                        ' "a": {"type": "splitter", "fanout": 3}}')
        with pytest.raises(LibraryError, match="duplicate name 'a'"):
            load_component_library(path)

    def test_empty_file_gives_empty_map(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        assert load_component_library(path) == {}

    def test_invalid_entries_all_reported(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({
            "bad_laser": {"type": "laser", "output_power_w": -1.0,
                          "rin_db_hz": -160.0, "wavelength_nm": 1550.0},
            "bad_splitter": {"type": "splitter", "fanout": 0},
        }))
        with pytest.raises(LibraryError) as excinfo:
            load_component_library(path)
        text = str(excinfo.value)
        assert "bad_laser" in text and "bad_splitter" in text
