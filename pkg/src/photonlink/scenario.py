"""Scenario ingestion: one JSON file describing the component library, the
network shape, per-variant component bindings, analysis knobs, digital link
parameters and requirement overrides.

Parsing is strict and aggregates every problem it finds instead of stopping at
the first; a parsed Scenario is fully validated and carries a content
fingerprint so reports are traceable to their exact inputs.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .components import (
    ComponentSpec,
    DetectorKind,
    parse_component_library,
)
from .digitalpath import AdcStreamSpec, DigitalLinkSpec, LineEncoding
from .errors import LibraryError, ScenarioError
from .linkbudget import AnalysisConfig
from .topology import (
    ChannelPlan,
    DEFAULT_CHANNEL_SPACING_NM,
    ForwardBindings,
    ReturnBindings,
)
from .tradeoff import ALL_VARIANTS, DesignVariant, RequirementSet, is_feasible

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Scenario:
    name: str
    fingerprint: str
    library: Mapping[str, ComponentSpec]
    n_dtrm: int
    channels: tuple[ChannelPlan, ...]
    shared_fiber: bool
    min_channel_spacing_nm: float
    modulator_by_scheme: Mapping[str, str]
    mux_by_grating: Mapping[str, str]
    demux_by_grating: Mapping[str, str]
    splitter: str
    fojb_edfa: str
    analog_detector: str
    digital_detector: str
    trunk_fiber: str | None
    drop_fiber: str | None
    otxc_edfa: str | None
    return_enabled: bool
    return_bindings: ReturnBindings | None
    analysis: AnalysisConfig
    digital_link: DigitalLinkSpec | None
    adc_stream: AdcStreamSpec | None
    requirements: RequirementSet
    variant_selection: str

    def forward_bindings(self, variant: DesignVariant) -> ForwardBindings:
        return ForwardBindings(
            modulator=self.modulator_by_scheme[variant.modulation.token],
            mux=self.mux_by_grating[variant.grating.value],
            demux=self.demux_by_grating[variant.grating.value],
            splitter=self.splitter,
            fojb_edfa=self.fojb_edfa,
            analog_detector=self.analog_detector,
            digital_detector=self.digital_detector,
            trunk_fiber=self.trunk_fiber,
            drop_fiber=self.drop_fiber,
            otxc_edfa=self.otxc_edfa,
        )

    def selected_variants(self) -> tuple[DesignVariant, ...]:
        if self.variant_selection == "all":
            return tuple(v for v in ALL_VARIANTS if is_feasible(v))
        return (DesignVariant.from_label(self.variant_selection),)


def scenario_fingerprint(raw: Mapping[str, Any]) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class _Problems:
    def __init__(self) -> None:
        self.items: list[str] = []

    def add(self, message: str) -> None:
        self.items.append(message)

    def number(self, payload: Mapping, key: str, where: str, *, default=None,
               required=False, minimum=None, allow_none=False):
        if key not in payload:
            if required:
                self.add(f"{where}.{key}: required")
            return default
        value = payload[key]
        if value is None and allow_none:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.add(f"{where}.{key}: must be a number, got {value!r}")
            return default
        if minimum is not None and value < minimum:
            self.add(f"{where}.{key}: must be >= {minimum}, got {value}")
            return default
        return float(value)

    def string(self, payload: Mapping, key: str, where: str, *, default=None,
               required=False, allow_none=False):
        if key not in payload:
            if required:
                self.add(f"{where}.{key}: required")
            return default
        value = payload[key]
        if value is None and allow_none:
            return None
        if not isinstance(value, str) or not value:
            self.add(f"{where}.{key}: must be a non-empty string, got {value!r}")
            return default
        return value

    def boolean(self, payload: Mapping, key: str, where: str, *, default=False):
        value = payload.get(key, default)
        if not isinstance(value, bool):
            self.add(f"{where}.{key}: must be true or false, got {value!r}")
            return default
        return value

    def unknown_keys(self, payload: Mapping, allowed: set[str], where: str) -> None:
        for key in sorted(set(payload) - allowed):
            self.add(f"{where}: unknown key {key!r}")


def _reject_duplicate_keys(pairs):
    out: dict = {}
    for key, value in pairs:
        if key in out:
            raise ValueError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _parse_analysis(payload: Mapping, problems: _Problems) -> AnalysisConfig:
    where = "analysis"
    allowed = {"bandwidth_hz", "temperature_k", "load_resistance_ohm", "iip3_dbm",
               "carrier_power_dbm", "phase_noise_profile", "front_end_gain_db",
               "front_end_noise_figure_db", "jitter_rms_s", "edfa_autogain"}
    problems.unknown_keys(payload, allowed, where)
    defaults = AnalysisConfig()
    bandwidth = problems.number(payload, "bandwidth_hz", where,
                                default=defaults.bandwidth_hz, minimum=1e-12)
    temperature = problems.number(payload, "temperature_k", where,
                                  default=defaults.temperature_k, minimum=1e-12)
    load = problems.number(payload, "load_resistance_ohm", where,
                           default=defaults.load_resistance_ohm, minimum=1e-12)

    iip3: float | dict | None = None
    if "iip3_dbm" in payload:
        raw_iip3 = payload["iip3_dbm"]
        if isinstance(raw_iip3, (int, float)) and not isinstance(raw_iip3, bool):
            iip3 = float(raw_iip3)
        elif isinstance(raw_iip3, dict):
            iip3 = {}
            for token, value in raw_iip3.items():
                if token not in ("dm", "em"):
                    problems.add(f"{where}.iip3_dbm: keys must be dm/em, got {token!r}")
                elif isinstance(value, bool) or not isinstance(value, (int, float)):
                    problems.add(f"{where}.iip3_dbm.{token}: must be a number")
                else:
                    iip3[token] = float(value)
        else:
            problems.add(f"{where}.iip3_dbm: must be a number or a dm/em map")

    carrier = problems.number(payload, "carrier_power_dbm", where, allow_none=True)

    profile = None
    if "phase_noise_profile" in payload:
        raw_profile = payload["phase_noise_profile"]
        if not isinstance(raw_profile, list) or not raw_profile:
            problems.add(f"{where}.phase_noise_profile: must be a non-empty list "
                         "of [offset_hz, dbc_per_hz] pairs")
        else:
            rows = []
            for i, pair in enumerate(raw_profile):
                if (not isinstance(pair, list) or len(pair) != 2
                        or any(isinstance(x, bool) or not isinstance(x, (int, float))
                               for x in pair)):
                    problems.add(f"{where}.phase_noise_profile[{i}]: must be "
                                 "[offset_hz, dbc_per_hz]")
                    continue
                if pair[0] <= 0:
                    problems.add(f"{where}.phase_noise_profile[{i}]: offset must "
                                 "be > 0 Hz")
                    continue
                rows.append((float(pair[0]), float(pair[1])))
            profile = tuple(rows) if rows else None

    front_gain = problems.number(payload, "front_end_gain_db", where, allow_none=True)
    front_nf = problems.number(payload, "front_end_noise_figure_db", where,
                               allow_none=True)

    jitter: dict[str, float] = {}
    raw_jitter = payload.get("jitter_rms_s", {})
    if not isinstance(raw_jitter, dict):
        problems.add(f"{where}.jitter_rms_s: must map element kinds to seconds")
    else:
        kinds = {"laser", "modulator", "mux", "edfa", "fiber", "splitter",
                 "demux", "detector"}
        for kind, value in raw_jitter.items():
            if kind not in kinds:
                problems.add(f"{where}.jitter_rms_s: unknown element kind {kind!r}")
            elif isinstance(value, bool) or not isinstance(value, (int, float)) \
                    or value < 0:
                problems.add(f"{where}.jitter_rms_s.{kind}: must be >= 0 seconds")
            else:
                jitter[kind] = float(value)

    return AnalysisConfig(
        bandwidth_hz=bandwidth,
        temperature_k=temperature,
        load_resistance_ohm=load,
        iip3_dbm=iip3,
        carrier_power_dbm=carrier,
        phase_noise_profile=profile,
        front_end_gain_db=front_gain,
        front_end_noise_figure_db=front_nf,
        jitter_rms_s=jitter,
        edfa_autogain=problems.boolean(payload, "edfa_autogain", where, default=True),
    )


def _parse_digital(payload: Mapping, problems: _Problems
                   ) -> tuple[DigitalLinkSpec | None, AdcStreamSpec | None]:
    where = "digital"
    problems.unknown_keys(payload, {"link", "adc"}, where)
    link = None
    stream = None
    raw_link = payload.get("link")
    if raw_link is not None:
        if not isinstance(raw_link, dict):
            problems.add(f"{where}.link: must be an object")
        else:
            problems.unknown_keys(
                raw_link, {"line_rate_bps", "encoding", "framing_overhead"},
                f"{where}.link")
            rate = problems.number(raw_link, "line_rate_bps", f"{where}.link",
                                   required=True, minimum=1e-12)
            token = problems.string(raw_link, "encoding", f"{where}.link",
                                    default="8b10b")
            framing = problems.number(raw_link, "framing_overhead", f"{where}.link",
                                      default=0.0, minimum=0.0)
            encoding = LineEncoding.E8B10B
            try:
                encoding = LineEncoding(token)
            except ValueError:
                problems.add(f"{where}.link.encoding: unknown encoding {token!r}")
            if framing is not None and framing >= 1.0:
                problems.add(f"{where}.link.framing_overhead: must be < 1")
            if rate is not None and framing is not None and framing < 1.0:
                link = DigitalLinkSpec(rate, encoding, framing)
    raw_adc = payload.get("adc")
    if raw_adc is not None:
        if not isinstance(raw_adc, dict):
            problems.add(f"{where}.adc: must be an object")
        else:
            problems.unknown_keys(
                raw_adc, {"sample_rate_sps", "bits_per_sample", "complex"},
                f"{where}.adc")
            sample = problems.number(raw_adc, "sample_rate_sps", f"{where}.adc",
                                     required=True, minimum=1e-12)
            bits = raw_adc.get("bits_per_sample")
            if not isinstance(bits, int) or isinstance(bits, bool) or bits < 1:
                problems.add(f"{where}.adc.bits_per_sample: must be an integer >= 1")
                bits = None
            complex_iq = problems.boolean(raw_adc, "complex", f"{where}.adc")
            if sample is not None and bits is not None:
                stream = AdcStreamSpec(sample, bits, complex_iq)
    return link, stream


def _parse_requirements(payload: Mapping, problems: _Problems) -> RequirementSet:
    defaults = RequirementSet()
    allowed = set(defaults.__dataclass_fields__)
    problems.unknown_keys(payload, allowed, "requirements")
    overrides = {}
    for key in allowed:
        if key in payload:
            value = problems.number(payload, key, "requirements")
            if value is not None:
                overrides[key] = value
    requirements = dataclasses.replace(defaults, **overrides)
    for issue in requirements.problems():
        problems.add(issue)
    return requirements


def parse_scenario(source: str | Path | Mapping[str, Any]) -> Scenario:
    """Load and fully validate a scenario from a file path or a raw mapping.

    Raises ScenarioError listing every problem found.
    """
    problems = _Problems()
    if isinstance(source, Mapping):
        raw = dict(source)
    else:
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError([f"cannot read {path}: {exc}"]) from exc
        try:
            raw = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
        except ValueError as exc:
            raise ScenarioError([f"{path}: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ScenarioError(["scenario must be a JSON object"])

    allowed_top = {"schema_version", "name", "components", "topology", "analysis",
                   "digital", "requirements", "variant"}
    problems.unknown_keys(raw, allowed_top, "scenario")

    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        problems.add(f"scenario.schema_version: expected {SCHEMA_VERSION}, "
                     f"got {version!r}")
    name = problems.string(raw, "name", "scenario", default="scenario")

    library: dict[str, ComponentSpec] = {}
    try:
        library = parse_component_library(raw.get("components", {}),
                                          where="components")
    except LibraryError as exc:
        problems.items.extend(exc.problems or [str(exc)])

    topo = raw.get("topology")
    if not isinstance(topo, dict):
        problems.add("scenario.topology: required object")
        topo = {}
    allowed_topo = {"n_dtrm", "channels", "shared_fiber", "min_channel_spacing_nm",
                    "bindings", "return"}
    problems.unknown_keys(topo, allowed_topo, "topology")

    n_dtrm_raw = topo.get("n_dtrm")
    if not isinstance(n_dtrm_raw, int) or isinstance(n_dtrm_raw, bool) \
            or n_dtrm_raw < 1:
        problems.add("topology.n_dtrm: must be an integer >= 1")
        n_dtrm = 1
    else:
        n_dtrm = n_dtrm_raw

    channels: list[ChannelPlan] = []
    raw_channels = topo.get("channels", [])
    if not isinstance(raw_channels, list) or not raw_channels:
        problems.add("topology.channels: must be a non-empty list")
    else:
        seen = set()
        for i, entry in enumerate(raw_channels):
            where = f"topology.channels[{i}]"
            if not isinstance(entry, dict):
                problems.add(f"{where}: must be an object")
                continue
            problems.unknown_keys(entry, {"id", "laser", "kind"}, where)
            ch_id = problems.string(entry, "id", where, required=True)
            laser = problems.string(entry, "laser", where, required=True)
            kind_token = problems.string(entry, "kind", where, default="analog")
            kind = DetectorKind.ANALOG
            try:
                kind = DetectorKind(kind_token)
            except ValueError:
                problems.add(f"{where}.kind: unknown kind {kind_token!r}")
            if ch_id is None or laser is None:
                continue
            if ch_id in seen:
                problems.add(f"{where}: duplicate channel id {ch_id!r}")
                continue
            seen.add(ch_id)
            if laser not in library:
                problems.add(f"{where}: unknown component {laser!r}")
                continue
            channels.append(ChannelPlan(ch_id, laser, kind))

    shared_fiber = problems.boolean(topo, "shared_fiber", "topology", default=True)
    spacing = problems.number(topo, "min_channel_spacing_nm", "topology",
                              default=DEFAULT_CHANNEL_SPACING_NM, minimum=0.0)

    bindings = topo.get("bindings")
    if not isinstance(bindings, dict):
        problems.add("topology.bindings: required object")
        bindings = {}
    allowed_bind = {"modulator", "mux", "demux", "splitter", "fojb_edfa",
                    "analog_detector", "digital_detector", "trunk_fiber",
                    "drop_fiber", "otxc_edfa"}
    problems.unknown_keys(bindings, allowed_bind, "topology.bindings")

    def _named_map(key: str, tokens: tuple[str, ...]) -> dict[str, str]:
        raw_map = bindings.get(key)
        out: dict[str, str] = {}
        where = f"topology.bindings.{key}"
        if not isinstance(raw_map, dict):
            problems.add(f"{where}: required object keyed by {'/'.join(tokens)}")
            return out
        problems.unknown_keys(raw_map, set(tokens), where)
        for token in tokens:
            value = problems.string(raw_map, token, where, required=True)
            if value is not None:
                if value not in library:
                    problems.add(f"{where}.{token}: unknown component {value!r}")
                else:
                    out[token] = value
        return out

    modulator_by_scheme = _named_map("modulator", ("dm", "em"))
    mux_by_grating = _named_map("mux", ("vbg", "awg"))
    demux_by_grating = _named_map("demux", ("vbg", "awg"))

    def _component_name(key: str, *, required: bool,
                        allow_none: bool = False) -> str | None:
        value = problems.string(bindings, key, "topology.bindings",
                                required=required, allow_none=allow_none)
        if value is not None and value not in library:
            problems.add(f"topology.bindings.{key}: unknown component {value!r}")
            return None
        return value

    splitter = _component_name("splitter", required=True)
    fojb_edfa = _component_name("fojb_edfa", required=True)
    analog_detector = _component_name("analog_detector", required=True)
    digital_detector = _component_name("digital_detector", required=True)
    trunk_fiber = _component_name("trunk_fiber", required=False, allow_none=True)
    drop_fiber = _component_name("drop_fiber", required=False, allow_none=True)
    otxc_edfa = _component_name("otxc_edfa", required=False, allow_none=True)

    return_enabled = False
    return_bindings: ReturnBindings | None = None
    raw_return = topo.get("return")
    if raw_return is not None:
        if not isinstance(raw_return, dict):
            problems.add("topology.return: must be an object")
        else:
            where = "topology.return"
            allowed_ret = {"enabled", "lasers", "modulator", "mux", "demux",
                           "detector", "fiber"}
            problems.unknown_keys(raw_return, allowed_ret, where)
            return_enabled = problems.boolean(raw_return, "enabled", where,
                                              default=True)
            lasers_raw = raw_return.get("lasers")
            lasers: list[str] = []
            if not isinstance(lasers_raw, list) or len(lasers_raw) != 4:
                problems.add(f"{where}.lasers: must list exactly 4 component names")
            else:
                for i, entry in enumerate(lasers_raw):
                    if not isinstance(entry, str) or entry not in library:
                        problems.add(f"{where}.lasers[{i}]: unknown component "
                                     f"{entry!r}")
                    else:
                        lasers.append(entry)
            names = {}
            for key in ("modulator", "mux", "demux", "detector"):
                value = problems.string(raw_return, key, where, required=True)
                if value is not None and value not in library:
                    problems.add(f"{where}.{key}: unknown component {value!r}")
                    value = None
                names[key] = value
            fiber = problems.string(raw_return, "fiber", where, allow_none=True)
            if fiber is not None and fiber not in library:
                problems.add(f"{where}.fiber: unknown component {fiber!r}")
                fiber = None
            if return_enabled and n_dtrm % 4 != 0:
                problems.add("topology.n_dtrm: must be divisible by 4 when the "
                             "return chain is enabled")
            if len(lasers) == 4 and all(names.values()):
                return_bindings = ReturnBindings(
                    lasers=tuple(lasers),
                    modulator=names["modulator"],
                    mux=names["mux"],
                    demux=names["demux"],
                    detector=names["detector"],
                    fiber=fiber,
                )

    analysis_raw = raw.get("analysis", {})
    if not isinstance(analysis_raw, dict):
        problems.add("scenario.analysis: must be an object")
        analysis_raw = {}
    analysis = _parse_analysis(analysis_raw, problems)

    digital_raw = raw.get("digital", {})
    if not isinstance(digital_raw, dict):
        problems.add("scenario.digital: must be an object")
        digital_raw = {}
    digital_link, adc_stream = _parse_digital(digital_raw, problems)

    requirements_raw = raw.get("requirements", {})
    if not isinstance(requirements_raw, dict):
        problems.add("scenario.requirements: must be an object")
        requirements_raw = {}
    requirements = _parse_requirements(requirements_raw, problems)

    variant = raw.get("variant", "all")
    if not isinstance(variant, str):
        problems.add("scenario.variant: must be a string")
        variant = "all"
    elif variant != "all":
        try:
            chosen = DesignVariant.from_label(variant)
            if not is_feasible(chosen):
                problems.add(f"scenario.variant: {variant!r} is infeasible "
                             "(Bragg gratings are not realizable in silicon)")
        except ValueError as exc:
            problems.add(f"scenario.variant: {exc}")

    if problems.items:
        raise ScenarioError(problems.items)

    return Scenario(
        name=name,
        fingerprint=scenario_fingerprint(raw),
        library=library,
        n_dtrm=n_dtrm,
        channels=tuple(channels),
        shared_fiber=shared_fiber,
        min_channel_spacing_nm=spacing,
        modulator_by_scheme=modulator_by_scheme,
        mux_by_grating=mux_by_grating,
        demux_by_grating=demux_by_grating,
        splitter=splitter,
        fojb_edfa=fojb_edfa,
        analog_detector=analog_detector,
        digital_detector=digital_detector,
        trunk_fiber=trunk_fiber,
        drop_fiber=drop_fiber,
        otxc_edfa=otxc_edfa,
        return_enabled=return_enabled and return_bindings is not None,
        return_bindings=return_bindings,
        analysis=analysis,
        digital_link=digital_link,
        adc_stream=adc_stream,
        requirements=requirements,
        variant_selection=variant.lower() if isinstance(variant, str) else "all",
    )
