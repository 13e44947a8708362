"""Parameter models and validation for every photonic element in the network.

Each element family is a frozen dataclass with unit-bearing field names; a
component library is a plain name -> spec mapping serialized as JSON. Validation
never raises for bad parameter values: violations are returned as data so a
loader or report can list all of them at once.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields as dataclass_fields
from enum import Enum
from pathlib import Path
from typing import Union

from .errors import LibraryError

# Usable source band for the WDM plan, nm.
WDM_BAND_NM = (1300.0, 1650.0)


class Modulation(str, Enum):
    DIRECT = "direct"
    EXTERNAL = "external"

    @classmethod
    def from_token(cls, token: str) -> "Modulation":
        aliases = {"dm": cls.DIRECT, "em": cls.EXTERNAL,
                   "direct": cls.DIRECT, "external": cls.EXTERNAL}
        try:
            return aliases[token.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown modulation token {token!r}") from None

    @property
    def token(self) -> str:
        return "dm" if self is Modulation.DIRECT else "em"


class GratingTech(str, Enum):
    VBG = "vbg"
    AWG = "awg"


class ModulatorBias(str, Enum):
    QUADRATURE = "quadrature"


class DetectorKind(str, Enum):
    ANALOG = "analog"
    DIGITAL = "digital"


@dataclass(frozen=True)
class LaserSpec:
    output_power_w: float
    rin_db_hz: float
    wavelength_nm: float
    slope_efficiency_w_per_a: float = 0.3
    linewidth_tunable: bool = False


@dataclass(frozen=True)
class ModulatorSpec:
    scheme: Modulation
    bandwidth_hz: float
    v_pi_v: float | None = None
    insertion_loss_db: float | None = None
    bias: ModulatorBias | None = None


@dataclass(frozen=True)
class MuxDemuxSpec:
    technology: GratingTech
    insertion_loss_db: float
    channel_spacing_nm: float
    adjacent_isolation_db: float
    nonadjacent_isolation_db: float
    athermal: bool = False


@dataclass(frozen=True)
class EdfaSpec:
    gain_db: float
    max_gain_db: float
    noise_figure_db: float
    saturation_output_power_dbm: float


@dataclass(frozen=True)
class SplitterSpec:
    fanout: int
    excess_loss_db: float = 0.0

    @property
    def split_loss_db(self) -> float:
        """Total loss of one output leg: 10log10(N) plus excess."""
        return 10.0 * math.log10(self.fanout) + self.excess_loss_db


@dataclass(frozen=True)
class FiberSpec:
    length_m: float
    attenuation_db_per_km: float
    group_index: float = 1.468

    @property
    def loss_db(self) -> float:
        return self.attenuation_db_per_km * self.length_m / 1000.0


@dataclass(frozen=True)
class PhotodetectorSpec:
    responsivity_a_per_w: float
    saturation_power_dbm: float
    bandwidth_hz: float
    kind: DetectorKind
    dark_current_a: float = 0.0
    # Optional minimum usable optical input power; below it the ledger flags
    # the path (it is a bookkeeping flag, not a hard failure).
    sensitivity_dbm: float | None = None


ComponentSpec = Union[
    LaserSpec,
    ModulatorSpec,
    MuxDemuxSpec,
    EdfaSpec,
    SplitterSpec,
    FiberSpec,
    PhotodetectorSpec,
]

_TYPE_TAGS: dict[type, str] = {
    LaserSpec: "laser",
    ModulatorSpec: "modulator",
    MuxDemuxSpec: "mux_demux",
    EdfaSpec: "edfa",
    SplitterSpec: "splitter",
    FiberSpec: "fiber",
    PhotodetectorSpec: "photodetector",
}
_TAG_TYPES = {tag: cls for cls, tag in _TYPE_TAGS.items()}

_ENUM_FIELDS = {
    "scheme": Modulation,
    "bias": ModulatorBias,
    "technology": GratingTech,
    "kind": DetectorKind,
}


@dataclass(frozen=True)
class Violation:
    subject: str
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.subject}.{self.field}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def messages(self) -> list[str]:
        return [str(v) for v in self.violations]


class _Checker:
    """Accumulates violations for one named component."""

    def __init__(self, name: str):
        self.name = name
        self.items: list[Violation] = []

    def add(self, field: str, message: str) -> None:
        self.items.append(Violation(self.name, field, message))

    def finite(self, field: str, value: float | None) -> bool:
        """NaN and infinities are violations everywhere: the engine is pure
        arithmetic and must stay deterministic."""
        if value is None:
            return True
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.add(field, f"must be a number, got {value!r}")
            return False
        if not math.isfinite(value):
            self.add(field, f"must be finite, got {value!r}")
            return False
        return True


def validate_component(spec: ComponentSpec, *, name: str = "component",
                       in_wdm_plan: bool = False) -> ValidationReport:
    """Check every invariant of a single element; violations are data.

    ``in_wdm_plan`` additionally enforces the 1300-1650 nm source band on
    lasers, which only applies once a laser is attached to a wavelength plan.
    """
    c = _Checker(name)
    if isinstance(spec, LaserSpec):
        if c.finite("output_power_w", spec.output_power_w) and spec.output_power_w <= 0:
            c.add("output_power_w", f"must be > 0 W, got {spec.output_power_w}")
        if c.finite("rin_db_hz", spec.rin_db_hz) and spec.rin_db_hz >= 0:
            c.add("rin_db_hz", f"must be < 0 dB/Hz, got {spec.rin_db_hz}")
        if c.finite("wavelength_nm", spec.wavelength_nm):
            if spec.wavelength_nm <= 0:
                c.add("wavelength_nm", f"must be > 0 nm, got {spec.wavelength_nm}")
            elif in_wdm_plan:
                lo, hi = WDM_BAND_NM
                if spec.wavelength_nm < lo:
                    c.add("wavelength_nm", f"wavelength below {lo:.0f} nm source band")
                elif spec.wavelength_nm > hi:
                    c.add("wavelength_nm", f"wavelength above {hi:.0f} nm source band")
        if (c.finite("slope_efficiency_w_per_a", spec.slope_efficiency_w_per_a)
                and spec.slope_efficiency_w_per_a <= 0):
            c.add("slope_efficiency_w_per_a",
                  f"must be > 0 W/A, got {spec.slope_efficiency_w_per_a}")
    elif isinstance(spec, ModulatorSpec):
        if c.finite("bandwidth_hz", spec.bandwidth_hz) and spec.bandwidth_hz <= 0:
            c.add("bandwidth_hz", f"must be > 0 Hz, got {spec.bandwidth_hz}")
        if spec.scheme is Modulation.DIRECT:
            if spec.v_pi_v is not None:
                c.add("v_pi_v", "direct scheme carries no v_pi")
            if spec.insertion_loss_db is not None:
                c.add("insertion_loss_db", "direct scheme carries no insertion loss")
            if spec.bias is not None:
                c.add("bias", "direct scheme carries no bias point")
        else:
            if spec.v_pi_v is None:
                c.add("v_pi_v", "external scheme requires v_pi > 0 V")
            elif c.finite("v_pi_v", spec.v_pi_v) and spec.v_pi_v <= 0:
                c.add("v_pi_v", f"must be > 0 V, got {spec.v_pi_v}")
            if spec.insertion_loss_db is not None:
                if (c.finite("insertion_loss_db", spec.insertion_loss_db)
                        and spec.insertion_loss_db < 0):
                    c.add("insertion_loss_db",
                          f"must be >= 0 dB, got {spec.insertion_loss_db}")
            if spec.bias is None:
                c.add("bias", "external scheme requires a quadrature bias point")
    elif isinstance(spec, MuxDemuxSpec):
        if (c.finite("insertion_loss_db", spec.insertion_loss_db)
                and spec.insertion_loss_db < 0):
            c.add("insertion_loss_db", f"must be >= 0 dB, got {spec.insertion_loss_db}")
        if (c.finite("channel_spacing_nm", spec.channel_spacing_nm)
                and spec.channel_spacing_nm <= 0):
            c.add("channel_spacing_nm", f"must be > 0 nm, got {spec.channel_spacing_nm}")
        adj_ok = c.finite("adjacent_isolation_db", spec.adjacent_isolation_db)
        non_ok = c.finite("nonadjacent_isolation_db", spec.nonadjacent_isolation_db)
        if adj_ok and spec.adjacent_isolation_db <= 0:
            c.add("adjacent_isolation_db",
                  f"must be > 0 dB, got {spec.adjacent_isolation_db}")
        if adj_ok and non_ok and spec.nonadjacent_isolation_db < spec.adjacent_isolation_db:
            c.add("nonadjacent_isolation_db",
                  "must be >= adjacent_isolation_db "
                  f"({spec.nonadjacent_isolation_db} < {spec.adjacent_isolation_db})")
    elif isinstance(spec, EdfaSpec):
        gain_ok = c.finite("gain_db", spec.gain_db)
        max_ok = c.finite("max_gain_db", spec.max_gain_db)
        if gain_ok and spec.gain_db < 0:
            c.add("gain_db", f"must be >= 0 dB, got {spec.gain_db}")
        if gain_ok and max_ok and spec.gain_db > spec.max_gain_db:
            c.add("gain_db", f"exceeds max_gain_db ({spec.gain_db} > {spec.max_gain_db})")
        if c.finite("noise_figure_db", spec.noise_figure_db) and spec.noise_figure_db <= 0:
            c.add("noise_figure_db", f"must be > 0 dB, got {spec.noise_figure_db}")
        c.finite("saturation_output_power_dbm", spec.saturation_output_power_dbm)
    elif isinstance(spec, SplitterSpec):
        if not isinstance(spec.fanout, int) or isinstance(spec.fanout, bool):
            c.add("fanout", f"must be an integer, got {spec.fanout!r}")
        elif spec.fanout < 1:
            c.add("fanout", f"fanout >= 1 required, got {spec.fanout}")
        if c.finite("excess_loss_db", spec.excess_loss_db) and spec.excess_loss_db < 0:
            c.add("excess_loss_db", f"must be >= 0 dB, got {spec.excess_loss_db}")
    elif isinstance(spec, FiberSpec):
        if c.finite("length_m", spec.length_m) and spec.length_m < 0:
            c.add("length_m", f"must be >= 0 m, got {spec.length_m}")
        if (c.finite("attenuation_db_per_km", spec.attenuation_db_per_km)
                and spec.attenuation_db_per_km < 0):
            c.add("attenuation_db_per_km",
                  f"must be >= 0 dB/km, got {spec.attenuation_db_per_km}")
        if c.finite("group_index", spec.group_index) and spec.group_index <= 0:
            c.add("group_index", f"must be > 0, got {spec.group_index}")
    elif isinstance(spec, PhotodetectorSpec):
        if c.finite("responsivity_a_per_w", spec.responsivity_a_per_w):
            if not 0 < spec.responsivity_a_per_w <= 1.1:
                c.add("responsivity_a_per_w",
                      f"must be in (0, 1.1] A/W, got {spec.responsivity_a_per_w}")
        if c.finite("dark_current_a", spec.dark_current_a) and spec.dark_current_a < 0:
            c.add("dark_current_a", f"must be >= 0 A, got {spec.dark_current_a}")
        if c.finite("bandwidth_hz", spec.bandwidth_hz) and spec.bandwidth_hz <= 0:
            c.add("bandwidth_hz", f"must be > 0 Hz, got {spec.bandwidth_hz}")
        c.finite("saturation_power_dbm", spec.saturation_power_dbm)
        c.finite("sensitivity_dbm", spec.sensitivity_dbm)
    else:
        c.add("type", f"unknown component type {type(spec).__name__}")
    return ValidationReport(tuple(c.items))


def component_to_dict(spec: ComponentSpec) -> dict:
    """JSON-ready dict with a ``type`` tag; enum fields become their tokens."""
    payload: dict = {"type": _TYPE_TAGS[type(spec)]}
    for f in dataclass_fields(spec):
        value = getattr(spec, f.name)
        if isinstance(value, Enum):
            value = value.value
        if value is None:
            continue
        payload[f.name] = value
    return payload


def component_from_dict(payload: dict, *, name: str = "component") -> ComponentSpec:
    """Inverse of :func:`component_to_dict`; raises ValueError on shape errors."""
    if not isinstance(payload, dict):
        raise ValueError(f"{name}: component entry must be an object")
    data = dict(payload)
    tag = data.pop("type", None)
    cls = _TAG_TYPES.get(tag)
    if cls is None:
        known = ", ".join(sorted(_TAG_TYPES))
        raise ValueError(f"{name}: unknown component type {tag!r} (expected one of {known})")
    known_fields = {f.name for f in dataclass_fields(cls)}
    unknown = sorted(set(data) - known_fields)
    if unknown:
        raise ValueError(f"{name}: unknown field(s) {', '.join(unknown)} for type {tag!r}")
    kwargs = {}
    for field_name, value in data.items():
        enum_cls = _ENUM_FIELDS.get(field_name)
        if enum_cls is not None and value is not None:
            try:
                value = enum_cls(value)
            except ValueError:
                tokens = ", ".join(e.value for e in enum_cls)
                raise ValueError(
                    f"{name}.{field_name}: unknown value {value!r} (expected {tokens})"
                ) from None
        kwargs[field_name] = value
    if cls is ModulatorSpec and kwargs.get("scheme") is Modulation.EXTERNAL:
        kwargs.setdefault("bias", ModulatorBias.QUADRATURE)
        kwargs.setdefault("insertion_loss_db", 0.0)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValueError(f"{name}: {exc}") from None


def _reject_duplicate_keys(pairs):
    result = {}
    for key, value in pairs:
        if key in result:
            raise ValueError(f"duplicate name {key!r}")
        result[key] = value
    return result


def parse_component_library(payload: dict, *, where: str = "library") -> dict[str, ComponentSpec]:
    """Build a validated name -> spec map; aggregates every invalid entry."""
    if not isinstance(payload, dict):
        raise LibraryError(f"{where}: component library must be a JSON object")
    library: dict[str, ComponentSpec] = {}
    problems: list[str] = []
    for entry_name, entry in payload.items():
        try:
            spec = component_from_dict(entry, name=entry_name)
        except ValueError as exc:
            problems.append(str(exc))
            continue
        report = validate_component(spec, name=entry_name)
        if report.ok:
            library[entry_name] = spec
        else:
            problems.extend(report.messages())
    if problems:
        raise LibraryError(f"{where}: invalid component entries", problems)
    return library


def load_component_library(path: str | Path) -> dict[str, ComponentSpec]:
    """Load a component library JSON file.

    The load either returns a fully valid map or fails with every problem
    listed; duplicate names are rejected.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LibraryError(f"cannot read {path}: {exc}") from exc
    if not text.strip():
        return {}
    try:
        payload = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except ValueError as exc:
        raise LibraryError(f"{path}: {exc}") from exc
    return parse_component_library(payload, where=str(path))


def save_component_library(library: dict[str, ComponentSpec], path: str | Path) -> None:
    payload = {name: component_to_dict(spec) for name, spec in library.items()}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
