"""Analog link-metric engine: optical power ledger, RF gain, noise figure,
dynamic range, crosstalk, timing and phase-noise figures per signal path.

Every operation is a pure function of immutable inputs; identical inputs give
bit-identical outputs, so paths may be analyzed concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .components import (
    EdfaSpec,
    FiberSpec,
    LaserSpec,
    Modulation,
    ModulatorSpec,
    MuxDemuxSpec,
    PhotodetectorSpec,
    SplitterSpec,
)
from .errors import AnalysisError
from .topology import (
    ElementKind,
    OpticalTopology,
    PathElement,
    SignalPath,
    co_propagating,
)
from .units import (
    BOLTZMANN_J_PER_K,
    ELEMENTARY_CHARGE_C,
    PLANCK_J_S,
    SPEED_OF_LIGHT_M_S,
    THERMAL_FLOOR_DBM_PER_HZ,
    db_to_linear,
    dbm_to_watts,
    power_sum_db,
    watts_to_dbm,
    wavelength_nm_to_hz,
)

# First-order 10-90% step-response model constant.
RISE_TIME_BANDWIDTH_PRODUCT = 0.35

# Output-referred thermal floor of a passively matched link, dB.
NOISE_FIGURE_FLOOR_DB = 10.0 * math.log10(2.0)


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs of the metric engine; scenario files populate one of these."""

    bandwidth_hz: float = 1e7
    temperature_k: float = 290.0
    load_resistance_ohm: float = 50.0
    # Link input intercept point; a plain number, or a per-modulation map
    # keyed by "dm"/"em" when the two link flavors differ.
    iip3_dbm: float | Mapping[str, float] | None = None
    carrier_power_dbm: float | None = None
    phase_noise_profile: tuple[tuple[float, float], ...] | None = None
    front_end_gain_db: float | None = None
    front_end_noise_figure_db: float | None = None
    # Per-element rms jitter contributions, keyed by element kind token
    # ("laser", "modulator", "edfa", "detector", ...).
    jitter_rms_s: Mapping[str, float] = field(default_factory=dict)
    edfa_autogain: bool = True

    def iip3_for(self, modulation: Modulation) -> float | None:
        if self.iip3_dbm is None or isinstance(self.iip3_dbm, (int, float)):
            return self.iip3_dbm
        return self.iip3_dbm.get(modulation.token)


@dataclass(frozen=True)
class LedgerEntry:
    element_id: str
    delta_db: float
    power_dbm: float
    note: str | None = None


@dataclass(frozen=True)
class OpticalLedger:
    """Ordered per-element optical power bookkeeping along one path, dBm."""

    entries: tuple[LedgerEntry, ...]
    flags: tuple[str, ...] = ()

    @property
    def start_dbm(self) -> float:
        return self.entries[0].power_dbm

    @property
    def end_dbm(self) -> float:
        return self.entries[-1].power_dbm


@dataclass(frozen=True)
class NoiseBreakdown:
    """Output-referred noise densities into the detector load, W/Hz."""

    thermal_w_hz: float
    shot_w_hz: float
    rin_w_hz: float
    ase_w_hz: float

    @property
    def total_w_hz(self) -> float:
        return self.thermal_w_hz + self.shot_w_hz + self.rin_w_hz + self.ase_w_hz


@dataclass(frozen=True)
class AutogainResult:
    gains_db: Mapping[str, float]
    shortfall_db: float
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class LinkMetrics:
    rf_gain_db: float
    noise_figure_db: float
    snr_degradation_db: float
    sfdr_db: float
    effective_bandwidth_hz: float
    rise_time_s: float
    fall_time_s: float
    pulse_skew_s: float
    timing_jitter_rms_s: float
    detector_power_dbm: float
    detector_saturation_margin_db: float
    optical_ledger: OpticalLedger
    noise: NoiseBreakdown
    nf_degradation_db: float | None = None
    phase_noise_degradation_db: float | None = None
    crosstalk_db: float | None = None
    flags: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Scalar kernels


def noise_floor_dbm(noise_figure_db: float, bandwidth_hz: float) -> float:
    """Input-referred noise floor in a bandwidth: -174 + NF + 10log10(B)."""
    if bandwidth_hz <= 0:
        raise AnalysisError(f"bandwidth must be > 0 Hz, got {bandwidth_hz}")
    return THERMAL_FLOOR_DBM_PER_HZ + noise_figure_db + 10.0 * math.log10(bandwidth_hz)


def sfdr_db(iip3_dbm: float, noise_figure_db: float, bandwidth_hz: float) -> float:
    """Third-order spurious-free dynamic range in the given bandwidth, dB."""
    return (2.0 / 3.0) * (iip3_dbm - noise_floor_dbm(noise_figure_db, bandwidth_hz))


def cascade_noise_figure(stages: Sequence[tuple[float, float]]) -> float:
    """Combine (gain_db, noise_figure_db) stages in signal order, dB."""
    if not stages:
        raise AnalysisError("cascade needs at least one stage")
    total_factor = 0.0
    gain_acc = 1.0
    for index, (gain_db, nf_db) in enumerate(stages):
        factor = db_to_linear(nf_db)
        if index == 0:
            total_factor = factor
        else:
            total_factor += (factor - 1.0) / gain_acc
        gain_acc *= db_to_linear(gain_db)
    return 10.0 * math.log10(total_factor)


def snr_out_db(snr_in_db: float, noise_figure_db: float) -> tuple[float, float]:
    """(output SNR, degradation); the link subtracts exactly its noise figure."""
    return snr_in_db - noise_figure_db, noise_figure_db


def rise_time_s(bandwidth_hz: float) -> float:
    if bandwidth_hz <= 0 or not math.isfinite(bandwidth_hz):
        raise AnalysisError(f"bandwidth must be finite and > 0 Hz, got {bandwidth_hz}")
    return RISE_TIME_BANDWIDTH_PRODUCT / bandwidth_hz


def rss_jitter_s(contributions: Iterable[float]) -> float:
    """Root-sum-square of per-element rms jitter contributions."""
    return math.sqrt(sum(c * c for c in contributions))


def added_phase_noise_dbc(input_dbc_hz: float, floor_dbc_hz: float) -> float:
    """Output phase-noise after power-summing a flat link floor, dBc/Hz."""
    return power_sum_db((input_dbc_hz, floor_dbc_hz))


def crosstalk_power_sum_db(isolations_db: Sequence[float]) -> float | None:
    """Aggregate leakage-to-signal ratio from per-interferer isolations, dB.

    Returns None for the single-channel case (no interferers)."""
    if not isolations_db:
        return None
    return power_sum_db([-iso for iso in isolations_db])


# ---------------------------------------------------------------------------
# Path-level helpers


def _element_delta_db(element: PathElement) -> float:
    """Signed optical power change through one element, dB."""
    spec = element.spec
    if isinstance(spec, LaserSpec) or isinstance(spec, PhotodetectorSpec):
        return 0.0
    if isinstance(spec, ModulatorSpec):
        if spec.scheme is Modulation.DIRECT:
            return 0.0
        return -(spec.insertion_loss_db or 0.0)
    if isinstance(spec, MuxDemuxSpec):
        return -spec.insertion_loss_db
    if isinstance(spec, FiberSpec):
        return -spec.loss_db
    if isinstance(spec, SplitterSpec):
        return -spec.split_loss_db
    if isinstance(spec, EdfaSpec):
        return spec.gain_db
    raise AnalysisError(f"element {element.element_id} has no optical model")


def _laser_of(path: SignalPath) -> LaserSpec:
    first = path.elements[0]
    if first.kind is not ElementKind.LASER or not isinstance(first.spec, LaserSpec):
        raise AnalysisError(f"path {path.path_id} does not start at a laser")
    return first.spec


def _detector_of(path: SignalPath) -> PhotodetectorSpec:
    last = path.elements[-1]
    if last.kind is not ElementKind.DETECTOR \
            or not isinstance(last.spec, PhotodetectorSpec):
        raise AnalysisError(f"path {path.path_id} does not end at a detector")
    return last.spec


def _modulator_of(path: SignalPath) -> PathElement:
    for element in path.elements:
        if element.kind is ElementKind.MODULATOR:
            return element
    raise AnalysisError(f"path {path.path_id} has no modulator")


def edfa_autogain(path: SignalPath) -> AutogainResult:
    """Set each amplifier to cover the passive loss it is responsible for.

    Each amplifier compensates the passive loss accumulated since the previous
    one; the last amplifier additionally covers everything downstream of it,
    so an unclamped chain lands the detector exactly at the laser power. Gains
    clamp at max_gain and any remainder is reported as a shortfall.
    """
    edfas = [e for e in path.elements if e.kind is ElementKind.EDFA]
    gains: dict[str, float] = {}
    notes: list[str] = []
    if not edfas:
        return AutogainResult(gains, 0.0)

    last_edfa_id = edfas[-1].element_id
    pending_loss = 0.0
    downstream = 0.0
    past_last = False
    for element in path.elements[1:]:
        if element.kind is ElementKind.EDFA:
            gains[element.element_id] = pending_loss
            pending_loss = 0.0
            past_last = element.element_id == last_edfa_id
        else:
            loss = -_element_delta_db(element)
            if past_last:
                downstream += loss
            else:
                pending_loss += loss
    gains[last_edfa_id] += downstream

    shortfall = 0.0
    for element in edfas:
        spec = element.spec
        want = gains[element.element_id]
        got = min(want, spec.max_gain_db)
        if got < want:
            missing = want - got
            shortfall += missing
            notes.append(
                f"{element.element_id}: under-compensated by {missing:.2f} dB "
                f"(gain clamped at max {spec.max_gain_db:.2f} dB)")
        gains[element.element_id] = got
    return AutogainResult(gains, shortfall, tuple(notes))


def apply_edfa_gains(path: SignalPath, gains_db: Mapping[str, float]) -> SignalPath:
    """New path whose amplifier specs carry the given gain settings."""
    elements = []
    for element in path.elements:
        if element.kind is ElementKind.EDFA and element.element_id in gains_db:
            spec = replace(element.spec, gain_db=gains_db[element.element_id])
            element = replace(element, spec=spec)
        elements.append(element)
    return replace(path, elements=tuple(elements))


def autogained(path: SignalPath) -> SignalPath:
    return apply_edfa_gains(path, edfa_autogain(path).gains_db)


def topology_edfa_gains(paths: Sequence[SignalPath]) -> dict[str, float]:
    """Coherent gain settings for amplifiers shared across paths.

    A shared amplifier takes the largest per-path requirement so the worst-case
    leg is fully compensated; symmetric networks see no difference.
    """
    gains: dict[str, float] = {}
    for path in paths:
        for element_id, gain in edfa_autogain(path).gains_db.items():
            gains[element_id] = max(gain, gains.get(element_id, 0.0))
    return gains


def optical_ledger(path: SignalPath) -> OpticalLedger:
    """Walk the path applying per-element dB deltas; flags saturation and
    sensitivity breaches instead of raising."""
    laser = _laser_of(path)
    power = watts_to_dbm(laser.output_power_w)
    entries = [LedgerEntry(path.elements[0].element_id, 0.0, power, "source")]
    flags: list[str] = []
    for element in path.elements[1:]:
        delta = _element_delta_db(element)
        power += delta
        note = None
        if isinstance(element.spec, EdfaSpec):
            if element.spec.gain_db >= element.spec.max_gain_db:
                note = "gain clamped at max"
            if power > element.spec.saturation_output_power_dbm:
                flags.append(
                    f"{element.element_id}: output {power:.2f} dBm above "
                    f"saturation {element.spec.saturation_output_power_dbm:.2f} dBm")
        if isinstance(element.spec, PhotodetectorSpec):
            if power > element.spec.saturation_power_dbm:
                flags.append(
                    f"{element.element_id}: input {power:.2f} dBm above "
                    f"saturation {element.spec.saturation_power_dbm:.2f} dBm")
            if element.spec.sensitivity_dbm is not None \
                    and power < element.spec.sensitivity_dbm:
                flags.append(
                    f"{element.element_id}: input {power:.2f} dBm below "
                    f"sensitivity {element.spec.sensitivity_dbm:.2f} dBm")
        entries.append(LedgerEntry(element.element_id, delta, power, note))
    return OpticalLedger(tuple(entries), tuple(flags))


def rf_gain_db(path: SignalPath, modulation: Modulation,
               config: AnalysisConfig) -> float:
    """End-to-end RF power gain of the photonic link, dB.

    Both modulation flavors share the form 20log10(slope * t_opt * r_pd) where
    t_opt is the linear end-to-end optical transmission (amplifiers included).
    Direct modulation uses the laser slope efficiency; external modulation the
    quadrature-biased interferometric small-signal slope pi*P*R/(2*Vpi), whose
    feed-forward loss is already inside t_opt.
    """
    modulator = _modulator_of(path)
    spec = modulator.spec
    if not isinstance(spec, ModulatorSpec) or spec.scheme is not modulation:
        raise AnalysisError(
            f"path {path.path_id} carries a {getattr(spec, 'scheme', None)} modulator "
            f"but the {modulation.value} model was requested")
    ledger = optical_ledger(path)
    transmission = db_to_linear(ledger.end_dbm - ledger.start_dbm)
    detector = _detector_of(path)
    if modulation is Modulation.DIRECT:
        slope = _laser_of(path).slope_efficiency_w_per_a
    else:
        if spec.v_pi_v is None or spec.v_pi_v <= 0:
            raise AnalysisError(
                f"external modulation requires v_pi > 0 on {modulator.element_id}")
        slope = (math.pi * _laser_of(path).output_power_w
                 * config.load_resistance_ohm / (2.0 * spec.v_pi_v))
    chain = slope * transmission * detector.responsivity_a_per_w
    if chain <= 0:
        raise AnalysisError(f"degenerate transfer slope on path {path.path_id}")
    return 20.0 * math.log10(chain)


def noise_figure_db(path: SignalPath, modulation: Modulation,
                    config: AnalysisConfig) -> tuple[float, NoiseBreakdown]:
    """Link noise figure from total output-referred noise into the load.

    Shot, laser intensity noise and amplifier spontaneous emission (folded in
    as equivalent intensity noise 2*h*nu*F/P_in) land on the detector load;
    the result is floored at the 3 dB passive matched-load limit.
    """
    gain_db = rf_gain_db(path, modulation, config)
    gain_lin = db_to_linear(gain_db)
    ledger = optical_ledger(path)
    detector = _detector_of(path)
    laser = _laser_of(path)
    load = config.load_resistance_ohm
    kt = BOLTZMANN_J_PER_K * config.temperature_k

    detector_power_w = dbm_to_watts(ledger.end_dbm)
    photocurrent = detector.responsivity_a_per_w * detector_power_w
    if photocurrent <= 0:
        return math.inf, NoiseBreakdown(kt * (1.0 + gain_lin), 0.0, 0.0, 0.0)
    dc_current = photocurrent + detector.dark_current_a

    thermal = kt * (1.0 + gain_lin)
    shot = 2.0 * ELEMENTARY_CHARGE_C * dc_current * load
    rin = db_to_linear(laser.rin_db_hz) * photocurrent ** 2 * load

    ase_rin = 0.0
    power = ledger.start_dbm
    carrier_hz = wavelength_nm_to_hz(path.wavelength_nm)
    for element in path.elements[1:]:
        if element.kind is ElementKind.EDFA and isinstance(element.spec, EdfaSpec):
            input_w = dbm_to_watts(power)
            ase_rin += (2.0 * PLANCK_J_S * carrier_hz
                        * db_to_linear(element.spec.noise_figure_db) / input_w)
        power += _element_delta_db(element)
    ase = ase_rin * photocurrent ** 2 * load

    breakdown = NoiseBreakdown(thermal, shot, rin, ase)
    raw = 10.0 * math.log10(breakdown.total_w_hz / (gain_lin * kt))
    return max(raw, NOISE_FIGURE_FLOOR_DB), breakdown


def path_sfdr_db(path: SignalPath, modulation: Modulation,
                 config: AnalysisConfig) -> float:
    iip3 = config.iip3_for(modulation)
    if iip3 is None:
        raise AnalysisError("sfdr needs iip3_dbm in the analysis configuration")
    nf, _ = noise_figure_db(path, modulation, config)
    return sfdr_db(iip3, nf, config.bandwidth_hz)


def effective_bandwidth_hz(path: SignalPath, config: AnalysisConfig) -> float:
    """Smallest electrical bandwidth along the path (modulator, detector)."""
    widths = [e.spec.bandwidth_hz for e in path.elements
              if isinstance(e.spec, (ModulatorSpec, PhotodetectorSpec))]
    if not widths:
        return config.bandwidth_hz
    return min(widths)


def rise_fall_time_s(path: SignalPath, config: AnalysisConfig) -> tuple[float, float]:
    t = rise_time_s(effective_bandwidth_hz(path, config))
    return t, t


def propagation_delay_s(path: SignalPath) -> float:
    delay = 0.0
    for element in path.elements:
        if isinstance(element.spec, FiberSpec):
            delay += element.spec.group_index * element.spec.length_m / SPEED_OF_LIGHT_M_S
    return delay


def pulse_skew_s(paths: Sequence[SignalPath]) -> float:
    """Max pairwise propagation-delay difference over a path set, s."""
    if not paths:
        return 0.0
    delays = [propagation_delay_s(p) for p in paths]
    return max(delays) - min(delays)


def timing_jitter_s(path: SignalPath, config: AnalysisConfig) -> float:
    contributions = [config.jitter_rms_s.get(e.kind.value, 0.0)
                     for e in path.elements]
    return rss_jitter_s(contributions)


def crosstalk_db(path: SignalPath, topology: OpticalTopology,
                 config: AnalysisConfig) -> float | None:
    """Aggregate leakage-to-signal ratio at the path's demux, dB.

    Spectrally adjacent co-channels leak at the demux adjacent isolation, the
    rest at the nonadjacent isolation; equal per-channel powers are assumed.
    Returns None when the channel rides its fiber alone.
    """
    demux = None
    for element in path.elements:
        if element.kind is ElementKind.DEMUX and isinstance(element.spec, MuxDemuxSpec):
            demux = element.spec
    if demux is None:
        raise AnalysisError(f"path {path.path_id} has no demux")
    neighbors = [ch for ch in co_propagating(topology, path) if ch != path.channel]
    if not neighbors:
        return None
    ordered = sorted(co_propagating(topology, path),
                     key=lambda ch: topology.wavelength_plan[ch])
    index = ordered.index(path.channel)
    adjacent = {ordered[i] for i in (index - 1, index + 1) if 0 <= i < len(ordered)}
    isolations = [demux.adjacent_isolation_db if ch in adjacent
                  else demux.nonadjacent_isolation_db
                  for ch in neighbors]
    return crosstalk_power_sum_db(isolations)


def phase_noise_degradation_db(
    profile: Sequence[tuple[float, float]],
    path: SignalPath,
    modulation: Modulation,
    config: AnalysisConfig,
) -> tuple[tuple[float, float], ...]:
    """Per-offset phase-noise degradation from the link's flat additive floor.

    The floor sits at the input-referred noise density minus the carrier
    power; small-signal operation is the only regime modeled.
    """
    if config.carrier_power_dbm is None:
        raise AnalysisError("phase-noise degradation needs carrier_power_dbm")
    nf, _ = noise_figure_db(path, modulation, config)
    floor_dbc = (THERMAL_FLOOR_DBM_PER_HZ + nf) - config.carrier_power_dbm
    out = []
    for offset_hz, level_dbc in profile:
        out.append((offset_hz, added_phase_noise_dbc(level_dbc, floor_dbc) - level_dbc))
    return tuple(out)


def nf_degradation_db(link_gain_db: float, link_nf_db: float,
                      config: AnalysisConfig) -> float | None:
    """Receiver noise-figure increase caused by appending the link behind the
    configured receive front end; None when no front end is configured."""
    if config.front_end_gain_db is None or config.front_end_noise_figure_db is None:
        return None
    total = cascade_noise_figure([
        (config.front_end_gain_db, config.front_end_noise_figure_db),
        (link_gain_db, link_nf_db),
    ])
    return total - config.front_end_noise_figure_db


def analyze_path(
    path: SignalPath,
    modulation: Modulation,
    config: AnalysisConfig,
    *,
    topology: OpticalTopology | None = None,
    reference_delay_s: float | None = None,
) -> LinkMetrics:
    """Full metric bundle for one path; internally consistent by construction
    (ledger conservation, SNR degradation equal to the noise figure)."""
    if config.edfa_autogain:
        path = autogained(path)
    ledger = optical_ledger(path)
    gain = rf_gain_db(path, modulation, config)
    nf, breakdown = noise_figure_db(path, modulation, config)
    iip3 = config.iip3_for(modulation)
    if iip3 is None:
        raise AnalysisError("analysis needs iip3_dbm in the configuration")
    dynamic_range = sfdr_db(iip3, nf, config.bandwidth_hz)
    bandwidth = effective_bandwidth_hz(path, config)
    t_rise, t_fall = rise_fall_time_s(path, config)
    delay = propagation_delay_s(path)
    skew = 0.0 if reference_delay_s is None else delay - reference_delay_s
    jitter = timing_jitter_s(path, config)
    leakage = crosstalk_db(path, topology, config) if topology is not None else None
    degradation = nf_degradation_db(gain, nf, config)
    phase_deg: float | None = None
    if config.phase_noise_profile and config.carrier_power_dbm is not None:
        per_offset = phase_noise_degradation_db(
            config.phase_noise_profile, path, modulation, config)
        phase_deg = max(d for _, d in per_offset)
    detector = _detector_of(path)
    return LinkMetrics(
        rf_gain_db=gain,
        noise_figure_db=nf,
        snr_degradation_db=nf,
        sfdr_db=dynamic_range,
        effective_bandwidth_hz=bandwidth,
        rise_time_s=t_rise,
        fall_time_s=t_fall,
        pulse_skew_s=skew,
        timing_jitter_rms_s=jitter,
        detector_power_dbm=ledger.end_dbm,
        detector_saturation_margin_db=detector.saturation_power_dbm - ledger.end_dbm,
        optical_ledger=ledger,
        noise=breakdown,
        nf_degradation_db=degradation,
        phase_noise_degradation_db=phase_deg,
        crosstalk_db=leakage,
        flags=ledger.flags,
    )


def worst_case(metrics: Sequence[LinkMetrics]) -> LinkMetrics:
    """Pessimistic aggregate across paths for compliance checking.

    Takes the worst value of each comparable field; ledger and noise breakdown
    come from the worst-noise-figure path, flags are the union.
    """
    if not metrics:
        raise AnalysisError("worst_case needs at least one metric bundle")
    anchor = max(metrics, key=lambda m: m.noise_figure_db)

    def _max_opt(values: Iterable[float | None]) -> float | None:
        present = [v for v in values if v is not None]
        return max(present) if present else None

    flags: list[str] = []
    for m in metrics:
        for f in m.flags:
            if f not in flags:
                flags.append(f)
    return LinkMetrics(
        rf_gain_db=min(m.rf_gain_db for m in metrics),
        noise_figure_db=anchor.noise_figure_db,
        snr_degradation_db=anchor.noise_figure_db,
        sfdr_db=min(m.sfdr_db for m in metrics),
        effective_bandwidth_hz=min(m.effective_bandwidth_hz for m in metrics),
        rise_time_s=max(m.rise_time_s for m in metrics),
        fall_time_s=max(m.fall_time_s for m in metrics),
        pulse_skew_s=max(m.pulse_skew_s for m in metrics),
        timing_jitter_rms_s=max(m.timing_jitter_rms_s for m in metrics),
        detector_power_dbm=max(m.detector_power_dbm for m in metrics),
        detector_saturation_margin_db=min(m.detector_saturation_margin_db
                                          for m in metrics),
        optical_ledger=anchor.optical_ledger,
        noise=anchor.noise,
        nf_degradation_db=_max_opt(m.nf_degradation_db for m in metrics),
        phase_noise_degradation_db=_max_opt(m.phase_noise_degradation_db
                                            for m in metrics),
        crosstalk_db=_max_opt(m.crosstalk_db for m in metrics),
        flags=tuple(flags),
    )
