"""Report assembly and emission.

A Report is a plain data bundle; the three emitters (aligned text, versioned
JSON, per-metric CSV) are pure functions of it, so the same scenario always
produces byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .digitalpath import GroupCapacity
from .linkbudget import LinkMetrics
from .topology import Direction, SignalPath
from .tradeoff import ComplianceReport, OrdinalScore, Recommendation

REPORT_SCHEMA_VERSION = 1

# Scalar metric columns serialized per path; key name carries the unit.
METRIC_COLUMNS: tuple[tuple[str, str], ...] = (
    ("rf_gain_db", "dB"),
    ("noise_figure_db", "dB"),
    ("snr_degradation_db", "dB"),
    ("sfdr_db", "dB"),
    ("nf_degradation_db", "dB"),
    ("phase_noise_degradation_db", "dB"),
    ("crosstalk_db", "dB"),
    ("effective_bandwidth_hz", "Hz"),
    ("rise_time_s", "s"),
    ("fall_time_s", "s"),
    ("pulse_skew_s", "s"),
    ("timing_jitter_rms_s", "s"),
    ("detector_power_dbm", "dBm"),
    ("detector_saturation_margin_db", "dB"),
)

_GREEN = "\x1b[32m"
_RED = "\x1b[31m"
_RESET = "\x1b[0m"


@dataclass(frozen=True)
class TopologySummary:
    direction: Direction
    node_count: int
    edge_count: int
    channel_count: int
    n_dtrm: int
    path_count: int
    group_count: int = 0


@dataclass(frozen=True)
class PathResult:
    path: SignalPath
    metrics: LinkMetrics


@dataclass(frozen=True)
class VariantResult:
    label: str
    feasible: bool
    score: OrdinalScore | None
    paths: tuple[PathResult, ...]
    worst: LinkMetrics | None
    compliance: ComplianceReport | None


@dataclass(frozen=True)
class Report:
    command: str
    tool_version: str
    scenario_name: str
    scenario_fingerprint: str
    topology_summaries: tuple[TopologySummary, ...]
    adjacency: tuple[str, ...] = ()
    validation_messages: tuple[str, ...] = ()
    variants: tuple[VariantResult, ...] = ()
    digital_groups: tuple[GroupCapacity, ...] = ()
    recommendation: Recommendation | None = None
    notes: tuple[str, ...] = ()

    @property
    def has_input_errors(self) -> bool:
        return bool(self.validation_messages)

    @property
    def has_compliance_failures(self) -> bool:
        return any(v.compliance is not None and not v.compliance.verdict
                   for v in self.variants)


def _fmt(value: float | None, digits: int = 3) -> str:
    if value is None:
        return "-"
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}f}"


def _fmt_si(value: float | None) -> str:
    """Engineering formatting for wide-ranged quantities (Hz, byte/s, s)."""
    if value is None:
        return "-"
    if value == 0:
        return "0"
    magnitude = abs(value)
    for scale, suffix in ((1e9, "G"), (1e6, "M"), (1e3, "k")):
        if magnitude >= scale:
            return f"{value / scale:.6g}{suffix}"
    if magnitude < 1e-3:
        for scale, suffix in ((1e-12, "p"), (1e-9, "n"), (1e-6, "u")):
            if magnitude < scale * 1e3:
                return f"{value / scale:.6g}{suffix}"
    return f"{value:.6g}"


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()
    sep = "  ".join("-" * w for w in widths).rstrip()
    out = [line, sep]
    for row in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return out


def render_text(report: Report, *, color: bool = False) -> str:
    def verdict(ok: bool) -> str:
        word = "PASS" if ok else "FAIL"
        if not color:
            return word
        return f"{_GREEN}{word}{_RESET}" if ok else f"{_RED}{word}{_RESET}"

    lines: list[str] = []
    lines.append(f"photonlink {report.tool_version} - {report.command} report")
    lines.append(f"scenario: {report.scenario_name}")
    lines.append(f"fingerprint: {report.scenario_fingerprint}")
    lines.append("")

    lines.append("== Topology ==")
    rows = []
    for summary in report.topology_summaries:
        rows.append([
            summary.direction.value,
            str(summary.node_count),
            str(summary.edge_count),
            str(summary.channel_count),
            str(summary.n_dtrm),
            str(summary.path_count),
            str(summary.group_count) if summary.group_count else "-",
        ])
    lines.extend(_table(
        ["direction", "nodes", "edges", "channels", "modules", "paths", "groups"],
        rows))
    lines.append("")

    if report.validation_messages:
        lines.append("== Validation violations ==")
        for message in report.validation_messages:
            lines.append(f"  - {message}")
        lines.append("")
    elif report.command == "validate":
        lines.append("== Validation ==")
        lines.append("  no violations")
        lines.append("")

    if report.adjacency:
        lines.append("== Adjacency ==")
        for row in report.adjacency:
            lines.append(f"  {row}")
        lines.append("")

    for variant in report.variants:
        lines.append(f"== Variant {variant.label} ==")
        if variant.score is not None:
            lines.append(
                f"ordinal ranks (1=best): power {variant.score.power_rank}, "
                f"size {variant.score.size_rank}, "
                f"weight {variant.score.weight_rank}")
        if variant.paths:
            rows = []
            for pr in variant.paths:
                m = pr.metrics
                rows.append([
                    pr.path.path_id,
                    _fmt(m.rf_gain_db, 2),
                    _fmt(m.noise_figure_db, 2),
                    _fmt(m.sfdr_db, 2),
                    _fmt(m.crosstalk_db, 2),
                    _fmt_si(m.rise_time_s),
                    _fmt_si(m.timing_jitter_rms_s),
                    _fmt(m.detector_power_dbm, 2),
                ])
            lines.extend(_table(
                ["path", "gain [dB]", "NF [dB]", "SFDR [dB]", "XT [dB]",
                 "t_rise [s]", "jitter [s]", "P_det [dBm]"],
                rows))
        if variant.worst is not None and variant.worst.optical_ledger.entries:
            lines.append("")
            lines.append("optical ledger (worst path):")
            for entry in variant.worst.optical_ledger.entries:
                note = f"  ({entry.note})" if entry.note else ""
                lines.append(
                    f"  {entry.element_id:<28} {entry.delta_db:+8.3f} dB -> "
                    f"{entry.power_dbm:8.3f} dBm{note}")
            for flag in variant.worst.optical_ledger.flags:
                lines.append(f"  flag: {flag}")
        if variant.compliance is not None:
            lines.append("")
            lines.append("compliance:")
            rows = []
            for check in variant.compliance.checks:
                rows.append([
                    check.requirement,
                    _fmt_si(check.value),
                    f"{check.bound} {check.unit}",
                    verdict(check.passed),
                    _fmt_si(check.margin),
                    check.note,
                ])
            lines.extend(_table(
                ["requirement", "value", "bound", "verdict", "margin", "note"],
                rows))
            lines.append(f"variant verdict: {verdict(variant.compliance.verdict)}")
        lines.append("")

    if report.digital_groups:
        lines.append("== Digitized return capacity ==")
        rows = []
        for group in report.digital_groups:
            rows.append([
                group.group_id,
                str(group.channel_count),
                _fmt_si(group.payload_bytes_per_s) + "B/s",
                _fmt_si(group.bar_bytes_per_s) + "B/s",
                _fmt_si(group.margin_bytes_per_s) + "B/s",
                verdict(group.passed),
                _fmt_si(group.adc_demand_bytes_per_s) + "B/s"
                if group.adc_demand_bytes_per_s is not None else "-",
                _fmt_si(group.required_line_rate_bps) + "bit/s"
                if group.required_line_rate_bps is not None else "-",
            ])
        lines.extend(_table(
            ["group", "channels", "payload", "bar", "margin", "verdict",
             "adc demand", "line rate needed"],
            rows))
        lines.append("")

    if report.recommendation is not None:
        top = report.recommendation.ranking[0]
        lines.append(f"== Recommendation: {top.variant.label} ==")
        rows = []
        for position, outcome in enumerate(report.recommendation.ranking, start=1):
            rows.append([
                str(position),
                outcome.variant.label,
                f"{outcome.compliance.passed_count}/"
                f"{len(outcome.compliance.checks)}",
                str(outcome.score.power_rank),
                str(outcome.score.size_rank),
                str(outcome.score.weight_rank),
                verdict(outcome.compliance.verdict),
            ])
        lines.extend(_table(
            ["#", "variant", "requirements met", "power", "size", "weight",
             "verdict"],
            rows))
        lines.append("")
        lines.append("rationale:")
        for reason in report.recommendation.rationale:
            lines.append(f"  - {reason}")
        if report.recommendation.notes:
            lines.append("notes:")
            for note in report.recommendation.notes:
                lines.append(f"  - {note}")
        lines.append("")

    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines).rstrip() + "\n"


def _metrics_dict(metrics: LinkMetrics) -> dict:
    payload = {name: getattr(metrics, name) for name, _ in METRIC_COLUMNS}
    payload["optical_ledger"] = [
        {"element_id": e.element_id, "delta_db": e.delta_db,
         "power_dbm": e.power_dbm, "note": e.note}
        for e in metrics.optical_ledger.entries
    ]
    payload["noise_w_hz"] = {
        "thermal": metrics.noise.thermal_w_hz,
        "shot": metrics.noise.shot_w_hz,
        "rin": metrics.noise.rin_w_hz,
        "ase": metrics.noise.ase_w_hz,
    }
    payload["flags"] = list(metrics.flags)
    return payload


def _compliance_dict(compliance: ComplianceReport) -> dict:
    return {
        "verdict": compliance.verdict,
        "passed_count": compliance.passed_count,
        "checks": [
            {"requirement": c.requirement, "value": c.value, "bound": c.bound,
             "unit": c.unit, "passed": c.passed, "margin": c.margin,
             "note": c.note}
            for c in compliance.checks
        ],
    }


def render_json(report: Report) -> str:
    payload: dict = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": {"name": "photonlink", "version": report.tool_version},
        "command": report.command,
        "scenario": {"name": report.scenario_name,
                     "fingerprint": report.scenario_fingerprint},
        "topology": [
            {"direction": s.direction.value, "nodes": s.node_count,
             "edges": s.edge_count, "channels": s.channel_count,
             "modules": s.n_dtrm, "paths": s.path_count,
             "groups": s.group_count}
            for s in report.topology_summaries
        ],
        "validation": list(report.validation_messages),
        "adjacency": list(report.adjacency),
        "variants": [
            {
                "variant": v.label,
                "feasible": v.feasible,
                "score": None if v.score is None else {
                    "power_rank": v.score.power_rank,
                    "size_rank": v.score.size_rank,
                    "weight_rank": v.score.weight_rank,
                },
                "paths": [
                    {"path_id": pr.path.path_id,
                     "channel": pr.path.channel,
                     "destination": pr.path.destination,
                     "wavelength_nm": pr.path.wavelength_nm,
                     "metrics": _metrics_dict(pr.metrics)}
                    for pr in v.paths
                ],
                "worst_case": None if v.worst is None else _metrics_dict(v.worst),
                "compliance": None if v.compliance is None
                else _compliance_dict(v.compliance),
            }
            for v in report.variants
        ],
        "digital_groups": [
            {"group_id": g.group_id, "channels": g.channel_count,
             "payload_bytes_per_s": g.payload_bytes_per_s,
             "bar_bytes_per_s": g.bar_bytes_per_s,
             "margin_bytes_per_s": g.margin_bytes_per_s,
             "passed": g.passed,
             "adc_demand_bytes_per_s": g.adc_demand_bytes_per_s,
             "required_line_rate_bps": g.required_line_rate_bps}
            for g in report.digital_groups
        ],
        "recommendation": None,
        "notes": list(report.notes),
    }
    if report.recommendation is not None:
        payload["recommendation"] = {
            "ranking": [
                {"variant": o.variant.label,
                 "passed_count": o.compliance.passed_count,
                 "verdict": o.compliance.verdict,
                 "power_rank": o.score.power_rank,
                 "size_rank": o.score.size_rank,
                 "weight_rank": o.score.weight_rank}
                for o in report.recommendation.ranking
            ],
            "rationale": list(report.recommendation.rationale),
            "notes": list(report.recommendation.notes),
        }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_csv(report: Report) -> str:
    """One row per (path, metric); empty value means not evaluated."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["variant", "path_id", "channel", "destination",
                     "metric", "unit", "value"])
    for variant in report.variants:
        for pr in variant.paths:
            for metric_name, unit in METRIC_COLUMNS:
                value = getattr(pr.metrics, metric_name)
                writer.writerow([
                    variant.label, pr.path.path_id, pr.path.channel,
                    pr.path.destination, metric_name, unit,
                    "" if value is None else repr(value),
                ])
    return buffer.getvalue()
