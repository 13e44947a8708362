"""Command-line front end: scenario ingestion, analysis orchestration and
report emission.

Commands:
  validate  build the network(s) and report structural violations
  analyze   compute per-path metrics and requirement compliance
  tradeoff  enumerate the design space and emit a ranked recommendation

Exit codes: 0 all checks pass, 1 compliance failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import PhotonlinkError
from .digitalpath import check_group_capacity
from .linkbudget import analyze_path, propagation_delay_s, worst_case
from .report import (
    PathResult,
    Report,
    TopologySummary,
    VariantResult,
    render_csv,
    render_json,
    render_text,
)
from .scenario import Scenario, parse_scenario
from .components import DetectorKind
from .topology import (
    OpticalTopology,
    adjacency_dump,
    build_forward_network,
    build_return_network,
    enumerate_paths,
    return_groups,
    validate_topology,
)
from .tradeoff import (
    DesignVariant,
    VariantOutcome,
    check_requirements,
    enumerate_variants,
    recommend,
    score_variant,
)

EXIT_OK = 0
EXIT_COMPLIANCE = 1
EXIT_INPUT = 2


def _forward_topology(scenario: Scenario, variant: DesignVariant) -> OpticalTopology:
    return build_forward_network(
        scenario.n_dtrm,
        scenario.channels,
        scenario.library,
        scenario.forward_bindings(variant),
        shared_fiber=scenario.shared_fiber,
        min_channel_spacing_nm=scenario.min_channel_spacing_nm,
    )


def _return_topology(scenario: Scenario) -> OpticalTopology | None:
    if not scenario.return_enabled or scenario.return_bindings is None:
        return None
    return build_return_network(
        scenario.n_dtrm,
        scenario.library,
        scenario.return_bindings,
        min_channel_spacing_nm=scenario.min_channel_spacing_nm,
    )


def _summary(topology: OpticalTopology, path_count: int) -> TopologySummary:
    return TopologySummary(
        direction=topology.direction,
        node_count=len(topology.nodes),
        edge_count=len(topology.edges),
        channel_count=len(topology.wavelength_plan),
        n_dtrm=topology.n_dtrm,
        path_count=path_count,
        group_count=len(return_groups(topology)),
    )


def _analyze_variant(scenario: Scenario, variant: DesignVariant,
                     digital_groups) -> tuple[VariantResult, TopologySummary]:
    topology = _forward_topology(scenario, variant)
    paths = enumerate_paths(topology)
    reference_delay = propagation_delay_s(paths[0]) if paths else 0.0
    results = []
    analog_metrics = []
    for path in paths:
        metrics = analyze_path(
            path, variant.modulation, scenario.analysis,
            topology=topology, reference_delay_s=reference_delay)
        results.append(PathResult(path, metrics))
        if topology.channel_kinds[path.channel] is DetectorKind.ANALOG:
            analog_metrics.append(metrics)
    # Requirement checks apply to the RF (analog) distribution paths; the
    # forward clock channels are reported but not held to the RF bounds.
    worst = worst_case(analog_metrics if analog_metrics
                       else [r.metrics for r in results])
    wavelengths = sorted(topology.wavelength_plan.values())
    compliance = check_requirements(
        worst,
        scenario.requirements,
        variant=variant,
        wavelengths_nm=wavelengths,
        digital_groups=digital_groups,
        analysis_bandwidth_hz=scenario.analysis.bandwidth_hz,
    )
    result = VariantResult(
        label=variant.label,
        feasible=True,
        score=score_variant(variant),
        paths=tuple(results),
        worst=worst,
        compliance=compliance,
    )
    return result, _summary(topology, len(paths))


def run(command: str, scenario: Scenario) -> Report:
    """Execute one CLI command against a parsed scenario and build its report."""
    return_topology = _return_topology(scenario)
    digital_groups = ()
    if return_topology is not None and scenario.digital_link is not None:
        digital_groups = check_group_capacity(
            return_topology, scenario.digital_link, scenario.adc_stream,
            bar_bytes_per_8ch=scenario.requirements.throughput_bar_bytes_per_s)

    if command == "validate":
        variant = scenario.selected_variants()[0]
        forward = _forward_topology(scenario, variant)
        messages = list(validate_topology(forward).messages())
        summaries = [_summary(forward, 0)]
        adjacency = list(adjacency_dump(forward))
        if return_topology is not None:
            messages.extend(validate_topology(return_topology).messages())
            summaries.append(_summary(return_topology, 0))
            adjacency.extend(adjacency_dump(return_topology))
        return Report(
            command=command,
            tool_version=__version__,
            scenario_name=scenario.name,
            scenario_fingerprint=scenario.fingerprint,
            topology_summaries=tuple(summaries),
            adjacency=tuple(adjacency),
            validation_messages=tuple(messages),
            notes=(f"validated with variant {variant.label}",),
        )

    if command == "analyze":
        variants = scenario.selected_variants()
    elif command == "tradeoff":
        variants = tuple(v for v, feasible in enumerate_variants() if feasible)
    else:
        raise PhotonlinkError(f"unknown command {command!r}")

    summaries: list[TopologySummary] = []
    results: list[VariantResult] = []
    for variant in variants:
        result, summary = _analyze_variant(scenario, variant, digital_groups)
        results.append(result)
        if not summaries:
            summaries.append(summary)
    if return_topology is not None:
        return_paths = enumerate_paths(return_topology)
        summaries.append(_summary(return_topology, len(return_paths)))

    recommendation = None
    notes: list[str] = []
    if command == "tradeoff":
        outcomes = [VariantOutcome(v.compliance.variant, v.score, v.compliance)
                    for v in results]
        recommendation = recommend(outcomes)
        infeasible = [v.label for v, ok in enumerate_variants() if not ok]
        notes.append("infeasible variants: " + ", ".join(infeasible))

    return Report(
        command=command,
        tool_version=__version__,
        scenario_name=scenario.name,
        scenario_fingerprint=scenario.fingerprint,
        topology_summaries=tuple(summaries),
        variants=tuple(results),
        digital_groups=digital_groups,
        recommendation=recommendation,
        notes=tuple(notes),
    )


def exit_code(report: Report) -> int:
    if report.has_input_errors:
        return EXIT_INPUT
    if report.has_compliance_failures:
        return EXIT_COMPLIANCE
    return EXIT_OK


def emit_report(report: Report, fmt: str, out: str | None,
                *, color: bool | None = None) -> None:
    """Write the report in the requested format to a file or stdout."""
    if fmt == "json":
        text = render_json(report)
    elif fmt == "csv":
        text = render_csv(report)
    else:
        if color is None:
            color = (out is None and sys.stdout.isatty()
                     and not os.environ.get("PHOTONLINK_NO_COLOR"))
        text = render_text(report, color=color)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonlink",
        description="Link budgets, capacity checks and design tradeoffs for a "
                    "WDM photonic distribution network.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("validate", "build the network and report structural violations"),
        ("analyze", "compute per-path metrics and requirement compliance"),
        ("tradeoff", "enumerate design variants and emit a recommendation"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--scenario", required=True, metavar="FILE",
                         help="scenario JSON file")
        cmd.add_argument("--variant", default=None,
                         metavar="<dm|em>x<vbg|awg>x<si|hip>|all",
                         help="override the scenario's variant selection")
        cmd.add_argument("--format", default="text",
                         choices=("text", "json", "csv"), help="output format")
        cmd.add_argument("--out", default=None, metavar="PATH",
                         help="output file (default: stdout)")
        cmd.add_argument("--bandwidth", default=None, type=float, metavar="HZ",
                         help="override the analysis bandwidth")
    return parser


def _load_scenario(args: argparse.Namespace) -> Scenario:
    path = Path(args.scenario)
    raw = json.loads(path.read_text(encoding="utf-8"))
    # CLI overrides are applied to the raw document before parsing so the
    # fingerprint always hashes the effective inputs.
    if args.variant is not None:
        raw["variant"] = args.variant
    if args.bandwidth is not None:
        raw.setdefault("analysis", {})
        raw["analysis"]["bandwidth_hz"] = args.bandwidth
    return parse_scenario(raw)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scenario = _load_scenario(args)
        report = run(args.command, scenario)
        emit_report(report, args.format, args.out)
    except (PhotonlinkError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
