"""Network graph for the optical distribution system.

The forward network fans every exciter-generated channel out to all N
transmit/receive modules through a transmitter chip, a junction box with a 1:N
splitter and booster amplifier, and a per-module receiver chip. The return
network groups digitized receiver channels four to a fiber and lands each group
on the beam-former unit. Topologies are immutable after build; all operations
here are read-only and deterministic.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Sequence

from .components import (
    ComponentSpec,
    DetectorKind,
    EdfaSpec,
    FiberSpec,
    LaserSpec,
    ModulatorSpec,
    MuxDemuxSpec,
    PhotodetectorSpec,
    SplitterSpec,
    ValidationReport,
    Violation,
    WDM_BAND_NM,
    validate_component,
)
from .errors import BuildError, TopologyError

DEFAULT_CHANNEL_SPACING_NM = 0.8  # 100 GHz ITU grid step near 1550 nm
CHANNELS_PER_RETURN_GROUP = 4


class NodeKind(str, Enum):
    EXCITER = "exciter"
    OTXC = "otxc"
    FOJB = "fojb"
    ORXC = "orxc"
    DTRM = "dtrm"
    DIGITAL_OTXC = "digital_otxc"
    DBFU = "dbfu"


class Direction(str, Enum):
    FORWARD = "forward"
    RETURN = "return"


class ElementKind(str, Enum):
    LASER = "laser"
    MODULATOR = "modulator"
    MUX = "mux"
    EDFA = "edfa"
    FIBER = "fiber"
    SPLITTER = "splitter"
    DEMUX = "demux"
    DETECTOR = "detector"


# Legal element order along any signal path, as a token regex. Forward paths
# include the splitter stage; return paths do not. Booster amplifiers may sit
# after the transmit mux and/or ahead of the splitter.
_KIND_TOKENS = {
    ElementKind.LASER: "L",
    ElementKind.MODULATOR: "M",
    ElementKind.MUX: "U",
    ElementKind.EDFA: "E",
    ElementKind.FIBER: "F",
    ElementKind.SPLITTER: "S",
    ElementKind.DEMUX: "D",
    ElementKind.DETECTOR: "P",
}
_LEGAL_PATH_RE = re.compile(r"^LMUE?F*(E?SF*)?DP$")


@dataclass(frozen=True)
class ChannelPlan:
    """One wavelength channel: which laser sources it and what it carries."""

    id: str
    laser: str
    kind: DetectorKind = DetectorKind.ANALOG


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    components: tuple[str, ...] = ()


@dataclass(frozen=True)
class FiberEdge:
    source: str
    target: str
    fiber: str | None
    channels: frozenset[str] = frozenset()
    lane: int = 0


@dataclass(frozen=True)
class PathElement:
    element_id: str
    kind: ElementKind
    component: str
    spec: ComponentSpec
    node: str


@dataclass(frozen=True)
class SignalPath:
    """Ordered laser-to-detector traversal with per-element parameter snapshot."""

    channel: str
    direction: Direction
    destination: str
    wavelength_nm: float
    elements: tuple[PathElement, ...]

    @property
    def path_id(self) -> str:
        return f"{self.direction.value}:{self.channel}->{self.destination}"

    def kind_tokens(self) -> str:
        return "".join(_KIND_TOKENS[e.kind] for e in self.elements)


@dataclass(frozen=True)
class OpticalTopology:
    direction: Direction
    nodes: tuple[Node, ...]
    edges: tuple[FiberEdge, ...]
    library: Mapping[str, ComponentSpec]
    wavelength_plan: Mapping[str, float]
    channel_kinds: Mapping[str, DetectorKind]
    channel_lasers: Mapping[str, str]
    channel_modulators: Mapping[str, str]
    channel_detectors: Mapping[str, str]
    n_dtrm: int
    channels_per_group: int = CHANNELS_PER_RETURN_GROUP
    min_channel_spacing_nm: float = DEFAULT_CHANNEL_SPACING_NM

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def outgoing(self, node_id: str) -> list[FiberEdge]:
        return sorted((e for e in self.edges if e.source == node_id),
                      key=lambda e: (e.target, e.lane))

    def incoming(self, node_id: str) -> list[FiberEdge]:
        return sorted((e for e in self.edges if e.target == node_id),
                      key=lambda e: (e.source, e.lane))


@dataclass(frozen=True)
class ForwardBindings:
    """Component names bound to the fixed roles of the forward network."""

    modulator: str
    mux: str
    demux: str
    splitter: str
    fojb_edfa: str
    analog_detector: str
    digital_detector: str
    trunk_fiber: str | None = None
    drop_fiber: str | None = None
    otxc_edfa: str | None = None


@dataclass(frozen=True)
class ReturnBindings:
    """Component names bound to the roles of one digitized return group."""

    lasers: tuple[str, ...]
    modulator: str
    mux: str
    demux: str
    detector: str
    fiber: str | None = None


def _require(library: Mapping[str, ComponentSpec], name: str, cls, role: str) -> ComponentSpec:
    spec = library.get(name)
    if spec is None:
        raise BuildError(f"unknown component {name!r} bound to role {role!r}")
    if not isinstance(spec, cls):
        raise BuildError(
            f"component {name!r} bound to role {role!r} is a "
            f"{type(spec).__name__}, expected {cls.__name__}")
    return spec


def _id_width(n: int) -> int:
    return max(2, len(str(n)))


def build_forward_network(
    n_dtrm: int,
    channels: Sequence[ChannelPlan],
    library: Mapping[str, ComponentSpec],
    bindings: ForwardBindings,
    *,
    shared_fiber: bool = True,
    min_channel_spacing_nm: float = DEFAULT_CHANNEL_SPACING_NM,
) -> OpticalTopology:
    """Construct the exciter -> transmitter chip -> junction box -> N receiver
    chips distribution graph.

    With ``shared_fiber`` every channel rides one fiber per hop; otherwise
    digital-kind channels are carried on a parallel lane with its own mux,
    booster and splitter.
    """
    if n_dtrm < 1:
        raise BuildError(f"n_dtrm must be >= 1, got {n_dtrm}")
    if not channels:
        raise BuildError("at least one channel is required")

    seen_ids: set[str] = set()
    plan: dict[str, float] = {}
    kinds: dict[str, DetectorKind] = {}
    lasers: dict[str, str] = {}
    for ch in channels:
        if ch.id in seen_ids:
            raise BuildError(f"duplicate channel id {ch.id!r}")
        seen_ids.add(ch.id)
        laser = _require(library, ch.laser, LaserSpec, f"channel {ch.id} laser")
        plan[ch.id] = laser.wavelength_nm
        kinds[ch.id] = ch.kind
        lasers[ch.id] = ch.laser
    by_wavelength: dict[float, str] = {}
    for ch_id, nm in plan.items():
        other = by_wavelength.get(nm)
        if other is not None:
            raise BuildError(
                f"wavelength collision: channels {other!r} and {ch_id!r} both at {nm} nm")
        by_wavelength[nm] = ch_id

    _require(library, bindings.modulator, ModulatorSpec, "modulator")
    _require(library, bindings.mux, MuxDemuxSpec, "mux")
    _require(library, bindings.demux, MuxDemuxSpec, "demux")
    splitter_template = _require(library, bindings.splitter, SplitterSpec, "splitter")
    _require(library, bindings.fojb_edfa, EdfaSpec, "fojb_edfa")
    _require(library, bindings.analog_detector, PhotodetectorSpec, "analog_detector")
    _require(library, bindings.digital_detector, PhotodetectorSpec, "digital_detector")
    for role, fiber_name in (("trunk_fiber", bindings.trunk_fiber),
                             ("drop_fiber", bindings.drop_fiber)):
        if fiber_name is not None:
            _require(library, fiber_name, FiberSpec, role)
    if bindings.otxc_edfa is not None:
        _require(library, bindings.otxc_edfa, EdfaSpec, "otxc_edfa")

    # The topology snapshots its component table; the junction-box splitter
    # inherits its excess loss from the bound template but its fanout is the
    # DTRM count by construction.
    local_library: dict[str, ComponentSpec] = dict(library)
    local_library[bindings.splitter] = replace(splitter_template, fanout=n_dtrm)

    if shared_fiber:
        lanes: list[list[str]] = [sorted(plan)]
    else:
        analog = sorted(c for c in plan if kinds[c] is DetectorKind.ANALOG)
        digital = sorted(c for c in plan if kinds[c] is DetectorKind.DIGITAL)
        lanes = [lane for lane in (analog, digital) if lane]

    detectors = {
        ch: bindings.analog_detector if kinds[ch] is DetectorKind.ANALOG
        else bindings.digital_detector
        for ch in plan
    }

    otxc_parts: list[str] = []
    for ch_id in sorted(plan):
        otxc_parts.append(lasers[ch_id])
        otxc_parts.append(bindings.modulator)
    for _ in lanes:
        otxc_parts.append(bindings.mux)
        if bindings.otxc_edfa is not None:
            otxc_parts.append(bindings.otxc_edfa)

    fojb_parts: list[str] = []
    for _ in lanes:
        fojb_parts.append(bindings.fojb_edfa)
        fojb_parts.append(bindings.splitter)

    orxc_parts: list[str] = []
    for _ in lanes:
        orxc_parts.append(bindings.demux)
    for ch_id in sorted(plan):
        orxc_parts.append(detectors[ch_id])

    width = _id_width(n_dtrm)
    nodes: list[Node] = [
        Node("exciter", NodeKind.EXCITER),
        Node("otxc", NodeKind.OTXC, tuple(otxc_parts)),
        Node("fojb", NodeKind.FOJB, tuple(fojb_parts)),
    ]
    edges: list[FiberEdge] = [FiberEdge("exciter", "otxc", None)]
    for lane_index, lane in enumerate(lanes):
        edges.append(FiberEdge("otxc", "fojb", bindings.trunk_fiber,
                               frozenset(lane), lane_index))
    for i in range(1, n_dtrm + 1):
        orxc_id = f"orxc{i:0{width}d}"
        dtrm_id = f"dtrm{i:0{width}d}"
        nodes.append(Node(orxc_id, NodeKind.ORXC, tuple(orxc_parts)))
        nodes.append(Node(dtrm_id, NodeKind.DTRM))
        for lane_index, lane in enumerate(lanes):
            edges.append(FiberEdge("fojb", orxc_id, bindings.drop_fiber,
                                   frozenset(lane), lane_index))
        edges.append(FiberEdge(orxc_id, dtrm_id, None))

    return OpticalTopology(
        direction=Direction.FORWARD,
        nodes=tuple(nodes),
        edges=tuple(edges),
        library=local_library,
        wavelength_plan=plan,
        channel_kinds=kinds,
        channel_lasers=lasers,
        channel_modulators={ch: bindings.modulator for ch in plan},
        channel_detectors=detectors,
        n_dtrm=n_dtrm,
        min_channel_spacing_nm=min_channel_spacing_nm,
    )


def build_return_network(
    n_dtrm: int,
    library: Mapping[str, ComponentSpec],
    bindings: ReturnBindings,
    *,
    min_channel_spacing_nm: float = DEFAULT_CHANNEL_SPACING_NM,
) -> OpticalTopology:
    """Construct the digitized return graph: N/4 groups of four channels, each
    group multiplexed onto one fiber into the beam-former unit.

    The group size of four is fixed; N must divide by it exactly.
    """
    group = CHANNELS_PER_RETURN_GROUP
    if n_dtrm < group or n_dtrm % group != 0:
        raise BuildError(
            f"n_dtrm must be a positive multiple of {group} for the return network, "
            f"got {n_dtrm}")
    if len(bindings.lasers) != group:
        raise BuildError(
            f"return bindings need exactly {group} lasers, got {len(bindings.lasers)}")

    group_wavelengths: list[float] = []
    for idx, laser_name in enumerate(bindings.lasers):
        laser = _require(library, laser_name, LaserSpec, f"return laser {idx}")
        group_wavelengths.append(laser.wavelength_nm)
    if len(set(group_wavelengths)) != group:
        raise BuildError("wavelength collision among the return-group lasers")
    _require(library, bindings.modulator, ModulatorSpec, "return modulator")
    _require(library, bindings.mux, MuxDemuxSpec, "return mux")
    _require(library, bindings.demux, MuxDemuxSpec, "return demux")
    detector = _require(library, bindings.detector, PhotodetectorSpec, "return detector")
    if detector.kind is not DetectorKind.DIGITAL:
        raise BuildError(f"return detector {bindings.detector!r} must be digital-kind")
    if bindings.fiber is not None:
        _require(library, bindings.fiber, FiberSpec, "return fiber")

    n_groups = n_dtrm // group
    width = _id_width(n_dtrm)
    gwidth = _id_width(n_groups)

    plan: dict[str, float] = {}
    kinds: dict[str, DetectorKind] = {}
    lasers: dict[str, str] = {}
    nodes: list[Node] = []
    edges: list[FiberEdge] = []

    otxc_parts: list[str] = []
    for laser_name in bindings.lasers:
        otxc_parts.append(laser_name)
        otxc_parts.append(bindings.modulator)
    otxc_parts.append(bindings.mux)
    rx_parts = (bindings.demux,) + (bindings.detector,) * group

    for g in range(1, n_groups + 1):
        dotxc_id = f"dotxc{g:0{gwidth}d}"
        rx_id = f"dbfu_rx{g:0{gwidth}d}"
        nodes.append(Node(dotxc_id, NodeKind.DIGITAL_OTXC, tuple(otxc_parts)))
        nodes.append(Node(rx_id, NodeKind.ORXC, rx_parts))
        group_channels: list[str] = []
        for j in range(group):
            module = (g - 1) * group + j + 1
            ch_id = f"rx{module:0{width}d}"
            plan[ch_id] = group_wavelengths[j]
            kinds[ch_id] = DetectorKind.DIGITAL
            lasers[ch_id] = bindings.lasers[j]
            group_channels.append(ch_id)
            dtrm_id = f"dtrm{module:0{width}d}"
            nodes.append(Node(dtrm_id, NodeKind.DTRM))
            edges.append(FiberEdge(dtrm_id, dotxc_id, None))
        edges.append(FiberEdge(dotxc_id, rx_id, bindings.fiber,
                               frozenset(group_channels)))
        edges.append(FiberEdge(rx_id, "dbfu", None))
    nodes.append(Node("dbfu", NodeKind.DBFU))

    return OpticalTopology(
        direction=Direction.RETURN,
        nodes=tuple(nodes),
        edges=tuple(edges),
        library=dict(library),
        wavelength_plan=plan,
        channel_kinds=kinds,
        channel_lasers=lasers,
        channel_modulators={ch: bindings.modulator for ch in plan},
        channel_detectors={ch: bindings.detector for ch in plan},
        n_dtrm=n_dtrm,
        min_channel_spacing_nm=min_channel_spacing_nm,
    )


def return_groups(topology: OpticalTopology) -> list[tuple[str, tuple[str, ...]]]:
    """Digitized groups as (group node id, sorted channel ids)."""
    groups = []
    for node in topology.nodes:
        if node.kind is not NodeKind.DIGITAL_OTXC:
            continue
        carried: set[str] = set()
        for edge in topology.outgoing(node.id):
            carried.update(edge.channels)
        groups.append((node.id, tuple(sorted(carried))))
    return sorted(groups)


def _specs_by_type(topology: OpticalTopology, node: Node, cls) -> list[str]:
    return [name for name in node.components
            if isinstance(topology.library.get(name), cls)]


def _has_cycle(topology: OpticalTopology) -> bool:
    adjacency: dict[str, list[str]] = {n.id: [] for n in topology.nodes}
    for e in topology.edges:
        adjacency.setdefault(e.source, []).append(e.target)
    state: dict[str, int] = {}

    def visit(node_id: str) -> bool:
        state[node_id] = 1
        for nxt in adjacency.get(node_id, ()):
            mark = state.get(nxt, 0)
            if mark == 1 or (mark == 0 and visit(nxt)):
                return True
        state[node_id] = 2
        return False

    return any(state.get(n.id, 0) == 0 and visit(n.id) for n in topology.nodes)


def validate_topology(topology: OpticalTopology) -> ValidationReport:
    """Structural and composition checks; violations are data, never raised."""
    issues: list[Violation] = []

    def bad(subject: str, field_name: str, message: str) -> None:
        issues.append(Violation(subject, field_name, message))

    node_ids = [n.id for n in topology.nodes]
    if len(set(node_ids)) != len(node_ids):
        bad("topology", "nodes", "duplicate node ids")
    known = set(node_ids)
    for e in topology.edges:
        if e.source not in known or e.target not in known:
            bad(f"{e.source}->{e.target}", "edge", "references unknown node")

    if _has_cycle(topology):
        bad("topology", "edges", "graph contains a cycle")

    # Component resolution and per-component invariants.
    for node in topology.nodes:
        for name in node.components:
            spec = topology.library.get(name)
            if spec is None:
                bad(node.id, "components", f"unknown component {name!r}")
                continue
            in_plan = isinstance(spec, LaserSpec) and name in set(
                topology.channel_lasers.values())
            report = validate_component(spec, name=f"{node.id}:{name}",
                                        in_wdm_plan=in_plan)
            issues.extend(report.violations)

    # Per-edge wavelength bookkeeping.
    lo, hi = WDM_BAND_NM
    for e in topology.edges:
        label = f"{e.source}->{e.target}"
        if e.channels and e.fiber is None:
            bad(label, "fiber", "edge carries channels but has no fiber")
        if e.fiber is not None and not isinstance(topology.library.get(e.fiber), FiberSpec):
            bad(label, "fiber", f"fiber {e.fiber!r} missing from library or wrong type")
        carried = sorted(e.channels)
        wavelengths = []
        for ch in carried:
            nm = topology.wavelength_plan.get(ch)
            if nm is None:
                bad(label, "channels", f"channel {ch!r} missing from wavelength plan")
                continue
            wavelengths.append((nm, ch))
            if not lo <= nm <= hi:
                bad(label, "channels",
                    f"channel {ch!r} at {nm} nm outside [{lo:.0f}, {hi:.0f}] nm")
        wavelengths.sort()
        for (nm_a, ch_a), (nm_b, ch_b) in zip(wavelengths, wavelengths[1:]):
            gap = nm_b - nm_a
            if nm_a == nm_b:
                bad(label, "channels",
                    f"wavelength collision: {ch_a!r} and {ch_b!r} both at {nm_a} nm")
            elif gap < topology.min_channel_spacing_nm and not math.isclose(
                    gap, topology.min_channel_spacing_nm, rel_tol=1e-9):
                bad(label, "channels",
                    f"channels {ch_a!r}/{ch_b!r} spaced {gap:.3f} nm "
                    f"< minimum {topology.min_channel_spacing_nm} nm")

    # Node composition rules.
    for node in topology.nodes:
        lasers = _specs_by_type(topology, node, LaserSpec)
        modulators = _specs_by_type(topology, node, ModulatorSpec)
        muxes = _specs_by_type(topology, node, MuxDemuxSpec)
        edfas = _specs_by_type(topology, node, EdfaSpec)
        splitters = _specs_by_type(topology, node, SplitterSpec)
        detectors = _specs_by_type(topology, node, PhotodetectorSpec)
        out_edges = topology.outgoing(node.id)
        in_edges = topology.incoming(node.id)
        out_lanes = sorted({e.lane for e in out_edges if e.channels})
        in_lanes = sorted({e.lane for e in in_edges if e.channels})

        if node.kind in (NodeKind.OTXC, NodeKind.DIGITAL_OTXC):
            if not lasers:
                bad(node.id, "components", "transmitter chip needs at least one laser")
            if len(modulators) != len(lasers):
                bad(node.id, "components",
                    f"lasers and modulators must pair up "
                    f"({len(lasers)} lasers, {len(modulators)} modulators)")
            expected_mux = max(1, len(out_lanes))
            if len(muxes) != expected_mux:
                bad(node.id, "components",
                    f"expected {expected_mux} mux(es) for {expected_mux} outgoing "
                    f"lane(s), found {len(muxes)}")
            if node.kind is NodeKind.OTXC and len(edfas) > expected_mux:
                bad(node.id, "components",
                    "transmitter chip carries more boosters than fibers")
        elif node.kind is NodeKind.FOJB:
            expected = max(1, len(out_lanes))
            if len(splitters) != expected:
                bad(node.id, "components",
                    f"junction box needs one splitter per lane "
                    f"({len(splitters)} found, {expected} expected)")
            if len(edfas) != expected:
                bad(node.id, "components",
                    f"junction box needs one amplifier per lane "
                    f"({len(edfas)} found, {expected} expected)")
            for lane in out_lanes or [0]:
                legs = sum(1 for e in out_edges if e.channels and e.lane == lane)
                for name in splitters:
                    spec = topology.library[name]
                    if spec.fanout != legs:
                        bad(node.id, "fanout",
                            f"splitter fanout {spec.fanout} != {legs} outgoing "
                            f"edges on lane {lane}")
        elif node.kind is NodeKind.ORXC:
            expected = max(1, len(in_lanes))
            if len(muxes) != expected:
                bad(node.id, "components",
                    f"receiver chip needs one demux per incoming lane "
                    f"({len(muxes)} found, {expected} expected)")
            if not detectors:
                bad(node.id, "components", "receiver chip needs at least one detector")
            arriving: set[str] = set()
            for e in in_edges:
                arriving.update(e.channels)
            for want in (DetectorKind.ANALOG, DetectorKind.DIGITAL):
                need = sum(1 for ch in arriving if topology.channel_kinds.get(ch) is want)
                have = sum(1 for name in detectors
                           if topology.library[name].kind is want)
                if have < need:
                    bad(node.id, "components",
                        f"{need} {want.value} channel(s) arrive but only {have} "
                        f"{want.value} detector(s) fitted")
            for ch in arriving:
                bound = topology.channel_detectors.get(ch)
                spec = topology.library.get(bound) if bound else None
                want = topology.channel_kinds.get(ch)
                if isinstance(spec, PhotodetectorSpec) and want is not None \
                        and spec.kind is not want:
                    bad(node.id, "components",
                        f"{want.value} channel {ch!r} terminated on a "
                        f"{spec.kind.value} detector")

    # Structural chain checks per direction.
    kind_counts: dict[NodeKind, int] = {}
    for node in topology.nodes:
        kind_counts[node.kind] = kind_counts.get(node.kind, 0) + 1
    if topology.direction is Direction.FORWARD:
        for kind, want in ((NodeKind.EXCITER, 1), (NodeKind.OTXC, 1),
                           (NodeKind.FOJB, 1), (NodeKind.ORXC, topology.n_dtrm),
                           (NodeKind.DTRM, topology.n_dtrm)):
            if kind_counts.get(kind, 0) != want:
                bad("topology", "nodes",
                    f"expected {want} {kind.value} node(s), found "
                    f"{kind_counts.get(kind, 0)}")
        for ch in sorted(topology.wavelength_plan):
            reached = _reachable_terminals(topology, ch)
            if len(reached) != topology.n_dtrm:
                bad("topology", "channels",
                    f"channel {ch!r} reaches {len(reached)} of "
                    f"{topology.n_dtrm} modules")
    else:
        n_groups = topology.n_dtrm // topology.channels_per_group
        if kind_counts.get(NodeKind.DIGITAL_OTXC, 0) != n_groups:
            bad("topology", "nodes",
                f"expected {n_groups} digital transmitter group(s), found "
                f"{kind_counts.get(NodeKind.DIGITAL_OTXC, 0)}")
        if kind_counts.get(NodeKind.DBFU, 0) != 1:
            bad("topology", "nodes", "expected exactly one beam-former node")

    return ValidationReport(tuple(issues))


def _source_node(topology: OpticalTopology, channel: str) -> Node:
    # Groups may share laser specs by name, so the source is the transmitter
    # node that both holds the channel's laser and launches the channel.
    laser_name = topology.channel_lasers[channel]
    fallback = None
    for node in topology.nodes:
        if node.kind in (NodeKind.OTXC, NodeKind.DIGITAL_OTXC) \
                and laser_name in node.components:
            if any(channel in e.channels for e in topology.outgoing(node.id)):
                return node
            if fallback is None:
                fallback = node
    if fallback is not None:
        return fallback
    raise TopologyError(f"no transmitter node holds the laser for channel {channel!r}")


def _reachable_terminals(topology: OpticalTopology, channel: str) -> list[list[str]]:
    """All node-id chains from the channel's source to a receiver chip."""
    try:
        start = _source_node(topology, channel).id
    except TopologyError:
        return []
    chains: list[list[str]] = []

    def walk(node_id: str, trail: list[str]) -> None:
        node = topology.node(node_id)
        if node.kind is NodeKind.ORXC:
            chains.append(trail)
            return
        for edge in topology.outgoing(node_id):
            if channel in edge.channels:
                walk(edge.target, trail + [edge.target])

    walk(start, [start])
    return chains


def _lane_for(topology: OpticalTopology, node_id: str, channel: str) -> int:
    for edge in topology.outgoing(node_id):
        if channel in edge.channels:
            return edge.lane
    return 0


def _element(topology: OpticalTopology, element_id: str, kind: ElementKind,
             name: str, node_id: str) -> PathElement:
    return PathElement(element_id, kind, name, topology.library[name], node_id)


def _assemble(topology: OpticalTopology, channel: str,
              chain: list[str]) -> SignalPath:
    elements: list[PathElement] = []
    source = topology.node(chain[0])
    lane = _lane_for(topology, source.id, channel)
    suffix = f".lane{lane}" if lane else ""

    laser_name = topology.channel_lasers[channel]
    mod_name = topology.channel_modulators[channel]
    elements.append(_element(topology, f"{source.id}.laser.{channel}",
                             ElementKind.LASER, laser_name, source.id))
    elements.append(_element(topology, f"{source.id}.mod.{channel}",
                             ElementKind.MODULATOR, mod_name, source.id))
    muxes = _specs_by_type(topology, source, MuxDemuxSpec)
    elements.append(_element(topology, f"{source.id}.mux{suffix}",
                             ElementKind.MUX, muxes[min(lane, len(muxes) - 1)],
                             source.id))
    source_edfas = _specs_by_type(topology, source, EdfaSpec)
    if source_edfas:
        elements.append(_element(topology, f"{source.id}.edfa{suffix}",
                                 ElementKind.EDFA,
                                 source_edfas[min(lane, len(source_edfas) - 1)],
                                 source.id))

    for src, dst in zip(chain, chain[1:]):
        edge = next(e for e in topology.outgoing(src)
                    if e.target == dst and channel in e.channels)
        if edge.fiber is not None:
            edge_suffix = f".lane{edge.lane}" if edge.lane else ""
            elements.append(_element(topology, f"{src}->{dst}{edge_suffix}",
                                     ElementKind.FIBER, edge.fiber, src))
        node = topology.node(dst)
        if node.kind is NodeKind.FOJB:
            edfas = _specs_by_type(topology, node, EdfaSpec)
            splitters = _specs_by_type(topology, node, SplitterSpec)
            elements.append(_element(topology, f"{dst}.edfa{suffix}",
                                     ElementKind.EDFA,
                                     edfas[min(lane, len(edfas) - 1)], dst))
            elements.append(_element(topology, f"{dst}.splitter{suffix}",
                                     ElementKind.SPLITTER,
                                     splitters[min(lane, len(splitters) - 1)], dst))
        elif node.kind is NodeKind.ORXC:
            demuxes = _specs_by_type(topology, node, MuxDemuxSpec)
            elements.append(_element(topology, f"{dst}.demux{suffix}",
                                     ElementKind.DEMUX,
                                     demuxes[min(lane, len(demuxes) - 1)], dst))
            elements.append(_element(topology, f"{dst}.pd.{channel}",
                                     ElementKind.DETECTOR,
                                     topology.channel_detectors[channel], dst))

    terminal = chain[-1]
    destination = terminal
    for edge in topology.outgoing(terminal):
        target = topology.node(edge.target)
        if target.kind in (NodeKind.DTRM, NodeKind.DBFU):
            destination = target.id
            break
    return SignalPath(
        channel=channel,
        direction=topology.direction,
        destination=destination,
        wavelength_nm=topology.wavelength_plan[channel],
        elements=tuple(elements),
    )


def enumerate_paths(topology: OpticalTopology) -> list[SignalPath]:
    """One path per (channel, destination); deterministic order by channel id
    then terminal node id. Raises if the topology does not validate."""
    report = validate_topology(topology)
    if not report.ok:
        raise TopologyError("topology is invalid", report.messages())
    paths: list[SignalPath] = []
    for channel in sorted(topology.wavelength_plan):
        chains = _reachable_terminals(topology, channel)
        chains.sort(key=lambda trail: trail[-1])
        for chain in chains:
            path = _assemble(topology, channel, chain)
            if not _LEGAL_PATH_RE.match(path.kind_tokens()):
                raise TopologyError(
                    f"path {path.path_id} has illegal element order "
                    f"{path.kind_tokens()!r}")
            paths.append(path)
    return paths


def co_propagating(topology: OpticalTopology, path: SignalPath) -> tuple[str, ...]:
    """Channels sharing the demux that terminates this path (itself included)."""
    demux_nodes = [e.node for e in path.elements if e.kind is ElementKind.DEMUX]
    if not demux_nodes:
        return (path.channel,)
    terminal = demux_nodes[-1]
    for edge in topology.incoming(terminal):
        if path.channel in edge.channels:
            return tuple(sorted(edge.channels))
    return (path.channel,)


def adjacency_dump(topology: OpticalTopology) -> list[str]:
    """Plain-text adjacency listing for inspection via the CLI."""
    lines = []
    for node in topology.nodes:
        out = topology.outgoing(node.id)
        if not out:
            lines.append(f"{node.id} [{node.kind.value}]")
            continue
        for edge in out:
            carried = ",".join(sorted(edge.channels)) if edge.channels else "-"
            fiber = edge.fiber if edge.fiber else "direct"
            lane = f" lane={edge.lane}" if edge.lane else ""
            lines.append(
                f"{node.id} [{node.kind.value}] -> {edge.target} "
                f"({fiber}{lane}; channels: {carried})")
    return lines
