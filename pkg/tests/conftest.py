"""Shared fixtures: component factories, a hand-built path assembler and the
bundled reference inputs."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from photonlink.components import (
    DetectorKind,
    EdfaSpec,
    FiberSpec,
    GratingTech,
    LaserSpec,
    Modulation,
    ModulatorBias,
    ModulatorSpec,
    MuxDemuxSpec,
    PhotodetectorSpec,
    SplitterSpec,
)
from photonlink.data import reference_components_path, reference_scenario_path
from photonlink.scenario import parse_scenario
from photonlink.topology import (
    ChannelPlan,
    Direction,
    ElementKind,
    ForwardBindings,
    PathElement,
    ReturnBindings,
    SignalPath,
)


def mk_laser(power_w=0.1, rin=-160.0, nm=1550.0, slope=0.3, tunable=False):
    return LaserSpec(power_w, rin, nm, slope, tunable)


def mk_mod_direct(bandwidth=20e9):
    return ModulatorSpec(Modulation.DIRECT, bandwidth)


def mk_mod_external(bandwidth=25e9, v_pi=5.0, loss=5.0):
    return ModulatorSpec(Modulation.EXTERNAL, bandwidth, v_pi, loss,
                         ModulatorBias.QUADRATURE)


def mk_mux(loss=3.0, tech=GratingTech.VBG, adj=30.0, nonadj=45.0, spacing=0.8):
    return MuxDemuxSpec(tech, loss, spacing, adj, nonadj, athermal=True)


def mk_edfa(gain=0.0, max_gain=30.0, nf=4.0, sat_out=33.0):
    return EdfaSpec(gain, max_gain, nf, sat_out)


def mk_splitter(fanout=16, excess=1.0):
    return SplitterSpec(fanout, excess)


def mk_fiber(length=0.0, attenuation=0.2, group_index=1.468):
    return FiberSpec(length, attenuation, group_index)


def mk_pd(resp=0.8, sat=24.0, bandwidth=20e9, kind=DetectorKind.ANALOG,
          dark=0.0, sensitivity=None):
    return PhotodetectorSpec(resp, sat, bandwidth, kind, dark, sensitivity)


_KIND_BY_TYPE = {
    LaserSpec: ElementKind.LASER,
    ModulatorSpec: ElementKind.MODULATOR,
    EdfaSpec: ElementKind.EDFA,
    FiberSpec: ElementKind.FIBER,
    SplitterSpec: ElementKind.SPLITTER,
    PhotodetectorSpec: ElementKind.DETECTOR,
}


def make_path(*specs, channel="ch1", wavelength_nm=1550.0,
              direction=Direction.FORWARD, destination="dtrm01") -> SignalPath:
    """Assemble a SignalPath from bare specs; mux/demux disambiguated by
    position (first MuxDemuxSpec is the mux, any later one the demux)."""
    elements = []
    seen_mux = False
    for index, spec in enumerate(specs):
        if isinstance(spec, MuxDemuxSpec):
            kind = ElementKind.DEMUX if seen_mux else ElementKind.MUX
            seen_mux = True
        else:
            kind = _KIND_BY_TYPE[type(spec)]
        elements.append(PathElement(
            element_id=f"e{index:02d}.{kind.value}",
            kind=kind,
            component=f"{kind.value}_{index}",
            spec=spec,
            node="test",
        ))
    return SignalPath(channel, direction, destination, wavelength_nm,
                      tuple(elements))


def forward_fixture_library():
    return {
        "laser_a": mk_laser(nm=1550.0),
        "laser_b": mk_laser(nm=1550.8),
        "laser_c": mk_laser(nm=1551.6),
        "clk_laser": mk_laser(nm=1552.4),
        "dm_mod": mk_mod_direct(),
        "em_mod": mk_mod_external(),
        "mux": mk_mux(),
        "demux": mk_mux(),
        "edfa": mk_edfa(),
        "splitter": mk_splitter(fanout=4, excess=0.5),
        "trunk": mk_fiber(length=10.0),
        "drop": mk_fiber(length=2.0),
        "pd_analog": mk_pd(),
        "pd_digital": mk_pd(resp=0.85, kind=DetectorKind.DIGITAL),
    }


def forward_fixture_bindings(**overrides) -> ForwardBindings:
    values = dict(
        modulator="dm_mod",
        mux="mux",
        demux="demux",
        splitter="splitter",
        fojb_edfa="edfa",
        analog_detector="pd_analog",
        digital_detector="pd_digital",
        trunk_fiber="trunk",
        drop_fiber="drop",
    )
    values.update(overrides)
    return ForwardBindings(**values)


def forward_fixture_channels():
    return [
        ChannelPlan("alpha", "laser_a", DetectorKind.ANALOG),
        ChannelPlan("bravo", "laser_b", DetectorKind.ANALOG),
        ChannelPlan("clk", "clk_laser", DetectorKind.DIGITAL),
    ]


def return_fixture_library():
    return {
        "dlaser1": mk_laser(power_w=0.01, rin=-150.0, nm=1530.0, tunable=True),
        "dlaser2": mk_laser(power_w=0.01, rin=-150.0, nm=1530.8, tunable=True),
        "dlaser3": mk_laser(power_w=0.01, rin=-150.0, nm=1531.6, tunable=True),
        "dlaser4": mk_laser(power_w=0.01, rin=-150.0, nm=1532.4, tunable=True),
        "dmod": mk_mod_direct(bandwidth=5e9),
        "dmux": mk_mux(tech=GratingTech.AWG),
        "ddemux": mk_mux(tech=GratingTech.AWG),
        "dfiber": mk_fiber(length=30.0),
        "dpd": mk_pd(resp=0.9, sat=10.0, bandwidth=5e9, kind=DetectorKind.DIGITAL),
    }


def return_fixture_bindings() -> ReturnBindings:
    return ReturnBindings(
        lasers=("dlaser1", "dlaser2", "dlaser3", "dlaser4"),
        modulator="dmod",
        mux="dmux",
        demux="ddemux",
        detector="dpd",
        fiber="dfiber",
    )


@pytest.fixture(scope="session")
def reference_scenario():
    return parse_scenario(reference_scenario_path())


@pytest.fixture(scope="session")
def reference_components_file():
    return reference_components_path()
