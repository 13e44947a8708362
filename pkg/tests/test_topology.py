"""Network construction, structural validation and path enumeration."""

import dataclasses
import random
import re

import pytest

from photonlink.components import DetectorKind
from photonlink.errors import BuildError, TopologyError
from photonlink.topology import (
    ChannelPlan,
    Direction,
    ElementKind,
    NodeKind,
    adjacency_dump,
    build_forward_network,
    build_return_network,
    co_propagating,
    enumerate_paths,
    return_groups,
    validate_topology,
)

from conftest import (
    forward_fixture_bindings,
    forward_fixture_channels,
    forward_fixture_library,
    mk_laser,
    return_fixture_bindings,
    return_fixture_library,
)
from oracles import count_laser_to_detector_routes


def build_reference_forward(n=4, channels=None, **kwargs):
    library = forward_fixture_library()
    return build_forward_network(
        n, channels or forward_fixture_channels(), library,
        forward_fixture_bindings(), **kwargs)


class TestForwardBuild:
    def test_node_inventory_and_splitter_fanout(self):
        topology = build_reference_forward(n=16)
        kinds = [n.kind for n in topology.nodes]
        assert kinds.count(NodeKind.OTXC) == 1
        assert kinds.count(NodeKind.FOJB) == 1
        assert kinds.count(NodeKind.ORXC) == 16
        fojb = topology.node("fojb")
        splitter = topology.library[[c for c in fojb.components
                                     if c == "splitter"][0]]
        assert splitter.fanout == 16

    def test_degenerate_single_module(self):
        topology = build_reference_forward(n=1)
        splitter = topology.library["splitter"]
        assert splitter.fanout == 1
        # split loss collapses to the excess term
        assert splitter.split_loss_db == pytest.approx(0.5)

    def test_wavelength_collision_rejected(self):
        library = forward_fixture_library()
        library["laser_b"] = mk_laser(nm=1550.0)  # same as laser_a
        with pytest.raises(BuildError, match="wavelength collision"):
            build_forward_network(4, forward_fixture_channels(), library,
                                  forward_fixture_bindings())

    def test_unknown_component_rejected(self):
        with pytest.raises(BuildError, match="unknown component 'ghost'"):
            build_reference_forward(
                channels=[ChannelPlan("alpha", "ghost")])

    def test_nonpositive_module_count_rejected(self):
        with pytest.raises(BuildError, match="n_dtrm must be >= 1"):
            build_reference_forward(n=0)

    def test_separate_clock_lane(self):
        topology = build_reference_forward(n=2, shared_fiber=False)
        assert validate_topology(topology).ok
        lanes = {e.lane for e in topology.edges if e.channels}
        assert lanes == {0, 1}
        paths = enumerate_paths(topology)
        assert len(paths) == 3 * 2
        clock_paths = [p for p in paths if p.channel == "clk"]
        # the clock lane only propagates clock channels
        assert all(co_propagating(topology, p) == ("clk",) for p in clock_paths)


class TestReturnBuild:
    def test_sixteen_modules_make_four_groups(self):
        topology = build_return_network(16, return_fixture_library(),
                                        return_fixture_bindings())
        groups = return_groups(topology)
        assert len(groups) == 4
        assert all(len(channels) == 4 for _, channels in groups)

    def test_minimal_single_group(self):
        topology = build_return_network(4, return_fixture_library(),
                                        return_fixture_bindings())
        assert len(return_groups(topology)) == 1
        assert len(enumerate_paths(topology)) == 4

    def test_indivisible_module_count_rejected(self):
        with pytest.raises(BuildError, match="multiple of 4"):
            build_return_network(6, return_fixture_library(),
                                 return_fixture_bindings())

    def test_return_paths_end_at_beam_former(self):
        topology = build_return_network(8, return_fixture_library(),
                                        return_fixture_bindings())
        paths = enumerate_paths(topology)
        assert len(paths) == 8
        assert {p.destination for p in paths} == {"dbfu"}
        assert all(p.direction is Direction.RETURN for p in paths)


class TestValidation:
    def test_constructed_network_is_valid(self):
        assert validate_topology(build_reference_forward(n=16)).ok

    def test_missing_splitter_leg_is_flagged(self):
        """Mutation: drop one junction-box output edge."""
        topology = build_reference_forward(n=16)
        victim = next(e for e in topology.edges
                      if e.source == "fojb" and e.target == "orxc07")
        mutated = dataclasses.replace(
            topology, edges=tuple(e for e in topology.edges if e is not victim))
        report = validate_topology(mutated)
        assert any("fanout 16 != 15" in m for m in report.messages())

    def test_analog_channel_on_digital_detector_is_flagged(self):
        topology = build_reference_forward(
            n=2, channels=[ChannelPlan("alpha", "laser_a", DetectorKind.ANALOG)])
        mutated = dataclasses.replace(
            topology, channel_detectors={"alpha": "pd_digital"})
        report = validate_topology(mutated)
        assert any("analog channel 'alpha' terminated on a digital detector" in m
                   for m in report.messages())

    def test_out_of_band_wavelength_is_flagged(self):
        library = forward_fixture_library()
        library["laser_a"] = mk_laser(nm=1260.0)
        topology = build_forward_network(
            2, forward_fixture_channels(), library, forward_fixture_bindings())
        report = validate_topology(topology)
        assert any("outside [1300, 1650] nm" in m for m in report.messages())

    def test_too_close_channels_are_flagged(self):
        library = forward_fixture_library()
        library["laser_b"] = mk_laser(nm=1550.4)
        topology = build_forward_network(
            2, forward_fixture_channels(), library, forward_fixture_bindings())
        report = validate_topology(topology)
        assert any("< minimum 0.8 nm" in m for m in report.messages())

    def test_cycle_is_flagged(self):
        from photonlink.topology import FiberEdge
        topology = build_reference_forward(n=2)
        back_edge = FiberEdge("fojb", "otxc", "trunk")
        mutated = dataclasses.replace(topology,
                                      edges=topology.edges + (back_edge,))
        report = validate_topology(mutated)
        assert any("cycle" in m for m in report.messages())

    def test_enumerate_refuses_invalid_topology(self):
        topology = build_reference_forward(n=4)
        mutated = dataclasses.replace(topology, edges=topology.edges[:-3])
        with pytest.raises(TopologyError):
            enumerate_paths(mutated)


class TestEnumeration:
    @pytest.mark.parametrize("n", [1, 2, 4, 8])
    def test_path_count_matches_traversal_oracle(self, n):
        topology = build_reference_forward(n=n)
        paths = enumerate_paths(topology)
        assert len(paths) == 3 * n
        assert len(paths) == count_laser_to_detector_routes(topology)

    def test_enumeration_is_deterministic(self):
        topology = build_reference_forward(n=8)
        first = enumerate_paths(topology)
        second = enumerate_paths(topology)
        assert first == second
        ids = [p.path_id for p in first]
        assert ids == sorted(ids)

    def test_element_order_matches_the_legal_grammar(self):
        legal = re.compile(r"^LMUE?F*(E?SF*)?DP$")
        for topology in (build_reference_forward(n=4),
                         build_return_network(8, return_fixture_library(),
                                              return_fixture_bindings())):
            for path in enumerate_paths(topology):
                assert legal.match(path.kind_tokens()), path.kind_tokens()
                assert path.elements[0].kind is ElementKind.LASER
                assert path.elements[-1].kind is ElementKind.DETECTOR

    def test_forward_path_traverses_expected_elements(self):
        topology = build_reference_forward(n=4)
        path = enumerate_paths(topology)[0]
        assert path.kind_tokens() == "LMUFESFDP"
        assert path.channel == "alpha"
        assert path.destination == "dtrm01"

    def test_single_module_single_channel_gives_one_path(self):
        topology = build_reference_forward(
            n=1, channels=[ChannelPlan("alpha", "laser_a")])
        assert len(enumerate_paths(topology)) == 1

    def test_transmitter_booster_appears_after_the_mux(self):
        boosted = build_forward_network(
            2, forward_fixture_channels(), forward_fixture_library(),
            forward_fixture_bindings(otxc_edfa="edfa"))
        assert validate_topology(boosted).ok
        path = enumerate_paths(boosted)[0]
        assert path.kind_tokens() == "LMUEFESFDP"

    def test_co_propagating_set(self):
        topology = build_reference_forward(n=2)
        path = enumerate_paths(topology)[0]
        assert co_propagating(topology, path) == ("alpha", "bravo", "clk")


def test_adjacency_dump_mentions_every_edge():
    topology = build_reference_forward(n=2)
    dump = "\n".join(adjacency_dump(topology))
    assert "otxc [otxc] -> fojb" in dump
    assert "fojb [fojb] -> orxc01" in dump


def test_random_module_counts_scale(n_max=12):
    rng = random.Random(99)
    for _ in range(5):
        n = rng.randint(1, n_max)
        topology = build_reference_forward(n=n)
        assert len(enumerate_paths(topology)) == 3 * n
