import pytest
from hypothesis import given, settings, strategies as st

from conftest import g1_network
from feeder.network import Edge, Network, reverse
from feeder.oracle import InstanceRecipe, generate, naive_feedin_walks, naive_feedout_walks
from feeder.routes import (FEED_IN, FEED_OUT, Route, RouteLimitExceeded, count_service_tuples,
                           dropoff_time, enumerate_feedin_routes, enumerate_feedout_routes, has_cycle_in_leg,
                           map_route_reverse, pickup_time, service_nodes)


def labels(routes):
    return {r.label() for r in routes}


@pytest.mark.parametrize("T, expected", [
    (10, {"A>I", "I>A>I"}),
    (4, set()),
    (15, {"A>I", "I>A>I", "A>I>A>I"}),
])
def test_feedin_enumeration_on_fixture(T, expected):
    assert labels(enumerate_feedin_routes(g1_network(), T)) == expected


@pytest.mark.parametrize("T, expected", [(10, {"I>A", "I>A>I"}), (4, set())])
def test_feedout_enumeration_on_fixture(T, expected):
    assert labels(enumerate_feedout_routes(g1_network(), T)) == expected


def test_reversed_fixture_has_as_many_feedout_routes():
    net = g1_network()
    assert len(enumerate_feedout_routes(reverse(net), 10)) == len(enumerate_feedin_routes(net, 10))


def test_legs_split_at_interior_interchange_visits():
    r = Route.from_nodes(g1_network(), ("A", "I", "A", "I"))
    assert r.n_legs == 2
    assert [leg.nodes for leg in r.legs] == [("A", "I"), ("I", "A", "I")]
    assert [leg.cost for leg in r.legs] == [2, 4]
    assert r.total_cost == sum(leg.cost for leg in r.legs) == 6
    # a route that starts at the interchange has a single leg
    assert Route.from_nodes(g1_network(), ("I", "A", "I")).n_legs == 1


def test_service_tuples_of_fixture():
    net = g1_network()
    a = Route.from_nodes(net, ("A", "I"))
    b = Route.from_nodes(net, ("I", "A", "I"))
    assert service_nodes(a, 1) == ("A",)
    assert service_nodes(b, 1) == ("I", "A")
    assert count_service_tuples([a, b]) == 3
    out = Route.from_nodes(net, ("I", "A", "I"), FEED_OUT)
    assert service_nodes(out, 1) == ("A", "I")


def test_pickup_and_dropoff_times():
    net = g1_network()
    assert pickup_time(Route.from_nodes(net, ("A", "I")), 1, "A", 10) == 5
    assert pickup_time(Route.from_nodes(net, ("I", "A", "I")), 1, "A", 10) == 5
    assert dropoff_time(Route.from_nodes(net, ("I", "A"), FEED_OUT), 1, "A") == 5


def test_repeated_node_uses_last_pickup_and_first_dropoff():
    net = Network(("A", "B", "I"), "I", (Edge("A", "B", 1, 2), Edge("B", "A", 1, 3), Edge("A", "I", 1, 4),
                                        Edge("I", "A", 1, 4)))
    r = Route.from_nodes(net, ("A", "B", "A", "I"))
    assert pickup_time(r, 1, "A", 20) == 20 - 9 + 5
    assert has_cycle_in_leg(r, 1)
    o = Route.from_nodes(net, ("I", "A", "B", "A"), FEED_OUT)
    assert dropoff_time(o, 1, "A") == 4
    assert not has_cycle_in_leg(Route.from_nodes(net, ("A", "I", "A", "I")), 1)


def test_ceiling_raises_instead_of_truncating():
    with pytest.raises(RouteLimitExceeded):
        enumerate_feedin_routes(g1_network(), 100, ceiling=5)


def test_map_route_reverse_preserves_cost_and_mirrors_legs():
    net = g1_network()
    out = Route.from_nodes(net, ("I", "A", "I", "A"), FEED_OUT)
    image = map_route_reverse(out)
    assert image.direction == FEED_IN and image.nodes == ("A", "I", "A", "I")
    assert image.total_cost == out.total_cost
    assert [leg.cost for leg in image.legs] == [leg.cost for leg in reversed(out.legs)]
    assert map_route_reverse(image) == out


@given(st.integers(0, 10_000), st.integers(2, 6), st.sampled_from([0.3, 0.5, 0.8]))
@settings(max_examples=40, deadline=None)
def test_enumeration_matches_naive_walks(seed, n, density):
    inst = generate(InstanceRecipe(seed=seed, n_nodes=n, edge_density=density, max_routes=2000))
    net, T = inst.network, inst.time_window
    fin = enumerate_feedin_routes(net, T)
    fout = enumerate_feedout_routes(net, T)
    assert {r.nodes for r in fin} == naive_feedin_walks(net, T)
    assert {r.nodes for r in fout} == naive_feedout_walks(net, T)
    for r in fin:
        assert r.destination == net.interchange and r.total_time <= T + 1e-9
        assert abs(r.total_cost - sum(leg.cost for leg in r.legs)) < 1e-9
        assert all(leg.nodes[-1] == net.interchange for leg in r.legs)
    # feed-out routes on a network are feed-in routes on its reversal
    back = {r.nodes for r in enumerate_feedin_routes(reverse(net), T)}
    assert {map_route_reverse(r).nodes for r in fout} == back
