import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import g1_network
from feeder.network import (Edge, Instance, InstanceError, Network, cheapest_cost, instance_document,
                            load_instance, parse_instance, reverse, unreachable_nodes)


def test_g1_document_loads(g1):
    net = g1.network
    assert net.nodes == ("A", "I")
    assert len(net.edges) == 2
    assert net.demand == {"A": 10.0, "I": 0.0}
    assert g1.cost_factor == 2.5 and g1.alt_transport is None


def test_load_from_string_and_mapping(g1):
    doc = instance_document(g1)
    assert load_instance(json.dumps(doc)) == load_instance(doc)
    assert load_instance(doc).network.edges == g1.network.edges


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d["edges"].append({"from": "A", "to": "I", "rho": 1, "time": 1}), "parallel edge"),
    (lambda d: d["edges"].append({"from": "A", "to": "A", "rho": 1, "time": 1}), "self-loop"),
    (lambda d: d["edges"][0].update(time=0), "non-positive edge time"),
    (lambda d: d["edges"][0].update(rho=-1), "non-positive edge cost"),
    (lambda d: d["demand"].update(I=3), "interchange demand must be zero"),
    (lambda d: d.update(interchange="Z"), "not a node"),
    (lambda d: d["edges"].append({"from": "A", "to": "Q", "rho": 1, "time": 1}), "unknown node"),
    (lambda d: d["demand"].update(A=-1), "nonnegative"),
    (lambda d: d.update(alt_transport={"A": {"eta": 1, "zeta": 1}}), "exactly one"),
    (lambda d: d.pop("time_window"), "time_window"),
])
def test_invalid_documents_rejected(g1, mutate, message):
    doc = instance_document(g1)
    mutate(doc)
    with pytest.raises(InstanceError, match=message):
        parse_instance(doc)


def test_bad_json_is_an_instance_error():
    with pytest.raises(InstanceError):
        load_instance("{not json")


def test_cheapest_cost():
    net = g1_network()
    assert cheapest_cost(net, "I", "A") == 2
    one_way = Network(("A", "I"), "I", (Edge("A", "I", 2, 5),), {"A": 1})
    assert math.isinf(cheapest_cost(one_way, "I", "A"))


def test_reverse_of_symmetric_fixture_is_itself():
    net = g1_network()
    assert set(reverse(net).edges) == set(net.edges)
    assert reverse(net).demand == net.demand


def test_unreachable_nodes():
    net = Network(("A", "B", "I"), "I", (Edge("A", "I", 1, 3), Edge("I", "B", 1, 1)))
    assert unreachable_nodes(net) == ["B"]
    assert unreachable_nodes(net, 2) == ["A", "B"]


def test_instance_requires_positive_window():
    with pytest.raises(InstanceError):
        Instance(g1_network(), 0, 1, cost_factor=1)


edges_st = st.lists(
    st.tuples(st.sampled_from("ABCI"), st.sampled_from("ABCI"), st.integers(1, 9), st.integers(1, 9)),
    max_size=12,
)


@given(edges_st)
@settings(max_examples=60, deadline=None)
def test_reverse_twice_restores_edges(raw):
    seen, edges = set(), []
    for u, v, rho, t in raw:
        if u != v and (u, v) not in seen:
            seen.add((u, v))
            edges.append(Edge(u, v, rho, t))
    net = Network(tuple("ABCI"), "I", tuple(edges))
    assert reverse(reverse(net)).edges == net.edges
    back = reverse(net)
    for e in net.edges:
        r = back.edge_map[(e.head, e.tail)]
        assert (r.rho, r.time) == (e.rho, e.time)
