from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincut.fixtures import example1
from chaincut.netgraph import (
    MICRO,
    Capacity,
    Network,
    NodeSet,
    build_auxiliary_multicast,
    cut_value,
    max_flow,
    mincut_bruteforce,
    multicast_mincut,
    to_micro,
)


def test_to_micro_exact_forms():
    assert to_micro(1) == MICRO
    assert to_micro("0.5") == MICRO // 2
    assert to_micro(Fraction(1, 3)) == 333333  # round half even of 333333.33...
    assert to_micro("1e-6") == 1
    assert to_micro(Capacity.of(2)) == 2 * MICRO


def test_to_micro_round_half_even():
    # exactly .5 micro-units goes to the even neighbour
    assert to_micro(Fraction(1, 2 * MICRO)) == 0
    assert to_micro(Fraction(3, 2 * MICRO)) == 2
    assert to_micro(Fraction(5, 2 * MICRO)) == 2


def test_to_micro_rejects_bad_values():
    with pytest.raises(ValueError):
        to_micro(-1)
    with pytest.raises(ValueError):
        to_micro(float("inf"))
    with pytest.raises(ValueError):
        to_micro(float("nan"))
    with pytest.raises(ValueError):
        to_micro(Capacity.INFINITE)
    with pytest.raises(ValueError):
        to_micro("not a number")
    with pytest.raises(ValueError):
        to_micro(Decimal("NaN"))
    with pytest.raises(TypeError):
        to_micro(object())


def test_capacity_infinite_absorbs_and_orders():
    inf = Capacity.INFINITE
    one = Capacity.of(1)
    assert inf + one is Capacity.INFINITE
    assert one + inf is Capacity.INFINITE
    assert inf > one
    assert one < inf
    assert not inf < inf
    assert (one + one).micro == 2 * MICRO
    assert one.as_fraction() == 1
    assert Capacity.of(0).is_zero
    assert not inf.is_zero


def test_nodeset_operations_match_sets():
    a = NodeSet.of(0, 3, 5)
    b = NodeSet.from_iterable([3, 4])
    assert list(a.nodes()) == [0, 3, 5]
    assert len(a) == 3
    assert (a | b) == NodeSet.of(0, 3, 4, 5)
    assert (a & b) == NodeSet.of(3)
    assert (a - b) == NodeSet.of(0, 5)
    assert b <= (a | b)
    assert not (a <= b)
    assert 3 in a and 1 not in a
    assert a.add(1) == NodeSet.of(0, 1, 3, 5)


@given(
    xs=st.sets(st.integers(0, 30)),
    ys=st.sets(st.integers(0, 30)),
)
def test_nodeset_ops_agree_with_builtin_sets(xs, ys):
    a, b = NodeSet.from_iterable(xs), NodeSet.from_iterable(ys)
    assert set((a | b).nodes()) == xs | ys
    assert set((a & b).nodes()) == xs & ys
    assert set((a - b).nodes()) == xs - ys
    assert (a <= b) == (xs <= ys)
    assert len(a) == len(xs)


def test_network_rejects_bad_edges():
    with pytest.raises(ValueError):
        Network(2, [(0, 0, 1)])  # self loop
    with pytest.raises(ValueError):
        Network(2, [(0, 5, 1)])  # head out of range
    with pytest.raises(ValueError):
        Network(0, [])


def test_network_parallel_edges_sum_in_cuts():
    net = Network(2, [(0, 1, 1), (0, 1, "0.5")])
    assert cut_value(net, NodeSet.of(0)) == Capacity.of("1.5")
    assert max_flow(net, 0, 1) == Capacity.of("1.5")


def test_cut_value_example1():
    net, _ = example1()
    assert cut_value(net, NodeSet.of(0)) == Capacity.of(2)
    assert cut_value(net, NodeSet.from_iterable(range(6))) == Capacity.of(0)
    assert cut_value(net, NodeSet.of(0, 1, 2)) == Capacity.of(4)


def test_cut_value_infinite_edge():
    net = Network(3, [(0, 1, Capacity.INFINITE), (0, 2, 1)])
    assert cut_value(net, NodeSet.of(0)) is Capacity.INFINITE
    assert cut_value(net, NodeSet.of(0, 1)) == Capacity.of(1)


def test_max_flow_example1():
    net, _ = example1()
    assert max_flow(net, 0, 1) == Capacity.of(1)
    assert max_flow(net, 0, 5) == Capacity.of(2)
    assert max_flow(net, 5, 0) == Capacity.of(0)  # no reverse path
    with pytest.raises(ValueError):
        max_flow(net, 2, 2)


def test_max_flow_zero_capacity_edges_are_absent():
    net = Network(3, [(0, 1, 0), (1, 2, 1)])
    assert max_flow(net, 0, 2) == Capacity.of(0)


def test_max_flow_infinite_path():
    net = Network(3, [(0, 1, Capacity.INFINITE), (1, 2, Capacity.INFINITE)])
    assert max_flow(net, 0, 2) is Capacity.INFINITE


def test_build_auxiliary_multicast_shape():
    net, _ = example1()
    aux, en = build_auxiliary_multicast(net, NodeSet.of(1, 2))
    assert aux.node_count == net.node_count + 1
    assert en == net.node_count
    extra = [e for e in aux.edges if e.tail == en]
    assert len(extra) == 2
    assert all(e.capacity.is_infinite for e in extra)
    assert aux.edges[: len(net.edges)] == net.edges
    assert aux.label_of(en) == "EN"

    aux_s, _ = build_auxiliary_multicast(net, NodeSet.of(0))
    assert len(aux_s.edges) == len(net.edges) + 1
    aux_all, en_all = build_auxiliary_multicast(net, NodeSet.from_iterable(range(6)))
    assert sum(1 for e in aux_all.edges if e.tail == en_all) == 6
    with pytest.raises(ValueError):
        build_auxiliary_multicast(net, NodeSet.of())


def test_multicast_mincut_example1_rounds():
    net, _ = example1()
    assert multicast_mincut(net, NodeSet.of(0), NodeSet.of(1, 2)) == Capacity.of(1)
    assert multicast_mincut(net, NodeSet.of(1, 2), NodeSet.of(3, 4)) == Capacity.of(2)
    assert multicast_mincut(net, NodeSet.of(3, 4), NodeSet.of(5)) == Capacity.of(2)


def test_multicast_mincut_targets_subset_of_sources():
    net, _ = example1()
    assert multicast_mincut(net, NodeSet.of(1, 2), NodeSet.of(1)) is Capacity.INFINITE
    # partially overlapping targets: only the outside ones count
    assert multicast_mincut(net, NodeSet.of(0, 1), NodeSet.of(1, 2)) == Capacity.of(1)


def test_multicast_mincut_zero_for_disconnected():
    net = Network(3, [(0, 1, 1)])
    assert multicast_mincut(net, NodeSet.of(0), NodeSet.of(2)) == Capacity.of(0)


def test_mincut_bruteforce_examples():
    net, _ = example1()
    for srcs, tgts in [
        (NodeSet.of(0), NodeSet.of(1, 2)),
        (NodeSet.of(1, 2), NodeSet.of(3, 4)),
        (NodeSet.of(3, 4), NodeSet.of(5)),
    ]:
        assert mincut_bruteforce(net, srcs, tgts) == multicast_mincut(net, srcs, tgts)
    single = Network(2, [(0, 1, 5)])
    assert mincut_bruteforce(single, NodeSet.of(0), NodeSet.of(1)) == Capacity.of(5)
    with pytest.raises(ValueError):
        mincut_bruteforce(Network(21, []), NodeSet.of(0), NodeSet.of(1))


@st.composite
def small_networks(draw):
    n = draw(st.integers(2, 7))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=14))
    edges = [
        (u, v, draw(st.integers(0, 4 * MICRO)) / Fraction(MICRO)) for u, v in chosen
    ]
    return Network(n, edges)


@settings(max_examples=60, deadline=None)
@given(net=small_networks(), data=st.data())
def test_duality_flow_equals_enumerated_mincut(net, data):
    u = data.draw(st.integers(0, net.node_count - 1))
    v = data.draw(st.integers(0, net.node_count - 1).filter(lambda x: x != u))
    assert max_flow(net, u, v) == mincut_bruteforce(net, NodeSet.of(u), NodeSet.of(v))


@settings(max_examples=60, deadline=None)
@given(net=small_networks(), data=st.data())
def test_reduction_matches_set_enumeration(net, data):
    nodes = list(range(net.node_count))
    srcs = NodeSet.from_iterable(
        data.draw(st.sets(st.sampled_from(nodes), min_size=1))
    )
    tgts = NodeSet.from_iterable(
        data.draw(st.sets(st.sampled_from(nodes), min_size=1))
    )
    assert multicast_mincut(net, srcs, tgts) == mincut_bruteforce(net, srcs, tgts)


@settings(max_examples=60, deadline=None)
@given(net=small_networks(), data=st.data())
def test_cut_value_submodular(net, data):
    nodes = list(range(net.node_count))
    a = NodeSet.from_iterable(data.draw(st.sets(st.sampled_from(nodes))))
    b = NodeSet.from_iterable(data.draw(st.sets(st.sampled_from(nodes))))
    lhs = cut_value(net, a) + cut_value(net, b)
    rhs = cut_value(net, a | b) + cut_value(net, a & b)
    assert lhs >= rhs


@settings(max_examples=40, deadline=None)
@given(net=small_networks(), data=st.data())
def test_multicast_mincut_monotone(net, data):
    nodes = list(range(net.node_count))
    srcs = NodeSet.from_iterable(
        data.draw(st.sets(st.sampled_from(nodes), min_size=1))
    )
    tgts = NodeSet.from_iterable(
        data.draw(st.sets(st.sampled_from(nodes), min_size=1))
    )
    base = multicast_mincut(net, srcs, tgts)

    if net.edges:
        # raising one capacity never lowers the min-cut
        i = data.draw(st.integers(0, len(net.edges) - 1))
        bumped_edges = list(net.edges)
        e = bumped_edges[i]
        bumped_edges[i] = (e.tail, e.head, e.capacity + Capacity.of(1))
        bumped = Network(net.node_count, bumped_edges)
        assert multicast_mincut(bumped, srcs, tgts) >= base

    extra = data.draw(st.integers(0, net.node_count - 1))
    assert multicast_mincut(net, srcs.add(extra), tgts) >= base
    assert multicast_mincut(net, srcs, tgts.add(extra)) <= base
