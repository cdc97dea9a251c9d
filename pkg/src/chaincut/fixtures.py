"""Small named networks used by the tests and the CLI.

Three fixture families:

* ``example1`` — the six-node, two-stage chain where duplicating both
  stages cuts the end-to-end delay from 3 to 2.
* ``example2`` — the deterministic unit-capacity trellis (source, K full
  layers of N nodes, destination); its optimal normalized delay is
  1 + K/N against K + 1 without redundancy.
* ``butterfly`` — the classic seven-node multicast network where one
  source reaches two sinks at rate 2 only by coding at the middle node.

The fully connected analytic family lives in :mod:`chaincut.analytic`;
``complete_graph`` here is a convenience wrapper over it.
"""

from __future__ import annotations

from .analytic import CompleteGraphParams, complete_graph_network
from .chain import ChainRequest
from .experiments import gen_layered_network
from .netgraph import CapacityLike, Network, NodeSet


def example1() -> tuple[Network, ChainRequest]:
    """The six-node two-stage fixture with all unit capacities.

    Nodes: s, v11, v12, v21, v22, d.  The source feeds both first-stage
    candidates, each first-stage candidate feeds both second-stage
    candidates, and both second-stage candidates feed the destination.
    The request carries three unit payloads through candidate sets
    {v11, v12} and {v21, v22}.
    """
    net = Network(
        6,
        [
            (0, 1, 1),
            (0, 2, 1),
            (1, 3, 1),
            (1, 4, 1),
            (2, 3, 1),
            (2, 4, 1),
            (3, 5, 1),
            (4, 5, 1),
        ],
        node_labels=["s", "v11", "v12", "v21", "v22", "d"],
    )
    req = ChainRequest(0, 5, [1, 1, 1], [NodeSet.of(1, 2), NodeSet.of(3, 4)])
    return net, req


def example2(n: int, k: int) -> tuple[Network, ChainRequest]:
    """The deterministic trellis: K full layers of N nodes, unit capacities.

    Identical to ``gen_layered_network`` at p=1, U=0, where the draw is
    degenerate: every edge is present and every capacity is exactly 1.
    """
    return gen_layered_network(n, k, p=1.0, u=0.0, seed=0)


def butterfly() -> tuple[Network, int, NodeSet]:
    """The classic butterfly multicast network.

    Returns (network, source, sinks).  All nine edges have unit
    capacity; each sink's max-flow from the source is 2, and both sinks
    can decode at rate 2 simultaneously only if the bottleneck node
    mixes its two incoming streams.
    """
    net = Network(
        7,
        [
            (0, 1, 1),
            (0, 2, 1),
            (1, 5, 1),
            (2, 6, 1),
            (1, 3, 1),
            (2, 3, 1),
            (3, 4, 1),
            (4, 5, 1),
            (4, 6, 1),
        ],
        node_labels=["s", "a", "b", "m1", "m2", "t1", "t2"],
    )
    return net, 0, NodeSet.of(5, 6)


def complete_graph(
    total_nodes: int,
    layer_size: int,
    chain_length: int,
    epsilon: CapacityLike,
) -> tuple[Network, ChainRequest]:
    """The fully connected analytic fixture (see :mod:`chaincut.analytic`)."""
    params = CompleteGraphParams.of(total_nodes, layer_size, chain_length, epsilon)
    return complete_graph_network(params)
