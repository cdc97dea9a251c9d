import json
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaincut.chain import ChainRequest, Placement
from chaincut.coding import certify_placement
from chaincut.fixtures import example1
from chaincut.netgraph import Capacity, Network, NodeSet
from chaincut.serialize import (
    dump_json,
    load_json,
    network_from_json,
    network_to_json,
    placement_from_json,
    placement_to_json,
    request_from_json,
    request_to_json,
    certificate_to_json,
    solve_result_to_json,
)
from chaincut.solvers import solve_greedy, solve_no_redundancy


def rewire(doc):
    """Serialize to JSON text and parse the way load_json does."""
    return json.loads(json.dumps(doc), parse_float=Decimal)


def assert_same_network(a: Network, b: Network):
    assert a.node_count == b.node_count
    assert a.edges == b.edges
    assert [a.label_of(i) for i in range(a.node_count)] == [
        b.label_of(i) for i in range(b.node_count)
    ]


def test_network_round_trip():
    net, _ = example1()
    doc = rewire(network_to_json(net))
    assert doc["nodes"][0] == "s" and doc["nodes"][-1] == "d"
    assert doc["edges"][0] == {"tail": "s", "head": "v11", "capacity": 1}
    assert_same_network(network_from_json(doc), net)


def test_capacity_forms():
    net = Network(
        3,
        [
            (0, 1, Capacity(500_000)),
            (0, 1, Capacity.INFINITE),
            (1, 2, Capacity(1_234_567)),
        ],
        ["a", "b", "c"],
    )
    doc = network_to_json(net)
    caps = [e["capacity"] for e in doc["edges"]]
    assert caps[0] == 0.5 and isinstance(caps[0], float)
    assert caps[1] == "inf"
    assert caps[2] == pytest.approx(1.234567)
    back = network_from_json(rewire(doc))
    assert back.edges[1].capacity.is_infinite
    assert back.edges[2].capacity.micro == 1_234_567


@given(st.integers(min_value=1, max_value=10**18))
def test_capacity_emission_is_lossless(micro):
    net = Network(2, [(0, 1, Capacity(micro))], ["a", "b"])
    back = network_from_json(rewire(network_to_json(net)))
    assert back.edges[0].capacity.micro == micro


def test_network_from_json_accepts_indices_and_infinity_spellings():
    doc = {
        "nodes": ["x", "y"],
        "edges": [
            {"tail": 0, "head": "y", "capacity": "Infinity"},
            {"tail": "x", "head": 1, "capacity": "2.5"},
        ],
    }
    net = network_from_json(doc)
    assert net.edges[0].capacity.is_infinite
    assert net.edges[1].capacity.micro == 2_500_000


def test_network_from_json_errors():
    with pytest.raises(ValueError, match='"nodes" and "edges"'):
        network_from_json({"nodes": ["a"]})
    with pytest.raises(ValueError, match="label strings"):
        network_from_json({"nodes": [1, 2], "edges": []})
    with pytest.raises(ValueError, match="duplicate"):
        network_from_json({"nodes": ["a", "a"], "edges": []})
    base = {"nodes": ["a", "b"]}
    with pytest.raises(ValueError, match="unknown node 'z'"):
        network_from_json(
            {**base, "edges": [{"tail": "z", "head": "b", "capacity": 1}]}
        )
    with pytest.raises(ValueError, match="out of range"):
        network_from_json({**base, "edges": [{"tail": 0, "head": 5, "capacity": 1}]})
    with pytest.raises(ValueError, match="missing 'capacity'"):
        network_from_json({**base, "edges": [{"tail": "a", "head": "b"}]})
    with pytest.raises(ValueError, match="bad capacity"):
        network_from_json(
            {**base, "edges": [{"tail": "a", "head": "b", "capacity": "wide"}]}
        )
    with pytest.raises(ValueError, match="bad node reference"):
        network_from_json(
            {**base, "edges": [{"tail": True, "head": "b", "capacity": 1}]}
        )
    with pytest.raises(ValueError, match="must be an object"):
        network_from_json({**base, "edges": [["a", "b", 1]]})


def test_request_round_trip():
    net, req = example1()
    doc = rewire(request_to_json(req, net))
    assert doc == {
        "source": "s",
        "dest": "d",
        "sizes": [1, 1, 1],
        "placements": [["v11", "v12"], ["v21", "v22"]],
    }
    back = request_from_json(doc, net)
    assert back.source == req.source and back.dest == req.dest
    assert back.sizes_micro == req.sizes_micro
    assert back.placements == req.placements


def test_request_fractional_sizes_parse_exactly(tmp_path):
    net, _ = example1()
    req = ChainRequest(0, 5, ["0.1", 2, "0.3"], [NodeSet.of(1, 2), NodeSet.of(3, 4)])
    path = tmp_path / "request.json"
    dump_json(request_to_json(req, net), path)
    back = request_from_json(load_json(path), net)
    assert back.sizes_micro == (100_000, 2_000_000, 300_000)


def test_request_from_json_errors():
    net, _ = example1()
    with pytest.raises(ValueError, match="missing"):
        request_from_json({"source": "s", "dest": "d", "sizes": [1]}, net)
    with pytest.raises(ValueError, match="unknown node"):
        request_from_json(
            {"source": "nope", "dest": "d", "sizes": [1], "placements": []}, net
        )
    with pytest.raises(ValueError, match="nonempty"):
        request_from_json(
            {"source": "s", "dest": "d", "sizes": [], "placements": []}, net
        )
    with pytest.raises(ValueError, match=r"placements\[0\]"):
        request_from_json(
            {
                "source": "s",
                "dest": "d",
                "sizes": [1, 1],
                "placements": [["v11", "ghost"]],
            },
            net,
        )


def test_placement_round_trip():
    net, _ = example1()
    placement = Placement([NodeSet.of(1), NodeSet.of(3, 4)])
    doc = rewire(placement_to_json(placement, net))
    assert doc == [["v11"], ["v21", "v22"]]
    assert placement_from_json(doc, net) == placement
    assert placement_from_json([[1], [3, 4]], net) == placement
    with pytest.raises(ValueError, match="array of stage arrays"):
        placement_from_json({"stages": []}, net)


def test_solve_result_document():
    net, req = example1()
    doc = rewire(solve_result_to_json(solve_greedy(net, req), net))
    assert doc["algorithm"] == "greedy"
    assert doc["delay"] == "2/1"
    assert doc["delay_decimal"] == 2
    assert doc["placement"] == [["v11", "v12"], ["v21", "v22"]]
    assert doc["per_round"] == ["1/1", "1/2", "1/2"]
    stats = doc["stats"]
    assert set(stats) == {"mincut_evals", "flow_calls", "dp_states", "greedy_iterations"}
    assert all(isinstance(v, int) for v in stats.values())
    assert "note" not in doc


def test_solve_result_document_infeasible():
    net = Network(3, [], ["s", "m", "d"])
    req = ChainRequest(0, 2, [1, 1], [NodeSet.of(1)])
    doc = rewire(solve_result_to_json(solve_no_redundancy(net, req), net))
    assert doc["delay"] == "infeasible"
    assert doc["delay_decimal"] is None
    assert doc["note"]


def test_certificate_document():
    net, req = example1()
    result = solve_greedy(net, req)
    cert = certify_placement(net, req, result.placement)
    doc = rewire(certificate_to_json(cert, net))
    assert doc["achieved"] is True
    assert len(doc["rounds"]) == 3
    first = doc["rounds"][0]
    assert first["h"] == 1 and first["achieved"] is True
    assert first["applicable"] is True
    assert first["attempts"] >= 1
    assert first["rate"] == "1/1"
    assert first["block_length"] == 1
    assert set(doc["rounds"][1]["target_ranks"]) == {"v21", "v22"}
    assert all(r == 2 for r in doc["rounds"][1]["target_ranks"].values())


def test_certificate_document_trivial_round():
    net, _ = example1()
    req = ChainRequest(0, 5, [1, 1, 1], [NodeSet.of(3, 4), NodeSet.of(3, 4)])
    cert = certify_placement(net, req, Placement([NodeSet.of(3, 4), NodeSet.of(3, 4)]))
    doc = rewire(certificate_to_json(cert, net))
    middle = doc["rounds"][1]
    assert middle["h"] == 0
    assert middle["rate"] is None
    assert middle["attempts"] == 0
    assert middle["achieved"] is True


def test_dump_and_load_json(tmp_path):
    net, _ = example1()
    path = tmp_path / "net.json"
    dump_json(network_to_json(net), path)
    text = path.read_text()
    assert text.endswith("}\n")
    loaded = load_json(path)
    assert_same_network(network_from_json(loaded), net)
