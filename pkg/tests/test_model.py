import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rcagraph.model import (
    Attribute,
    Categorical,
    DistributionNumerical,
    Edge,
    GraphError,
    Node,
    Numerical,
    SystemGraph,
    Taxonomy,
    TaxonomyError,
    TaxonomyType,
    Vector,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    lowest_common_ancestor,
    save_graph,
    taxonomy_depth,
    validate_graph,
)


def _node(nid, **attrs):
    return Node(nid, tuple(Attribute(k, v) for k, v in attrs.items()))


def test_dangling_edge_reported():
    g = SystemGraph((_node("n1"),), (Edge("n1", "n9"),))
    report = validate_graph(g)
    assert [v.kind for v in report] == ["dangling-edge"]
    assert "n9" in report[0].detail


def test_single_node_is_valid():
    assert validate_graph(SystemGraph((_node("host-1"),))) == []


def test_duplicate_node_id():
    g = SystemGraph((_node("host-1"), _node("host-1")))
    assert [v.kind for v in validate_graph(g)] == ["duplicate-node-id"]


def test_other_violations():
    g = SystemGraph(
        (Node("a", (Attribute("x", Categorical("1")), Attribute("x", Categorical("2")))), _node("b")),
        (Edge("a", "a"), Edge("a", "b"), Edge("b", "a"), Edge("a", "b", -1.0)),
    )
    kinds = [v.kind for v in validate_graph(g)]
    assert kinds == ["duplicate-attribute", "self-loop", "duplicate-edge", "duplicate-edge", "negative-weight"]
    assert validate_graph(SystemGraph(())) [0].kind == "empty-graph"
    with pytest.raises(GraphError):
        g.checked()


@given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=6), st.lists(st.tuples(st.sampled_from("abcdef"), st.sampled_from("abcdef")), max_size=6))
def test_valid_report_means_resolvable(node_ids, edges):
    g = SystemGraph(tuple(_node(i) for i in node_ids), tuple(Edge(a, b) for a, b in edges))
    if not validate_graph(g):
        ids = [n.id for n in g.nodes]
        assert len(set(ids)) == len(ids)
        assert all(e.source in ids and e.target in ids for e in g.edges)


def test_attribute_value_invariants():
    with pytest.raises(ValueError):
        Numerical(1, 5, 5)
    with pytest.raises(ValueError):
        Vector(())
    with pytest.raises(ValueError):
        Vector((float("nan"),))
    with pytest.raises(ValueError):
        DistributionNumerical(0, 0, 0)
    assert Numerical(12, 0, 10).value == 12  # excursions allowed


def test_taxonomy_depth_and_lca(taxonomy):
    assert taxonomy_depth(taxonomy, "Equipment") == 1
    assert taxonomy_depth(taxonomy, "Server") == 2
    assert taxonomy_depth(taxonomy, "Master") == 3
    assert lowest_common_ancestor(taxonomy, "Master", "Slave") == "Server"
    assert lowest_common_ancestor(taxonomy, "Master", "Master") == "Master"
    assert lowest_common_ancestor(taxonomy, "Master", "Switch") == "Equipment"


def test_unknown_label(taxonomy):
    with pytest.raises(TaxonomyError, match="label not in taxonomy"):
        taxonomy_depth(taxonomy, "Router")
    with pytest.raises(TaxonomyError):
        lowest_common_ancestor(taxonomy, "Master", "Router")


def test_taxonomy_rejects_non_tree():
    with pytest.raises(ValueError):
        Taxonomy("r", {"r": ["a", "b"], "a": ["c"], "b": ["c"]})
    with pytest.raises(ValueError):
        Taxonomy("r", {"r": ["a"], "x": ["y"]})


def test_taxonomy_properties(taxonomy):
    for x in taxonomy.labels:
        assert lowest_common_ancestor(taxonomy, x, x) == x
        chain = taxonomy.ancestors(x)
        depths = [taxonomy.depth(c) for c in reversed(chain)]
        assert depths == list(range(1, len(chain) + 1))


def test_json_round_trip(tmp_path):
    g = SystemGraph(
        (
            Node(
                "h1",
                (
                    Attribute("cpu", Numerical(3.5, 0, 10), 0.5),
                    Attribute("log_event", Vector((0.1, -0.2))),
                    Attribute("image", Categorical("haproxy")),
                    Attribute("type", TaxonomyType("Master")),
                    Attribute("mem", DistributionNumerical(4, 5, 2), 2.0),
                ),
                1.5,
            ),
            Node("sw"),
        ),
        (Edge("h1", "sw", 0.7),),
        {"system": "hadoop", "captured_at": "1600000000"},
    )
    path = tmp_path / "g.json"
    save_graph(g, path)
    assert load_graph(path) == g
    data = json.loads(path.read_text())
    assert set(data) == {"metadata", "nodes", "edges"}
    assert data["edges"] == [{"from": "h1", "to": "sw", "weight": 0.7}]
    assert [a["type"] for a in data["nodes"][0]["attributes"]] == [
        "numerical", "vector", "categorical", "taxonomy", "distribution",
    ]  # fmt: skip
    assert graph_from_dict(graph_to_dict(g)) == g


def test_taxonomy_file(tmp_path, taxonomy):
    p = tmp_path / "tax.json"
    p.write_text(json.dumps(taxonomy.to_dict()))
    assert Taxonomy.load(p).labels == taxonomy.labels
