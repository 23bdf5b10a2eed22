import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcagraph.ingestion import (
    LOG_CONTEXT,
    LOG_EVENT,
    IngestionError,
    MetricSample,
    NodeSpec,
    TopologySpec,
    build_graph,
    load_node_logs,
    load_topology,
    read_metrics_csv,
    write_metrics_csv,
)
from rcagraph.logs import EmbeddingModel, LogEntry, Severity, format_log_line
from rcagraph.model import DistributionNumerical, Numerical, dump_json, equipment_taxonomy, validate_graph
from rcagraph.weighting import MetricDistribution

T0 = 1_600_000_000.0
MODEL = EmbeddingModel(2, {"disk": (1.0, 0.0), "error": (0.0, 1.0), "heartbeat": (1.0, 1.0)})
BOUNDS = {"cpu": (0.0, 100.0), "mem": (0.0, 100.0)}


def spec():
    return TopologySpec(
        "hadoop",
        (
            NodeSpec("h1", "Master", {"image": "namenode"}, BOUNDS, "h1.log"),
            NodeSpec("h2", "Slave", {"image": "datanode"}, BOUNDS, "h2.log"),
            NodeSpec("sw", "Switch"),
        ),
        (("h1", "sw"), ("h2", "sw")),
    )


def metrics(shift=0.0):
    out = []
    for node in ("h1", "h2"):
        for k in range(30):
            t = T0 - 140 + 5 * k + shift
            out.append(MetricSample(node, "cpu", t, 10.0 + k))
            out.append(MetricSample(node, "mem", t, 42.5))
    return out


def logs(shift=0.0):
    return {
        "h1": [LogEntry(T0 - 50 + shift, Severity.INFO, "heartbeat ok"), LogEntry(T0 + 2 + shift, Severity.ERROR, "disk error")],
        "h2": [LogEntry(T0 - 5 + shift, Severity.WARN, "heartbeat late"), LogEntry(T0 + 20 + shift, Severity.INFO, "disk")],
    }


def test_full_build():
    g = build_graph(spec(), metrics(), logs(), T0, MODEL, taxonomy=equipment_taxonomy())
    assert validate_graph(g) == []
    assert [n.id for n in g.nodes] == ["h1", "h2", "sw"]
    assert len(g.edges) == 2
    for host in ("h1", "h2"):
        names = [a.name for a in g.node(host).attributes]
        assert names == ["type", "image", "cpu", "mem", LOG_CONTEXT, LOG_EVENT]
    assert [a.name for a in g.node("sw").attributes] == ["type"]
    h1 = g.node("h1")
    assert h1.get(LOG_EVENT).value.components == (0.5, 0.5)
    # h2: WARN at T0-5 opens the windows; event window holds only the WARN entry
    assert g.node("h2").get(LOG_EVENT).value.components == (1.0, 1.0)
    assert g.node("h2").get(LOG_CONTEXT).value.components == (1.0, 0.5)
    # mean over samples in [T0-120, T0]: k = 4..28
    assert h1.get("cpu").value.value == pytest.approx(10 + (4 + 28) / 2)
    assert g.metadata["system"] == "hadoop"


def test_constant_metric_exact():
    g = build_graph(spec(), metrics(), logs(), T0, MODEL)
    assert g.node("h1").get("mem").value == Numerical(42.5, 0.0, 100.0)


def test_empty_metric_stream_warns():
    warnings = []
    g = build_graph(spec(), [], logs(), T0, MODEL, warnings=warnings)
    assert validate_graph(g) == []
    assert [a.name for a in g.node("h1").attributes] == ["type", "image", LOG_CONTEXT, LOG_EVENT]
    assert sum("no samples" in w for w in warnings) == 4


def test_no_warning_entries_gives_zero_vectors():
    warnings = []
    quiet = {"h1": [LogEntry(T0, Severity.INFO, "disk")]}
    g = build_graph(spec(), metrics(), quiet, T0, MODEL, warnings=warnings)
    assert g.node("h1").get(LOG_CONTEXT).value.components == (0.0, 0.0)
    assert any("h1" in w and "WARN" in w for w in warnings)


def test_auto_weighted_build():
    dists = {"cpu": MetricDistribution("cpu", 20.0, 4.0, 100), "mem": MetricDistribution("mem", 40.0, 5.0, 100)}
    g = build_graph(spec(), metrics(), logs(), T0, MODEL, dists=dists)
    for n in g.nodes:
        assert math.fsum(a.weight for a in n.attributes) == pytest.approx(1.0, abs=1e-9)
    cpu = g.node("h1").get("cpu")
    assert isinstance(cpu.value, DistributionNumerical)
    assert (cpu.value.mu, cpu.value.sigma) == (20.0, 4.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-1e6, 1e6).map(round))
def test_time_translation_invariance(delta):
    a = build_graph(spec(), metrics(), logs(), T0, MODEL)
    b = build_graph(spec(), metrics(delta), logs(delta), T0 + delta, MODEL)
    assert a.nodes == b.nodes
    assert a.edges == b.edges


def test_topology_errors():
    with pytest.raises(IngestionError, match="unknown node"):
        build_graph(TopologySpec("x", (NodeSpec("a", "Master"),), (("a", "b"),)), [], {}, T0, MODEL)
    with pytest.raises(IngestionError, match="duplicate"):
        TopologySpec("x", (NodeSpec("a", "Master"), NodeSpec("a", "Slave"))).check()
    with pytest.raises(IngestionError, match="not in taxonomy"):
        TopologySpec("x", (NodeSpec("a", "Router"),)).check(equipment_taxonomy())


def test_metrics_csv(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("timestamp,node,metric,value\n1600000000,h1,cpu,1.5\n2020-09-13T12:26:45Z,h1,cpu,2\n1600000010,h2,mem,3\n")
    out = read_metrics_csv(p)
    assert len(out) == 3
    assert out[1].timestamp == T0 + 5
    p.write_text("timestamp,node,metric,value\n")
    assert read_metrics_csv(p) == []
    p.write_text("timestamp,node,metric,value\n1600000000,h1,cpu,1.5\n1600000005,h1,cpu,high\n")
    with pytest.raises(IngestionError, match="line 3"):
        read_metrics_csv(p)
    p.write_text("1600000000,h1,cpu,1.5\n")
    with pytest.raises(IngestionError, match="header"):
        read_metrics_csv(p)
    with pytest.raises(IngestionError):
        read_metrics_csv(tmp_path / "missing.csv")
    write_metrics_csv(metrics(), p)
    assert read_metrics_csv(p) == metrics()


def test_files_round_trip(tmp_path):
    dump_json(spec().to_dict(), tmp_path / "topo.json")
    topo = load_topology(tmp_path / "topo.json")
    assert topo == spec()
    for node, entries in logs().items():
        (tmp_path / f"{node}.log").write_text("".join(format_log_line(e) + "\n" for e in entries))
    assert load_node_logs(topo, tmp_path) == logs()
