import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rcagraph.model import Attribute, Categorical, DistributionNumerical, Node, Numerical, SystemGraph, TaxonomyType
from rcagraph.similarity import sim_distribution
from rcagraph.weighting import (
    DegenerateMetricError,
    MetricDistribution,
    apply_auto_weights,
    attribute_weight,
    fit_distribution,
    load_catalog,
    save_catalog,
    to_distribution_attr,
)


def test_fit_two_points():
    d = fit_distribution([0, 10], "cpu")
    assert d.mu == 5
    assert d.sigma == pytest.approx(7.0711, abs=1e-3)
    assert d.sample_count == 2


def test_fit_sample_stdev():
    d = fit_distribution([2, 4, 4, 4, 5, 5, 7, 9], "cpu")
    assert d.mu == 5
    # sqrt(32 / 7), sample (n - 1) estimator
    assert d.sigma == pytest.approx(2.1381, abs=1e-3)


@pytest.mark.parametrize("samples", [[1, 1, 1], [3], []])
def test_fit_degenerate(samples):
    with pytest.raises(DegenerateMetricError, match="degenerate metric history"):
        fit_distribution(samples, "cpu")


def test_attribute_weight_formula():
    d = MetricDistribution("cpu", 10.0, 2.0, 50)
    assert attribute_weight(10.0, d) == 0
    assert attribute_weight(14.0, d) == 2
    assert attribute_weight(16.0, d) == 3


@given(st.floats(-1e3, 1e3), st.floats(0.01, 100), st.floats(0, 1e3), st.floats(0, 1e3))
def test_attribute_weight_symmetric_and_monotone(mu, sigma, x, y):
    d = MetricDistribution("m", mu, sigma, 10)
    assert attribute_weight(mu + x, d) == pytest.approx(attribute_weight(mu - x, d), rel=1e-9, abs=1e-9)
    lo, hi = sorted((x, y))
    assert attribute_weight(mu + lo, d) <= attribute_weight(mu + hi, d) + 1e-9


def _metric_node(nid, **values):
    attrs = [Attribute("type", TaxonomyType("Slave")), Attribute("image", Categorical("hadoop"))]
    attrs += [Attribute(k, Numerical(v, 0, 100)) for k, v in values.items()]
    return Node(nid, tuple(attrs))


DISTS = {"cpu": MetricDistribution("cpu", 20.0, 5.0, 100), "mem": MetricDistribution("mem", 50.0, 10.0, 100)}


def test_normalization_example():
    g = SystemGraph((Node("h", (Attribute("cpu", Numerical(35, 0, 100)), Attribute("mem", Numerical(50, 0, 100)))),))
    out = apply_auto_weights(g, DISTS, 0.05)
    w = {a.name: a.weight for a in out.nodes[0].attributes}
    assert w["cpu"] == pytest.approx(3 / 3.05, abs=1e-9)
    assert w["mem"] == pytest.approx(0.05 / 3.05, abs=1e-9)
    assert (round(w["cpu"], 4), round(w["mem"], 4)) == (0.9836, 0.0164)


def test_all_at_mean_equalized():
    g = SystemGraph((Node("h", (Attribute("cpu", Numerical(20, 0, 100)), Attribute("mem", Numerical(50, 0, 100)))),))
    out = apply_auto_weights(g, DISTS)
    assert [a.weight for a in out.nodes[0].attributes] == [0.5, 0.5]


def test_no_numerical_attributes_unchanged():
    g = SystemGraph((Node("sw", (Attribute("type", TaxonomyType("Switch"), 2.0),)),))
    assert apply_auto_weights(g, DISTS) is g
    with pytest.raises(ValueError):
        apply_auto_weights(g, DISTS, floor=0)


@given(
    st.lists(
        st.tuples(st.floats(0, 100), st.floats(0, 100), st.booleans()),
        min_size=1,
        max_size=6,
    )
)
def test_weights_sum_to_one(rows):
    nodes = []
    for i, (cpu, mem, as_dist) in enumerate(rows):
        node = _metric_node(f"n{i}", cpu=cpu, mem=mem)
        if as_dist:
            node = Node(
                node.id,
                tuple(
                    Attribute(a.name, to_distribution_attr(a.value, DISTS[a.name]))
                    if a.name in DISTS
                    else a
                    for a in node.attributes
                ),
            )
        nodes.append(node)
    out = apply_auto_weights(SystemGraph(tuple(nodes)), DISTS)
    for n in out.nodes:
        weights = [a.weight for a in n.attributes]
        assert all(w >= 0 for w in weights)
        assert abs(math.fsum(weights) - 1.0) <= 1e-9
        for a in n.attributes:
            if a.name in DISTS:
                raw = max(0.05, attribute_weight(a.value.value, DISTS[a.name]))
                others = [max(0.05, attribute_weight(b.value.value, DISTS[b.name])) if b.name in DISTS else 1.0
                          for b in n.attributes]  # fmt: skip
                assert a.weight == pytest.approx(raw / math.fsum(others), rel=1e-9)


def test_to_distribution_attr():
    d = MetricDistribution("cpu", 5.0, 1.0, 10)
    attr = to_distribution_attr(Numerical(5, 0, 10), d)
    assert attr == DistributionNumerical(5, 5, 1)
    assert sim_distribution(attr, attr) == 1.0
    lo = to_distribution_attr(Numerical(4, 0, 10), d)
    hi = to_distribution_attr(Numerical(6, 0, 10), d)
    assert sim_distribution(lo, hi) == pytest.approx(0.3173, abs=1e-3)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_standardized_values_compare_equally_across_metrics(z1, z2):
    a, b = MetricDistribution("cpu", 20.0, 5.0, 10), MetricDistribution("net", 300.0, 80.0, 10)
    s1 = sim_distribution(
        DistributionNumerical(a.mu + z1 * a.sigma, a.mu, a.sigma), DistributionNumerical(a.mu + z2 * a.sigma, a.mu, a.sigma)
    )
    s2 = sim_distribution(
        DistributionNumerical(b.mu + z1 * b.sigma, b.mu, b.sigma), DistributionNumerical(b.mu + z2 * b.sigma, b.mu, b.sigma)
    )
    assert abs(s1 - s2) <= 1e-9


def test_catalog_round_trip(tmp_path):
    save_catalog(DISTS, tmp_path / "d.json")
    assert load_catalog(tmp_path / "d.json") == DISTS
