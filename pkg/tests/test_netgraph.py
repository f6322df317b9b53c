import math

import pytest

from imro.netgraph import (GraphError, SocialGraph, fixture_path, generate_random_graph,
                           load_edge_list, load_graph, save_edge_list)


def write(tmp_path, text):
    p = tmp_path / "g.edges"
    p.write_text(text)
    return p


def test_path_graph(tmp_path):
    g = load_edge_list(write(tmp_path, "0 1\n1 2"))
    assert g.node_count == 3
    assert g.edge_count == 2
    assert g.degrees == [1, 2, 1]


def test_self_loop_names_line(tmp_path):
    with pytest.raises(GraphError, match="self-loop at line 1"):
        load_edge_list(write(tmp_path, "0 0\n"))


def test_parse_error_names_line(tmp_path):
    with pytest.raises(GraphError, match="line 2"):
        load_edge_list(write(tmp_path, "0 1\n1 x\n"))


def test_duplicate_rejected(tmp_path):
    with pytest.raises(GraphError, match="duplicate"):
        load_edge_list(write(tmp_path, "0 1\n1 0\n"))


def test_comments_skipped(tmp_path):
    g = load_edge_list(write(tmp_path, "# header\n0 1\n\n# more\n2 1\n"))
    assert g.sorted_edges() == [(0, 1), (1, 2)]


def test_synth1_fixture():
    lines = [l for l in open(fixture_path("synth1")) if l.strip() and not l.startswith("#")]
    assert len(lines) == 10
    g = load_graph("synth1")
    assert g.node_count == 10
    assert g.degree(0) == 4
    assert g.degrees == [4, 1, 1, 1, 2, 3, 2, 2, 2, 2]


def test_repo_fixture_matches_packaged():
    from pathlib import Path
    repo = Path(__file__).resolve().parents[1] / "fixtures" / "synth1.edges"
    assert repo.read_text() == open(fixture_path("synth1")).read()


def test_empty_and_complete():
    assert generate_random_graph(5, 0.0, 1).edge_count == 0
    g = generate_random_graph(4, 1.0, 7)
    assert g.edge_count == 6
    assert g.degrees == [3, 3, 3, 3]


def test_edge_count_binomial():
    n, p = 2000, 0.002
    g = generate_random_graph(n, p, 42)
    pairs = math.comb(n, 2)
    mean, sd = pairs * p, math.sqrt(pairs * p * (1 - p))
    assert abs(g.edge_count - mean) <= 4 * sd


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_bad_probability(p):
    with pytest.raises(GraphError):
        generate_random_graph(5, p, 0)


def test_deterministic():
    a = generate_random_graph(300, 0.05, 11)
    b = generate_random_graph(300, 0.05, 11)
    c = generate_random_graph(300, 0.05, 12)
    assert a.sorted_edges() == b.sorted_edges()
    assert a.sorted_edges() != c.sorted_edges()


@pytest.mark.parametrize("seed", range(5))
def test_degree_sum_and_roundtrip(tmp_path, seed):
    g = generate_random_graph(60, 0.08, seed)
    assert sum(g.degrees) == 2 * g.edge_count
    for i in range(g.node_count):
        assert g.degree(i) == sum(1 for e in g.edges if i in e)
    path = tmp_path / "rt.edges"
    save_edge_list(g, path)
    h = load_edge_list(path)
    # trailing isolated nodes are not representable in an edge list
    assert h.sorted_edges() == g.sorted_edges()
    assert h.node_count == 1 + max(max(e) for e in g.edges)


def test_direct_construction_rejects_loops():
    with pytest.raises(GraphError):
        SocialGraph.from_pairs(3, [(1, 1)])
    with pytest.raises(GraphError):
        SocialGraph.from_pairs(3, [(0, 1), (1, 0)])


def test_standins():
    g = load_graph("synth2")
    assert g.node_count == 2000
    assert 3.5 < 2 * g.edge_count / g.node_count < 4.5
