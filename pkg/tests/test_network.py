import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from citenet.errors import DuplicateDocumentError, InputError, ParameterError
from citenet.models import JudgmentDoc, ProvisionId
from citenet.services import metrics, network
from citenet.services.network import AffiliationMatrix, CoCitationNetwork

import oracles
from factories import make_doc, make_net, prov


def edge_map(net):
    return {(u.display, v.display): w for u, v, w in net.edges}


# build_affiliation

def test_affiliation_indicator():
    matrix = network.build_affiliation([make_doc("J1", "AB"), make_doc("J2", "BC")])
    assert [p.display for p in matrix.provisions] == ["A", "B", "C"]
    assert matrix.judgments == ("J1", "J2")
    assert matrix.entries.tolist() == [[1, 0], [1, 1], [0, 1]]


def test_empty_doc_list():
    matrix = network.build_affiliation([])
    assert matrix.shape == (0, 0)
    assert network.project(matrix).edge_count == 0


def test_citationless_judgment_is_a_zero_column():
    matrix = network.build_affiliation([make_doc("J1", "AB"), make_doc("J2")])
    assert matrix.shape == (2, 2)
    assert matrix.entries[:, 1].tolist() == [0, 0]


def test_duplicate_doc_ids_rejected():
    with pytest.raises(DuplicateDocumentError):
        network.build_affiliation([make_doc("J1", "A"), make_doc("J1", "B")])


def test_reference_matrix_shape(reference_matrix):
    assert reference_matrix.shape == (18, 48)
    assert "BJ-049" not in reference_matrix.judgments


def test_matrix_rejects_zero_rows():
    with pytest.raises(InputError):
        AffiliationMatrix([prov("A"), prov("B")], ["J1"], np.array([[1], [0]]))


def test_matrix_rejects_non_binary_entries():
    with pytest.raises(InputError):
        AffiliationMatrix([prov("A")], ["J1"], np.array([[2]]))


def test_matrix_entries_are_read_only(reference_matrix):
    with pytest.raises(ValueError):
        reference_matrix.entries[0, 0] = 0


def test_matrix_csv_layout():
    matrix = network.build_affiliation([make_doc("J1", "AB"), make_doc("J2", "BC")])
    assert matrix.to_csv() == "provision,J1,J2\nA,1,0\nB,1,1\nC,0,1\n"


# project

def test_projection_of_two_judgments():
    net = network.project(network.build_affiliation([make_doc("J1", "AB"), make_doc("J2", "BC")]))
    assert edge_map(net) == {("A", "B"): 1, ("B", "C"): 1}


def test_single_judgment_makes_a_triangle():
    net = network.project(network.build_affiliation([make_doc("J1", "ABC")]))
    assert edge_map(net) == {("A", "B"): 1, ("A", "C"): 1, ("B", "C"): 1}


def test_reference_projection(reference_net):
    assert len(reference_net) == 18
    assert reference_net.edge_count == 46
    by_label = {p.label: p for p in reference_net.nodes}
    assert reference_net.weight(by_label["C"], by_label["G"]) == 39
    assert reference_net.weight(by_label["A"], by_label["C"]) == 35
    assert reference_net.weight(by_label["Q"], by_label["H"]) == 1
    assert by_label["C"].canonical_name == "Contract Law Art. 60"


@st.composite
def binary_matrices(draw, max_rows=20, max_cols=30):
    rows = draw(st.integers(min_value=1, max_value=max_rows))
    cols = draw(st.integers(min_value=1, max_value=max_cols))
    cells = draw(st.lists(st.booleans(), min_size=rows * cols, max_size=rows * cols))
    return [[cells[i * cols + j] for j in range(cols)] for i in range(rows)]


def docs_from_matrix(cells):
    provisions = [ProvisionId(statute="Statute", article=str(i)) for i in range(len(cells))]
    return [
        JudgmentDoc(doc_id=f"J{j}", decision_date="2023-01-01",
                    citations=tuple(provisions[i] for i in range(len(cells)) if cells[i][j]))
        for j in range(len(cells[0]))
    ]


@settings(max_examples=100, deadline=None)
@given(binary_matrices())
def test_projection_matches_pair_enumeration(cells):
    docs = docs_from_matrix(cells)
    net = network.project(network.build_affiliation(docs))
    assert {frozenset((u, v)): w for u, v, w in net.edges} == oracles.pair_counts(docs)

    # each judgment citing k provisions adds k(k-1)/2 to the total weight
    expected_total = sum(len(d.citations) * (len(d.citations) - 1) // 2 for d in docs)
    assert sum(w for _, _, w in net.edges) == expected_total


@settings(max_examples=100, deadline=None)
@given(binary_matrices(max_rows=10, max_cols=10))
def test_handshake_lemma(cells):
    net = network.project(network.build_affiliation(docs_from_matrix(cells)))
    assert sum(metrics.degree_centrality(net).values()) == 2 * net.edge_count


def test_edges_are_stored_in_node_order():
    net = make_net("ABC", [("C", "A", 2), ("B", "A", 1)])
    assert [(u.display, v.display, w) for u, v, w in net.edges] == [("A", "B", 1), ("A", "C", 2)]
    assert net.weight(prov("C"), prov("A")) == net.weight(prov("A"), prov("C")) == 2


@pytest.mark.parametrize("edges", [
    [("A", "A", 1)],
    [("A", "B", 0)],
    [("A", "B", 1), ("B", "A", 2)],
])
def test_network_invariants(edges):
    with pytest.raises(InputError):
        make_net("AB", edges)


def test_edge_endpoint_must_be_a_node():
    with pytest.raises(InputError):
        CoCitationNetwork([prov("A")], [(prov("A"), prov("Z"), 1)])


# dichotomize

def test_dichotomize_threshold():
    net = network.dichotomize(make_net("ABC", [("A", "B", 3), ("B", "C", 1)]), 2)
    assert edge_map(net) == {("A", "B"): 1}
    assert [p.display for p in net.nodes] == ["A", "B", "C"]
    assert net.neighbors(prov("C")) == []


def test_dichotomize_at_one_keeps_every_edge(reference_net):
    binary = network.dichotomize(reference_net, 1)
    assert binary.edge_count == reference_net.edge_count
    assert {w for _, _, w in binary.edges} == {1}
    assert metrics.degree_centrality(binary) == metrics.degree_centrality(reference_net)


def test_dichotomize_empty_network():
    assert network.dichotomize(CoCitationNetwork([]), 1) == CoCitationNetwork([])


def test_dichotomize_rejects_zero():
    with pytest.raises(ParameterError):
        network.dichotomize(make_net("AB", [("A", "B", 1)]), 0)


# labels

def test_assign_labels_fills_in_node_order():
    nodes = [ProvisionId(statute="Civil Code", article="6"),
             ProvisionId(statute="Contract Law", article="60", label="A"),
             ProvisionId(statute="Contract Law", article="107")]
    net = network.assign_labels(CoCitationNetwork(nodes, [(nodes[0], nodes[1], 1)]))
    assert [p.label for p in net.nodes] == ["B", "A", "C"]
    assert net.edges[0][0].label == "B"


def test_assign_labels_runs_out_after_26():
    nodes = [ProvisionId(statute="Civil Code", article=str(i)) for i in range(28)]
    net = network.assign_labels(CoCitationNetwork(nodes))
    assert [p.label for p in net.nodes[:26]] == [chr(ord("A") + i) for i in range(26)]
    assert net.nodes[26].label is None
    assert net.nodes[27].display == "Civil Code Art. 27"


def test_pinned_labels_survive(reference_net):
    assert [p.label for p in reference_net.nodes] == list("ACGELNRIBOPFJKQMDH")


def test_relabel_matrix_carries_labels():
    nodes = [ProvisionId(statute="Civil Code", article="6"), ProvisionId(statute="Civil Code", article="7")]
    matrix = network.build_affiliation([JudgmentDoc(doc_id="J1", decision_date="2023-01-01", citations=nodes)])
    net = network.assign_labels(network.project(matrix))
    assert [p.display for p in network.relabel_matrix(matrix, net).provisions] == ["A", "B"]


def test_networkx_view_keeps_node_and_edge_order():
    net = make_net("CAB", [("B", "C", 2), ("A", "C", 1)])
    graph = net.to_networkx()
    assert list(graph.nodes) == [0, 1, 2]
    assert graph.nodes[0]["label"] == "C"
    assert list(graph.edges(data="weight")) == [(0, 1, 1), (0, 2, 2)]
