"""
Two-mode affiliation matrix (provisions x judgments) and its one-mode
co-citation projection.
"""

import logging
import string
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import pandas as pd

from citenet.errors import DuplicateDocumentError, InputError, ParameterError
from citenet.models import JudgmentDoc, ProvisionId

logger = logging.getLogger(__name__)

Edge = Tuple[ProvisionId, ProvisionId, int]


class AffiliationMatrix:
    """
    Binary incidence matrix X with X[i, j] = 1 iff provision i is cited in
    judgment j. Rows are never all-zero; columns may be.
    """

    def __init__(self, provisions: Sequence[ProvisionId], judgments: Sequence[str], entries: np.ndarray):
        entries = np.asarray(entries, dtype=np.int8)
        if entries.size == 0:
            entries = entries.reshape(len(provisions), len(judgments))
        if entries.shape != (len(provisions), len(judgments)):
            raise InputError(f"matrix shape {entries.shape} does not match "
                             f"{len(provisions)} provisions x {len(judgments)} judgments")
        if len(set(provisions)) != len(provisions):
            raise InputError("duplicate provision rows")
        if len(set(judgments)) != len(judgments):
            raise DuplicateDocumentError(j for j in judgments if list(judgments).count(j) > 1)
        if not np.isin(entries, (0, 1)).all():
            raise InputError("affiliation entries must be 0 or 1")
        if len(provisions) and not entries.any(axis=1).all():
            raise InputError("every provision row needs at least one citation")

        self.provisions: Tuple[ProvisionId, ...] = tuple(provisions)
        self.judgments: Tuple[str, ...] = tuple(judgments)
        self.entries = entries.copy()
        self.entries.setflags(write=False)
        self._row_index = {p: i for i, p in enumerate(self.provisions)}

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    def row_of(self, provision: ProvisionId) -> int:
        return self._row_index[provision]

    def __contains__(self, provision: ProvisionId) -> bool:
        return provision in self._row_index

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            self.entries,
            index=pd.Index([p.display for p in self.provisions], name="provision"),
            columns=list(self.judgments),
        )

    def to_csv(self) -> str:
        """Provision rows, judgment columns, 0/1 cells"""
        return self.to_frame().to_csv(lineterminator="\n")

    def __eq__(self, other) -> bool:
        if not isinstance(other, AffiliationMatrix):
            return NotImplemented
        return (self.provisions == other.provisions and self.judgments == other.judgments
                and np.array_equal(self.entries, other.entries))

    def __repr__(self) -> str:
        return f"AffiliationMatrix({self.shape[0]}x{self.shape[1]})"


class CoCitationNetwork:
    """
    Weighted undirected one-mode network over provisions.

    Edges are stored once per unordered pair, oriented u < v in node order,
    with positive integer weights. Isolated nodes are allowed. Equality
    ignores node order.
    """

    def __init__(self, nodes: Sequence[ProvisionId], edges: Iterable[Edge] = ()):
        self.nodes: Tuple[ProvisionId, ...] = tuple(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise InputError("duplicate nodes in network")
        self._index = {p: i for i, p in enumerate(self.nodes)}

        weights: Dict[Tuple[int, int], int] = {}
        for u, v, weight in edges:
            if u not in self._index or v not in self._index:
                raise InputError(f"edge endpoint not in node list: {u} - {v}")
            i, j = self._index[u], self._index[v]
            if i == j:
                raise InputError(f"self-loop on {u}")
            if int(weight) < 1:
                raise InputError(f"edge {u} - {v} has weight {weight} < 1")
            key = (min(i, j), max(i, j))
            if key in weights:
                raise InputError(f"duplicate edge {u} - {v}")
            weights[key] = int(weight)

        self._weights = dict(sorted(weights.items()))
        self._adjacency: List[List[int]] = [[] for _ in self.nodes]
        for i, j in self._weights:
            self._adjacency[i].append(j)
            self._adjacency[j].append(i)
        for neighbors in self._adjacency:
            neighbors.sort()

    @property
    def edges(self) -> Tuple[Edge, ...]:
        """Edges in canonical order: by (index of u, index of v)"""
        return tuple((self.nodes[i], self.nodes[j], w) for (i, j), w in self._weights.items())

    @property
    def edge_count(self) -> int:
        return len(self._weights)

    def index_of(self, provision: ProvisionId) -> int:
        return self._index[provision]

    def __contains__(self, provision: ProvisionId) -> bool:
        return provision in self._index

    def __len__(self) -> int:
        return len(self.nodes)

    def weight(self, u: ProvisionId, v: ProvisionId) -> int:
        i, j = self._index[u], self._index[v]
        return self._weights.get((min(i, j), max(i, j)), 0)

    def neighbor_indices(self, index: int) -> List[int]:
        return self._adjacency[index]

    def neighbors(self, provision: ProvisionId) -> List[ProvisionId]:
        return [self.nodes[j] for j in self._adjacency[self._index[provision]]]

    def to_networkx(self) -> nx.Graph:
        """Nodes keyed by index in node order, edges added in canonical order"""
        graph = nx.Graph()
        for i, provision in enumerate(self.nodes):
            graph.add_node(
                i,
                statute=provision.statute,
                article=provision.article,
                label=provision.label or "",
            )
        for (i, j), w in self._weights.items():
            graph.add_edge(i, j, weight=w)
        return graph

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoCitationNetwork):
            return NotImplemented
        return set(self.nodes) == set(other.nodes) and self._pair_weights() == other._pair_weights()

    def _pair_weights(self) -> Dict[frozenset, int]:
        return {frozenset((u, v)): w for u, v, w in self.edges}

    def __repr__(self) -> str:
        return f"CoCitationNetwork(nodes={len(self.nodes)}, edges={self.edge_count})"


def build_affiliation(docs: Sequence[JudgmentDoc]) -> AffiliationMatrix:
    """
    Rows follow first appearance of provisions across docs, columns follow
    doc order. Judgments citing nothing become all-zero columns.
    """
    doc_ids = [doc.doc_id for doc in docs]
    duplicates = {d for d in doc_ids if doc_ids.count(d) > 1}
    if duplicates:
        raise DuplicateDocumentError(duplicates)

    rows: Dict[ProvisionId, int] = {}
    provisions: List[ProvisionId] = []
    for doc in docs:
        for provision in doc.citations:
            if provision not in rows:
                rows[provision] = len(provisions)
                provisions.append(provision)

    entries = np.zeros((len(provisions), len(docs)), dtype=np.int8)
    for column, doc in enumerate(docs):
        for provision in doc.citations:
            entries[rows[provision], column] = 1

    logger.info("Built %dx%d affiliation matrix", len(provisions), len(docs))
    return AffiliationMatrix(provisions, doc_ids, entries)


def project(matrix: AffiliationMatrix) -> CoCitationNetwork:
    """
    One-mode projection: weight(u, v) = number of judgments citing both,
    the off-diagonal of X @ X.T.
    """
    x = matrix.entries.astype(np.int64)
    co_citation = x @ x.T
    rows, cols = np.nonzero(np.triu(co_citation, k=1))
    provisions = matrix.provisions
    edges = [(provisions[i], provisions[j], int(co_citation[i, j])) for i, j in zip(rows, cols)]
    return CoCitationNetwork(provisions, edges)


def dichotomize(net: CoCitationNetwork, min_weight: int) -> CoCitationNetwork:
    """Keep edges with weight >= min_weight, all at weight 1; nodes unchanged"""
    if min_weight < 1:
        raise ParameterError(f"min_weight must be >= 1, got {min_weight}")
    edges = [(u, v, 1) for u, v, w in net.edges if w >= min_weight]
    return CoCitationNetwork(net.nodes, edges)


def assign_labels(net: CoCitationNetwork) -> CoCitationNetwork:
    """
    Give every node a unique single-letter label. Labels already carried by
    provisions are kept (first holder wins on a clash); the rest take unused
    letters in node order. Past 26 nodes the remainder stay unlabeled.
    """
    taken = set()
    pinned: List[Optional[str]] = []
    for provision in net.nodes:
        label = provision.label if provision.label not in taken else None
        if provision.label is not None and label is None:
            logger.warning("Label %s of %s already in use; reassigning", provision.label, provision.canonical_name)
        if label is not None:
            taken.add(label)
        pinned.append(label)

    pool = (letter for letter in string.ascii_uppercase if letter not in taken)
    labelled = []
    exhausted = False
    for provision, label in zip(net.nodes, pinned):
        if label is None:
            label = next(pool, None)
            if label is None and not exhausted:
                logger.warning("More than 26 provisions; remaining nodes keep canonical names")
                exhausted = True
        labelled.append(provision.with_label(label))

    mapping = dict(zip(net.nodes, labelled))
    return CoCitationNetwork(labelled, [(mapping[u], mapping[v], w) for u, v, w in net.edges])


def relabel_matrix(matrix: AffiliationMatrix, net: CoCitationNetwork) -> AffiliationMatrix:
    """Carry the network's labels back onto the matrix rows"""
    labelled = {p: p for p in net.nodes}
    rows = [labelled.get(p, p) for p in matrix.provisions]
    return AffiliationMatrix(rows, matrix.judgments, matrix.entries)
