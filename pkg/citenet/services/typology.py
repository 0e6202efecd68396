"""
Case typology on top of the co-citation network: structural outlier
components, citation-profile clustering into batch and complex cases,
reference-case retrieval, core paths and deviation alerts.
"""

import logging
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np

from citenet.config.settings import settings
from citenet.errors import ParameterError, UnknownProvisionError
from citenet.models import (CaseCluster, ClusterKind, ComponentReport, CoreCriterion, CorePath,
                            DeviationAlert, JudgmentDoc, ProvisionId)
from citenet.services.network import AffiliationMatrix, CoCitationNetwork

logger = logging.getLogger(__name__)


def _ordered_components(graph: nx.Graph) -> List[List[int]]:
    """Components as sorted index lists: largest first, then lowest index"""
    components = [sorted(c) for c in nx.connected_components(graph)]
    components.sort(key=lambda c: (-len(c), c[0]))
    return components


def connected_components(net: CoCitationNetwork, docs: Optional[Sequence[JudgmentDoc]] = None) -> ComponentReport:
    """
    Partition provisions into connected components. When more than one
    exists, every component but the largest is flagged as an outlier.
    """
    components = [tuple(net.nodes[i] for i in c) for c in _ordered_components(net.to_networkx())]
    outliers = list(range(1, len(components))) if len(components) > 1 else []

    contributing: Dict[int, Tuple[str, ...]] = {}
    if docs is not None:
        membership = {p: index for index, component in enumerate(components) for p in component}
        grouped: Dict[int, List[str]] = {index: [] for index in range(len(components))}
        for doc in docs:
            homes = {membership.get(p) for p in doc.citations}
            if len(homes) == 1 and None not in homes:
                grouped[homes.pop()].append(doc.doc_id)
        contributing = {index: tuple(ids) for index, ids in grouped.items()}

    for index in outliers:
        logger.info("Outlier component %d: %s", index, ", ".join(p.display for p in components[index]))
    return ComponentReport(components=components, outliers=outliers, contributing_judgments=contributing)


def _component_rows(matrix: AffiliationMatrix, component: Iterable[ProvisionId]) -> Set[int]:
    component = list(component)
    if not component:
        raise ParameterError("component to exclude is empty")
    unknown = [p.display for p in component if p not in matrix]
    if unknown:
        raise UnknownProvisionError(unknown)
    return {matrix.row_of(p) for p in component}


def component_judgments(matrix: AffiliationMatrix, component: Iterable[ProvisionId]) -> List[str]:
    """Judgments whose (nonempty) citations lie entirely within the component"""
    rows = _component_rows(matrix, component)
    outside = np.ones(matrix.shape[0], dtype=bool)
    outside[list(rows)] = False

    cited = matrix.entries.any(axis=0)
    cites_outside = matrix.entries[outside].any(axis=0) if outside.any() else np.zeros(matrix.shape[1], dtype=bool)
    return [matrix.judgments[j] for j in np.flatnonzero(cited & ~cites_outside)]


def exclude_component(matrix: AffiliationMatrix, component: Iterable[ProvisionId]) -> AffiliationMatrix:
    """
    Drop the judgments confined to the component, then every row left
    without citations. Component provisions still cited by a surviving
    judgment keep their rows.
    """
    component = list(component)
    dropped = set(component_judgments(matrix, component))

    keep_cols = [j for j, doc_id in enumerate(matrix.judgments) if doc_id not in dropped]
    entries = matrix.entries[:, keep_cols]
    keep_rows = [i for i in range(matrix.shape[0]) if entries[i].any()]

    logger.info("Excluded %d judgment(s) and %d provision row(s)",
                len(dropped), matrix.shape[0] - len(keep_rows))
    return AffiliationMatrix(
        [matrix.provisions[i] for i in keep_rows],
        [matrix.judgments[j] for j in keep_cols],
        entries[keep_rows, :],
    )


def case_similarity(a: JudgmentDoc, b: JudgmentDoc) -> float:
    """Jaccard index of the two citation sets"""
    cites_a, cites_b = a.citation_set, b.citation_set
    if not cites_a and not cites_b:
        return 1.0
    if not cites_a or not cites_b:
        return 0.0
    return len(cites_a & cites_b) / len(cites_a | cites_b)


def _representative(members: Sequence[JudgmentDoc], threshold: float) -> Tuple[ProvisionId, ...]:
    """Provisions cited by at least `threshold` of the members, first-seen order"""
    counts: Dict[ProvisionId, int] = {}
    for doc in members:
        for provision in doc.citations:
            counts[provision] = counts.get(provision, 0) + 1
    return tuple(p for p, count in counts.items() if count / len(members) >= threshold)


def cluster_cases(docs: Sequence[JudgmentDoc], threshold: float, batch_min: Optional[int] = None) -> List[CaseCluster]:
    """
    Connected components of the similarity graph (edge iff Jaccard >=
    threshold). Clusters of at least `batch_min` judgments are batch cases,
    the rest complex cases.
    """
    if not 0.0 < threshold <= 1.0:
        raise ParameterError(f"threshold must be in (0, 1], got {threshold}")
    if batch_min is None:
        batch_min = settings.BATCH_MIN
    if batch_min < 2:
        raise ParameterError(f"batch_min must be >= 2, got {batch_min}")

    graph = nx.Graph()
    graph.add_nodes_from(range(len(docs)))
    for i, j in combinations(range(len(docs)), 2):
        if case_similarity(docs[i], docs[j]) >= threshold:
            graph.add_edge(i, j)

    clusters = []
    for component in sorted(nx.connected_components(graph), key=min):
        members = [docs[i] for i in sorted(component)]
        kind = ClusterKind.BATCH if len(members) >= batch_min else ClusterKind.COMPLEX
        clusters.append(CaseCluster(
            members=tuple(doc.doc_id for doc in members),
            representative_citations=_representative(members, threshold),
            kind=kind,
        ))

    batch = sum(1 for c in clusters if c.kind == ClusterKind.BATCH)
    logger.info("Clustered %d judgments into %d batch and %d complex cluster(s)",
                len(docs), batch, len(clusters) - batch)
    return clusters


def retrieve_similar(query: JudgmentDoc, corpus: Sequence[JudgmentDoc], k: int) -> List[Tuple[str, float]]:
    """Top-k reference cases by Jaccard score; ties go to the lower doc_id"""
    if k < 1:
        raise ParameterError(f"k must be a positive integer, got {k}")
    if not query.citations:
        raise ParameterError(f"query {query.doc_id} has no citations")

    scored = [(doc.doc_id, case_similarity(query, doc)) for doc in corpus if doc.doc_id != query.doc_id]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def core_path(net: CoCitationNetwork, criterion: Union[CoreCriterion, str]) -> CorePath:
    """
    Strongest co-citation ties: every edge at or above min_weight, or the
    k heaviest edges with canonical edge order breaking ties.
    """
    if isinstance(criterion, str):
        try:
            criterion = CoreCriterion.parse(criterion)
        except ValueError as e:
            raise ParameterError(str(e)) from e

    if criterion.min_weight is not None:
        edges = [edge for edge in net.edges if edge[2] >= criterion.min_weight]
    else:
        ranked = sorted(enumerate(net.edges), key=lambda item: (-item[1][2], item[0]))
        edges = [edge for _, edge in ranked[:criterion.top_k]]
    return CorePath(edges=tuple(edges), criterion=criterion)


def deviation_alerts(docs: Sequence[JudgmentDoc], clusters: Sequence[CaseCluster], core: CorePath) -> List[DeviationAlert]:
    """
    For each judgment in a batch cluster, report the core pairs its cluster
    is expected to cite but the judgment does not cite in full.
    """
    if not core.edges:
        raise ParameterError("core path is empty")

    by_id = {doc.doc_id: doc for doc in docs}
    alerts = []
    for cluster in clusters:
        if cluster.kind != ClusterKind.BATCH:
            continue
        representative = set(cluster.representative_citations)
        expected = [(u, v) for u, v in core.pairs() if u in representative and v in representative]
        if not expected:
            continue

        for doc_id in cluster.members:
            doc = by_id.get(doc_id)
            if doc is None:
                logger.warning("Cluster member %s not found among documents", doc_id)
                continue
            cited = doc.citation_set
            missing = [(u, v) for u, v in expected if not (u in cited and v in cited)]
            if missing:
                alerts.append(DeviationAlert(
                    doc_id=doc_id,
                    missing_core_pairs=tuple(missing),
                    severity=len(missing) / len(expected),
                ))

    logger.info("Raised %d deviation alert(s)", len(alerts))
    return alerts
