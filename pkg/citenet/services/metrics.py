"""
Individual-level (degree, betweenness) and network-level (size, density)
indicators of a co-citation network.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from citenet.config.settings import settings
from citenet.models import NetworkMetrics, NodeMetrics, ProvisionId
from citenet.services.network import CoCitationNetwork

logger = logging.getLogger(__name__)

SPARSE = "sparse"
DENSE = "dense"


def degree_centrality(net: CoCitationNetwork) -> Dict[ProvisionId, int]:
    """Number of distinct neighbors; weights are ignored"""
    return {p: len(net.neighbor_indices(i)) for i, p in enumerate(net.nodes)}


def betweenness_centrality(net: CoCitationNetwork) -> Dict[ProvisionId, float]:
    """
    Non-normalized betweenness over unordered pairs of the unweighted graph.
    Unreachable pairs contribute nothing.
    """
    scores = nx.betweenness_centrality(net.to_networkx(), normalized=False, weight=None)
    return {p: scores[i] for i, p in enumerate(net.nodes)}


def density(net: CoCitationNetwork) -> float:
    """D = 2L / (g(g-1)); 0 for fewer than two nodes"""
    return float(nx.density(net.to_networkx()))


def classify_density(value: float, threshold: Optional[float] = None) -> str:
    if threshold is None:
        threshold = settings.SPARSE_DENSITY_THRESHOLD
    return SPARSE if value <= threshold else DENSE


def summarize(net: CoCitationNetwork) -> Tuple[List[NodeMetrics], NetworkMetrics]:
    """Per-provision rows in node order, and the network totals"""
    degrees = degree_centrality(net)
    betweenness = betweenness_centrality(net)
    nodes = [
        NodeMetrics(provision=p, degree=degrees[p], betweenness=betweenness[p])
        for p in net.nodes
    ]

    d = density(net)
    totals = NetworkMetrics(
        size=len(net.nodes),
        edge_count=net.edge_count,
        edge_endpoints=2 * net.edge_count,
        density=d,
        classification=classify_density(d),
    )
    logger.info("Network: %d nodes, %d ties, density %.3f (%s)",
                totals.size, totals.edge_count, totals.density, totals.classification)
    return nodes, totals


def rank_hotspots(node_metrics: Sequence[NodeMetrics], top_n: Optional[int] = None) -> List[NodeMetrics]:
    """
    Provisions with the most bridging load: betweenness, then degree,
    descending; node order breaks ties.
    """
    if top_n is None:
        top_n = settings.HOTSPOT_TOP_N
    ranked = sorted(
        enumerate(node_metrics),
        key=lambda item: (-item[1].betweenness, -item[1].degree, item[0]),
    )
    return [metrics for _, metrics in ranked[:top_n]]
