"""Brute-force reference implementations used by the property tests."""

from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Sequence, Set

from citenet.models import JudgmentDoc, ProvisionId
from citenet.services.network import CoCitationNetwork


def pair_counts(docs: Sequence[JudgmentDoc]) -> Dict[FrozenSet[ProvisionId], int]:
    """Co-citation weight by direct enumeration of pairs and judgments"""
    provisions = []
    for doc in docs:
        for p in doc.citations:
            if p not in provisions:
                provisions.append(p)

    counts = {}
    for u, v in combinations(provisions, 2):
        shared = sum(1 for doc in docs if u in doc.citation_set and v in doc.citation_set)
        if shared:
            counts[frozenset((u, v))] = shared
    return counts


def _shortest_paths(adjacency: Dict[int, Set[int]], source: int, target: int) -> List[List[int]]:
    distance = {source: 0}
    frontier = [source]
    while frontier:
        following = []
        for v in frontier:
            for w in adjacency[v]:
                if w not in distance:
                    distance[w] = distance[v] + 1
                    following.append(w)
        frontier = following
    if target not in distance:
        return []

    paths = []

    def walk(path):
        v = path[-1]
        if v == target:
            paths.append(path)
            return
        for w in sorted(adjacency[v]):
            if distance.get(w) == distance[v] + 1 and distance[w] <= distance[target]:
                walk(path + [w])

    walk([source])
    return paths


def betweenness(net: CoCitationNetwork) -> Dict[ProvisionId, Fraction]:
    """Enumerate every geodesic of every unordered pair and credit its interior nodes"""
    n = len(net.nodes)
    adjacency = {i: set(net.neighbor_indices(i)) for i in range(n)}
    scores = [Fraction(0)] * n
    for s, t in combinations(range(n), 2):
        paths = _shortest_paths(adjacency, s, t)
        for path in paths:
            for interior in path[1:-1]:
                scores[interior] += Fraction(1, len(paths))
    return {p: scores[i] for i, p in enumerate(net.nodes)}


def clusters(docs: Sequence[JudgmentDoc], threshold: float) -> Set[FrozenSet[str]]:
    """Union-find over every pair whose Jaccard score reaches the threshold"""
    parent = list(range(len(docs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in combinations(range(len(docs)), 2):
        a, b = docs[i].citation_set, docs[j].citation_set
        if not a and not b:
            score = 1.0
        elif not a or not b:
            score = 0.0
        else:
            score = len(a & b) / len(a | b)
        if score >= threshold:
            parent[find(i)] = find(j)

    groups: Dict[int, Set[str]] = {}
    for i, doc in enumerate(docs):
        groups.setdefault(find(i), set()).add(doc.doc_id)
    return {frozenset(group) for group in groups.values()}
