from datetime import date
from itertools import combinations
from typing import Iterable, Sequence, Tuple

from citenet.models import JudgmentDoc, ProvisionId
from citenet.services.network import CoCitationNetwork


def prov(label: str) -> ProvisionId:
    """Letter-named provision, the shape import_graph produces for label-only files"""
    return ProvisionId(statute=label, label=label)


def make_doc(doc_id: str, labels: Iterable[str] = (), **fields) -> JudgmentDoc:
    fields.setdefault("court", "Beijing Chaoyang District People's Court")
    fields.setdefault("decision_date", date(2023, 5, 1))
    return JudgmentDoc(doc_id=doc_id, citations=tuple(prov(label) for label in labels), **fields)


def make_net(nodes: Sequence[str], edges: Iterable[Tuple[str, str, int]] = ()) -> CoCitationNetwork:
    return CoCitationNetwork([prov(n) for n in nodes], [(prov(u), prov(v), w) for u, v, w in edges])


def complete_net(size: int) -> CoCitationNetwork:
    nodes = [chr(ord("A") + i) for i in range(size)]
    return make_net(nodes, [(u, v, 1) for u, v in combinations(nodes, 2)])
