"""
Export layer: graph files (edge CSV, GraphML, DOT), the node and network
metric tables, and JSON-lines records for components, clusters and alerts.
Every writer is deterministic for identical inputs.
"""

import csv
import io
import json
import re
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import pandas as pd

from citenet.config.settings import settings
from citenet.errors import InputError, NetworkFormatError
from citenet.models import (CaseCluster, ComponentReport, CorePath, DeviationAlert, NetworkMetrics,
                            NodeMetrics, ProvisionId, ScreeningReport)
from citenet.services.corpus import Source, read_source
from citenet.services.network import AffiliationMatrix, CoCitationNetwork

EDGE_CSV = "edge_csv"
GRAPHML = "graphml"
DOT = "dot"
GRAPH_FORMATS = (EDGE_CSV, GRAPHML, DOT)
GRAPH_FILENAMES = {EDGE_CSV: "network_edges.csv", GRAPHML: "network.graphml", DOT: "network.dot"}

EDGE_HEADER = ["source", "target", "weight"]
SINGLE_LABEL = re.compile(r"^[A-Z]$")
ARTICLE_SEPARATOR = " Art. "


def format_real(value: float, precise: bool = False, decimals: Optional[int] = None) -> str:
    """3-decimal presentation (32.067, 0.4, 0) unless precise is requested"""
    if precise:
        return repr(float(value))
    if decimals is None:
        decimals = settings.REPORT_DECIMALS
    text = f"{value:.{decimals}f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def node_name(provision: ProvisionId, names: str = "label") -> str:
    if names == "canonical":
        return provision.canonical_name
    return provision.display


def parse_node_name(token: str) -> ProvisionId:
    """Inverse of node_name: canonical `Statute Art. N`, a bare letter label, or a bare name"""
    if ARTICLE_SEPARATOR in token:
        statute, article = token.rsplit(ARTICLE_SEPARATOR, 1)
        return ProvisionId(statute=statute, article=article)
    if SINGLE_LABEL.match(token):
        return ProvisionId(statute=token, label=token)
    return ProvisionId(statute=token)


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_graph(net: CoCitationNetwork, format: str = EDGE_CSV, names: str = "label") -> bytes:
    if format == EDGE_CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(EDGE_HEADER)
        for u, v, w in net.edges:
            writer.writerow([node_name(u, names), node_name(v, names), w])
        return buffer.getvalue().encode("utf-8")

    if format == GRAPHML:
        graph = nx.relabel_nodes(net.to_networkx(), {i: node_name(p, names) for i, p in enumerate(net.nodes)})
        return ("\n".join(nx.generate_graphml(graph)) + "\n").encode("utf-8")

    if format == DOT:
        lines = ["graph cocitation {"]
        for p in net.nodes:
            lines.append(f"  {_dot_quote(node_name(p, names))} [statute={_dot_quote(p.statute)}, "
                         f"article={_dot_quote(p.article)}, label={_dot_quote(p.display)}];")
        for u, v, w in net.edges:
            lines.append(f"  {_dot_quote(node_name(u, names))} -- {_dot_quote(node_name(v, names))} "
                         f"[weight={w}, label=\"{w}\"];")
        lines.append("}")
        return ("\n".join(lines) + "\n").encode("utf-8")

    raise InputError(f"Unsupported graph format: {format}")


def import_graph(stream: Source, format: str = EDGE_CSV) -> CoCitationNetwork:
    """Read an edge CSV back into a network; node order is first appearance"""
    if format != EDGE_CSV:
        raise InputError(f"Only {EDGE_CSV} can be imported, not {format}")

    text = read_source(stream)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return CoCitationNetwork([])
    if [cell.strip() for cell in header] != EDGE_HEADER:
        raise NetworkFormatError(f"expected header {','.join(EDGE_HEADER)}", 1)

    nodes = {}
    edges: List[Tuple[ProvisionId, ProvisionId, int]] = []
    seen_pairs = set()
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise NetworkFormatError(f"expected 3 fields, got {len(row)}", line)
        source, target, weight_text = (cell.strip() for cell in row)
        if not source or not target:
            raise NetworkFormatError("empty node name", line)
        try:
            weight = int(weight_text)
        except ValueError as e:
            raise NetworkFormatError(f"weight {weight_text!r} is not an integer", line) from e
        if weight < 1:
            raise NetworkFormatError(f"weight {weight} < 1", line)
        if source == target:
            raise NetworkFormatError(f"self-loop on {source}", line)

        u = nodes.setdefault(source, parse_node_name(source))
        v = nodes.setdefault(target, parse_node_name(target))
        pair = frozenset((u, v))
        if len(pair) < 2:
            raise NetworkFormatError(f"self-loop on {source}", line)
        if pair in seen_pairs:
            raise NetworkFormatError(f"duplicate undirected pair {source},{target}", line)
        seen_pairs.add(pair)
        edges.append((u, v, weight))

    return CoCitationNetwork(list(nodes.values()), edges)


def node_metrics_frame(node_metrics: Sequence[NodeMetrics], precise: bool = False) -> pd.DataFrame:
    """One row per provision: canonical name, label, degree, betweenness"""
    return pd.DataFrame(
        [{
            "provision": m.provision.canonical_name,
            "label": m.provision.label or "",
            "degree": m.degree,
            "betweenness": format_real(m.betweenness, precise),
        } for m in node_metrics],
        columns=["provision", "label", "degree", "betweenness"],
    )


def network_metrics_frame(totals: NetworkMetrics, precise: bool = False) -> pd.DataFrame:
    """Network totals; "Number of Edges" is the degree sum 2L"""
    return pd.DataFrame(
        [
            ("Density", format_real(totals.density, precise)),
            ("Number of Edges", str(totals.edge_endpoints)),
            ("Number of Nodes", str(totals.size)),
            ("Number of Ties", str(totals.edge_count)),
            ("Density Class", totals.classification),
        ],
        columns=["metric", "value"],
    )


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")


def export_matrix_csv(matrix: AffiliationMatrix) -> str:
    return matrix.to_csv()


def screening_report_json(report: ScreeningReport) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def to_json_lines(records: Iterable[dict]) -> str:
    return "".join(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n" for record in records)


def component_records(report: ComponentReport) -> List[dict]:
    outliers = set(report.outliers)
    return [{
        "component": index,
        "size": len(component),
        "outlier": index in outliers,
        "provisions": [p.display for p in component],
        "contributing_judgments": list(report.contributing_judgments.get(index, ())),
    } for index, component in enumerate(report.components)]


def cluster_records(clusters: Sequence[CaseCluster]) -> List[dict]:
    return [{
        "cluster": index,
        "kind": cluster.kind.value,
        "members": list(cluster.members),
        "representative_citations": [p.display for p in cluster.representative_citations],
    } for index, cluster in enumerate(clusters)]


def alert_records(alerts: Sequence[DeviationAlert], precise: bool = False) -> List[dict]:
    return [{
        "doc_id": alert.doc_id,
        "missing_core_pairs": [[u.display, v.display] for u, v in alert.missing_core_pairs],
        "severity": format_real(alert.severity, precise),
    } for alert in alerts]


def summary_text(report: ScreeningReport, totals: Optional[NetworkMetrics], hotspots: Sequence[NodeMetrics],
                 components: Optional[ComponentReport], clusters: Sequence[CaseCluster],
                 core: Optional[CorePath], alerts: Sequence[DeviationAlert], precise: bool = False) -> str:
    """Human-readable overview of one pipeline run"""
    sections = []

    screening = pd.DataFrame(
        [("initial", report.initial_count), ("duplicates removed", report.duplicates_removed),
         ("date filtered", report.date_filtered), ("keyword filtered", report.keyword_filtered),
         ("jurisdiction filtered", report.jurisdiction_filtered),
         ("manually excluded", report.manually_excluded), ("final", report.final_count)],
        columns=["stage", "count"],
    )
    sections.append("SCREENING\n" + screening.to_string(index=False))

    if totals is not None:
        sections.append("NETWORK\n" + network_metrics_frame(totals, precise).to_string(index=False))

    if hotspots:
        sections.append("HOTSPOTS\n" + node_metrics_frame(hotspots, precise).to_string(index=False))

    if components is not None and components.components:
        rows = [(r["component"], r["size"], "yes" if r["outlier"] else "no", " ".join(r["provisions"]))
                for r in component_records(components)]
        frame = pd.DataFrame(rows, columns=["component", "size", "outlier", "provisions"])
        sections.append("COMPONENTS\n" + frame.to_string(index=False))

    if clusters:
        rows = [(i, c.kind.value, len(c.members), " ".join(p.display for p in c.representative_citations))
                for i, c in enumerate(clusters)]
        frame = pd.DataFrame(rows, columns=["cluster", "kind", "size", "representative"])
        sections.append("CLUSTERS\n" + frame.to_string(index=False))

    if core is not None:
        rows = [(u.display, v.display, w) for u, v, w in core.edges]
        frame = pd.DataFrame(rows, columns=["source", "target", "weight"])
        sections.append(f"CORE PATH ({core.criterion})\n" + frame.to_string(index=False))

    if alerts:
        rows = [(r["doc_id"], r["severity"], " ".join("-".join(pair) for pair in r["missing_core_pairs"]))
                for r in alert_records(alerts, precise)]
        frame = pd.DataFrame(rows, columns=["doc_id", "severity", "missing"])
        sections.append("ALERTS\n" + frame.to_string(index=False))

    return "\n\n".join(sections) + "\n"
