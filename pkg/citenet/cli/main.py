import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click
from pydantic import ValidationError

from citenet.config.settings import settings
from citenet.database.exclusion_ledger import ExclusionLedger
from citenet.errors import CitenetError, InputError, StageInputError
from citenet.models import JudgmentDoc
from citenet.services import corpus as corpus_service
from citenet.services import metrics, network, reports, typology
from citenet.services.pipeline import PipelineConfig, extract_pending, load_screening, run_pipeline, stage

logger = logging.getLogger(__name__)


class CitenetGroup(click.Group):
    """Maps toolkit errors onto exit codes: 1 for input problems, 2 for stage failures"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (InputError, ValidationError) as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(1)
        except CitenetError as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(2)


def _require(path: Optional[Path], stage_name: str):
    if path is not None and not path.is_file():
        raise StageInputError(stage_name, f"file not found: {path}")


def _emit(content, out: Optional[Path]):
    """Write to a file when --out is given, stdout otherwise"""
    data = content.encode("utf-8") if isinstance(content, str) else content
    if out is None:
        click.echo(data.decode("utf-8"), nl=False)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)
    logger.info("Wrote %s", out)


def load_documents(corpus: Path, corpus_format: str, rules: Optional[Path]) -> List[JudgmentDoc]:
    _require(corpus, "ingest")
    _require(rules, "ruleset")
    with stage("ingest"):
        docs = corpus_service.parse_corpus(corpus, corpus_format)
    with stage("ruleset" if rules else "extract"):
        return extract_pending(docs, rules)


def load_survivors(corpus: Path, corpus_format: str, rules: Optional[Path],
                   screen: Optional[Path], ledger: Optional[Path]) -> List[JudgmentDoc]:
    docs = load_documents(corpus, corpus_format, rules)
    _require(screen, "screen")
    with stage("screen"):
        survivors, _ = corpus_service.screen_corpus(docs, load_screening(screen, ledger))
    return survivors


def load_network(corpus: Optional[Path], edges: Optional[Path], corpus_format: str, rules: Optional[Path],
                 screen: Optional[Path], ledger: Optional[Path]) -> network.CoCitationNetwork:
    """Network from an edge_csv file, or built from a (screened) corpus"""
    if (corpus is None) == (edges is None):
        raise InputError("give exactly one of --corpus or --edges")
    if edges is not None:
        _require(edges, "ingest")
        with stage("ingest"), open(edges, "rb") as f:
            return reports.import_graph(f)

    survivors = load_survivors(corpus, corpus_format, rules, screen, ledger)
    with stage("build"):
        return network.assign_labels(network.project(network.build_affiliation(survivors)))


def corpus_options(func):
    func = click.option("--rules", type=click.Path(path_type=Path), default=None,
                        help="Citation ruleset JSON (bundled ruleset when omitted)")(func)
    func = click.option("--corpus-format", default=corpus_service.RECORDS, show_default=True,
                        help="records (JSON lines) or raw_text")(func)
    return func


def screening_options(func):
    func = click.option("--ledger", type=click.Path(path_type=Path), default=None,
                        help="Exclusion ledger whose decisions are applied as manual exclusions")(func)
    func = click.option("--screen", type=click.Path(path_type=Path), default=None,
                        help="Screening config JSON")(func)
    return func


def clustering_options(func):
    func = click.option("--batch-min", type=int, default=settings.BATCH_MIN, show_default=True)(func)
    func = click.option("--threshold", type=float, default=settings.DEFAULT_CLUSTER_THRESHOLD, show_default=True,
                        help="Jaccard threshold in (0, 1]")(func)
    return func


@click.group(cls=CitenetGroup)
@click.option("--log-level", default=settings.LOG_LEVEL, show_default=True)
def cli(log_level: str):
    """Co-citation network analysis of judicial decisions."""
    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.INFO),
        format="%(asctime)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@click.option("--corpus", type=click.Path(path_type=Path), required=True)
@corpus_options
@click.option("--out", type=click.Path(path_type=Path), default=None, help="JSON-lines output file")
def ingest(corpus, corpus_format, rules, out):
    """Parse a corpus and extract citations; one JSON record per judgment."""
    docs = load_documents(corpus, corpus_format, rules)
    records = [doc.model_dump(mode="json", exclude={"raw_text"}) for doc in docs]
    _emit(reports.to_json_lines(records), out)


@cli.command()
@click.option("--corpus", type=click.Path(path_type=Path), required=True)
@corpus_options
@screening_options
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Screening report JSON file")
def screen(corpus, corpus_format, rules, screen, ledger, out):
    """Deduplicate and screen a corpus; prints the screening report."""
    docs = load_documents(corpus, corpus_format, rules)
    _require(screen, "screen")
    with stage("screen"):
        _, report = corpus_service.screen_corpus(docs, load_screening(screen, ledger))
    _emit(reports.screening_report_json(report), out)


@cli.command()
@click.option("--corpus", type=click.Path(path_type=Path), required=True)
@corpus_options
@screening_options
@click.option("--out", type=click.Path(path_type=Path), default=Path(settings.DEFAULT_OUTPUT_DIR), show_default=True)
@click.option("--format", "formats", multiple=True, default=settings.DEFAULT_FORMATS, show_default=True)
@click.option("--names", default="label", show_default=True, help="label or canonical")
def build(corpus, corpus_format, rules, screen, ledger, out, formats, names):
    """Write the affiliation matrix and the co-citation network files."""
    survivors = load_survivors(corpus, corpus_format, rules, screen, ledger)
    with stage("build"):
        matrix = network.build_affiliation(survivors)
        net = network.assign_labels(network.project(matrix))
        _emit(reports.export_matrix_csv(network.relabel_matrix(matrix, net)), out / "affiliation_matrix.csv")
        for fmt in dict.fromkeys(formats):
            if fmt not in reports.GRAPH_FILENAMES:
                raise InputError(f"Unsupported graph format: {fmt}")
            _emit(reports.export_graph(net, fmt, names), out / reports.GRAPH_FILENAMES[fmt])
    click.echo(f"{len(net)} provisions, {net.edge_count} ties -> {out}")


@cli.command(name="metrics")
@click.option("--corpus", type=click.Path(path_type=Path), default=None)
@click.option("--edges", type=click.Path(path_type=Path), default=None, help="edge_csv network instead of a corpus")
@corpus_options
@screening_options
@click.option("--min-weight", type=int, default=settings.DEFAULT_MIN_WEIGHT, show_default=True)
@click.option("--precise", is_flag=True, help="Full-precision reals")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Directory for node_metrics.csv and network_metrics.csv")
def metrics_command(corpus, edges, corpus_format, rules, screen, ledger, min_weight, precise, out):
    """Degree, betweenness and density of the dichotomized network."""
    net = load_network(corpus, edges, corpus_format, rules, screen, ledger)
    with stage("metrics"):
        node_metrics, totals = metrics.summarize(network.dichotomize(net, min_weight))
        node_csv = reports.frame_to_csv(reports.node_metrics_frame(node_metrics, precise))
        network_csv = reports.frame_to_csv(reports.network_metrics_frame(totals, precise))

    if out is None:
        _emit(node_csv + "\n" + network_csv, None)
    else:
        _emit(node_csv, out / "node_metrics.csv")
        _emit(network_csv, out / "network_metrics.csv")


@cli.command()
@click.option("--corpus", type=click.Path(path_type=Path), required=True)
@corpus_options
@screening_options
@click.option("--out", type=click.Path(path_type=Path), default=None)
def components(corpus, corpus_format, rules, screen, ledger, out):
    """Connected components; every component but the largest is an outlier."""
    survivors = load_survivors(corpus, corpus_format, rules, screen, ledger)
    with stage("build"):
        net = network.assign_labels(network.project(network.build_affiliation(survivors)))
    with stage("typology"):
        report = typology.connected_components(net, survivors)
    _emit(reports.to_json_lines(reports.component_records(report)), out)


@cli.command()
@click.option("--corpus", type=click.Path(path_type=Path), required=True)
@corpus_options
@screening_options
@clustering_options
@click.option("--out", type=click.Path(path_type=Path), default=None)
def cluster(corpus, corpus_format, rules, screen, ledger, threshold, batch_min, out):
    """Group judgments by citation-profile similarity into batch and complex cases."""
    survivors = load_survivors(corpus, corpus_format, rules, screen, ledger)
    with stage("typology"):
        clusters = typology.cluster_cases(survivors, threshold, batch_min)
    _emit(reports.to_json_lines(reports.cluster_records(clusters)), out)


@cli.command()
@click.option("--corpus", type=click.Path(path_type=Path), required=True)
@corpus_options
@screening_options
@click.option("--query", required=True, help="doc_id of the judgment to match")
@click.option("-k", "k", type=int, default=5, show_default=True)
@click.option("--precise", is_flag=True)
def retrieve(corpus, corpus_format, rules, screen, ledger, query, k, precise):
    """Top-k reference cases for one judgment, by Jaccard score."""
    survivors = load_survivors(corpus, corpus_format, rules, screen, ledger)
    by_id = {doc.doc_id: doc for doc in survivors}
    if query not in by_id:
        raise InputError(f"query judgment {query} is not in the screened corpus")
    with stage("typology"):
        ranked = typology.retrieve_similar(by_id[query], survivors, k)
    lines = ["doc_id,score"] + [f"{doc_id},{reports.format_real(score, precise)}" for doc_id, score in ranked]
    _emit("\n".join(lines) + "\n", None)


@cli.command()
@click.option("--corpus", type=click.Path(path_type=Path), required=True)
@corpus_options
@screening_options
@clustering_options
@click.option("--core", default=settings.DEFAULT_CORE_CRITERION, show_default=True,
              help="min-weight=N or top-k=K")
@click.option("--precise", is_flag=True)
@click.option("--out", type=click.Path(path_type=Path), default=None)
def alerts(corpus, corpus_format, rules, screen, ledger, threshold, batch_min, core, precise, out):
    """Batch-case judgments that leave out part of the core citation path."""
    survivors = load_survivors(corpus, corpus_format, rules, screen, ledger)
    with stage("build"):
        net = network.assign_labels(network.project(network.build_affiliation(survivors)))
    with stage("typology"):
        clusters = typology.cluster_cases(survivors, threshold, batch_min)
        path = typology.core_path(net, core)
        found = typology.deviation_alerts(survivors, clusters, path)
    _emit(reports.to_json_lines(reports.alert_records(found, precise)), out)


@cli.command()
@click.option("--corpus", type=click.Path(path_type=Path), default=None)
@click.option("--edges", type=click.Path(path_type=Path), default=None)
@corpus_options
@screening_options
@click.option("--format", "format_", default=reports.EDGE_CSV, show_default=True, help="edge_csv, graphml or dot")
@click.option("--names", default="label", show_default=True, help="label or canonical")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def export(corpus, edges, corpus_format, rules, screen, ledger, format_, names, out):
    """Render the co-citation network in one graph format."""
    net = load_network(corpus, edges, corpus_format, rules, screen, ledger)
    _emit(reports.export_graph(net, format_, names), out)


@cli.command()
@click.argument("doc_ids", nargs=-1)
@click.option("--ledger", type=click.Path(path_type=Path), default=Path(settings.LEDGER_PATH), show_default=True)
@click.option("--reason", default=None, help="Why the judgments are excluded")
@click.option("--reviewer", default=None)
@click.option("--component", default=None, help="Comma-separated provision labels of the outlier component")
@click.option("--revoke", is_flag=True, help="Withdraw earlier decisions on the given judgments")
@click.option("--list", "list_", is_flag=True, help="Show recorded decisions")
def exclude(doc_ids, ledger, reason, reviewer, component, revoke, list_):
    """Record reviewers' exclusion decisions for later screening runs."""
    db = ExclusionLedger(str(ledger))
    if list_:
        click.echo(json.dumps({"stats": db.exclusion_stats(), "history": db.exclusion_history()},
                              indent=2, ensure_ascii=False))
        return
    if not doc_ids:
        raise InputError("no doc_id given")

    if revoke:
        count = sum(db.revoke(doc_id) for doc_id in doc_ids)
        click.echo(f"Revoked {count} decision(s)")
        return

    labels = [part.strip() for part in component.split(",") if part.strip()] if component else None
    for doc_id in doc_ids:
        db.record_exclusion(doc_id, reason, reviewer, labels)
    click.echo(f"Recorded {len(doc_ids)} exclusion(s) in {ledger}")


@cli.command()
@click.option("--corpus", type=click.Path(path_type=Path), required=True)
@corpus_options
@screening_options
@click.option("--min-weight", type=int, default=settings.DEFAULT_MIN_WEIGHT, show_default=True)
@clustering_options
@click.option("--core", default=settings.DEFAULT_CORE_CRITERION, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=Path(settings.DEFAULT_OUTPUT_DIR), show_default=True)
@click.option("--format", "formats", multiple=True, default=settings.DEFAULT_FORMATS, show_default=True)
@click.option("--precise", is_flag=True)
@click.option("--exclude-outliers", is_flag=True, help="Also write the network with outlier components removed")
def run(corpus, corpus_format, rules, screen, ledger, min_weight, threshold, batch_min, core, out, formats,
        precise, exclude_outliers):
    """Full pipeline: ingest, screen, build, metrics, typology."""
    config = PipelineConfig(
        corpus=corpus, corpus_format=corpus_format, rules=rules, screen=screen, ledger=ledger,
        min_weight=min_weight, threshold=threshold, batch_min=batch_min, core=core, out=out,
        formats=tuple(formats), precise=precise, exclude_outliers=exclude_outliers,
    )
    result = run_pipeline(config)
    click.echo(f"Screening kept {result.report.final_count} of {result.report.initial_count} judgments")
    for name in result.artifacts:
        click.echo(f"  {result.out / name}")


def main(argv: Optional[Tuple[str, ...]] = None):
    cli.main(args=argv, prog_name="citenet")


if __name__ == "__main__":
    main()
