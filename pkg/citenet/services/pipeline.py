import logging
import os
import shutil
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator
from tqdm import tqdm

from citenet.config.settings import settings
from citenet.database.exclusion_ledger import ExclusionLedger
from citenet.errors import InputError, StageError, StageInputError
from citenet.models import CoreCriterion, JudgmentDoc, ScreeningConfig, ScreeningReport
from citenet.services import corpus as corpus_service
from citenet.services import metrics, network, reports, typology
from citenet.utils.rule_library import RuleLibrary

logger = logging.getLogger(__name__)


class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    corpus: Path
    corpus_format: str = corpus_service.RECORDS
    rules: Optional[Path] = None
    screen: Optional[Path] = None
    ledger: Optional[Path] = None
    min_weight: int = Field(settings.DEFAULT_MIN_WEIGHT, ge=1)
    threshold: float = Field(settings.DEFAULT_CLUSTER_THRESHOLD, gt=0.0, le=1.0)
    batch_min: int = Field(settings.BATCH_MIN, ge=2)
    core: CoreCriterion = Field(default_factory=lambda: CoreCriterion.parse(settings.DEFAULT_CORE_CRITERION))
    out: Path = Path(settings.DEFAULT_OUTPUT_DIR)
    formats: Tuple[str, ...] = settings.DEFAULT_FORMATS
    precise: bool = False
    exclude_outliers: bool = False

    @field_validator("core", mode="before")
    @classmethod
    def _parse_core(cls, value):
        if isinstance(value, str):
            return CoreCriterion.parse(value)
        return value

    @field_validator("formats")
    @classmethod
    def _check_formats(cls, value):
        unknown = [f for f in value if f not in reports.GRAPH_FORMATS]
        if unknown:
            raise ValueError(f"unknown graph format(s): {', '.join(unknown)}")
        return tuple(dict.fromkeys(value))

    @field_validator("corpus_format")
    @classmethod
    def _check_corpus_format(cls, value):
        if value not in (corpus_service.RECORDS, corpus_service.RAW_TEXT):
            raise ValueError(f"unknown corpus format: {value}")
        return value

    def validate_paths(self):
        """Referenced input files must exist before anything runs"""
        for stage, path in (("ingest", self.corpus), ("ruleset", self.rules), ("screen", self.screen)):
            if path is not None and not path.is_file():
                raise StageInputError(stage, f"file not found: {path}")


class PipelineResult(BaseModel):
    out: Path
    artifacts: List[str]
    report: ScreeningReport


@contextmanager
def stage(name: str):
    """Tag any failure inside the block with the stage name"""
    try:
        yield
    except StageError:
        raise
    except InputError as e:
        raise StageInputError(name, str(e)) from e
    except Exception as e:
        raise StageError(name, f"{type(e).__name__}: {e}") from e


class PipelineService:
    """
    Full run: ingest -> extract -> screen -> build -> metrics -> typology.
    Artifacts are staged in a temporary directory that replaces the output
    directory only when every stage succeeds.
    """

    def __init__(self, config: PipelineConfig):
        self.config = config
        self._staging: Optional[Path] = None
        self._artifacts: Dict[str, bytes] = {}

    def _write(self, relative: str, content: Union[str, bytes]):
        data = content.encode("utf-8") if isinstance(content, str) else content
        target = self._staging / relative
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
        self._artifacts[relative] = data

    def run(self) -> PipelineResult:
        config = self.config
        config.validate_paths()

        parent = config.out.resolve().parent
        parent.mkdir(parents=True, exist_ok=True)
        self._staging = Path(tempfile.mkdtemp(prefix=".citenet-", dir=parent))
        # mkdtemp is owner-only; the staged tree becomes the output directory
        os.chmod(self._staging, 0o755)
        try:
            report = self._run_stages()
            self._publish()
        finally:
            shutil.rmtree(self._staging, ignore_errors=True)

        logger.info("Wrote %d artifact(s) to %s", len(self._artifacts), config.out)
        return PipelineResult(out=config.out, artifacts=sorted(self._artifacts), report=report)

    def _publish(self):
        """Swap the staged tree in for the output directory as a whole"""
        out = self.config.out
        if not out.exists():
            os.replace(self._staging, out)
            return

        retired = Path(tempfile.mkdtemp(prefix=".citenet-old-", dir=self._staging.parent))
        os.replace(out, retired / "out")
        try:
            os.replace(self._staging, out)
        except OSError:
            os.replace(retired / "out", out)
            raise
        finally:
            shutil.rmtree(retired, ignore_errors=True)
        logger.info("Replaced previous contents of %s", out)

    def _run_stages(self) -> ScreeningReport:
        config = self.config

        logger.info("Step 1: Loading corpus %s...", config.corpus)
        with stage("ingest"):
            docs = corpus_service.parse_corpus(config.corpus, config.corpus_format)

        logger.info("Step 2: Extracting citations...")
        with stage("ruleset" if config.rules else "extract"):
            docs = self._extract(docs)

        logger.info("Step 3: Screening %d judgments...", len(docs))
        with stage("screen"):
            screening = self._screening_config()
            survivors, report = corpus_service.screen_corpus(docs, screening)
            self._write("screening_report.json", reports.screening_report_json(report))

        if not survivors:
            logger.warning("No judgments survived screening; skipping network stages")
            self._write("summary.txt", reports.summary_text(report, None, [], None, [], None, [], config.precise))
            return report

        logger.info("Step 4: Building affiliation matrix and co-citation network...")
        with stage("build"):
            matrix = network.build_affiliation(survivors)
            net = network.assign_labels(network.project(matrix))
            matrix = network.relabel_matrix(matrix, net)
            self._write_network("", matrix, net)

        logger.info("Step 5: Computing network metrics (min_weight=%d)...", config.min_weight)
        with stage("metrics"):
            node_metrics, totals = self._write_metrics("", net)
            hotspots = metrics.rank_hotspots(node_metrics)

        logger.info("Step 6: Typology (components, clusters, core path, alerts)...")
        with stage("typology"):
            components = typology.connected_components(net, survivors)
            clusters = typology.cluster_cases(survivors, config.threshold, config.batch_min)
            core = typology.core_path(net, config.core)
            alerts = typology.deviation_alerts(survivors, clusters, core) if core.edges else []

            self._write("components.jsonl", reports.to_json_lines(reports.component_records(components)))
            self._write("clusters.jsonl", reports.to_json_lines(reports.cluster_records(clusters)))
            self._write("alerts.jsonl", reports.to_json_lines(reports.alert_records(alerts, config.precise)))

        if config.exclude_outliers and components.outliers:
            logger.info("Step 7: Excluding %d outlier component(s)...", len(components.outliers))
            with stage("exclude"):
                pruned = matrix
                for index in components.outliers:
                    pruned = typology.exclude_component(pruned, components.components[index])
                pruned_net = network.project(pruned)
                self._write_network("excluded/", pruned, pruned_net)
                self._write_metrics("excluded/", pruned_net)

        self._write("summary.txt", reports.summary_text(
            report, totals, hotspots, components, clusters, core, alerts, config.precise))
        return report

    def _extract(self, docs: List[JudgmentDoc]) -> List[JudgmentDoc]:
        return extract_pending(docs, self.config.rules)

    def _screening_config(self) -> ScreeningConfig:
        return load_screening(self.config.screen, self.config.ledger)

    def _write_network(self, prefix: str, matrix: network.AffiliationMatrix, net: network.CoCitationNetwork):
        self._write(f"{prefix}affiliation_matrix.csv", reports.export_matrix_csv(matrix))
        for fmt in self.config.formats:
            self._write(prefix + reports.GRAPH_FILENAMES[fmt], reports.export_graph(net, fmt))

    def _write_metrics(self, prefix: str, net: network.CoCitationNetwork):
        binary = network.dichotomize(net, self.config.min_weight)
        node_metrics, totals = metrics.summarize(binary)
        self._write(f"{prefix}node_metrics.csv",
                    reports.frame_to_csv(reports.node_metrics_frame(node_metrics, self.config.precise)))
        self._write(f"{prefix}network_metrics.csv",
                    reports.frame_to_csv(reports.network_metrics_frame(totals, self.config.precise)))
        return node_metrics, totals


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    return PipelineService(config).run()


def extract_pending(docs: List[JudgmentDoc], rules: Optional[Path] = None) -> List[JudgmentDoc]:
    """Run citation extraction on judgments that have text but no citations"""
    pending = [i for i, doc in enumerate(docs) if not doc.citations and doc.raw_text]
    if not pending:
        return list(docs)

    library = RuleLibrary.load(str(rules) if rules else None)
    docs = list(docs)
    for i in tqdm(pending, desc="Extracting citations", disable=not sys.stderr.isatty()):
        docs[i] = corpus_service.extract_citations(docs[i], library)
    return docs


def load_screening(screen: Optional[Path] = None, ledger: Optional[Path] = None) -> ScreeningConfig:
    """Screening config from file (permissive when absent) plus ledger exclusions"""
    if screen is not None:
        screening = corpus_service.load_screening_config(screen)
    else:
        screening = ScreeningConfig()
    if ledger is not None:
        recorded = ExclusionLedger(str(ledger)).excluded_ids()
        logger.info("Applying %d recorded exclusion(s) from %s", len(recorded), ledger)
        screening = screening.with_exclusions(recorded)
    return screening
