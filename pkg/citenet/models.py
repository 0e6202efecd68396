"""
Domain models shared by the corpus, network, metrics and typology services.

Records that cross a file boundary (judgments, rulesets, screening windows,
reports) are pydantic models so that validation errors carry field names.
"""

from datetime import date
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ProvisionStatus(str, Enum):
    IN_FORCE = "in_force"
    INVALIDATED = "invalidated"
    UNKNOWN = "unknown"


class ProvisionId(BaseModel):
    """
    Canonical identifier of one legal provision (statute + article).

    Equality and hashing use only the (statute, article) pair; status and
    display label travel along as annotations.
    """
    model_config = ConfigDict(frozen=True)

    statute: str = Field(..., min_length=1, description="Canonical statute name")
    article: str = Field("", description="Article or clause designator")
    status: ProvisionStatus = ProvisionStatus.UNKNOWN
    label: Optional[str] = Field(None, pattern=r"^[A-Z]$")

    @field_validator("statute", "article", mode="before")
    @classmethod
    def _coerce_text(cls, value):
        if isinstance(value, int):
            return str(value)
        if isinstance(value, str):
            return value.strip()
        return value

    @property
    def identity(self) -> Tuple[str, str]:
        return (self.statute, self.article)

    @property
    def canonical_name(self) -> str:
        if not self.article:
            return self.statute
        return f"{self.statute} Art. {self.article}"

    @property
    def display(self) -> str:
        """Label when one is assigned, canonical name otherwise"""
        return self.label or self.canonical_name

    def with_label(self, label: Optional[str]) -> "ProvisionId":
        return self.model_copy(update={"label": label})

    def __eq__(self, other) -> bool:
        if isinstance(other, ProvisionId):
            return self.identity == other.identity
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.identity)

    def __str__(self) -> str:
        return self.display


class JudgmentDoc(BaseModel):
    """One judicial decision: a column of the affiliation matrix."""
    model_config = ConfigDict(frozen=True)

    doc_id: str = Field(..., min_length=1)
    court: str = ""
    decision_date: date
    cause_of_action: str = ""
    # Ordered set: first mention wins, repeats collapse
    citations: Tuple[ProvisionId, ...] = ()
    raw_text: Optional[str] = None
    tags: Tuple[str, ...] = ()

    @field_validator("citations")
    @classmethod
    def _collapse_citations(cls, value: Tuple[ProvisionId, ...]) -> Tuple[ProvisionId, ...]:
        return tuple(dict.fromkeys(value))

    @field_validator("tags")
    @classmethod
    def _sort_tags(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        return tuple(sorted(set(value)))

    @property
    def citation_set(self) -> frozenset:
        return frozenset(self.citations)

    def metadata_text(self) -> str:
        return " ".join([self.court, self.cause_of_action, *self.tags])


class CitationRule(BaseModel):
    """
    One extraction rule. When `statute` is omitted the statute name is taken
    from the pattern's `statute` group and normalized through the alias table.
    """
    pattern: str = Field(..., min_length=1)
    statute: Optional[str] = None
    article_capture: str = "article"
    status: ProvisionStatus = ProvisionStatus.UNKNOWN


class CitationRuleSet(BaseModel):
    rules: List[CitationRule] = Field(default_factory=list)
    aliases: Dict[str, str] = Field(default_factory=dict)


class ScreeningConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    date_from: date = date.min
    date_to: date = date.max
    required_keywords: frozenset = frozenset()
    jurisdiction: Optional[str] = None
    exclusion_ids: frozenset = frozenset()

    @model_validator(mode="after")
    def _check_window(self):
        if self.date_from > self.date_to:
            raise ValueError(f"date_from {self.date_from} is after date_to {self.date_to}")
        return self

    def with_exclusions(self, doc_ids) -> "ScreeningConfig":
        return self.model_copy(update={"exclusion_ids": frozenset(self.exclusion_ids | set(doc_ids))})


class ScreeningReport(BaseModel):
    initial_count: int = Field(0, ge=0)
    duplicates_removed: int = Field(0, ge=0)
    keyword_filtered: int = Field(0, ge=0)
    date_filtered: int = Field(0, ge=0)
    jurisdiction_filtered: int = Field(0, ge=0)
    manually_excluded: int = Field(0, ge=0)
    final_count: int = Field(0, ge=0)
    removed_ids: List[Tuple[str, str]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_balance(self):
        expected = (self.initial_count - self.duplicates_removed - self.keyword_filtered
                    - self.date_filtered - self.jurisdiction_filtered - self.manually_excluded)
        if expected != self.final_count:
            raise ValueError(f"screening counts do not balance: {expected} != {self.final_count}")
        return self


class NodeMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    provision: ProvisionId
    degree: int = Field(..., ge=0)
    betweenness: float = Field(..., ge=0.0)


class NetworkMetrics(BaseModel):
    """Network-level indicators; `edge_endpoints` is the degree sum 2L"""
    model_config = ConfigDict(frozen=True)

    size: int = Field(..., ge=0)
    edge_count: int = Field(..., ge=0)
    edge_endpoints: int = Field(..., ge=0)
    density: float = Field(..., ge=0.0, le=1.0)
    classification: str

    @model_validator(mode="after")
    def _check_endpoints(self):
        if self.edge_endpoints != 2 * self.edge_count:
            raise ValueError("edge_endpoints must equal twice the edge count")
        return self


class ComponentReport(BaseModel):
    components: List[Tuple[ProvisionId, ...]] = Field(default_factory=list)
    outliers: List[int] = Field(default_factory=list)
    contributing_judgments: Dict[int, Tuple[str, ...]] = Field(default_factory=dict)


class ClusterKind(str, Enum):
    BATCH = "batch"
    COMPLEX = "complex"


class CaseCluster(BaseModel):
    model_config = ConfigDict(frozen=True)

    members: Tuple[str, ...]
    representative_citations: Tuple[ProvisionId, ...] = ()
    kind: ClusterKind


class CoreCriterion(BaseModel):
    """Exactly one of min_weight / top_k"""
    model_config = ConfigDict(frozen=True)

    min_weight: Optional[int] = Field(None, ge=1)
    top_k: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.min_weight is None) == (self.top_k is None):
            raise ValueError("core criterion needs exactly one of min_weight or top_k")
        return self

    @classmethod
    def parse(cls, text: str) -> "CoreCriterion":
        """Parse `min-weight=N` or `top-k=K`"""
        key, sep, value = text.partition("=")
        if not sep or not value.strip().isdigit():
            raise ValueError(f"invalid core criterion {text!r}; expected min-weight=N or top-k=K")
        key = key.strip().replace("_", "-")
        if key == "min-weight":
            return cls(min_weight=int(value))
        if key == "top-k":
            return cls(top_k=int(value))
        raise ValueError(f"invalid core criterion {text!r}; expected min-weight=N or top-k=K")

    def __str__(self) -> str:
        if self.min_weight is not None:
            return f"min-weight={self.min_weight}"
        return f"top-k={self.top_k}"


class CorePath(BaseModel):
    model_config = ConfigDict(frozen=True)

    edges: Tuple[Tuple[ProvisionId, ProvisionId, int], ...] = ()
    criterion: CoreCriterion

    def pairs(self) -> List[Tuple[ProvisionId, ProvisionId]]:
        return [(u, v) for u, v, _ in self.edges]


class DeviationAlert(BaseModel):
    model_config = ConfigDict(frozen=True)

    doc_id: str
    missing_core_pairs: Tuple[Tuple[ProvisionId, ProvisionId], ...]
    severity: float = Field(..., gt=0.0, le=1.0)
