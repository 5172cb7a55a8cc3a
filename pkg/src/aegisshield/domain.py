"""Shared value types, validation, and the DREAD arithmetic.

Everything here is pure data plus pure functions; no I/O. The canonical
JSON field names ("Threat Type", "Scenario", "Potential Impact",
"MITRE ATT&CK Keywords", ...) follow the prompt contracts so that
documents round-trip between providers, storage, and reports unchanged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum

from .errors import OutOfRangeError, ValidationError

SENTINEL_STIX_ID = "attack-pattern--00000000-0000-0000-0000-000000000000"

THREATS_PER_CATEGORY = 3

# Technique ids (T1557, T1566.001) and STIX attack-pattern ids are banned
# from keyword lists by the threat-identification prompt.
TECHNIQUE_ID_TOKEN = re.compile(r"\bT\d{4}(\.\d{3})?\b")
STIX_ID_TOKEN = re.compile(r"attack-pattern--[0-9a-fA-F-]{36}")

_VERSION_PATTERN = re.compile(r"^\d+(\.\d+)*(\.\*)?$")


class StrideCategory(Enum):
    SPOOFING = "Spoofing"
    TAMPERING = "Tampering"
    REPUDIATION = "Repudiation"
    INFORMATION_DISCLOSURE = "Information Disclosure"
    DENIAL_OF_SERVICE = "Denial of Service"
    ELEVATION_OF_PRIVILEGE = "Elevation of Privilege"

    @classmethod
    def parse(cls, label: str) -> "StrideCategory":
        """Case-insensitive parse of the six category labels."""
        normalized = " ".join(str(label).split()).lower()
        for member in cls:
            if member.value.lower() == normalized:
                return member
        raise ValueError(f"unknown STRIDE category: {label!r}")

    def __str__(self) -> str:
        return self.value


DATA_SENSITIVITY_VALUES = ("None", "Low", "Medium", "High")
EMPLOYEE_RANGE_VALUES = ("Unknown", "0-10", "11-100", "101-1000", "Over 1000")
TECHNICAL_ABILITY_VALUES = ("Low", "Medium", "High")
TECHNOLOGY_CATEGORY_VALUES = ("Database", "OperatingSystem", "Language", "WebFramework")


@dataclass(frozen=True)
class TechnologySelection:
    category: str
    name: str
    version_pattern: str = ""


@dataclass(frozen=True)
class ApplicationProfile:
    """User-supplied system description plus the questionnaire answers.

    Keeping personally identifying content out of ``description`` is the
    caller's responsibility; nothing here inspects it.
    """

    description: str
    app_type: str
    industry_sector: str
    data_sensitivity: str = "Medium"
    internet_facing: bool = True
    employee_range: str = "Unknown"
    compliance: tuple[str, ...] = ()
    auth_methods: tuple[str, ...] = ()
    technical_ability: str = "Medium"
    technologies: tuple[TechnologySelection, ...] = ()

    def to_doc(self) -> dict:
        return {
            "description": self.description,
            "app_type": self.app_type,
            "industry_sector": self.industry_sector,
            "data_sensitivity": self.data_sensitivity,
            "internet_facing": self.internet_facing,
            "employee_range": self.employee_range,
            "compliance": list(self.compliance),
            "auth_methods": list(self.auth_methods),
            "technical_ability": self.technical_ability,
            "technologies": [
                {"category": t.category, "name": t.name, "version_pattern": t.version_pattern}
                for t in self.technologies
            ],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ApplicationProfile":
        return cls(
            description=doc.get("description", ""),
            app_type=doc.get("app_type", ""),
            industry_sector=doc.get("industry_sector", ""),
            data_sensitivity=doc.get("data_sensitivity", "Medium"),
            internet_facing=bool(doc.get("internet_facing", True)),
            employee_range=doc.get("employee_range", "Unknown"),
            compliance=tuple(doc.get("compliance", ())),
            auth_methods=tuple(doc.get("auth_methods", ())),
            technical_ability=doc.get("technical_ability", "Medium"),
            technologies=tuple(
                TechnologySelection(
                    category=t.get("category", ""),
                    name=t.get("name", ""),
                    version_pattern=t.get("version_pattern", ""),
                )
                for t in doc.get("technologies", ())
            ),
        )


def validate_profile(profile: ApplicationProfile) -> ApplicationProfile:
    """Return the profile unchanged if every invariant holds.

    Raises ValidationError carrying every field-addressed problem:
    EmptyDescription, InvalidEnum, BadVersionPattern.
    """
    errors = []
    if not profile.description or not profile.description.strip():
        errors.append(("EmptyDescription", "description", "description must be non-empty"))
    if profile.data_sensitivity not in DATA_SENSITIVITY_VALUES:
        errors.append(
            ("InvalidEnum", "data_sensitivity",
             f"{profile.data_sensitivity!r} not in {DATA_SENSITIVITY_VALUES}")
        )
    if profile.employee_range not in EMPLOYEE_RANGE_VALUES:
        errors.append(
            ("InvalidEnum", "employee_range",
             f"{profile.employee_range!r} not in {EMPLOYEE_RANGE_VALUES}")
        )
    if profile.technical_ability not in TECHNICAL_ABILITY_VALUES:
        errors.append(
            ("InvalidEnum", "technical_ability",
             f"{profile.technical_ability!r} not in {TECHNICAL_ABILITY_VALUES}")
        )
    for i, tech in enumerate(profile.technologies):
        if tech.category not in TECHNOLOGY_CATEGORY_VALUES:
            errors.append(
                ("InvalidEnum", f"technologies[{i}].category",
                 f"{tech.category!r} not in {TECHNOLOGY_CATEGORY_VALUES}")
            )
        if tech.version_pattern and not _VERSION_PATTERN.match(tech.version_pattern):
            errors.append(
                ("BadVersionPattern", f"technologies[{i}].version_pattern",
                 f"{tech.version_pattern!r} must look like 4.0, 4.0.1 or 4.0.*")
            )
    if errors:
        raise ValidationError(errors)
    return profile


@dataclass(frozen=True)
class Assumption:
    assumption: str
    role: str
    condition: str


@dataclass(frozen=True)
class ThreatScenario:
    threat_type: StrideCategory
    scenario: str
    potential_impact: str
    assumptions: tuple[Assumption, ...] = ()
    keywords: tuple[str, ...] = ()

    def to_doc(self) -> dict:
        return {
            "Threat Type": self.threat_type.value,
            "Scenario": self.scenario,
            "Assumptions": [
                {"Assumption": a.assumption, "Role": a.role, "Condition": a.condition}
                for a in self.assumptions
            ],
            "Potential Impact": self.potential_impact,
            "MITRE ATT&CK Keywords": list(self.keywords),
        }


def risk_score(damage: int, reproducibility: int, exploitability: int,
               affected_users: int, discoverability: int) -> Decimal:
    """Arithmetic mean of the five dimensions, rounded half-up to 2 decimals."""
    dims = (damage, reproducibility, exploitability, affected_users, discoverability)
    for value in dims:
        if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 10:
            raise OutOfRangeError(f"DREAD dimension {value!r} outside [1, 10]")
    return (Decimal(sum(dims)) / 5).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class DreadScore:
    damage: int
    reproducibility: int
    exploitability: int
    affected_users: int
    discoverability: int
    risk_score: Decimal = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        expected = risk_score(self.damage, self.reproducibility, self.exploitability,
                              self.affected_users, self.discoverability)
        if self.risk_score is None:
            object.__setattr__(self, "risk_score", expected)
        elif Decimal(str(self.risk_score)) != expected:
            raise OutOfRangeError(
                f"risk_score {self.risk_score} inconsistent with dimensions (expected {expected})"
            )

    def to_doc(self) -> dict:
        return {
            "Damage Potential": self.damage,
            "Reproducibility": self.reproducibility,
            "Exploitability": self.exploitability,
            "Affected Users": self.affected_users,
            "Discoverability": self.discoverability,
            "Risk Score": str(self.risk_score),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "DreadScore":
        return cls(
            damage=doc["Damage Potential"],
            reproducibility=doc["Reproducibility"],
            exploitability=doc["Exploitability"],
            affected_users=doc["Affected Users"],
            discoverability=doc["Discoverability"],
        )


@dataclass(frozen=True)
class MitreMapping:
    stix_id: str
    technique_id: str
    name: str
    url: str
    hallucination: bool = False

    @property
    def mapped(self) -> bool:
        return self.stix_id != SENTINEL_STIX_ID and self.technique_id != "N/A"

    def to_doc(self) -> dict:
        return {
            "Attack Pattern ID": self.stix_id,
            "Technique ID": self.technique_id,
            "Name": self.name,
            "URL": self.url,
            "Mapped": self.mapped,
            "Hallucination": self.hallucination,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "MitreMapping":
        return cls(
            stix_id=doc["Attack Pattern ID"],
            technique_id=doc["Technique ID"],
            name=doc["Name"],
            url=doc["URL"],
            hallucination=bool(doc.get("Hallucination", False)),
        )


@dataclass(frozen=True)
class MitigationSet:
    raw_markdown: str
    entries: tuple[dict, ...] = ()  # {threat_type, scenario, mitigation_text}

    def to_doc(self) -> dict:
        return {"raw_markdown": self.raw_markdown, "entries": list(self.entries)}

    @classmethod
    def from_doc(cls, doc: dict) -> "MitigationSet":
        return cls(raw_markdown=doc["raw_markdown"], entries=tuple(doc.get("entries", ())))


@dataclass(frozen=True)
class GherkinSuiteList:
    suites: tuple[dict, ...] = ()  # {title, gherkin_source}

    def to_doc(self) -> dict:
        return {"suites": list(self.suites)}

    @classmethod
    def from_doc(cls, doc: dict) -> "GherkinSuiteList":
        return cls(suites=tuple(doc.get("suites", ())))


@dataclass(frozen=True)
class AttackTree:
    mermaid_source: str

    def __post_init__(self):
        if not self.mermaid_source.strip().startswith("graph"):
            from .errors import NotMermaidError

            raise NotMermaidError("attack tree source must begin with the 'graph' token")

    def to_doc(self) -> dict:
        return {"mermaid_source": self.mermaid_source}

    @classmethod
    def from_doc(cls, doc: dict) -> "AttackTree":
        return cls(mermaid_source=doc["mermaid_source"])


@dataclass(frozen=True)
class PipelineConfig:
    threats_per_category: int = 3
    candidate_cap: int = 25
    pulse_cap: int = 5
    cve_cap: int = 10
    cvss_cutoff: float = 7.0
    retries_per_stage: int = 2
    context_char_budget: int = 12000
    sampling_temperature: float = 0.7
    max_output_tokens: int = 8192

    def __post_init__(self):
        for name in ("threats_per_category", "candidate_cap", "pulse_cap", "cve_cap"):
            if getattr(self, name) < 1:
                raise ValidationError([("InvalidEnum", name, "caps must be >= 1")])
        if not 0 <= self.cvss_cutoff <= 10:
            raise ValidationError([("InvalidEnum", "cvss_cutoff", "must be in [0, 10]")])


@dataclass(frozen=True)
class EvalProtocol:
    similarity_threshold: float = 0.7
    majority_fraction: float = 0.5
    batches_per_case: int = 30
    mapping_benchmark: float = 0.80
    alpha: float = 0.05

    def __post_init__(self):
        if not 0 < self.similarity_threshold <= 1:
            raise ValidationError([("InvalidEnum", "similarity_threshold", "must be in (0, 1]")])
        if self.batches_per_case < 1:
            raise ValidationError([("InvalidEnum", "batches_per_case", "must be >= 1")])


@dataclass(frozen=True)
class RubricRecord:
    case_id: str
    criteria: tuple[int, ...]  # 9 entries, Table order
    threat_count: int

    def __post_init__(self):
        if len(self.criteria) != 9 or any(not 1 <= c <= 5 for c in self.criteria):
            raise ValidationError(
                [("InvalidEnum", "criteria", "exactly 9 criteria, each in [1, 5]")]
            )
        if self.threat_count < 1:
            raise ValidationError([("InvalidEnum", "threat_count", "must be >= 1")])


@dataclass(frozen=True)
class ExpertThreat:
    case_id: str
    threat_type: StrideCategory
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValidationError([("EmptyDescription", "text", "text must be non-empty")])


@dataclass
class RunMetadata:
    timestamp: str = ""
    provider_model_id: str = ""
    run_index: int = 0
    warnings: list[str] = field(default_factory=list)
    temperature: float | None = None
    max_output_tokens: int | None = None

    def to_doc(self) -> dict:
        doc = {
            "timestamp": self.timestamp,
            "provider_model_id": self.provider_model_id,
            "run_index": self.run_index,
            "warnings": list(self.warnings),
        }
        if self.temperature is not None:
            doc["temperature"] = self.temperature
        if self.max_output_tokens is not None:
            doc["max_output_tokens"] = self.max_output_tokens
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "RunMetadata":
        return cls(
            timestamp=doc.get("timestamp", ""),
            provider_model_id=doc.get("provider_model_id", ""),
            run_index=doc.get("run_index", 0),
            warnings=list(doc.get("warnings", ())),
            temperature=doc.get("temperature"),
            max_output_tokens=doc.get("max_output_tokens"),
        )


@dataclass
class ThreatModelRun:
    profile: ApplicationProfile
    threats: list[ThreatScenario]
    improvement_suggestions: list[str]
    mappings: list[MitreMapping] = field(default_factory=list)
    dread: list[DreadScore] | None = None
    mitigations: MitigationSet | None = None
    test_cases: GherkinSuiteList | None = None
    attack_tree: AttackTree | None = None
    metadata: RunMetadata = field(default_factory=RunMetadata)

    def validate(self) -> "ThreatModelRun":
        counts = {cat: 0 for cat in StrideCategory}
        for threat in self.threats:
            counts[threat.threat_type] += 1
        bad = {c.value: n for c, n in counts.items() if n != THREATS_PER_CATEGORY}
        if len(self.threats) != 6 * THREATS_PER_CATEGORY or bad:
            raise ValidationError(
                [("WrongThreatCount", "threats",
                  f"need {THREATS_PER_CATEGORY} per category, got {bad or len(self.threats)}")]
            )
        if self.mappings and len(self.mappings) != len(self.threats):
            raise ValidationError(
                [("WrongThreatCount", "mappings",
                  f"{len(self.mappings)} mappings for {len(self.threats)} threats")]
            )
        return self

    def to_doc(self) -> dict:
        doc = {
            "profile": self.profile.to_doc(),
            "threat_model": [t.to_doc() for t in self.threats],
            "improvement_suggestions": list(self.improvement_suggestions),
            "mappings": [m.to_doc() for m in self.mappings],
            "metadata": self.metadata.to_doc(),
        }
        if self.dread is not None:
            doc["dread"] = [d.to_doc() for d in self.dread]
        if self.mitigations is not None:
            doc["mitigations"] = self.mitigations.to_doc()
        if self.test_cases is not None:
            doc["test_cases"] = self.test_cases.to_doc()
        if self.attack_tree is not None:
            doc["attack_tree"] = self.attack_tree.to_doc()
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "ThreatModelRun":
        threats, suggestions = validate_threat_model_doc(
            {"threat_model": doc["threat_model"],
             "improvement_suggestions": doc["improvement_suggestions"]}
        )
        return cls(
            profile=ApplicationProfile.from_doc(doc["profile"]),
            threats=threats,
            improvement_suggestions=suggestions,
            mappings=[MitreMapping.from_doc(m) for m in doc.get("mappings", ())],
            dread=[DreadScore.from_doc(d) for d in doc["dread"]] if "dread" in doc else None,
            mitigations=MitigationSet.from_doc(doc["mitigations"]) if "mitigations" in doc else None,
            test_cases=GherkinSuiteList.from_doc(doc["test_cases"]) if "test_cases" in doc else None,
            attack_tree=AttackTree.from_doc(doc["attack_tree"]) if "attack_tree" in doc else None,
            metadata=RunMetadata.from_doc(doc.get("metadata", {})),
        )


def sanitize_keywords(keywords) -> tuple[tuple[str, ...], list[str]]:
    """Drop keywords carrying technique-id or STIX-id tokens.

    Returns (clean keywords, warnings). The prompt forbids these tokens but
    providers emit them anyway; dropping with a warning beats rejecting the
    whole document.
    """
    clean, warnings = [], []
    for kw in keywords:
        kw = str(kw)
        if TECHNIQUE_ID_TOKEN.search(kw) or STIX_ID_TOKEN.search(kw):
            warnings.append(f"dropped keyword containing a forbidden id token: {kw!r}")
        else:
            clean.append(kw)
    return tuple(clean), warnings


def serialize_threat_model(threats, improvement_suggestions) -> dict:
    """Canonical document form of a threat list; inverse of validate_threat_model_doc."""
    return {
        "threat_model": [t.to_doc() for t in threats],
        "improvement_suggestions": list(improvement_suggestions),
    }


def validate_threat_model_doc(doc: dict) -> tuple[list[ThreatScenario], list[str]]:
    """Validate a provider threat-model document.

    Returns 18 ThreatScenario (3 per category, document order preserved)
    plus the improvement suggestions. Keywords carrying forbidden id
    tokens are stripped; the warnings ride back on the returned scenarios'
    companion list accessible via ``validate_threat_model_doc.last_warnings``
    only through the pipeline (callers needing warnings should use
    ``parse_threat_model_doc``).
    """
    threats, suggestions, _ = parse_threat_model_doc(doc)
    return threats, suggestions


def parse_threat_model_doc(doc: dict) -> tuple[list[ThreatScenario], list[str], list[str]]:
    """validate_threat_model_doc plus the keyword-sanitation warnings."""
    errors = []
    if not isinstance(doc, dict):
        raise ValidationError([("MissingKey", "$", "document is not an object")])
    for key in ("threat_model", "improvement_suggestions"):
        if key not in doc:
            errors.append(("MissingKey", key, f"document lacks {key!r}"))
    if errors:
        raise ValidationError(errors)

    warnings: list[str] = []
    threats: list[ThreatScenario] = []
    counts = {cat: 0 for cat in StrideCategory}
    for i, entry in enumerate(doc["threat_model"]):
        where = f"threat_model[{i}]"
        if not isinstance(entry, dict):
            errors.append(("MissingKey", where, "entry is not an object"))
            continue
        missing = [k for k in ("Threat Type", "Scenario", "Potential Impact") if k not in entry]
        if missing:
            errors.append(("MissingKey", where, f"missing keys {missing}"))
            continue
        try:
            category = StrideCategory.parse(entry["Threat Type"])
        except ValueError:
            errors.append(("UnknownCategory", f"{where}.Threat Type",
                           f"{entry['Threat Type']!r} is not a STRIDE category"))
            continue
        impact = entry["Potential Impact"]
        if not isinstance(impact, str):
            errors.append(("NestedImpact", f"{where}.Potential Impact",
                           "must be a flat summary string, not a nested value"))
            continue
        assumptions = tuple(
            Assumption(
                assumption=str(a.get("Assumption", "")),
                role=str(a.get("Role", "")),
                condition=str(a.get("Condition", "")),
            )
            for a in entry.get("Assumptions", ())
            if isinstance(a, dict)
        )
        keywords, kw_warnings = sanitize_keywords(entry.get("MITRE ATT&CK Keywords", ()))
        warnings.extend(kw_warnings)
        counts[category] += 1
        threats.append(
            ThreatScenario(
                threat_type=category,
                scenario=str(entry["Scenario"]),
                potential_impact=impact,
                assumptions=assumptions,
                keywords=keywords,
            )
        )
    if errors:
        raise ValidationError(errors)

    off = {c.value: n for c, n in counts.items() if n != THREATS_PER_CATEGORY}
    if off:
        raise ValidationError(
            [("WrongThreatCount", "threat_model",
              f"need exactly {THREATS_PER_CATEGORY} per category; counts off: {off}")]
        )

    suggestions = [str(s) for s in doc["improvement_suggestions"]]
    return threats, suggestions, warnings
