"""AegisShield: automated STRIDE threat modeling with MITRE ATT&CK mapping,
DREAD scoring, OSINT enrichment, report emission, and an evaluation kit."""

from .domain import (
    ApplicationProfile,
    Assumption,
    AttackTree,
    DreadScore,
    EvalProtocol,
    ExpertThreat,
    GherkinSuiteList,
    MitigationSet,
    MitreMapping,
    PipelineConfig,
    RubricRecord,
    RunMetadata,
    SENTINEL_STIX_ID,
    StrideCategory,
    TechnologySelection,
    ThreatModelRun,
    ThreatScenario,
    risk_score,
    validate_profile,
    validate_threat_model_doc,
)

__version__ = "0.1.0"

__all__ = [
    "ApplicationProfile",
    "Assumption",
    "AttackTree",
    "DreadScore",
    "EvalProtocol",
    "ExpertThreat",
    "GherkinSuiteList",
    "MitigationSet",
    "MitreMapping",
    "PipelineConfig",
    "RubricRecord",
    "RunMetadata",
    "SENTINEL_STIX_ID",
    "StrideCategory",
    "TechnologySelection",
    "ThreatModelRun",
    "ThreatScenario",
    "risk_score",
    "validate_profile",
    "validate_threat_model_doc",
]
