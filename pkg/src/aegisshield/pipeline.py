"""Six-stage threat-model orchestration and the batch protocol.

A single run is sequential because every stage feeds the next; distinct
runs in a batch share the (immutable) knowledge base and the gateway.
Intel failures degrade to empty context blocks with a warning; generation
failures abort the run.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
import re
from dataclasses import dataclass, field

from . import attack_kb
from .attack_kb import KnowledgeBase, keyword_search, resolve_pattern, select_datasets
from .domain import (
    SENTINEL_STIX_ID,
    ApplicationProfile,
    AttackTree,
    DreadScore,
    GherkinSuiteList,
    MitigationSet,
    MitreMapping,
    PipelineConfig,
    RunMetadata,
    ThreatModelRun,
    ThreatScenario,
    parse_threat_model_doc,
    risk_score,
    validate_profile,
)
from .errors import (
    AegisError,
    GenerationFailedError,
    NoParsableObjectError,
    NotMermaidError,
    OutOfRangeError,
    SchemaViolationError,
    ValidationError,
)
from .gateway import CompletionRequest, Gateway, extract_structured
from .prompts import PromptKind, render_prompt

CORRECTIVE_NOTE = "Respond with only the specified structure."

_THREAT_MODEL_SHAPE = {"threat_model": [dict], "improvement_suggestions": [str]}
_DREAD_SHAPE = {"Risk Assessment": [dict]}


@dataclass
class RunContext:
    profile: ApplicationProfile
    kb: KnowledgeBase
    gateway: Gateway
    config: PipelineConfig = field(default_factory=PipelineConfig)
    nvd_block: str = ""
    otx_block: str = ""
    warnings: list[str] = field(default_factory=list)

    def profile_bindings(self) -> dict[str, str]:
        profile = self.profile
        technologies = ", ".join(
            f"{t.name} {t.version_pattern}".strip() for t in profile.technologies
        )
        description = profile.description
        if technologies:
            description = f"{description}\nSELECTED TECHNOLOGIES: {technologies}"
        if profile.compliance:
            description = f"{description}\nCOMPLIANCE REQUIREMENTS: {', '.join(profile.compliance)}"
        return {
            "app_type": profile.app_type,
            "industry_sector": profile.industry_sector,
            "authentication": ", ".join(profile.auth_methods) or "N/A",
            "internet_facing": "Yes" if profile.internet_facing else "No",
            "sensitive_data": profile.data_sensitivity,
            "app_input": description,
            "technical_ability": profile.technical_ability,
        }


def _complete_stage(ctx: RunContext, kind: PromptKind, prompt: str) -> str:
    request = CompletionRequest(
        messages=({"role": "user", "text": prompt},),
        temperature=ctx.config.sampling_temperature,
        max_output_tokens=ctx.config.max_output_tokens,
    )
    outcome = ctx.gateway.complete(request, kind=kind)
    for event in outcome.retry_events:
        ctx.warnings.append(f"{kind.value}: {event}")
    return outcome.text


def _corrective_retry(ctx: RunContext, kind: PromptKind, prompt: str) -> str:
    """One re-ask with a terse system note demanding the exact structure."""
    request = CompletionRequest(
        messages=(
            {"role": "system", "text": CORRECTIVE_NOTE},
            {"role": "user", "text": prompt},
        ),
        temperature=ctx.config.sampling_temperature,
        max_output_tokens=ctx.config.max_output_tokens,
    )
    outcome = ctx.gateway.complete(request, kind=kind)
    for event in outcome.retry_events:
        ctx.warnings.append(f"{kind.value}: {event}")
    return outcome.text


def generate_threats(ctx: RunContext) -> tuple[list[ThreatScenario], list[str]]:
    """Stage 1: the STRIDE threat model (18 threats, 3 per category)."""
    bindings = ctx.profile_bindings()
    bindings["nvd_vulnerabilities"] = ctx.nvd_block or "None provided."
    bindings["otx_data"] = ctx.otx_block or "None provided."
    prompt = render_prompt(PromptKind.THREAT_MODEL, bindings)

    last_error: Exception | None = None
    for attempt in range(2):  # initial try + one corrective retry
        raw = (_complete_stage if attempt == 0 else _corrective_retry)(
            ctx, PromptKind.THREAT_MODEL, prompt
        )
        try:
            doc = extract_structured(raw, _THREAT_MODEL_SHAPE)
            threats, suggestions, warnings = parse_threat_model_doc(doc)
            ctx.warnings.extend(warnings)
            return threats, suggestions
        except (NoParsableObjectError, SchemaViolationError, ValidationError) as exc:
            last_error = exc
            ctx.warnings.append(f"threat_model attempt {attempt + 1} rejected: {exc}")
    raise GenerationFailedError(f"threat model stage failed after retry: {last_error}")


def map_threat(ctx: RunContext, threat: ThreatScenario) -> MitreMapping:
    """Stage 2: select the single most relevant attack pattern.

    Empty candidate lists short-circuit to the sentinel without any
    provider call; ids outside the candidate list are hallucinations and
    quarantine to the sentinel.
    """
    datasets = select_datasets(ctx.profile.app_type)
    candidates = keyword_search(ctx.kb, datasets, threat.keywords, ctx.config.candidate_cap)
    if not candidates:
        return MitreMapping(
            stix_id=SENTINEL_STIX_ID, technique_id="N/A",
            name="Unknown", url=attack_kb.UNKNOWN_TECHNIQUE_URL,
        )

    bindings = ctx.profile_bindings()
    bindings["threat"] = json.dumps(threat.to_doc(), indent=2)
    bindings["technique_descriptions"] = json.dumps(
        [c.to_doc() for c in candidates], indent=2
    )
    prompt = render_prompt(PromptKind.MITRE_SELECT, bindings)

    last_error: Exception | None = None
    for attempt in range(2):
        raw = (_complete_stage if attempt == 0 else _corrective_retry)(
            ctx, PromptKind.MITRE_SELECT, prompt
        )
        try:
            selected = extract_structured(raw, [str])
        except (NoParsableObjectError, SchemaViolationError) as exc:
            last_error = exc
            ctx.warnings.append(f"mitre_select attempt {attempt + 1} rejected: {exc}")
            continue
        if len(selected) != 1:
            last_error = SchemaViolationError("$", "expected a single-element array")
            ctx.warnings.append(f"mitre_select attempt {attempt + 1} rejected: {last_error}")
            continue
        chosen = selected[0]
        if chosen == SENTINEL_STIX_ID:
            return MitreMapping(
                stix_id=SENTINEL_STIX_ID, technique_id="N/A",
                name="Unknown", url=attack_kb.UNKNOWN_TECHNIQUE_URL,
            )
        by_id = {c.stix_id: c for c in candidates}
        if chosen not in by_id:
            ctx.warnings.append(
                f"mitre_select returned an id outside the candidate list: {chosen!r}"
            )
            return MitreMapping(
                stix_id=SENTINEL_STIX_ID, technique_id="N/A",
                name="Unknown", url=attack_kb.UNKNOWN_TECHNIQUE_URL,
                hallucination=True,
            )
        pattern = resolve_pattern(ctx.kb, chosen)
        return MitreMapping(
            stix_id=pattern.stix_id, technique_id=pattern.technique_id,
            name=pattern.name, url=pattern.url,
        )
    raise GenerationFailedError(f"attack-pattern selection failed after retry: {last_error}")


def _render_threats_block(threats) -> str:
    return json.dumps([t.to_doc() for t in threats], indent=2)


def _render_mappings_block(threats, mappings) -> str:
    return json.dumps(
        [
            {"Threat Type": t.threat_type.value, "Scenario": t.scenario, **m.to_doc()}
            for t, m in zip(threats, mappings)
        ],
        indent=2,
    )


def assess_dread(ctx: RunContext, threats, mappings) -> list[DreadScore]:
    """Stage 3: DREAD scores paired to threats by (type, scenario), falling
    back to positional order with a warning."""
    if not threats:
        raise GenerationFailedError("no threats to assess")
    bindings = {
        "threats": _render_threats_block(threats),
        "mitre_mapping": _render_mappings_block(threats, mappings) if mappings else "[]",
        "nvd_vulnerabilities": ctx.nvd_block or "None provided.",
    }
    prompt = render_prompt(PromptKind.DREAD, bindings)

    last_error: Exception | None = None
    for attempt in range(2):
        raw = (_complete_stage if attempt == 0 else _corrective_retry)(
            ctx, PromptKind.DREAD, prompt
        )
        try:
            doc = extract_structured(raw, _DREAD_SHAPE)
            return _pair_dread(ctx, threats, doc["Risk Assessment"])
        except (NoParsableObjectError, SchemaViolationError, OutOfRangeError, KeyError) as exc:
            last_error = exc
            ctx.warnings.append(f"dread attempt {attempt + 1} rejected: {exc}")
    if isinstance(last_error, OutOfRangeError):
        raise last_error
    raise GenerationFailedError(f"DREAD stage failed after retry: {last_error}")


def _pair_dread(ctx: RunContext, threats, entries) -> list[DreadScore]:
    def score_of(entry) -> DreadScore:
        dims = []
        for key in ("Damage Potential", "Reproducibility", "Exploitability",
                    "Affected Users", "Discoverability"):
            value = entry[key]
            if not isinstance(value, int) or isinstance(value, bool):
                raise OutOfRangeError(f"{key} is {value!r}, not an integer")
            dims.append(value)
        risk_score(*dims)  # range check; DreadScore recomputes below
        return DreadScore(*dims)

    by_key = {}
    for entry in entries:
        key = (str(entry.get("Threat Type", "")), str(entry.get("Scenario", "")))
        by_key.setdefault(key, []).append(entry)

    scores: list[DreadScore | None] = []
    unmatched_threats = []
    for index, threat in enumerate(threats):
        key = (threat.threat_type.value, threat.scenario)
        bucket = by_key.get(key)
        if bucket:
            scores.append(score_of(bucket.pop(0)))
        else:
            scores.append(None)
            unmatched_threats.append(index)

    if unmatched_threats:
        leftovers = [e for bucket in by_key.values() for e in bucket]
        ctx.warnings.append(
            f"dread: {len(unmatched_threats)} threats paired positionally"
        )
        for index in unmatched_threats:
            if leftovers:
                scores[index] = score_of(leftovers.pop(0))
            else:
                ctx.warnings.append(
                    f"dread: no entry for threat {index}; neutral minimum assigned"
                )
                scores[index] = DreadScore(1, 1, 1, 1, 1)
    return scores  # type: ignore[return-value]


_TABLE_ROW = re.compile(r"^\s*\|(.+)\|\s*$")
_SEPARATOR_ROW = re.compile(r"^\s*\|[\s:|-]+\|\s*$")


def generate_mitigations(ctx: RunContext, threats, mappings) -> MitigationSet:
    """Stage 4: mitigation table; raw markdown always retained, rows parsed
    leniently."""
    bindings = {
        "threats": _render_threats_block(threats),
        "mitre_mapping": _render_mappings_block(threats, mappings) if mappings else "[]",
        "nvd_vulnerabilities": ctx.nvd_block or "None provided.",
    }
    raw = _complete_stage(ctx, PromptKind.MITIGATIONS, render_prompt(PromptKind.MITIGATIONS, bindings))
    if not raw.strip():
        raise GenerationFailedError("mitigations stage returned empty text")
    entries = []
    header_seen = False
    for line in raw.splitlines():
        match = _TABLE_ROW.match(line)
        if not match or _SEPARATOR_ROW.match(line):
            continue
        cells = [c.strip() for c in match.group(1).split("|")]
        if not header_seen:
            header_seen = True  # first pipe row is the header
            continue
        if len(cells) < 3:
            ctx.warnings.append(f"mitigations: skipped malformed row: {line.strip()!r}")
            continue
        if "<br" in line.lower():
            ctx.warnings.append("mitigations: table cell contains an HTML line break")
        entries.append(
            {"threat_type": cells[0], "scenario": cells[1],
             "mitigation_text": " | ".join(cells[2:]).strip()}
        )
    return MitigationSet(raw_markdown=raw, entries=tuple(entries))


_FENCED_BLOCK = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)


def generate_test_cases(ctx: RunContext, threats) -> GherkinSuiteList:
    """Stage 5: Gherkin suites from fenced blocks with preceding titles."""
    bindings = {"threats": _render_threats_block(threats)}
    raw = _complete_stage(ctx, PromptKind.TEST_CASES, render_prompt(PromptKind.TEST_CASES, bindings))
    suites = []
    last_end = 0
    for match in _FENCED_BLOCK.finditer(raw):
        preceding = raw[last_end:match.start()].strip().splitlines()
        title = preceding[-1].strip().lstrip("#").strip() if preceding else ""
        suites.append({"title": title, "gherkin_source": match.group(1).strip()})
        last_end = match.end()
    if not suites:
        raise GenerationFailedError("test-case stage produced no fenced blocks")
    return GherkinSuiteList(suites=tuple(suites))


def generate_attack_tree(ctx: RunContext, threats, mappings) -> AttackTree:
    """Stage 6: mermaid attack tree; fence stripped, must start with 'graph'."""
    bindings = ctx.profile_bindings()
    bindings["threats"] = _render_threats_block(threats)
    bindings["mitre_mapping"] = _render_mappings_block(threats, mappings) if mappings else "[]"
    raw = _complete_stage(ctx, PromptKind.ATTACK_TREE, render_prompt(PromptKind.ATTACK_TREE, bindings))
    fenced = _FENCED_BLOCK.search(raw)
    source = (fenced.group(1) if fenced else raw).strip()
    if not source.startswith("graph"):
        raise NotMermaidError("attack-tree output does not begin with a 'graph' header")
    return AttackTree(mermaid_source=source)


def fetch_intel(profile: ApplicationProfile, config: PipelineConfig,
                nvd_client=None, otx_client=None) -> tuple[str, str, list[str]]:
    """Gather CVE/pulse context; failures degrade to empty blocks plus a
    warning so batch runs survive outages."""
    from .intel import render_context

    warnings: list[str] = []
    cves: dict = {}
    pulses: list = []
    if nvd_client is not None and profile.technologies:
        try:
            cves = nvd_client.fetch_cves(profile.technologies, config)
        except AegisError as exc:
            warnings.append(f"nvd unavailable: {exc}")
    elif not profile.technologies:
        warnings.append("no technologies selected; NVD context skipped")
    if otx_client is not None:
        try:
            pulses = otx_client.fetch_pulses(profile.industry_sector, config)
        except AegisError as exc:
            warnings.append(f"otx unavailable: {exc}")
    nvd_block, otx_block = render_context(cves, pulses, config.context_char_budget)
    return nvd_block, otx_block, warnings


def run_full(profile: ApplicationProfile, config: PipelineConfig, gateway: Gateway,
             kb: KnowledgeBase, nvd_client=None, otx_client=None,
             run_index: int = 0, clock=None) -> ThreatModelRun:
    """Execute all six stages and assemble a ThreatModelRun."""
    if not gateway.configured:
        raise ValidationError(
            [("MissingKey", "gateway", "LLM provider key/endpoint not configured")]
        )
    validate_profile(profile)

    nvd_block, otx_block, intel_warnings = fetch_intel(
        profile, config, nvd_client=nvd_client, otx_client=otx_client
    )
    ctx = RunContext(
        profile=profile, kb=kb, gateway=gateway, config=config,
        nvd_block=nvd_block, otx_block=otx_block,
        warnings=list(intel_warnings),
    )

    threats, suggestions = generate_threats(ctx)
    mappings = [map_threat(ctx, threat) for threat in threats]
    dread = assess_dread(ctx, threats, mappings)
    mitigations = generate_mitigations(ctx, threats, mappings)
    test_cases = generate_test_cases(ctx, threats)
    attack_tree = generate_attack_tree(ctx, threats, mappings)

    now = clock() if clock else _dt.datetime.now(_dt.timezone.utc)
    run = ThreatModelRun(
        profile=profile,
        threats=threats,
        improvement_suggestions=suggestions,
        mappings=mappings,
        dread=dread,
        mitigations=mitigations,
        test_cases=test_cases,
        attack_tree=attack_tree,
        metadata=RunMetadata(
            timestamp=now.isoformat(),
            provider_model_id=gateway.model_id,
            run_index=run_index,
            warnings=ctx.warnings,
            temperature=config.sampling_temperature,
            max_output_tokens=config.max_output_tokens,
        ),
    )
    return run.validate()


def run_batch(profile: ApplicationProfile, n: int, out_dir: str, gateway: Gateway,
              kb: KnowledgeBase, config: PipelineConfig | None = None,
              nvd_client=None, otx_client=None, case_id: str | None = None,
              continue_on_error: bool = False, clock=None) -> dict:
    """Run the pipeline ``n`` times, writing batch-<k>.json per run and a
    manifest.

    With continue_on_error the batch records failures and keeps going;
    otherwise the first failure aborts.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    config = config or PipelineConfig()
    case_dir = os.path.join(out_dir, f"case-{case_id}") if case_id else out_dir
    os.makedirs(case_dir, exist_ok=True)

    from .storage import persist_run

    manifest = {
        "case_id": case_id,
        "total": n,
        "successes": 0,
        "failures": 0,
        "files": [],
        "errors": [],
        "threats_total": 0,
    }
    for k in range(1, n + 1):
        try:
            run = run_full(
                profile, config, gateway, kb,
                nvd_client=nvd_client, otx_client=otx_client,
                run_index=k, clock=clock,
            )
        except AegisError as exc:
            if not continue_on_error:
                raise
            manifest["failures"] += 1
            manifest["errors"].append({"run_index": k, "error": str(exc)})
            continue
        filename = f"batch-{k}.json"
        persist_run(run, os.path.join(case_dir, filename))
        manifest["successes"] += 1
        manifest["files"].append(filename)
        manifest["threats_total"] += len(run.threats)

    with open(os.path.join(case_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    return manifest
