import datetime
import json

import pytest

from aegisshield.attack_kb import load_bundle_objects
from aegisshield.domain import (
    ApplicationProfile,
    PipelineConfig,
    SENTINEL_STIX_ID,
    StrideCategory,
    ThreatScenario,
)
from aegisshield.errors import (
    GenerationFailedError,
    NotMermaidError,
    OutOfRangeError,
    ValidationError,
)
from aegisshield.gateway import Gateway, MockChatProvider
from aegisshield.pipeline import (
    RunContext,
    assess_dread,
    fetch_intel,
    generate_attack_tree,
    generate_mitigations,
    generate_test_cases,
    generate_threats,
    map_threat,
    run_batch,
    run_full,
)
from aegisshield.prompts import PromptKind
from aegisshield.storage import load_batch, load_run

FIXED_CLOCK = lambda: datetime.datetime(2024, 7, 1, tzinfo=datetime.timezone.utc)


def scripted_gateway(script):
    return Gateway(MockChatProvider(script=script), retries=0)


def make_ctx(profile, kb, gateway, **kwargs):
    return RunContext(profile=profile, kb=kb, gateway=gateway,
                      config=PipelineConfig(), **kwargs)


def synthetic_kb():
    objects = [
        {
            "type": "attack-pattern",
            "id": "attack-pattern--00000000-0000-4000-8000-000000000001",
            "name": "Credential Interception",
            "description": "Interception of credentials on the network.",
            "external_references": [{"source_name": "mitre-attack",
                                     "external_id": "T9001",
                                     "url": "https://attack.mitre.org/techniques/T9001/"}],
        },
        {
            "type": "attack-pattern",
            "id": "attack-pattern--00000000-0000-4000-8000-000000000002",
            "name": "Traffic Flooding",
            "description": "Flooding a network with traffic.",
            "external_references": [{"source_name": "mitre-attack",
                                     "external_id": "T9002",
                                     "url": "https://attack.mitre.org/techniques/T9002/"}],
        },
    ]
    return load_bundle_objects(objects, "Enterprise")


def spoof_threat(keywords=("credential", "network")):
    return ThreatScenario(
        threat_type=StrideCategory.SPOOFING,
        scenario="An attacker intercepts operator sessions.",
        potential_impact="Unauthorized control.",
        keywords=tuple(keywords),
    )


WEB_PROFILE = ApplicationProfile(
    description="A web portal.", app_type="Web application",
    industry_sector="Finance", data_sensitivity="High", internet_facing=True,
)


class TestGenerateThreats:
    def test_mock_yields_18_threats(self, daas_profile, kb, mock_gateway):
        ctx = make_ctx(daas_profile, kb, mock_gateway)
        threats, suggestions = generate_threats(ctx)
        assert len(threats) == 18
        counts = {}
        for threat in threats:
            counts[threat.threat_type] = counts.get(threat.threat_type, 0) + 1
        assert set(counts.values()) == {3}
        assert suggestions

    def test_wrong_count_retries_once_then_fails(self, daas_profile, kb, canned_threat_doc):
        short = {"threat_model": canned_threat_doc["threat_model"][1:],
                 "improvement_suggestions": ["x"]}
        provider = MockChatProvider(script={
            PromptKind.THREAT_MODEL: [json.dumps(short), json.dumps(short)],
        })
        ctx = make_ctx(daas_profile, kb, Gateway(provider, retries=0))
        with pytest.raises(GenerationFailedError):
            generate_threats(ctx)
        assert len(provider.calls) == 2  # initial + corrective retry

    def test_wrong_count_then_valid_succeeds(self, daas_profile, kb, canned_threat_doc):
        short = {"threat_model": canned_threat_doc["threat_model"][1:],
                 "improvement_suggestions": ["x"]}
        provider = MockChatProvider(script={
            PromptKind.THREAT_MODEL: [json.dumps(short), json.dumps(canned_threat_doc)],
        })
        ctx = make_ctx(daas_profile, kb, Gateway(provider, retries=0))
        threats, _ = generate_threats(ctx)
        assert len(threats) == 18

    def test_forbidden_keyword_stripped_with_warning(self, daas_profile, kb, canned_threat_doc):
        doc = json.loads(json.dumps(canned_threat_doc))
        doc["threat_model"][0]["MITRE ATT&CK Keywords"].append("T1557")
        provider = MockChatProvider(script={PromptKind.THREAT_MODEL: json.dumps(doc)})
        ctx = make_ctx(daas_profile, kb, Gateway(provider, retries=0))
        threats, _ = generate_threats(ctx)
        assert all("T1557" not in kw for kw in threats[0].keywords)
        assert any("forbidden id token" in w for w in ctx.warnings)


class TestMapThreat:
    def test_member_id_maps(self):
        kb = synthetic_kb()
        member = "attack-pattern--00000000-0000-4000-8000-000000000001"
        gateway = scripted_gateway({PromptKind.MITRE_SELECT: json.dumps([member])})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        mapping = map_threat(ctx, spoof_threat())
        assert mapping.mapped
        assert mapping.technique_id == "T9001"
        assert mapping.url == "https://attack.mitre.org/techniques/T9001/"
        assert not mapping.hallucination

    def test_fabricated_id_quarantines_with_flag(self):
        kb = synthetic_kb()
        fabricated = "attack-pattern--deadbeef-dead-4eef-8eef-deadbeefdead"
        gateway = scripted_gateway({PromptKind.MITRE_SELECT: json.dumps([fabricated])})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        mapping = map_threat(ctx, spoof_threat())
        assert not mapping.mapped
        assert mapping.stix_id == SENTINEL_STIX_ID
        assert mapping.technique_id == "N/A"
        assert mapping.hallucination

    def test_zero_candidates_sentinel_without_provider_call(self):
        kb = synthetic_kb()
        provider = MockChatProvider(script={PromptKind.MITRE_SELECT: "unused"})
        ctx = make_ctx(WEB_PROFILE, kb, Gateway(provider, retries=0))
        mapping = map_threat(ctx, spoof_threat(keywords=("nonexistent-term",)))
        assert mapping.stix_id == SENTINEL_STIX_ID
        assert not mapping.hallucination
        assert provider.calls == []

    def test_explicit_sentinel_selection(self):
        kb = synthetic_kb()
        gateway = scripted_gateway({PromptKind.MITRE_SELECT: json.dumps([SENTINEL_STIX_ID])})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        mapping = map_threat(ctx, spoof_threat())
        assert not mapping.mapped
        assert not mapping.hallucination

    def test_hallucination_is_not_an_error(self):
        kb = synthetic_kb()
        gateway = scripted_gateway({
            PromptKind.MITRE_SELECT: json.dumps(["attack-pattern--aaaaaaaa-aaaa-4aaa-8aaa-aaaaaaaaaaaa"]),
        })
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        map_threat(ctx, spoof_threat())  # must not raise
        assert any("outside the candidate list" in w for w in ctx.warnings)


def dread_entry(threat, dims):
    damage, repro, exploit, affected, discover = dims
    return {
        "Threat Type": threat.threat_type.value,
        "Scenario": threat.scenario,
        "Damage Potential": damage,
        "Reproducibility": repro,
        "Exploitability": exploit,
        "Affected Users": affected,
        "Discoverability": discover,
    }


class TestAssessDread:
    def test_aligned_entries(self, daas_profile, kb, mock_gateway):
        ctx = make_ctx(daas_profile, kb, mock_gateway)
        threats, _ = generate_threats(ctx)
        scores = assess_dread(ctx, threats, [])
        assert len(scores) == 18
        assert str(scores[0].risk_score) == "7.60"
        assert str(scores[1].risk_score) == "7.00"

    def test_out_of_range_retry_then_error(self, kb):
        threat = spoof_threat()
        bad = {"Risk Assessment": [dread_entry(threat, (11, 5, 5, 5, 5))]}
        gateway = scripted_gateway({PromptKind.DREAD: [json.dumps(bad), json.dumps(bad)]})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        with pytest.raises(OutOfRangeError):
            assess_dread(ctx, [threat], [])

    def test_positional_fallback_with_warning(self, kb):
        threats = [spoof_threat(), ThreatScenario(
            threat_type=StrideCategory.TAMPERING,
            scenario="Data altered in transit.",
            potential_impact="Integrity loss.",
        )]
        # second entry's scenario does not match any threat text
        entries = {"Risk Assessment": [
            dread_entry(threats[0], (5, 5, 5, 5, 5)),
            {**dread_entry(threats[1], (6, 6, 6, 6, 6)), "Scenario": "Renamed."},
        ]}
        gateway = scripted_gateway({PromptKind.DREAD: json.dumps(entries)})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        scores = assess_dread(ctx, threats, [])
        assert len(scores) == 2
        assert scores[1].damage == 6
        assert any("positionally" in w for w in ctx.warnings)

    def test_seventeen_entries_for_eighteen_threats(self, daas_profile, kb, mock_dir, canned_threat_doc):
        with open(f"{mock_dir}/dread.txt", encoding="utf-8") as fh:
            doc = json.loads(fh.read())
        doc["Risk Assessment"] = doc["Risk Assessment"][:17]
        gateway = scripted_gateway({
            PromptKind.THREAT_MODEL: json.dumps(canned_threat_doc),
            PromptKind.DREAD: json.dumps(doc),
        })
        ctx = make_ctx(daas_profile, kb, gateway)
        threats, _ = generate_threats(ctx)
        scores = assess_dread(ctx, threats, [])
        assert len(scores) == 18
        assert any("no entry for threat" in w for w in ctx.warnings)


class TestGenerateMitigations:
    def test_three_row_table(self, kb):
        table = ("| Threat Type | Scenario | Suggested Mitigation(s) |\n"
                 "|---|---|---|\n"
                 "| Spoofing | A | Use MFA. |\n"
                 "| Tampering | B | Sign firmware. |\n"
                 "| Repudiation | C | Centralize logs. |\n")
        gateway = scripted_gateway({PromptKind.MITIGATIONS: table})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        result = generate_mitigations(ctx, [spoof_threat()], [])
        assert len(result.entries) == 3
        assert result.raw_markdown == table
        assert result.entries[1]["mitigation_text"] == "Sign firmware."

    def test_html_break_kept_raw_with_warning(self, kb):
        table = ("| Threat Type | Scenario | Suggested Mitigation(s) |\n"
                 "|---|---|---|\n"
                 "| Spoofing | A | First.<br>Second. |\n")
        gateway = scripted_gateway({PromptKind.MITIGATIONS: table})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        result = generate_mitigations(ctx, [spoof_threat()], [])
        assert "<br>" in result.raw_markdown
        assert any("HTML line break" in w for w in ctx.warnings)

    def test_empty_response_fails(self, kb):
        gateway = scripted_gateway({PromptKind.MITIGATIONS: "   \n"})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        with pytest.raises(GenerationFailedError):
            generate_mitigations(ctx, [spoof_threat()], [])


class TestGenerateTestCases:
    def test_two_fenced_blocks(self, kb):
        raw = ("Test Case: Alpha\n\n```gherkin\nGiven a\nWhen b\nThen c\n```\n\n"
               "Test Case: Beta\n\n```gherkin\nGiven d\nWhen e\nThen f\n```\n")
        gateway = scripted_gateway({PromptKind.TEST_CASES: raw})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        suites = generate_test_cases(ctx, [spoof_threat()])
        assert len(suites.suites) == 2
        assert suites.suites[0]["title"] == "Test Case: Alpha"
        assert suites.suites[1]["gherkin_source"].startswith("Given d")

    def test_untagged_fence_accepted(self, kb):
        raw = "Case\n```\nGiven x\n```\n"
        gateway = scripted_gateway({PromptKind.TEST_CASES: raw})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        suites = generate_test_cases(ctx, [spoof_threat()])
        assert len(suites.suites) == 1

    def test_no_fences_fails(self, kb):
        gateway = scripted_gateway({PromptKind.TEST_CASES: "Given x When y Then z"})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        with pytest.raises(GenerationFailedError):
            generate_test_cases(ctx, [spoof_threat()])


class TestGenerateAttackTree:
    def test_fenced_graph(self, kb):
        raw = "```mermaid\ngraph LR\n  A --> B\n  subgraph S\n  B --> C\n  end\n```"
        gateway = scripted_gateway({PromptKind.ATTACK_TREE: raw})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        tree = generate_attack_tree(ctx, [spoof_threat()], [])
        assert tree.mermaid_source.startswith("graph LR")

    def test_unfenced_graph_accepted(self, kb):
        gateway = scripted_gateway({PromptKind.ATTACK_TREE: "  graph LR\n  A --> B\n"})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        tree = generate_attack_tree(ctx, [spoof_threat()], [])
        assert tree.mermaid_source.startswith("graph LR")

    def test_prose_rejected(self, kb):
        gateway = scripted_gateway({PromptKind.ATTACK_TREE: "Here is a description of risk."})
        ctx = make_ctx(WEB_PROFILE, kb, gateway)
        with pytest.raises(NotMermaidError):
            generate_attack_tree(ctx, [spoof_threat()], [])


class FailingNvd:
    def fetch_cves(self, technologies, config):
        from aegisshield.errors import TransportError

        raise TransportError("connection refused")


class TestRunFull:
    def test_end_to_end_mock(self, mock_run):
        assert len(mock_run.threats) == 18
        assert len(mock_run.mappings) == 18
        assert len(mock_run.dread) == 18
        assert mock_run.mitigations is not None
        assert mock_run.test_cases is not None
        assert mock_run.attack_tree is not None
        assert mock_run.metadata.provider_model_id == "mock"

    def test_nvd_unreachable_degrades(self, daas_profile, kb, mock_gateway):
        run = run_full(daas_profile, PipelineConfig(), mock_gateway, kb,
                       nvd_client=FailingNvd())
        assert len(run.threats) == 18
        assert any("nvd unavailable" in w for w in run.metadata.warnings)

    def test_missing_provider_key_precondition(self, daas_profile, kb):
        from aegisshield.gateway import HttpChatProvider

        provider = HttpChatProvider(base_url="", api_key="")
        with pytest.raises(ValidationError):
            run_full(daas_profile, PipelineConfig(), Gateway(provider), kb)

    def test_no_technologies_skips_nvd(self, kb, mock_gateway):
        calls = []

        class CountingNvd:
            def fetch_cves(self, technologies, config):
                calls.append(technologies)
                return {}

        nvd_block, otx_block, warnings = fetch_intel(
            WEB_PROFILE, PipelineConfig(), nvd_client=CountingNvd(), otx_client=None
        )
        assert calls == []
        assert nvd_block == ""
        assert any("skipped" in w for w in warnings)


class TestRunBatch:
    def test_thirty_runs_540_threats(self, daas_profile, kb, mock_gateway, tmp_path):
        manifest = run_batch(daas_profile, 30, str(tmp_path), mock_gateway, kb,
                             case_id="demo", clock=FIXED_CLOCK)
        assert manifest["successes"] == 30
        assert manifest["threats_total"] == 540
        runs = load_batch(str(tmp_path / "case-demo"))
        assert len(runs) == 30
        assert sum(len(r.threats) for r in runs) == 540

    def test_single_run(self, daas_profile, kb, mock_gateway, tmp_path):
        manifest = run_batch(daas_profile, 1, str(tmp_path), mock_gateway, kb)
        assert manifest["successes"] == 1
        assert (tmp_path / "batch-1.json").exists()

    def test_fault_injection_with_continue(self, daas_profile, kb, mock_dir, tmp_path):
        # runs 1-6 take one threat-model call each; run 7 must fail both its
        # initial attempt (call 7) and its corrective retry (call 8)
        calls = {"threat_model": 0}

        def scripted(kind, request):
            if kind == PromptKind.THREAT_MODEL:
                calls["threat_model"] += 1
                if calls["threat_model"] in (7, 8):
                    return "I cannot comply."
            with open(f"{mock_dir}/{kind.value}.txt", encoding="utf-8") as fh:
                return fh.read()

        gateway = Gateway(MockChatProvider(script=scripted), retries=0)
        manifest = run_batch(daas_profile, 30, str(tmp_path), gateway, kb,
                             continue_on_error=True)
        assert manifest["successes"] == 29
        assert manifest["failures"] == 1
        assert manifest["errors"][0]["run_index"] == 7

    def test_failure_aborts_without_continue(self, daas_profile, kb, tmp_path):
        gateway = scripted_gateway({
            PromptKind.THREAT_MODEL: ["nope", "nope"],
        })
        with pytest.raises(GenerationFailedError):
            run_batch(daas_profile, 3, str(tmp_path), gateway, kb)

    def test_bit_reproducible_with_fixed_clock(self, daas_profile, kb, mock_dir, tmp_path):
        gw1 = Gateway(MockChatProvider(directory=mock_dir))
        gw2 = Gateway(MockChatProvider(directory=mock_dir))
        run_batch(daas_profile, 2, str(tmp_path / "a"), gw1, kb, clock=FIXED_CLOCK)
        run_batch(daas_profile, 2, str(tmp_path / "b"), gw2, kb, clock=FIXED_CLOCK)
        for k in (1, 2):
            a = (tmp_path / "a" / f"batch-{k}.json").read_bytes()
            b = (tmp_path / "b" / f"batch-{k}.json").read_bytes()
            assert a == b

    def test_every_mapping_id_in_candidates_or_sentinel(self, mock_run, kb):
        from aegisshield.attack_kb import keyword_search, select_datasets

        datasets = select_datasets(mock_run.profile.app_type)
        for threat, mapping in zip(mock_run.threats, mock_run.mappings):
            if mapping.stix_id == SENTINEL_STIX_ID:
                continue
            candidates = keyword_search(kb, datasets, threat.keywords, 25)
            assert mapping.stix_id in {c.stix_id for c in candidates}
