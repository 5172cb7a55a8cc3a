import json

import pytest

from aegisshield.domain import PipelineConfig, TechnologySelection
from aegisshield.errors import AuthFailedError, QuotaExceededError, RateLimitedError
from aegisshield.intel import (
    CveRecord,
    NvdClient,
    OtxClient,
    OtxPulse,
    RecordingTransport,
    ReplayTransport,
    render_context,
)

CONFIG = PipelineConfig()
MYSQL = TechnologySelection("Database", "MySQL", "5.8.*")


def nvd_cve(index, score, published, status="Analyzed", severity="HIGH"):
    return {
        "cve": {
            "id": f"CVE-2024-{10000 + index}",
            "vulnStatus": status,
            "published": published,
            "descriptions": [{"lang": "en", "value": f"Issue number {index} in the server."}],
            "metrics": {"cvssMetricV31": [{
                "cvssData": {"baseScore": score, "baseSeverity": severity},
                "baseSeverity": severity,
            }]},
        }
    }


def nvd_cassette():
    # 12 qualifying CVEs plus one rejected and one below the cutoff
    vulnerabilities = [
        nvd_cve(i, 7.0 + (i % 3), f"2024-06-{i:02d}T00:00:00.000") for i in range(1, 13)
    ]
    vulnerabilities.append(nvd_cve(90, 9.8, "2024-06-30T00:00:00.000", status="Rejected"))
    vulnerabilities.append(nvd_cve(91, 5.0, "2024-06-29T00:00:00.000", severity="MEDIUM"))
    return {
        "interactions": [{
            "request": {
                "url": "https://services.nvd.nist.gov/rest/json/cves/2.0",
                "params": {"virtualMatchString": "cpe:2.3:*:*:mysql:5.8.*"},
            },
            "response": {"status": 200, "json": {"vulnerabilities": vulnerabilities}},
        }]
    }


def otx_cassette(count=8):
    results = [
        {
            "id": f"pulse-{i}",
            "name": f"Aerospace pulse {i}",
            "modified": f"2024-07-{i:02d}T12:00:00",
            "description": f"Sector activity report {i}.",
            "tags": ["aerospace", "uav"],
            "adversary": "Test Group" if i == 3 else "",
            "malware_families": ["AgentX"] if i % 2 else [],
        }
        for i in range(1, count + 1)
    ]
    return {
        "interactions": [{
            "request": {
                "url": "https://otx.alienvault.com/api/v1/search/pulses",
                "params": {"q": "Aerospace", "sort": "-modified"},
            },
            "response": {"status": 200, "json": {"results": results}},
        }]
    }


class TestNvdClient:
    def test_twelve_qualifying_keeps_ten_newest(self, tmp_path):
        cassette = tmp_path / "nvd.json"
        cassette.write_text(json.dumps(nvd_cassette()))
        client = NvdClient(transport=ReplayTransport(str(cassette)), api_key="k")
        results = client.fetch_cves([MYSQL], CONFIG)
        records = results["MySQL 5.8.*"]
        assert len(records) == 10
        # newest-first: June 12 down to June 3
        assert records[0].cve_id == "CVE-2024-10012"
        assert records[-1].cve_id == "CVE-2024-10003"

    def test_rejected_and_low_scores_excluded(self):
        client = NvdClient(transport=ReplayTransport(nvd_cassette()), api_key="k")
        records = client.fetch_cves([MYSQL], CONFIG)["MySQL 5.8.*"]
        ids = {record.cve_id for record in records}
        assert "CVE-2024-10090" not in ids  # rejected
        assert "CVE-2024-10091" not in ids  # cvss 5.0 under cutoff 7.0

    def test_no_technologies_empty_map(self):
        client = NvdClient(transport=ReplayTransport({"interactions": []}), api_key="k")
        assert client.fetch_cves([], CONFIG) == {}

    def test_rate_limited_backs_off_then_surfaces(self):
        class Always429:
            def get(self, url, params=None, headers=None):
                return 429, {}

        sleeps = []
        client = NvdClient(transport=Always429(), api_key="k", retries=2,
                           sleep=sleeps.append)
        with pytest.raises(RateLimitedError):
            client.fetch_cves([MYSQL], CONFIG)
        assert sleeps == [0.5, 1.0]

    def test_quota_exceeded(self):
        class Forbidden:
            def get(self, url, params=None, headers=None):
                return 403, {}

        client = NvdClient(transport=Forbidden(), api_key="k")
        with pytest.raises(QuotaExceededError):
            client.fetch_cves([MYSQL], CONFIG)

    def test_recording_then_replaying_round_trips(self, tmp_path):
        class Scripted:
            def get(self, url, params=None, headers=None):
                return 200, {"vulnerabilities": [nvd_cve(1, 8.0, "2024-01-01T00:00:00.000")]}

        cassette = tmp_path / "recorded.json"
        live = NvdClient(transport=RecordingTransport(Scripted(), str(cassette)), api_key="k")
        first = live.fetch_cves([MYSQL], CONFIG)
        replayed = NvdClient(transport=ReplayTransport(str(cassette)), api_key="k")
        assert replayed.fetch_cves([MYSQL], CONFIG) == first


class TestOtxClient:
    def test_eight_pulses_keep_five_newest(self):
        client = OtxClient(transport=ReplayTransport(otx_cassette(8)), api_key="k")
        pulses = client.fetch_pulses("Aerospace", CONFIG)
        assert len(pulses) == 5
        assert pulses[0].pulse_id == "pulse-8"
        assert [p.modified for p in pulses] == sorted(
            (p.modified for p in pulses), reverse=True)

    def test_zero_pulses(self):
        cassette = otx_cassette(0)
        client = OtxClient(transport=ReplayTransport(cassette), api_key="k")
        assert client.fetch_pulses("Aerospace", CONFIG) == []

    def test_missing_key_is_auth_failure(self):
        client = OtxClient(transport=ReplayTransport({"interactions": []}), api_key="")
        with pytest.raises(AuthFailedError):
            client.fetch_pulses("Aerospace", CONFIG)

    def test_rejected_key_is_auth_failure(self):
        class Unauthorized:
            def get(self, url, params=None, headers=None):
                return 403, {}

        client = OtxClient(transport=Unauthorized(), api_key="bad")
        with pytest.raises(AuthFailedError):
            client.fetch_pulses("Aerospace", CONFIG)


GOLDEN_BLOCKS = """Technology: MySQL 5.8.*
- CVE-2024-0001 (CVSS 9.8, CRITICAL, published 2024-05-01T00:00:00.000): Remote code execution in the parser.
- CVE-2024-0002 (CVSS 7.5, HIGH, published 2024-04-01T00:00:00.000): Authentication bypass on the admin port."""

GOLDEN_OTX = """- Sector advisory (modified 2024-07-01T00:00:00) tags: aerospace adversary: GroupX malware: AgentX
  Activity against ground stations."""


class TestRenderContext:
    def test_golden_blocks(self):
        cves = {"MySQL 5.8.*": [
            CveRecord("CVE-2024-0001", 9.8, "CRITICAL", "2024-05-01T00:00:00.000",
                      "Remote code execution in the parser."),
            CveRecord("CVE-2024-0002", 7.5, "HIGH", "2024-04-01T00:00:00.000",
                      "Authentication bypass on the admin port."),
        ]}
        pulses = [OtxPulse("p1", "Sector advisory", "2024-07-01T00:00:00",
                           "Activity against ground stations.",
                           tags=("aerospace",), adversary="GroupX",
                           malware_families=("AgentX",))]
        nvd_block, otx_block = render_context(cves, pulses, 12000)
        assert nvd_block == GOLDEN_BLOCKS
        assert otx_block == GOLDEN_OTX

    def test_empty_inputs_empty_blocks(self):
        assert render_context({}, [], 12000) == ("", "")

    def test_budget_enforced_with_marker(self):
        cves = {"Tech": [CveRecord(f"CVE-2024-{i:04d}", 9.0, "HIGH",
                                   "2024-01-01T00:00:00.000", "x" * 10000)
                         for i in range(5)]}
        pulses = [OtxPulse(f"p{i}", f"Pulse {i}", "2024-01-01T00:00:00", "y" * 10000)
                  for i in range(5)]
        nvd_block, otx_block = render_context(cves, pulses, 1000)
        assert len(nvd_block) <= 1000
        assert len(otx_block) <= 1000
        assert "[...]" in nvd_block
        assert "[...]" in otx_block

    def test_stable_under_refetch(self):
        cassette = otx_cassette(8)
        client = OtxClient(transport=ReplayTransport(cassette), api_key="k")
        first = client.fetch_pulses("Aerospace", CONFIG)
        second = OtxClient(transport=ReplayTransport(cassette), api_key="k") \
            .fetch_pulses("Aerospace", CONFIG)
        assert first == second
        assert render_context({}, first, 5000) == render_context({}, second, 5000)
