"""NVD CVE and OTX pulse clients plus prompt-context rendering.

All HTTP goes through a small transport seam so interactions can be
recorded to and replayed from cassette files in tests. Fetch results are
pure values; clients hold no mutable state beyond the transport.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import httpx

from .domain import PipelineConfig, TechnologySelection
from .errors import (
    AuthFailedError,
    QuotaExceededError,
    RateLimitedError,
    TransportError,
)

NVD_BASE_URL = "https://services.nvd.nist.gov/rest/json/cves/2.0"
OTX_BASE_URL = "https://otx.alienvault.com/api/v1"

ENV_NVD_API_KEY = "AEGIS_NVD_API_KEY"
ENV_OTX_API_KEY = "AEGIS_OTX_API_KEY"

TRUNCATION_MARKER = " [...]"


@dataclass(frozen=True)
class CveRecord:
    cve_id: str
    cvss_base: float
    severity: str
    published: str
    description: str


@dataclass(frozen=True)
class OtxPulse:
    pulse_id: str
    name: str
    modified: str
    description: str
    tags: tuple[str, ...] = ()
    adversary: str | None = None
    malware_families: tuple[str, ...] = ()


class HttpTransport:
    """Thin GET wrapper translating httpx failures to package errors."""

    def __init__(self, client=None, timeout=60.0):
        self._client = client or httpx
        self.timeout = timeout

    def get(self, url, params=None, headers=None):
        try:
            response = self._client.get(url, params=params, headers=headers, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        return response.status_code, _safe_json(response)


def _safe_json(response):
    try:
        return response.json()
    except (json.JSONDecodeError, ValueError):
        return {}


class ReplayTransport:
    """Serves recorded interactions from a cassette file (or an already
    loaded cassette dict), matched by url + params."""

    def __init__(self, cassette):
        if isinstance(cassette, dict):
            self.interactions = cassette["interactions"]
        else:
            with open(cassette, encoding="utf-8") as fh:
                self.interactions = json.load(fh)["interactions"]

    def get(self, url, params=None, headers=None):
        key = _interaction_key(url, params)
        for interaction in self.interactions:
            recorded = _interaction_key(
                interaction["request"]["url"], interaction["request"].get("params")
            )
            if recorded == key:
                response = interaction["response"]
                return response["status"], response.get("json", {})
        raise TransportError(f"no recorded interaction for {key}")


class RecordingTransport:
    """Wraps a live transport, appending every interaction to a cassette."""

    def __init__(self, inner, cassette_path):
        self.inner = inner
        self.cassette_path = cassette_path
        self.interactions = []

    def get(self, url, params=None, headers=None):
        status, body = self.inner.get(url, params=params, headers=headers)
        self.interactions.append(
            {"request": {"url": url, "params": params or {}},
             "response": {"status": status, "json": body}}
        )
        with open(self.cassette_path, "w", encoding="utf-8") as fh:
            json.dump({"interactions": self.interactions}, fh, indent=2)
        return status, body


def _interaction_key(url, params):
    return (url, tuple(sorted((params or {}).items())))


def _version_match_string(tech: TechnologySelection) -> str:
    """CPE virtual-match coordinates; a trailing '.*' wildcard becomes a
    version-prefix match."""
    product = tech.name.strip().lower().replace(" ", "_")
    version = tech.version_pattern.strip()
    if not version:
        return f"cpe:2.3:*:*:{product}"
    if version.endswith(".*"):
        return f"cpe:2.3:*:*:{product}:{version[:-2]}.*"
    return f"cpe:2.3:*:*:{product}:{version}"


def _cvss_of(cve: dict) -> tuple[float, str]:
    """CVSS v3.1 preferred, v3.0 fallback, v2 last."""
    metrics = cve.get("metrics", {})
    for key in ("cvssMetricV31", "cvssMetricV30", "cvssMetricV2"):
        entries = metrics.get(key)
        if entries:
            data = entries[0].get("cvssData", {})
            score = float(data.get("baseScore", 0.0))
            severity = entries[0].get("baseSeverity") or data.get("baseSeverity", "")
            return score, severity
    return 0.0, ""


def _description_of(cve: dict) -> str:
    for entry in cve.get("descriptions", ()):
        if entry.get("lang") == "en":
            return entry.get("value", "")
    descriptions = cve.get("descriptions", ())
    return descriptions[0].get("value", "") if descriptions else ""


class NvdClient:
    """NVD CVE REST API v2.0 client. Works keyless (rate-limited upstream);
    the key rides in the standard apiKey header when present."""

    def __init__(self, transport=None, api_key=None, base_url=NVD_BASE_URL,
                 retries=2, sleep=time.sleep):
        self.transport = transport or HttpTransport()
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_NVD_API_KEY, "")
        self.base_url = base_url
        self.retries = retries
        self._sleep = sleep

    def _get(self, params):
        headers = {"apiKey": self.api_key} if self.api_key else {}
        attempt = 0
        while True:
            try:
                status, body = self.transport.get(self.base_url, params=params, headers=headers)
            except TransportError:
                attempt += 1
                if attempt > self.retries:
                    raise
                self._sleep(0.5 * 2 ** (attempt - 1))
                continue
            if status == 429:
                attempt += 1
                if attempt > self.retries:
                    raise RateLimitedError("NVD returned 429 after backoff")
                self._sleep(0.5 * 2 ** (attempt - 1))
                continue
            if status == 403:
                raise QuotaExceededError("NVD rejected the request (quota or key)")
            if status >= 500:
                attempt += 1
                if attempt > self.retries:
                    raise TransportError(f"NVD returned {status}")
                self._sleep(0.5 * 2 ** (attempt - 1))
                continue
            return body

    def fetch_cves(self, technologies, config: PipelineConfig) -> dict[str, list[CveRecord]]:
        """Per technology: query by product+version, drop rejected and
        sub-cutoff records, newest first, at most cve_cap records."""
        results: dict[str, list[CveRecord]] = {}
        for tech in technologies:
            label = f"{tech.name} {tech.version_pattern}".strip()
            body = self._get({"virtualMatchString": _version_match_string(tech)})
            records = []
            for wrapper in body.get("vulnerabilities", ()):
                cve = wrapper.get("cve", {})
                if cve.get("vulnStatus") == "Rejected":
                    continue
                score, severity = _cvss_of(cve)
                if score < config.cvss_cutoff:
                    continue
                records.append(
                    CveRecord(
                        cve_id=cve.get("id", ""),
                        cvss_base=score,
                        severity=severity,
                        published=cve.get("published", ""),
                        description=_description_of(cve),
                    )
                )
            records.sort(key=lambda r: r.published, reverse=True)
            results[label] = records[: config.cve_cap]
        return results


class OtxClient:
    """OTX pulse-search client; sector string is the query, newest first."""

    def __init__(self, transport=None, api_key=None, base_url=OTX_BASE_URL,
                 retries=2, sleep=time.sleep):
        self.transport = transport or HttpTransport()
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_OTX_API_KEY, "")
        self.base_url = base_url
        self.retries = retries
        self._sleep = sleep

    def fetch_pulses(self, industry_sector: str, config: PipelineConfig) -> list[OtxPulse]:
        if not self.api_key:
            raise AuthFailedError("OTX requires an API key")
        headers = {"X-OTX-API-KEY": self.api_key}
        params = {"q": industry_sector, "sort": "-modified"}
        attempt = 0
        while True:
            try:
                status, body = self.transport.get(
                    f"{self.base_url}/search/pulses", params=params, headers=headers
                )
            except TransportError:
                attempt += 1
                if attempt > self.retries:
                    raise
                self._sleep(0.5 * 2 ** (attempt - 1))
                continue
            break
        if status in (401, 403):
            raise AuthFailedError(f"OTX rejected the API key (HTTP {status})")
        if status >= 500:
            raise TransportError(f"OTX returned {status}")
        pulses = [
            OtxPulse(
                pulse_id=item.get("id", ""),
                name=item.get("name", ""),
                modified=item.get("modified", ""),
                description=item.get("description", ""),
                tags=tuple(item.get("tags", ())),
                adversary=item.get("adversary") or None,
                malware_families=tuple(item.get("malware_families", ())),
            )
            for item in body.get("results", ())
        ]
        pulses.sort(key=lambda p: p.modified, reverse=True)
        return pulses[: config.pulse_cap]


def _fit(lines: list[str], budget: int) -> str:
    """Join lines, truncating so the block never exceeds the budget."""
    block = "\n".join(lines)
    if len(block) <= budget:
        return block
    cut = budget - len(TRUNCATION_MARKER)
    if cut <= 0:
        return block[:budget]
    return block[:cut] + TRUNCATION_MARKER


def render_context(cves: dict[str, list[CveRecord]], pulses: list[OtxPulse],
                   budget: int) -> tuple[str, str]:
    """Render the NVD and OTX context blocks for prompt substitution.

    Each block stays within the character budget; empty inputs produce
    empty blocks so the prompt slots degrade cleanly.
    """
    nvd_lines: list[str] = []
    per_entry = max(200, budget // 20)
    for tech, records in cves.items():
        if not records:
            continue
        nvd_lines.append(f"Technology: {tech}")
        for record in records:
            description = record.description
            if len(description) > per_entry:
                description = description[: per_entry - len(TRUNCATION_MARKER)] + TRUNCATION_MARKER
            nvd_lines.append(
                f"- {record.cve_id} (CVSS {record.cvss_base}, {record.severity}, "
                f"published {record.published}): {description}"
            )
    nvd_block = _fit(nvd_lines, budget) if nvd_lines else ""

    otx_lines: list[str] = []
    for pulse in pulses:
        description = pulse.description
        if len(description) > per_entry:
            description = description[: per_entry - len(TRUNCATION_MARKER)] + TRUNCATION_MARKER
        line = f"- {pulse.name} (modified {pulse.modified})"
        if pulse.tags:
            line += f" tags: {', '.join(pulse.tags)}"
        if pulse.adversary:
            line += f" adversary: {pulse.adversary}"
        if pulse.malware_families:
            line += f" malware: {', '.join(pulse.malware_families)}"
        otx_lines.append(line)
        if description:
            otx_lines.append(f"  {description}")
    otx_block = _fit(otx_lines, budget) if otx_lines else ""
    return nvd_block, otx_block
