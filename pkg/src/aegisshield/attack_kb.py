"""MITRE ATT&CK STIX 2.1 bundle ingestion and deterministic keyword search.

Only attack-pattern objects are indexed; revoked or deprecated entries are
dropped at load so retired techniques can never be offered to the
selection stage. The knowledge base is immutable after load and safe for
unlimited concurrent readers.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from importlib import resources

import httpx

from .domain import SENTINEL_STIX_ID
from .errors import FileMissingError, MalformedBundleError, NotFoundError, TransportError

DATASETS = ("Enterprise", "Mobile", "ICS")

ATTACK_STIX_BASE_URL = (
    "https://raw.githubusercontent.com/mitre-attack/attack-stix-data/master"
)
_BUNDLE_NAMES = {
    "Enterprise": "enterprise-attack",
    "Mobile": "mobile-attack",
    "ICS": "ics-attack",
}

_STIX_ID_FORMAT = re.compile(r"^attack-pattern--[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}$")

UNKNOWN_TECHNIQUE_URL = "https://attack.mitre.org/techniques/N/A/"


@dataclass(frozen=True)
class AttackPattern:
    stix_id: str
    technique_id: str
    name: str
    description: str
    url: str
    dataset: str | None

    def to_doc(self) -> dict:
        return {
            "Attack Pattern ID": self.stix_id,
            "Technique ID": self.technique_id,
            "Name": self.name,
            "Description": self.description,
            "URL": self.url,
        }


UNKNOWN_PATTERN = AttackPattern(
    stix_id=SENTINEL_STIX_ID,
    technique_id="N/A",
    name="Unknown",
    description="",
    url=UNKNOWN_TECHNIQUE_URL,
    dataset=None,
)


def _catalog_reference(obj: dict) -> tuple[str, str] | None:
    for ref in obj.get("external_references", ()):
        if ref.get("source_name") == "mitre-attack":
            return ref.get("external_id", ""), ref.get("url", "")
    return None


class KnowledgeBase:
    def __init__(self):
        self._patterns: dict[str, AttackPattern] = {}
        self._by_dataset: dict[str, set[str]] = {d: set() for d in DATASETS}
        # lowercase search text per stix id, built once at load
        self._search_text: dict[str, str] = {}
        self.versions: dict[str, str] = {}

    def __len__(self) -> int:
        return len(self._patterns)

    def patterns(self, datasets=None):
        if datasets is None:
            return list(self._patterns.values())
        ids = set()
        for dataset in datasets:
            ids |= self._by_dataset.get(dataset, set())
        return [self._patterns[i] for i in sorted(ids)]

    def add(self, pattern: AttackPattern) -> None:
        self._patterns[pattern.stix_id] = pattern
        if pattern.dataset:
            self._by_dataset.setdefault(pattern.dataset, set()).add(pattern.stix_id)
        self._search_text[pattern.stix_id] = f"{pattern.name}\n{pattern.description}".lower()

    def resolve(self, stix_id: str) -> AttackPattern:
        """Sentinel id resolves to the Unknown placeholder; known ids to the
        full pattern; anything else is NotFound."""
        if stix_id == SENTINEL_STIX_ID:
            return UNKNOWN_PATTERN
        if not _STIX_ID_FORMAT.match(stix_id):
            raise NotFoundError(f"not a syntactically valid attack-pattern id: {stix_id!r}")
        try:
            return self._patterns[stix_id]
        except KeyError:
            raise NotFoundError(f"attack pattern not in knowledge base: {stix_id}") from None

    def __contains__(self, stix_id: str) -> bool:
        return stix_id in self._patterns

    def search_text(self, stix_id: str) -> str:
        return self._search_text[stix_id]


def load_bundles(paths) -> KnowledgeBase:
    """Build a KnowledgeBase from STIX 2.1 bundle files, one per dataset.

    The dataset label comes from the bundle's collection object name or the
    file name (enterprise-attack / mobile-attack / ics-attack).
    """
    kb = KnowledgeBase()
    for path in paths:
        if not os.path.exists(path):
            raise FileMissingError(f"bundle file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            try:
                bundle = json.load(fh)
            except json.JSONDecodeError as exc:
                raise MalformedBundleError(f"{path}: not valid JSON ({exc})") from exc
        _ingest_bundle(kb, bundle, _dataset_for(path, bundle))
    return kb


def load_bundle_objects(objects, dataset: str) -> KnowledgeBase:
    """Test/embedding hook: build a KB straight from STIX objects."""
    kb = KnowledgeBase()
    _ingest_bundle(kb, {"type": "bundle", "objects": objects}, dataset)
    return kb


def _dataset_for(path: str, bundle: dict) -> str:
    hint = os.path.basename(path).lower()
    for obj in bundle.get("objects", ()):
        if obj.get("type") == "x-mitre-collection":
            hint += " " + str(obj.get("name", "")).lower()
    if "mobile" in hint:
        return "Mobile"
    if "ics" in hint:
        return "ICS"
    return "Enterprise"


def _ingest_bundle(kb: KnowledgeBase, bundle: dict, dataset: str) -> None:
    objects = bundle.get("objects")
    if bundle.get("type") != "bundle" or not isinstance(objects, list):
        raise MalformedBundleError("not a STIX bundle (missing type/objects)")
    for index, obj in enumerate(objects):
        if not isinstance(obj, dict):
            raise MalformedBundleError(f"object {index} is not a JSON object", object_index=index)
        if obj.get("type") == "x-mitre-collection":
            kb.versions[dataset] = str(obj.get("x_mitre_version", obj.get("modified", "")))
        if obj.get("type") != "attack-pattern":
            continue
        if obj.get("revoked") or obj.get("x_mitre_deprecated"):
            continue
        ref = _catalog_reference(obj)
        if ref is None or "id" not in obj:
            raise MalformedBundleError(
                f"attack-pattern at index {index} lacks an ATT&CK catalog reference",
                object_index=index,
            )
        technique_id, url = ref
        kb.add(
            AttackPattern(
                stix_id=obj["id"],
                technique_id=technique_id,
                name=obj.get("name", ""),
                description=obj.get("description", ""),
                url=url,
                dataset=dataset,
            )
        )


def _load_rules() -> dict:
    with resources.files("aegisshield.data").joinpath("dataset_rules.json").open(
        encoding="utf-8"
    ) as fh:
        return json.load(fh)


_RULES = _load_rules()


def select_datasets(app_type: str) -> set[str]:
    """Route an application type to ATT&CK datasets via the rule table.

    Never empty: unmatched types fall back to Enterprise.
    """
    lowered = str(app_type).lower()
    for rule in _RULES["rules"]:
        if rule["contains"] in lowered:
            return set(rule["datasets"])
    return set(_RULES["fallback"])


def keyword_search(kb: KnowledgeBase, datasets, keywords, cap: int) -> list[AttackPattern]:
    """Deterministic ranked search over name + description.

    Score = number of distinct keywords matched (case-insensitive
    substring); ties broken by total occurrence count descending, then
    technique_id ascending. Results are deduplicated across datasets by
    technique_id and capped.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    terms = [str(k).lower() for k in keywords if str(k).strip()]
    if not terms:
        return []
    scored = []
    for pattern in kb.patterns(datasets):
        text = kb.search_text(pattern.stix_id)
        distinct = 0
        occurrences = 0
        for term in terms:
            count = text.count(term)
            if count:
                distinct += 1
                occurrences += count
        if distinct:
            scored.append((-distinct, -occurrences, pattern.technique_id, pattern))
    scored.sort(key=lambda item: item[:3])
    results = []
    seen_techniques = set()
    for _, _, technique_id, pattern in scored:
        if technique_id in seen_techniques:
            continue
        seen_techniques.add(technique_id)
        results.append(pattern)
        if len(results) == cap:
            break
    return results


def resolve_pattern(kb: KnowledgeBase, stix_id: str) -> AttackPattern:
    return kb.resolve(stix_id)


def fetch_bundles(dest_dir: str, base_url: str = ATTACK_STIX_BASE_URL,
                  datasets=DATASETS, client=None) -> dict:
    """Download and cache the public ATT&CK STIX bundles.

    Writes <dest>/<bundle-name>.json per dataset plus a manifest recording
    the collection version tags. Returns the manifest.
    """
    os.makedirs(dest_dir, exist_ok=True)
    client = client or httpx
    manifest = {"base_url": base_url, "bundles": {}}
    for dataset in datasets:
        name = _BUNDLE_NAMES[dataset]
        url = f"{base_url}/{name}/{name}.json"
        try:
            response = client.get(url, timeout=300.0, follow_redirects=True)
        except httpx.HTTPError as exc:
            raise TransportError(f"fetching {url}: {exc}") from exc
        if response.status_code != 200:
            raise TransportError(f"fetching {url}: HTTP {response.status_code}")
        bundle = response.json()
        path = os.path.join(dest_dir, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(bundle, fh)
        version = ""
        for obj in bundle.get("objects", ()):
            if obj.get("type") == "x-mitre-collection":
                version = str(obj.get("x_mitre_version", ""))
                break
        manifest["bundles"][dataset] = {"file": path, "version": version}
    with open(os.path.join(dest_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    return manifest
