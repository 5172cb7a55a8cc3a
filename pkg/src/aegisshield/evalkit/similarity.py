"""Embedding access, cosine similarity, and the batch-success protocol.

The protocol: every tool threat is scored against every expert threat of
the SAME STRIDE category; a batch succeeds when any such pair reaches the
threshold; a case passes when the batch-success proportion beats the
majority fraction with statistical significance.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass

import numpy as np

from ..domain import EvalProtocol, ExpertThreat, StrideCategory
from ..errors import (
    DimensionMismatchError,
    EmptyTextError,
    NoComparablePairsError,
    TransportError,
    ZeroVectorError,
)
from .stats import one_proportion

ENV_EMBED_BASE_URL = "AEGIS_EMBED_BASE_URL"
ENV_EMBED_API_KEY = "AEGIS_EMBED_API_KEY"
ENV_EMBED_MODEL = "AEGIS_EMBED_MODEL"


def cosine_similarity(u, v) -> float:
    a = np.asarray(u, dtype=float)
    b = np.asarray(v, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatchError(f"vector shapes differ: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0 or norm_b == 0:
        raise ZeroVectorError("cosine similarity undefined for zero vectors")
    return float(np.dot(a, b) / (norm_a * norm_b))


class HashingEmbedder:
    """Deterministic, dependency-free embedder for tests and offline runs.

    Tokens are hashed into a fixed number of buckets (signed counts), then
    the vector is length-normalized. Identical texts always embed
    identically; it is a stand-in, not a semantic model.
    """

    def __init__(self, dimension: int = 256):
        self.dimension = dimension

    def embed(self, texts) -> list[list[float]]:
        vectors = []
        for text in texts:
            vec = np.zeros(self.dimension)
            for token in re.findall(r"[a-z0-9]+", text.lower()):
                digest = hashlib.sha256(token.encode()).digest()
                bucket = int.from_bytes(digest[:4], "big") % self.dimension
                sign = 1.0 if digest[4] % 2 == 0 else -1.0
                vec[bucket] += sign
            norm = np.linalg.norm(vec)
            if norm:
                vec /= norm
            vectors.append(vec.tolist())
        return vectors


class HttpEmbeddingProvider:
    """POSTs to an embeddings endpoint speaking the common /embeddings wire
    shape; dimension is whatever the provider declares (1024 for the
    reference sentence-similarity model)."""

    def __init__(self, base_url=None, api_key=None, model=None, dimension=1024,
                 timeout=120.0, client=None):
        self.base_url = (base_url or os.environ.get(ENV_EMBED_BASE_URL, "")).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_EMBED_API_KEY, "")
        self.model = model or os.environ.get(ENV_EMBED_MODEL, "stsb-roberta-large")
        self.dimension = dimension
        self.timeout = timeout
        self._client = client

    def embed(self, texts) -> list[list[float]]:
        import httpx

        client = self._client or httpx
        try:
            response = client.post(
                f"{self.base_url}/embeddings",
                json={"model": self.model, "input": list(texts)},
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        if response.status_code != 200:
            raise TransportError(f"embedding provider returned {response.status_code}")
        body = response.json()
        return [item["embedding"] for item in body["data"]]


def embed_texts(texts, provider) -> list[list[float]]:
    """One vector per text; empty strings are rejected by index."""
    texts = list(texts)
    if not texts:
        raise EmptyTextError("no texts to embed")
    for index, text in enumerate(texts):
        if not str(text).strip():
            raise EmptyTextError(f"text at index {index} is empty")
    return provider.embed(texts)


@dataclass(frozen=True)
class SimilarityRecord:
    case_id: str
    batch_index: int
    tool_threat_index: int
    expert_threat_index: int
    category: StrideCategory
    score: float


@dataclass(frozen=True)
class BatchVerdict:
    case_id: str
    batch_index: int
    success: bool
    best_score: float | None


@dataclass(frozen=True)
class CaseVerdict:
    case_id: str
    successes: int
    total_batches: int
    sample_p: float
    lower_bound_95: float
    p_value: float
    passes: bool


def similarity_analysis(tool_runs, expert: list[ExpertThreat],
                        protocol: EvalProtocol, provider,
                        case_id: str = "") -> tuple[list[SimilarityRecord],
                                                    list[BatchVerdict],
                                                    CaseVerdict]:
    """Score every same-category (tool, expert) pair per batch and fold the
    batch verdicts into a one-proportion case verdict."""
    expert_by_category: dict[StrideCategory, list[tuple[int, ExpertThreat]]] = {}
    for index, threat in enumerate(expert):
        expert_by_category.setdefault(threat.threat_type, []).append((index, threat))

    texts: list[str] = []
    text_index: dict[str, int] = {}

    def intern(text: str) -> int:
        if text not in text_index:
            text_index[text] = len(texts)
            texts.append(text)
        return text_index[text]

    pair_plan = []  # (batch_index, tool_index, expert_index, category, tool_slot, expert_slot)
    for batch_index, run in enumerate(tool_runs, start=1):
        threats = run.threats if hasattr(run, "threats") else run
        for tool_index, threat in enumerate(threats):
            partners = expert_by_category.get(threat.threat_type, ())
            if not partners:
                continue
            tool_slot = intern(threat.scenario)
            for expert_index, expert_threat in partners:
                pair_plan.append(
                    (batch_index, tool_index, expert_index, threat.threat_type,
                     tool_slot, intern(expert_threat.text))
                )
    if not pair_plan:
        raise NoComparablePairsError(
            "no expert threat shares a STRIDE category with any tool threat"
        )

    vectors = embed_texts(texts, provider)

    records: list[SimilarityRecord] = []
    best_per_batch: dict[int, float] = {}
    for batch_index, tool_index, expert_index, category, tool_slot, expert_slot in pair_plan:
        score = cosine_similarity(vectors[tool_slot], vectors[expert_slot])
        records.append(
            SimilarityRecord(
                case_id=case_id, batch_index=batch_index,
                tool_threat_index=tool_index, expert_threat_index=expert_index,
                category=category, score=score,
            )
        )
        if score > best_per_batch.get(batch_index, float("-inf")):
            best_per_batch[batch_index] = score

    verdicts = []
    total = len(list(tool_runs))
    for batch_index in range(1, total + 1):
        best = best_per_batch.get(batch_index)
        verdicts.append(
            BatchVerdict(
                case_id=case_id, batch_index=batch_index,
                success=best is not None and best >= protocol.similarity_threshold,
                best_score=best,
            )
        )

    successes = sum(1 for v in verdicts if v.success)
    test = one_proportion(successes, total, protocol.majority_fraction,
                          alternative="greater", alpha=protocol.alpha)
    case = CaseVerdict(
        case_id=case_id, successes=successes, total_batches=total,
        sample_p=test.sample_p, lower_bound_95=test.lower_bound,
        p_value=test.p_value,
        passes=test.sample_p > protocol.majority_fraction and test.p_value < protocol.alpha,
    )
    return records, verdicts, case
