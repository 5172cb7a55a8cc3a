"""Provider-agnostic chat-completion access and structured-output extraction.

The gateway hides which provider answers a request: an HTTP
chat-completion service configured via AEGIS_LLM_* env vars, a directory
of canned responses keyed by prompt kind (for tests and demos), or a
scripted callable. Swapping providers changes nothing else.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field

import httpx

from .errors import (
    NoParsableObjectError,
    ProviderRefusedError,
    RateLimitedError,
    SchemaViolationError,
    TimeoutError_,
    TransportError,
)
from .prompts import PromptKind

ENV_BASE_URL = "AEGIS_LLM_BASE_URL"
ENV_API_KEY = "AEGIS_LLM_API_KEY"
ENV_MODEL = "AEGIS_LLM_MODEL"

_MOCK_FILENAMES = {
    PromptKind.THREAT_MODEL: "threat_model.txt",
    PromptKind.MITRE_SELECT: "mitre_select.txt",
    PromptKind.DREAD: "dread.txt",
    PromptKind.MITIGATIONS: "mitigations.txt",
    PromptKind.TEST_CASES: "test_cases.txt",
    PromptKind.ATTACK_TREE: "attack_tree.txt",
}


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[dict, ...]  # {"role": ..., "text": ...}
    temperature: float = 0.7
    max_output_tokens: int = 8192
    provider_model_id: str = ""

    def __post_init__(self):
        if not self.messages:
            raise ValueError("a completion request needs at least one message")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass
class CompletionOutcome:
    text: str
    retry_events: list[str] = field(default_factory=list)


class HttpChatProvider:
    """POSTs to a chat-completion endpoint speaking the common
    /chat/completions wire shape and returns the first choice's text."""

    def __init__(self, base_url=None, api_key=None, model=None, timeout=120.0, client=None):
        self.base_url = (base_url or os.environ.get(ENV_BASE_URL, "")).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY, "")
        self.model = model or os.environ.get(ENV_MODEL, "")
        self.timeout = timeout
        self._client = client

    @property
    def configured(self) -> bool:
        return bool(self.base_url and self.api_key)

    @property
    def model_id(self) -> str:
        return self.model

    def complete(self, request: CompletionRequest, kind: PromptKind | None = None) -> str:
        payload = {
            "model": request.provider_model_id or self.model,
            "messages": [{"role": m["role"], "content": m["text"]} for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self.api_key}"}
        client = self._client or httpx
        try:
            response = client.post(
                f"{self.base_url}/chat/completions",
                json=payload, headers=headers, timeout=self.timeout,
            )
        except httpx.TimeoutException as exc:
            raise TimeoutError_(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        if response.status_code == 429:
            raise RateLimitedError("provider returned 429")
        if response.status_code >= 500:
            raise TransportError(f"provider returned {response.status_code}")
        if response.status_code >= 400:
            raise ProviderRefusedError(f"provider returned {response.status_code}: {response.text[:200]}")
        body = response.json()
        return body["choices"][0]["message"]["content"]


class MockChatProvider:
    """Deterministic provider for tests and demos.

    Responses come either from a directory of canned files keyed by
    PromptKind (threat_model.txt, mitre_select.txt, ...) or from a script:
    a callable (kind, request) -> text, or a dict mapping PromptKind to a
    text / list of texts consumed in order (lists let tests exercise
    retry-then-succeed sequences).
    """

    def __init__(self, directory=None, script=None, model_id="mock"):
        if directory is None and script is None:
            raise ValueError("MockChatProvider needs a directory or a script")
        self.directory = directory
        self.script = dict(script) if isinstance(script, dict) else script
        self.model_id = model_id
        self.calls: list[PromptKind | None] = []

    @property
    def configured(self) -> bool:
        return True

    def complete(self, request: CompletionRequest, kind: PromptKind | None = None) -> str:
        self.calls.append(kind)
        if callable(self.script):
            return self.script(kind, request)
        if self.script is not None:
            canned = self.script[kind]
            if isinstance(canned, list):
                if not canned:
                    raise TransportError(f"mock script for {kind} exhausted")
                value = canned.pop(0)
            else:
                value = canned
            if isinstance(value, Exception):
                raise value
            return value
        path = os.path.join(self.directory, _MOCK_FILENAMES[kind])
        with open(path, encoding="utf-8") as fh:
            return fh.read()


class Gateway:
    """Bounded-retry front to a chat provider."""

    def __init__(self, provider, retries=2, backoff_base=0.5, sleep=time.sleep):
        self.provider = provider
        self.retries = retries
        self.backoff_base = backoff_base
        self._sleep = sleep

    @property
    def configured(self) -> bool:
        return self.provider.configured

    @property
    def model_id(self) -> str:
        return getattr(self.provider, "model_id", "")

    def complete(self, request: CompletionRequest, kind: PromptKind | None = None) -> CompletionOutcome:
        """Run the request, retrying transport failures with exponential
        backoff; the outcome records one event per retry taken."""
        events: list[str] = []
        attempt = 0
        while True:
            try:
                text = self.provider.complete(request, kind=kind)
                return CompletionOutcome(text=text, retry_events=events)
            except (TransportError, RateLimitedError) as exc:
                attempt += 1
                if attempt > self.retries:
                    raise
                events.append(f"retry {attempt} after {type(exc).__name__}: {exc}")
                self._sleep(self.backoff_base * (2 ** (attempt - 1)))


_FENCE = re.compile(r"```[a-zA-Z0-9_-]*\n?")


def _strip_fences(raw: str) -> str:
    return _FENCE.sub("", raw)


def _find_balanced(text: str):
    """Yield every balanced top-level {...} / [...] slice, left to right."""
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in "{[":
            close = "}" if ch == "{" else "]"
            depth = 0
            in_string = False
            escaped = False
            for j in range(i, n):
                c = text[j]
                if in_string:
                    if escaped:
                        escaped = False
                    elif c == "\\":
                        escaped = True
                    elif c == '"':
                        in_string = False
                elif c == '"':
                    in_string = True
                elif c in "{[":
                    depth += 1
                elif c in "}]":
                    depth -= 1
                    if depth == 0:
                        if c == close:
                            yield text[i:j + 1]
                        break
            else:
                return
            i = j + 1
        else:
            i += 1


def _check_shape(value, schema, path="$"):
    """Minimal shape language: a type, a dict of required key -> schema,
    or a one-element list meaning 'list of'."""
    if isinstance(schema, type):
        if schema is float and isinstance(value, int) and not isinstance(value, bool):
            return
        if not isinstance(value, schema) or (schema is not bool and isinstance(value, bool)):
            raise SchemaViolationError(path, f"expected {schema.__name__}, got {type(value).__name__}")
    elif isinstance(schema, dict):
        if not isinstance(value, dict):
            raise SchemaViolationError(path, f"expected object, got {type(value).__name__}")
        for key, sub in schema.items():
            if key not in value:
                raise SchemaViolationError(f"{path}.{key}", "missing key")
            _check_shape(value[key], sub, f"{path}.{key}")
    elif isinstance(schema, list):
        if not isinstance(value, list):
            raise SchemaViolationError(path, f"expected array, got {type(value).__name__}")
        for idx, item in enumerate(value):
            _check_shape(item, schema[0], f"{path}[{idx}]")
    else:
        raise ValueError(f"bad schema node at {path}: {schema!r}")


def extract_structured(raw: str, schema=None):
    """Pull the first schema-valid JSON value out of provider text.

    Strips code fences, scans for balanced top-level objects/arrays,
    parses candidates in order, and (when a schema is given) validates
    the shape. Raises NoParsableObjectError (carrying the raw text) when
    nothing parses; SchemaViolationError when something parses but the
    shape is wrong.
    """
    text = _strip_fences(raw)
    shape_error = None
    parsed_any = False
    for candidate in _find_balanced(text):
        try:
            value = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        parsed_any = True
        if schema is None:
            return value
        try:
            _check_shape(value, schema)
            return value
        except SchemaViolationError as exc:
            shape_error = exc
    if parsed_any and shape_error is not None:
        raise shape_error
    raise NoParsableObjectError(raw)
