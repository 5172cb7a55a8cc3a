import pytest

from aegisshield.errors import (
    MissingBindingError,
    NoParsableObjectError,
    RateLimitedError,
    SchemaViolationError,
    TimeoutError_,
)
from aegisshield.gateway import (
    CompletionRequest,
    Gateway,
    MockChatProvider,
    extract_structured,
)
from aegisshield.prompts import PromptKind, placeholder_names, render_prompt, template_text


def full_bindings(kind):
    return {name: f"<{name} value>" for name in placeholder_names(kind)}


class TestRenderPrompt:
    def test_threat_model_contains_bound_app_type(self):
        bindings = full_bindings(PromptKind.THREAT_MODEL)
        bindings["app_type"] = "Web application"
        text = render_prompt(PromptKind.THREAT_MODEL, bindings)
        assert "APPLICATION TYPE: Web application" in text

    def test_mitre_select_emphasis_marker(self):
        text = render_prompt(PromptKind.MITRE_SELECT, full_bindings(PromptKind.MITRE_SELECT))
        assert "should ****ONLY**** include" in text

    def test_missing_binding_names_placeholder(self):
        bindings = full_bindings(PromptKind.DREAD)
        del bindings["threats"]
        with pytest.raises(MissingBindingError) as excinfo:
            render_prompt(PromptKind.DREAD, bindings)
        assert excinfo.value.name == "threats"

    @pytest.mark.parametrize("kind", list(PromptKind))
    def test_no_declared_placeholder_remains(self, kind):
        text = render_prompt(kind, full_bindings(kind))
        for name in placeholder_names(kind):
            token = {"threat": "{Json. Dumps(threat, indent=2)}"}.get(name)
            if token is None:
                continue
            assert token not in text

    @pytest.mark.parametrize("kind", list(PromptKind))
    def test_json_example_braces_survive(self, kind):
        # templates with JSON examples keep their braces verbatim
        rendered = render_prompt(kind, full_bindings(kind))
        if "{\n" in template_text(kind):
            assert "{\n" in rendered

    def test_referential_transparency(self):
        bindings = full_bindings(PromptKind.THREAT_MODEL)
        assert render_prompt(PromptKind.THREAT_MODEL, bindings) == \
            render_prompt(PromptKind.THREAT_MODEL, bindings)

    def test_one_template_per_kind(self):
        texts = {template_text(kind) for kind in PromptKind}
        assert len(texts) == 6


class TestExtractStructured:
    def test_fenced_object(self):
        assert extract_structured('```json\n{"a": 1}\n```') == {"a": 1}

    def test_single_line_fence(self):
        assert extract_structured('```json {"a": 1} ```') == {"a": 1}

    def test_prose_wrapped_object(self):
        raw = ('Here is the model: {"threat_model": [], "improvement_suggestions": []}'
               " — hope this helps!")
        value = extract_structured(raw)
        assert value == {"threat_model": [], "improvement_suggestions": []}

    def test_refusal_raises_with_raw(self):
        with pytest.raises(NoParsableObjectError) as excinfo:
            extract_structured("I cannot comply.")
        assert excinfo.value.raw == "I cannot comply."

    def test_schema_violation_carries_path(self):
        with pytest.raises(SchemaViolationError) as excinfo:
            extract_structured('{"threat_model": "oops"}', {"threat_model": [dict]})
        assert "threat_model" in str(excinfo.value)

    def test_skips_leading_non_json_braces(self):
        raw = "{not json} followed by [1, 2, 3]"
        assert extract_structured(raw, [int]) == [1, 2, 3]

    def test_array_schema(self):
        assert extract_structured('["attack-pattern--x"]', [str]) == ["attack-pattern--x"]

    def test_nested_shape_check(self):
        schema = {"Risk Assessment": [dict]}
        value = extract_structured('{"Risk Assessment": [{"Threat Type": "Spoofing"}]}', schema)
        assert value["Risk Assessment"][0]["Threat Type"] == "Spoofing"

    def test_round_trip_for_schema_valid_values(self):
        import json

        doc = {"threat_model": [{"Threat Type": "Spoofing"}], "improvement_suggestions": ["x"]}
        assert extract_structured(json.dumps(doc),
                                  {"threat_model": [dict], "improvement_suggestions": [str]}) == doc


class TestCompletionRequest:
    def test_requires_messages(self):
        with pytest.raises(ValueError):
            CompletionRequest(messages=())

    def test_requires_nonnegative_temperature(self):
        with pytest.raises(ValueError):
            CompletionRequest(messages=({"role": "user", "text": "hi"},), temperature=-1)


def request():
    return CompletionRequest(messages=({"role": "user", "text": "hi"},))


class TestGatewayRetry:
    def test_mock_keyed_on_kind(self, mock_dir):
        gateway = Gateway(MockChatProvider(directory=mock_dir))
        outcome = gateway.complete(request(), kind=PromptKind.MITRE_SELECT)
        assert "attack-pattern--" in outcome.text
        assert outcome.retry_events == []

    def test_two_timeouts_then_success(self):
        provider = MockChatProvider(script={
            PromptKind.DREAD: [TimeoutError_("t1"), TimeoutError_("t2"), "ok"],
        })
        gateway = Gateway(provider, retries=2, sleep=lambda _: None)
        outcome = gateway.complete(request(), kind=PromptKind.DREAD)
        assert outcome.text == "ok"
        assert len(outcome.retry_events) == 2

    def test_persistent_429_surfaces(self):
        provider = MockChatProvider(script={
            PromptKind.DREAD: [RateLimitedError("429")] * 5,
        })
        gateway = Gateway(provider, retries=2, sleep=lambda _: None)
        with pytest.raises(RateLimitedError):
            gateway.complete(request(), kind=PromptKind.DREAD)

    def test_backoff_is_exponential(self):
        sleeps = []
        provider = MockChatProvider(script={
            PromptKind.DREAD: [TimeoutError_("a"), TimeoutError_("b"), "ok"],
        })
        gateway = Gateway(provider, retries=2, backoff_base=0.5, sleep=sleeps.append)
        gateway.complete(request(), kind=PromptKind.DREAD)
        assert sleeps == [0.5, 1.0]
