"""Chat types, the scripted backend, retry behaviour, and the HTTP backend."""

import json

import httpx
import pytest

from foamagent.errors import (
    BackendError,
    BackendScriptExhausted,
    ConfigError,
    InvalidRequest,
    ScriptMatchError,
    TransportError,
)
from foamagent.llm.client import RetryPolicy, complete_chat
from foamagent.llm.http import HttpBackend
from foamagent.llm.mock import (
    MockBackend,
    ScriptEntry,
    fallback_token_count,
    load_script,
)
from foamagent.llm.types import ChatMessage, ChatRequest, LlmParams, UsageRecord

PARAMS = LlmParams(model_id="test-model")


def _req(text: str) -> ChatRequest:
    return ChatRequest.user(text, PARAMS)


# --- request types ----------------------------------------------------------


def test_params_validate_temperature_and_tokens():
    assert LlmParams(model_id="m", temperature=0.0).temperature == 0.0
    assert LlmParams(model_id="m", temperature=1.0).temperature == 1.0
    with pytest.raises(InvalidRequest):
        LlmParams(model_id="m", temperature=1.5)
    with pytest.raises(InvalidRequest):
        LlmParams(model_id="m", temperature=-0.1)
    with pytest.raises(InvalidRequest):
        LlmParams(model_id="m", max_output_tokens=0)


def test_chat_request_needs_a_final_user_message():
    with pytest.raises(InvalidRequest):
        ChatRequest(messages=(), params=PARAMS)
    with pytest.raises(InvalidRequest):
        ChatRequest(messages=(ChatMessage("assistant", "hi"),), params=PARAMS)


def test_joined_text_is_newline_separated():
    request = ChatRequest(
        messages=(ChatMessage("system", "be terse"), ChatMessage("user", "hello")),
        params=PARAMS,
    )
    assert request.joined_text() == "be terse\nhello"
    assert _req("solo").joined_text() == "solo"


# --- scripted backend -------------------------------------------------------


def test_fallback_token_count_rounds_up():
    assert fallback_token_count("") == 0
    assert fallback_token_count("a") == 1
    assert fallback_token_count("abcd") == 1
    assert fallback_token_count("abcde") == 2


def test_script_replays_in_order_and_records_requests():
    backend = MockBackend(script=[ScriptEntry(reply="one"), ScriptEntry(reply="two")])
    first = backend.complete(_req("request A"))
    second = backend.complete(_req("request B"))
    assert (first.text, second.text) == ("one", "two")
    assert [r.joined_text() for r in backend.requests] == ["request A", "request B"]
    assert backend.remaining == 0


def test_script_match_is_substring_and_misses_loudly():
    backend = MockBackend(script=[ScriptEntry(reply="ok", match="magic token")])
    with pytest.raises(ScriptMatchError, match="magic token"):
        backend.complete(_req("no such phrase here"))
    backend2 = MockBackend(script=[ScriptEntry(reply="ok", match="magic token")])
    assert backend2.complete(_req("xx magic token xx")).text == "ok"


def test_script_exhaustion_raises():
    backend = MockBackend(script=[ScriptEntry(reply="only")])
    backend.complete(_req("first"))
    with pytest.raises(BackendScriptExhausted):
        backend.complete(_req("second"))


def test_script_usage_declared_or_fallback():
    declared = UsageRecord(prompt_tokens=111, completion_tokens=22)
    backend = MockBackend(
        script=[ScriptEntry(reply="yes", usage=declared), ScriptEntry(reply="12345678")]
    )
    assert backend.complete(_req("x" * 100)).usage == declared
    fallback = backend.complete(_req("x" * 10)).usage
    assert fallback == UsageRecord(prompt_tokens=3, completion_tokens=2)


def test_load_script_round_trip(tmp_path):
    path = tmp_path / "script.json"
    path.write_text(
        json.dumps(
            [
                {"reply": "r1", "match": "m1"},
                {"reply": "r2", "usage": {"prompt_tokens": 7, "completion_tokens": 3}},
                {"reply": "r3"},
            ]
        ),
        encoding="utf-8",
    )
    entries = load_script(path)
    assert [e.reply for e in entries] == ["r1", "r2", "r3"]
    assert entries[0].match == "m1"
    assert entries[1].usage == UsageRecord(prompt_tokens=7, completion_tokens=3)
    assert entries[2].match is None and entries[2].usage is None


def test_load_script_rejects_bad_shapes(tmp_path):
    not_list = tmp_path / "a.json"
    not_list.write_text('{"reply": "x"}', encoding="utf-8")
    with pytest.raises(ConfigError, match="JSON list"):
        load_script(not_list)
    no_reply = tmp_path / "b.json"
    no_reply.write_text('[{"match": "x"}]', encoding="utf-8")
    with pytest.raises(ConfigError, match="lacks a 'reply'"):
        load_script(no_reply)
    broken = tmp_path / "c.json"
    broken.write_text("{nope", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_script(broken)


# --- retry policy -----------------------------------------------------------


class _Flaky:
    """Backend failing with the given errors before finally answering."""

    def __init__(self, failures):
        self.failures = list(failures)
        self.seen = []

    def complete(self, request):
        self.seen.append(request)
        if self.failures:
            raise self.failures.pop(0)
        from foamagent.llm.types import Completion

        return Completion(text="done", usage=UsageRecord())


def test_no_retry_needed_means_no_sleep():
    slept = []
    backend = _Flaky([])
    result = complete_chat(_req("hi"), backend, sleep=slept.append)
    assert result.text == "done"
    assert slept == []


def test_transport_errors_back_off_exponentially():
    slept = []
    backend = _Flaky([TransportError("t1"), TransportError("t2")])
    request = _req("same request")
    result = complete_chat(request, backend, sleep=slept.append)
    assert result.text == "done"
    assert slept == [1.0, 2.0]
    # every attempt resends the identical request
    assert backend.seen == [request, request, request]


def test_exhausted_retries_reraise_the_last_error():
    slept = []
    backend = _Flaky([TransportError(f"t{i}") for i in range(4)])
    with pytest.raises(TransportError, match="t3"):
        complete_chat(_req("hi"), backend, sleep=slept.append)
    assert slept == [1.0, 2.0, 4.0]


def test_backend_errors_are_not_retried():
    slept = []
    backend = _Flaky([BackendError("bad request shape")])
    with pytest.raises(BackendError):
        complete_chat(_req("hi"), backend, sleep=slept.append)
    assert slept == []
    assert len(backend.seen) == 1


def test_zero_retry_policy_fails_fast():
    slept = []
    backend = _Flaky([TransportError("once")])
    with pytest.raises(TransportError):
        complete_chat(
            _req("hi"), backend, retry=RetryPolicy(max_retries=0), sleep=slept.append
        )
    assert slept == []


# --- HTTP backend -----------------------------------------------------------


def _http_backend(handler) -> HttpBackend:
    client = httpx.Client(transport=httpx.MockTransport(handler))
    return HttpBackend("https://llm.test/v1/chat/completions", "sk-test", client=client)


def test_http_backend_posts_the_chat_shape():
    captured = {}

    def handler(request: httpx.Request) -> httpx.Response:
        captured["payload"] = json.loads(request.content)
        captured["auth"] = request.headers.get("authorization")
        return httpx.Response(
            200,
            json={
                "choices": [{"message": {"content": "reply text"}}],
                "usage": {"prompt_tokens": 12, "completion_tokens": 34},
            },
        )

    backend = _http_backend(handler)
    request = ChatRequest(
        messages=(ChatMessage("system", "sys"), ChatMessage("user", "usr")),
        params=LlmParams(model_id="m-1", temperature=0.25, max_output_tokens=99),
    )
    completion = backend.complete(request)
    assert completion.text == "reply text"
    assert completion.usage == UsageRecord(prompt_tokens=12, completion_tokens=34)
    assert captured["auth"] == "Bearer sk-test"
    assert captured["payload"] == {
        "model": "m-1",
        "messages": [
            {"role": "system", "content": "sys"},
            {"role": "user", "content": "usr"},
        ],
        "temperature": 0.25,
        "max_tokens": 99,
    }


def test_http_backend_falls_back_to_estimated_usage():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(200, json={"choices": [{"message": {"content": "abcdefgh"}}]})

    completion = _http_backend(handler).complete(_req("x" * 8))
    assert completion.usage == UsageRecord(prompt_tokens=2, completion_tokens=2)


def test_http_backend_maps_status_codes_to_error_kinds():
    def flaky(request):
        return httpx.Response(503, text="overloaded")

    with pytest.raises(TransportError, match="503"):
        _http_backend(flaky).complete(_req("hi"))

    def missing(request):
        return httpx.Response(404, text="no such route")

    with pytest.raises(BackendError, match="404"):
        _http_backend(missing).complete(_req("hi"))


def test_http_backend_rejects_malformed_payloads():
    def garbled(request):
        return httpx.Response(200, text="not json at all")

    with pytest.raises(BackendError, match="malformed"):
        _http_backend(garbled).complete(_req("hi"))

    def wrong_shape(request):
        return httpx.Response(200, json={"choices": []})

    with pytest.raises(BackendError, match="malformed"):
        _http_backend(wrong_shape).complete(_req("hi"))


def test_http_backend_wraps_network_failures():
    def boom(request):
        raise httpx.ConnectError("connection refused")

    with pytest.raises(TransportError, match="failed"):
        _http_backend(boom).complete(_req("hi"))
