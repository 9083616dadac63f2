import pytest
import requests
from hypothesis import given, strategies as st

from simulacra.errors import (
    BackendConfigError,
    BackendUnavailableError,
    EmptyGenerationError,
    SimulacraError,
)
from simulacra.gateway import (
    AuditLog,
    BackendConfig,
    LiveBackend,
    MockBackend,
    scrub_stops,
)
from simulacra.model import FINISH_OTHER, FINISH_STOP, CompletionRequest
from simulacra.personas import parse_persona_lines
from simulacra.prompts import build_persona_expansion_prompt
from simulacra.model import Persona


def req(prompt, stop=("</span>",), temperature=0.7, seed=0):
    return CompletionRequest(prompt=prompt, temperature=temperature,
                             max_tokens=256, stop=stop, seed=seed)


HEADLINE_PROMPT = (
    'Layla Li is a college student. \n\nLayla posted the following headline to an '
    'online forum for psychotherapy: <span class="headline_reddit" '
    'title="comment that is about psychotherapy, and NOT anti-therapy">')


class TestMockBackend:
    def test_deterministic(self):
        b = MockBackend()
        r1 = b.complete(req(HEADLINE_PROMPT))
        r2 = b.complete(req(HEADLINE_PROMPT))
        assert r1 == r2

    def test_seed_changes_output_space(self):
        b = MockBackend()
        outs = {b.complete(req(HEADLINE_PROMPT, seed=i)).text for i in range(10)}
        assert len(outs) > 1

    def test_headline_on_topic_and_stopped(self):
        b = MockBackend()
        result = b.complete(req(HEADLINE_PROMPT))
        assert "psychotherapy" in result.text
        assert "</span>" not in result.text
        assert result.finish_reason == FINISH_STOP

    def test_persona_expansion_lines_round_trip(self):
        seeds = [Persona(f"Seed Person{i}", "does seed things") for i in range(10)]
        prompt = build_persona_expansion_prompt(seeds)
        b = MockBackend()
        result = b.complete(CompletionRequest(
            prompt=prompt.body, temperature=0.7, max_tokens=1024, stop=("\n\n",)))
        personas = parse_persona_lines(result.text)
        assert len(personas) >= 1
        assert all(p.name and p.description for p in personas)

    def test_empty_prompt_rejected(self):
        with pytest.raises(SimulacraError):
            MockBackend().complete(req(""))

    def test_empty_stop_rejected(self):
        with pytest.raises(SimulacraError):
            MockBackend().complete(req(HEADLINE_PROMPT, stop=()))

    def test_unclassifiable_prompt_falls_back(self):
        result = MockBackend().complete(req("zzz unstructured text with no markers"))
        assert result.text


class TestScrubStops:
    def test_truncates_at_first_stop(self):
        text, finish = scrub_stops("hello</span>world</span>", ("</span>",), FINISH_OTHER)
        assert text == "hello"
        assert finish == FINISH_STOP

    def test_no_stop_found(self):
        text, finish = scrub_stops("hello", ("</span>",), FINISH_OTHER)
        assert (text, finish) == ("hello", FINISH_OTHER)

    @given(st.text(max_size=200), st.sampled_from(["</span>", "\n\n", "END"]))
    def test_result_never_contains_stop(self, text, stop):
        out, _ = scrub_stops(text, (stop,), FINISH_OTHER)
        assert stop not in out


class FakeSession:
    """Scripted stand-in for requests.Session."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = 0

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls += 1
        event = self.script.pop(0)
        if isinstance(event, Exception):
            raise event
        status, body = event
        return FakeResponse(status, body)


class FakeResponse:
    def __init__(self, status_code, body):
        self.status_code = status_code
        self._body = body
        self.text = str(body)

    def json(self):
        return self._body


def live_backend(script, max_retries=3):
    sleeps = []
    backend = LiveBackend(
        BackendConfig(endpoint_url="http://example.invalid/v1/completions",
                      max_retries=max_retries),
        AuditLog(),
        session=FakeSession(script),
        sleep=sleeps.append,
    )
    return backend, backend._session, sleeps


GOOD = (200, {"choices": [{"text": "a fine headline</span>junk", "finish_reason": "stop"}]})


class TestLiveBackend:
    def test_success_scrubs_stop(self):
        backend, _, _ = live_backend([GOOD])
        result = backend.complete(req(HEADLINE_PROMPT))
        assert result.text == "a fine headline"
        assert result.finish_reason == FINISH_STOP

    def test_retries_with_exponential_backoff(self):
        err = requests.ConnectionError("down")
        backend, session, sleeps = live_backend([err, err, err, err])
        with pytest.raises(BackendUnavailableError):
            backend.complete(req(HEADLINE_PROMPT))
        assert session.calls == 4
        assert sleeps == [1, 2, 4]

    def test_recovers_mid_retry(self):
        backend, session, _ = live_backend([requests.ConnectionError("down"), GOOD])
        assert backend.complete(req(HEADLINE_PROMPT)).text == "a fine headline"
        assert session.calls == 2

    def test_4xx_is_not_retried(self):
        backend, session, _ = live_backend([(401, {"error": "bad key"}), GOOD])
        with pytest.raises(BackendConfigError):
            backend.complete(req(HEADLINE_PROMPT))
        assert session.calls == 1

    def test_5xx_is_retried(self):
        backend, session, _ = live_backend([(500, {}), GOOD])
        assert backend.complete(req(HEADLINE_PROMPT)).text == "a fine headline"
        assert session.calls == 2

    def test_empty_completion_raises(self):
        backend, _, _ = live_backend([(200, {"choices": [{"text": "  ", "finish_reason": "stop"}]})])
        with pytest.raises(EmptyGenerationError):
            backend.complete(req(HEADLINE_PROMPT))


class TestAudit:
    def test_one_record_per_successful_call(self):
        backend, _, _ = live_backend([GOOD, GOOD])
        backend.complete(req(HEADLINE_PROMPT))
        backend.complete(req(HEADLINE_PROMPT))
        assert len(backend.audit_log) == 2

    def test_failed_transport_not_audited(self):
        err = requests.ConnectionError("down")
        backend, _, _ = live_backend([err, err, err, err])
        with pytest.raises(BackendUnavailableError):
            backend.complete(req(HEADLINE_PROMPT))
        assert len(backend.audit_log) == 0

    def test_records_temperature_and_op(self):
        b = MockBackend()
        b.complete(CompletionRequest(prompt=HEADLINE_PROMPT, temperature=0.8,
                                     max_tokens=256, stop=("</span>",), op="generate_post"))
        record = b.audit_log.records()[0]
        assert record.temperature == 0.8
        assert record.op == "generate_post"
        assert record.prompt == HEADLINE_PROMPT

    def test_ndjson_mirror(self, tmp_path):
        path = tmp_path / "audit.ndjson"
        b = MockBackend(AuditLog(path))
        b.complete(req(HEADLINE_PROMPT))
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 1
        import json
        assert json.loads(lines[0])["temperature"] == 0.7
