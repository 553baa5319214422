import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from memcluster.errors import UnknownDocument
from memcluster.gateway import OracleClient, OracleScript, oracle_complete, parse_response
from memcluster.gateway.oracle import MergeEvent, naming_variants
from memcluster.model import Document, Label, MergeSuggestion, Mode
from memcluster.prompts import PromptPair

WEATHER = OracleScript({"d1": "weather", "d2": "alarm_set"})


def test_exact_match_reuses():
    assert oracle_complete(Document("d1", "rain?"), 1, WEATHER, [Label("weather")]) == 'ASSIGNED_LABEL: "weather"'


def test_empty_memory_creates():
    assert oracle_complete("d2", 1, WEATHER, []) == 'NEW_LABEL: "alarm_set"'


def test_scripted_merge_line():
    merge = MergeSuggestion.of(["ML", "DL"], "AI")
    script = OracleScript({"d1": "weather"}, merge_events=(MergeEvent(3, merge),))
    reply = oracle_complete("d1", 3, script, [])
    assert reply.splitlines()[1] == 'MERGE_SUGGESTION: MERGE: ["ML", "DL"] INTO: ["AI"]'
    assert parse_response(reply).merge == merge
    assert len(oracle_complete("d1", 4, script, []).splitlines()) == 1


def test_forced_split_coins_fresh_name():
    script = OracleScript({"d1": "weather"}, split_bias=1.0)
    assert oracle_complete("d1", 1, script, [Label("weather")]) == 'NEW_LABEL: "weather (variant 2)"'
    mem = [Label("weather"), Label("weather (variant 2)")]
    assert oracle_complete("d1", 2, script, mem) == 'NEW_LABEL: "weather (variant 3)"'


def test_split_is_suppressed_in_strict_mode():
    script = OracleScript({"d1": "weather"}, split_bias=1.0)
    assert oracle_complete("d1", 1, script, [Label("weather")], Mode.STRICT) == 'ASSIGNED_LABEL: "weather"'


def test_strict_merges_family_back():
    script = OracleScript({"d1": "weather"})
    mem = [Label("Weather (variant 2)"), Label("WEATHER"), Label("alarm_set")]
    p = parse_response(oracle_complete("d1", 1, script, mem, Mode.STRICT))
    assert p.merge == MergeSuggestion.of(["Weather (variant 2)", "WEATHER"], "weather")
    # not mode-aware: no family merge
    relaxed_like = OracleScript({"d1": "weather"}, mode_aware=False)
    assert parse_response(oracle_complete("d1", 1, relaxed_like, mem, Mode.STRICT)).merge is None


def test_variants_are_recognised():
    for v in naming_variants("alarm_set"):
        reply = oracle_complete("d2", 1, WEATHER, [Label(v)])
        assert reply == f'ASSIGNED_LABEL: "{v}"'


def test_noise_emits_variant_names():
    script = OracleScript({f"d{i}": "weather" for i in range(200)}, naming_noise=1.0, rng_seed=5)
    names = {parse_response(oracle_complete(f"d{i}", i, script, [])).label.value for i in range(200)}
    assert names <= set(naming_variants("weather")) and len(names) > 1


def test_unknown_document():
    with pytest.raises(UnknownDocument):
        oracle_complete("nope", 1, WEATHER, [])


def test_invalid_script():
    with pytest.raises(ValueError):
        OracleScript({}, naming_noise=1.5)
    merge = MergeSuggestion.of(["a"], "b")
    with pytest.raises(ValueError):
        OracleScript({}, merge_events=(MergeEvent(5, merge), MergeEvent(5, merge)))


def test_script_json_roundtrip(tmp_path):
    merge = MergeSuggestion.of(["ML", "DL"], "AI")
    script = OracleScript({"a": "x"}, 0.2, (MergeEvent(4, merge),), 0.1, 9, False)
    path = tmp_path / "s.json"
    path.write_text(json.dumps(script.to_json()))
    assert OracleScript.load(path) == script


@given(st.integers(0, 2**32), st.floats(0, 1), st.floats(0, 1), st.integers(1, 500))
def test_replies_are_deterministic(seed, noise, split, step):
    script = OracleScript({"d": "weather"}, naming_noise=noise, split_bias=split, rng_seed=seed)
    mem = [Label("weather"), Label("alarm_set")]
    assert oracle_complete("d", step, script, mem) == oracle_complete("d", step, script, mem)


def test_client_counts_calls():
    client = OracleClient(WEATHER)
    pair = PromptPair("s", "u", Mode.RELAXED, (Label("weather"),))
    assert client.complete(pair, doc_id="d1", step=1) == 'ASSIGNED_LABEL: "weather"'
    assert client.calls == 1
