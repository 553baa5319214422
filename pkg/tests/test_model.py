import pytest
from hypothesis import given
from hypothesis import strategies as st

from memcluster.errors import ConfigError, EmptyLabel
from memcluster.model import Document, Label, MemoryState, Mode, RunConfig, normalize_label


def test_normalize_strips_quotes():
    assert normalize_label('"Arts"').value == "Arts"


def test_normalize_trims():
    assert normalize_label("  alarm_set ").value == "alarm_set"


def test_case_insensitive_equality():
    assert normalize_label("ML") == normalize_label("ml")
    assert hash(normalize_label("ML")) == hash(normalize_label("ml"))
    assert normalize_label("ML").value == "ML"


def test_normalize_strips_only_one_layer_and_collapses_whitespace():
    assert normalize_label("'\"x\"'").value == '"x"'
    assert normalize_label("  new \t york\n ").value == "new york"


@pytest.mark.parametrize("raw", ["", "   ", '""', "' '"])
def test_empty_label(raw):
    with pytest.raises(EmptyLabel):
        normalize_label(raw)


def test_mismatched_quotes_are_kept():
    assert normalize_label("\"Arts'").value == "\"Arts'"


def test_document_validation():
    with pytest.raises(ValueError):
        Document("a", "   ")
    assert Document("a", "x", "g").gold_label == "g"


def test_memory_keeps_first_seen_casing():
    mem = MemoryState()
    mem.add(Label("Weather"))
    stored = mem.add(Label("WEATHER"))
    assert stored.value == "Weather"
    assert len(mem) == 1
    assert mem.version == 1


@given(st.lists(st.tuples(st.booleans(), st.sampled_from(["a", "A", "b", "B", "c", "dd", "DD"])), max_size=60))
def test_memory_never_holds_equal_labels(ops):
    mem = MemoryState()
    last_version = mem.version
    for is_add, value in ops:
        before = list(mem.labels)
        if is_add:
            mem.add(Label(value))
        else:
            mem.remove_all([Label(value)])
        keys = [lab.key for lab in mem.labels]
        assert len(keys) == len(set(keys))
        if mem.labels != before:
            assert mem.version > last_version
        last_version = mem.version


def test_runconfig_validation():
    with pytest.raises(ConfigError):
        RunConfig(k_min=0, k_max=3)
    with pytest.raises(ConfigError):
        RunConfig(k_min=5, k_max=3)
    with pytest.raises(ConfigError):
        RunConfig(k_min=1, k_max=5, offset=-5)
    with pytest.raises(ConfigError):
        RunConfig(k_min=1, k_max=5, max_parse_retries=-1)
    assert RunConfig(k_min=1, k_max=5, offset=-4).threshold == 1


def test_runconfig_roundtrip():
    cfg = RunConfig(k_min=2, k_max=9, offset=3, forced_mode=Mode.STRICT, use_fewshot=False, seed=4)
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
