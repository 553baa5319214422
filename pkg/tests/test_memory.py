import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import SetModel

from memcluster.errors import DuplicateDocument, EmptyLog
from memcluster.memory import apply_assignment, apply_merge, core_step, derive_partition
from memcluster.model import (
    AssignmentLog,
    Document,
    Label,
    MemoryState,
    MergeSuggestion,
    ParsedResponse,
    ResponseKind,
)


def L(v):
    return Label(v)


def mem_of(*values):
    return MemoryState([L(v) for v in values])


def doc(i):
    return Document(f"d{i}", f"text {i}")


def resp(label, merge=None, kind=ResponseKind.ASSIGNED):
    return ParsedResponse(kind, L(label), merge)


def test_assignment_creates_new_label():
    mem, alog, new = apply_assignment(mem_of("Arts"), AssignmentLog(), "d1", L("Science"), 1)
    assert mem.values() == ["Arts", "Science"] and new
    assert alog.label_of("d1") == L("Science")


def test_assignment_reuses_label():
    mem = mem_of("Arts")
    v = mem.version
    mem, _, new = apply_assignment(mem, AssignmentLog(), "d1", L("arts"), 1)
    assert mem.values() == ["Arts"] and not new and mem.version == v


def test_first_document_on_empty_memory():
    mem, _, new = apply_assignment(MemoryState(), AssignmentLog(), "d1", L("Weather"), 1)
    assert mem.values() == ["Weather"] and new


def test_duplicate_document():
    mem, alog, _ = apply_assignment(MemoryState(), AssignmentLog(), "d1", L("A"), 1)
    with pytest.raises(DuplicateDocument):
        apply_assignment(mem, alog, "d1", L("B"), 2)


def _seed_log(assignments):
    mem, alog = MemoryState(), AssignmentLog()
    for step, (doc_id, label) in enumerate(assignments, start=1):
        apply_assignment(mem, alog, doc_id, L(label), step)
    return mem, alog


def test_merge_rewrites_history():
    mem, alog = _seed_log([("a", "ML"), ("b", "DL"), ("c", "ML"), ("d", "NLP"), ("e", "DL"), ("f", "ML")])
    mem, alog, applied, rewrites = apply_merge(mem, alog, MergeSuggestion.of(["ML", "DL"], "AI"))
    assert applied and rewrites == 5
    assert set(mem.values()) == {"NLP", "AI"}
    assert {e.label.value for e in alog.entries} == {"NLP", "AI"}
    assert alog.rewrite_count == 5


def test_merge_with_unknown_labels_is_skipped():
    mem, alog = _seed_log([("a", "A")])
    before_mem, before_log = mem.copy(), alog.copy()
    mem, alog, applied, rewrites = apply_merge(mem, alog, MergeSuggestion.of(["Ghost"], "X"))
    assert not applied and rewrites == 0
    assert mem == before_mem and alog == before_log


def test_self_absorbing_merge():
    mem, alog = _seed_log([("a", "A"), ("b", "B"), ("c", "B")])
    mem, alog, applied, rewrites = apply_merge(mem, alog, MergeSuggestion.of(["A", "B"], "a"))
    assert applied and rewrites == 2
    assert mem.values() == ["A"]
    assert [e.label.value for e in alog.entries] == ["A", "A", "A"]


def test_core_step_without_merge_matches_assignment():
    mem, alog, out = core_step(mem_of("Arts"), AssignmentLog(), doc(1), resp("Arts"), 1)
    assert out.assigned == L("Arts") and not out.created_new and out.merge_applied is None and out.rewrites == 0


def test_core_step_merge_absorbs_fresh_label():
    mem, alog = _seed_log([("a", "ML"), ("b", "DL")])
    merge = MergeSuggestion.of(["ML", "DL"], "AI")
    mem, alog, out = core_step(mem, alog, doc(3), resp("AI", merge, ResponseKind.NEW_LABEL), 3)
    assert mem.values() == ["AI"]
    assert out.assigned == L("AI") and out.created_new and out.merge_applied == merge
    assert [e.label.value for e in alog.entries] == ["AI", "AI", "AI"]
    # an oracle applying the update equations in sequence agrees
    model = SetModel()
    model.step("a", "ML", None)
    model.step("b", "DL", None)
    model.step("d3", "AI", ({"ML", "DL"}, "AI"))
    assert model.memory == {lab.key for lab in mem}
    assert model.assign == {e.doc_id: e.label.key for e in alog.entries}


def test_core_step_merge_can_absorb_just_assigned_label():
    mem, alog = _seed_log([("a", "ML")])
    mem, alog, out = core_step(mem, alog, doc(2), resp("DL", MergeSuggestion.of(["DL"], "ML")), 2)
    assert out.created_new and out.assigned == L("ML") and mem.values() == ["ML"]


def test_hundred_step_run_with_one_merge():
    rng = random.Random(3)
    mem, alog = MemoryState(), AssignmentLog()
    pool = ["ml", "dl", "nlp", "cv", "rl"]
    merge = MergeSuggestion.of(["ml", "dl"], "ai")
    for step in range(1, 101):
        mem, alog, out = core_step(
            mem, alog, doc(step), resp(rng.choice(pool), merge if step == 50 else None), step
        )
        if step == 50:
            assert out.merge_applied == merge
        if step >= 50:
            # ml/dl may be re-created later; only entries from before the merge must stay clean
            assert not any(e.label in {L("ml"), L("dl")} for e in alog.entries if e.step <= 50)
    live_at_50 = [e for e in alog.entries if e.step <= 50]
    assert all(e.label not in {L("ml"), L("dl")} for e in live_at_50)


def test_derive_partition_groups():
    _, alog = _seed_log([("d1", "A"), ("d2", "A"), ("d3", "B")])
    part = derive_partition(alog)
    assert part.to_json() == {"A": ["d1", "d2"], "B": ["d3"]}


def test_partition_bounds():
    _, alog = _seed_log([("d1", "A")])
    assert derive_partition(alog).k == 1
    _, alog = _seed_log([(f"d{i}", f"L{i}") for i in range(7)])
    assert derive_partition(alog).k == 7


def test_empty_log():
    with pytest.raises(EmptyLog):
        derive_partition(AssignmentLog())


POOL = ["a", "B", "c", "D", "e", "f"]
step_strategy = st.tuples(
    st.sampled_from(POOL + ["A", "b"]),
    st.one_of(
        st.none(),
        st.tuples(st.sets(st.sampled_from(POOL + ["ghost"]), min_size=1, max_size=3), st.sampled_from(POOL + ["new"])),
    ),
)


def _run_and_check(script):
    mem, alog = MemoryState(), AssignmentLog()
    model = SetModel()
    for step, (label, merge_args) in enumerate(script, start=1):
        merge = MergeSuggestion.of(sorted(merge_args[0]), merge_args[1]) if merge_args else None
        mem, alog, out = core_step(mem, alog, doc(step), resp(label, merge), step)
        model.step(f"d{step}", label, merge_args)

        assert {lab.key for lab in mem} == model.memory
        assert {e.doc_id: e.label.key for e in alog.entries} == model.assign
        # live labels and memory coincide
        assert alog.live_labels() == set(mem.labels)
        if out.merge_applied is not None:
            gone = {lab for lab in merge.old_labels if lab != merge.new_label}
            assert not any(e.label in gone for e in alog.entries)
        if out.rewrites:
            assert out.merge_applied is not None
        ids = [e.doc_id for e in alog.entries]
        assert len(ids) == len(set(ids)) == step
    return mem, alog


@settings(max_examples=300)
@given(st.lists(step_strategy, min_size=1, max_size=80))
def test_engine_matches_set_model(script):
    _run_and_check(script)


def test_long_randomized_runs():
    for seed in range(3):
        rng = random.Random(seed)
        script = []
        for _ in range(1200):
            merge = None
            if rng.random() < 0.05:
                merge = (set(rng.sample(POOL + ["ghost"], rng.randint(1, 3))), rng.choice(POOL + ["new"]))
            script.append((rng.choice(POOL), merge))
        _run_and_check(script)


@given(st.lists(step_strategy, min_size=1, max_size=30), st.sets(st.sampled_from(POOL), min_size=1), st.sampled_from(POOL + ["z"]))
def test_remerge_is_idempotent(script, old, new):
    mem, alog = _run_and_check(script)
    merge = MergeSuggestion.of(sorted(old), new)
    apply_merge(mem, alog, merge)
    once_mem, once_log = mem.copy(), alog.copy()
    _, _, _, rewrites = apply_merge(mem, alog, merge)
    assert rewrites == 0
    assert mem.labels == once_mem.labels and alog.entries == once_log.entries
