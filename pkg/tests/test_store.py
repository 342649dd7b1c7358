import json
import random

import pytest

from tht import fixtures
from tht.errors import (
    CorruptLog,
    IntegrityViolation,
    SpanOutOfRange,
    ThtError,
    UnknownUnit,
    UnsupportedVersion,
    ValidationFailed,
)
from tht.store import (
    Event,
    Store,
    dumps_canonical,
    export_corpus,
    load_document,
    read_log,
    replay,
)


# -- event log basics ---------------------------------------------------------

def test_first_event_gets_seq_one(store):
    store.create_work("KV", "t", "Deva")
    events = store.events()
    assert [e.seq for e in events] == [1]
    assert events[0].action == "CreateWork"
    assert events[0].timestamp.endswith("+00:00")


def test_sequences_stay_contiguous(store):
    store.create_work("KV", "t", "Deva")
    for i in range(1, 100):
        store.add_unit("KV", f"1.1.{i}", "Sutra", f"t {i}")
    assert [e.seq for e in store.events()] == list(range(1, 101))


def test_failed_validation_leaves_log_unchanged(store):
    store.create_work("KV", "t", "Deva")
    store.add_unit("KV", "1.1.1", "Sutra", "a b")
    store.add_layer("KV/1.1.1", "Ny", "…")
    before = len(store.events())
    with pytest.raises(UnknownUnit):
        store.annotate("KV/1.1.1/Ny", "9.9.9", 0, 1, "Direct")
    with pytest.raises(ThtError):
        store.add_unit("KV", "not-an-id", "Sutra", "x")
    with pytest.raises(SpanOutOfRange):
        store.annotate("KV/1.1.1/Ny", "1.1.1", 0, 99, "Direct")
    assert len(store.events()) == before


def test_event_persisted_before_result_returned(store):
    store.create_work("KV", "t", "Deva")
    # The log line must be on disk by the time execute() returns.
    events = read_log(store.log_path)
    assert events[-1].action == "CreateWork"
    assert events[-1].payload["id"] == "KV"


def test_reopen_replays_to_same_state(tmp_path):
    store = Store.init(tmp_path / "d")
    fixtures.build_kv_corpus(store)
    exported = dumps_canonical(store.export_document())
    store.close()
    reopened = Store.open(tmp_path / "d")
    assert dumps_canonical(reopened.export_document()) == exported
    stats = reopened.support_report("KV", ["1.1.1.1", "1.1.1.2"], "Ny")
    assert (stats.supported_count, stats.total_tokens) == (24, 25)
    reopened.close()


# -- replay ---------------------------------------------------------------------

def test_replay_empty_log_is_empty_corpus():
    snapshot = replay([])
    assert snapshot.works == {} and snapshot.witnesses == {}


def test_replay_fixture_log_reproduces_reports(kv_store):
    from tht import evidence
    snapshot = replay(kv_store.events(), sibling_limit=kv_store.sibling_limit)
    stats = evidence.support_report(snapshot, "KV", ["1.1.1.1", "1.1.1.2"], "Ny")
    assert (stats.supported_count, stats.total_tokens) == (24, 25)
    assert export_corpus(snapshot) == export_corpus(kv_store.corpus)


def test_replay_detects_gap(kv_store):
    events = kv_store.events()
    with pytest.raises(CorruptLog):
        replay(events[:3] + events[4:])


def test_replay_detects_invalid_event(store):
    store.create_work("KV", "t", "Deva")
    events = store.events()
    bogus = Event(seq=2, timestamp=events[0].timestamp, actor="x",
                  action="AddLayer",
                  payload={"parent_path": "KV/9.9.9", "label": "Ny", "text": ""})
    with pytest.raises(CorruptLog):
        replay(events + [bogus])


def test_replay_rejects_unknown_action(store):
    store.create_work("KV", "t", "Deva")
    events = store.events()
    alien = Event(seq=2, timestamp=events[0].timestamp, actor="x",
                  action="Sideways", payload={})
    with pytest.raises(CorruptLog):
        replay(events + [alien])


def test_unparseable_log_line_is_corrupt(tmp_path):
    store = Store.init(tmp_path / "d")
    store.create_work("KV", "t", "Deva")
    store.close()
    with open(store.log_path, "a", encoding="utf-8") as fh:
        fh.write("{not json\n")
    with pytest.raises(CorruptLog):
        Store.open(tmp_path / "d")


# -- export / import ----------------------------------------------------------------

def test_export_empty_corpus_minimal(store):
    doc = store.export_document()
    assert doc["format"] == "tht-corpus"
    assert doc["version"] == 1
    assert doc["works"] == [] and doc["witnesses"] == []
    assert set(doc["taxonomy"]) == {"Direct", "Indirect"}


def test_export_import_export_byte_identical(kv_full_store, tmp_path):
    first = dumps_canonical(kv_full_store.export_document())
    fresh = Store.init(tmp_path / "fresh")
    fresh.import_document(json.loads(first))
    second = dumps_canonical(fresh.export_document())
    assert second == first
    fresh.close()


def test_reports_survive_round_trip(kv_store, tmp_path):
    doc = kv_store.export_document()
    fresh = Store.init(tmp_path / "fresh")
    fresh.import_document(doc)
    for layer, want in [("Ny", 24), ("Pm", 12)]:
        stats = fresh.support_report("KV", ["1.1.1.1", "1.1.1.2"], layer)
        assert stats.supported_count == want
    report = fresh.transmission_report("KV", "1.1.1.3")
    assert report.archetype_hints == ("post-Ny", "post-Pm")
    # exactly one synthetic Import event in the fresh log
    assert [e.action for e in fresh.events()] == ["Import"]
    fresh.close()


def test_import_is_replayable(kv_store, tmp_path):
    doc = kv_store.export_document()
    fresh = Store.init(tmp_path / "fresh")
    fresh.import_document(doc)
    fresh.add_unit("KV", "5.1.1", "Sutra", "after import")
    snapshot = replay(fresh.events(), sibling_limit=fresh.sibling_limit)
    assert export_corpus(snapshot) == fresh.export_document()
    fresh.close()


def test_import_unsupported_version(store):
    with pytest.raises(UnsupportedVersion):
        store.import_document({"format": "tht-corpus", "version": 99})
    with pytest.raises(UnsupportedVersion):
        store.import_document({"format": "something-else", "version": 1})


def test_import_integrity_violations(store):
    base = {"format": "tht-corpus", "version": 1, "witnesses": [], "works": [],
            "taxonomy": {"Direct": [], "Indirect": []}}
    dangling_reading = dict(base, works=[{
        "id": "W", "title": "t", "script": "Deva",
        "units": [{"id": "1.1.1", "kind": "Sutra", "base_text": "a",
                   "readings": [{"witness_id": "ghost", "text": "a"}],
                   "layers": []}]}])
    with pytest.raises(IntegrityViolation) as info:
        store.import_document(dangling_reading)
    assert "ghost" in str(info.value)

    bad_span = dict(base, works=[{
        "id": "W", "title": "t", "script": "Deva",
        "units": [{"id": "1.1.1", "kind": "Sutra", "base_text": "a b",
                   "readings": [],
                   "layers": [{"label": "Ny", "text": "", "revision": 1,
                               "annotations": [{
                                   "id": "ann-x",
                                   "source_layer_path": "W/1.1.1/Ny",
                                   "target_unit_id": "1.1.1",
                                   "start": 0, "end": 9, "kind": "Direct",
                                   "subtype": None, "quoted_form": None,
                                   "note": None}],
                               "layers": []}]}]}])
    with pytest.raises(IntegrityViolation):
        store.import_document(bad_span)

    dangling_target = dict(base, works=[{
        "id": "W", "title": "t", "script": "Deva",
        "units": [{"id": "1.1.1", "kind": "Sutra", "base_text": "a b",
                   "readings": [],
                   "layers": [{"label": "Ny", "text": "", "revision": 1,
                               "annotations": [{
                                   "id": "ann-x",
                                   "source_layer_path": "W/1.1.1/Ny",
                                   "target_unit_id": "7.7.7",
                                   "start": 0, "end": 1, "kind": "Direct",
                                   "subtype": None, "quoted_form": None,
                                   "note": None}],
                               "layers": []}]}]}])
    with pytest.raises(IntegrityViolation) as info:
        store.import_document(dangling_target)
    assert "7.7.7" in str(info.value)


def test_canonical_export_ignores_operation_order(tmp_path):
    """Equal final content, different op orders, identical bytes."""

    def build(path, flip):
        s = Store.init(path)
        s.create_work("W", "t", "Deva")
        s.add_unit("W", "1.1.1", "Sutra", "a b c d")
        witnesses = [("w1", "X"), ("w2", "Y")]
        for wid, sig in (reversed(witnesses) if flip else witnesses):
            s.add_witness(wid, sig, "Manuscript")
        readings = [("w1", "a b c d"), ("w2", "a b q d")]
        for wid, text in (reversed(readings) if flip else readings):
            s.record_reading("1.1.1", wid, text)
        s.add_layer("W/1.1.1", "Ny", "…")
        spans = [(0, 2, "Direct"), (2, 4, "Indirect")]
        for start, end, kind in (reversed(spans) if flip else spans):
            s.annotate("W/1.1.1/Ny", "1.1.1", start, end, kind)
        doc = dumps_canonical(s.export_document())
        s.close()
        return doc

    assert build(tmp_path / "a", False) == build(tmp_path / "b", True)


def test_snapshot_written_on_close(tmp_path):
    store = Store.init(tmp_path / "d")
    store.create_work("KV", "t", "Deva")
    store.close()
    assert store.snapshot_path.exists()
    snapshot = json.loads(store.snapshot_path.read_text(encoding="utf-8"))
    assert snapshot["works"][0]["id"] == "KV"
    # the snapshot is itself a loadable interchange document
    load_document(snapshot)


def test_init_twice_fails(tmp_path):
    Store.init(tmp_path / "d").close()
    with pytest.raises(ValidationFailed):
        Store.init(tmp_path / "d")


def test_open_uninitialized_fails(tmp_path):
    with pytest.raises(ValidationFailed):
        Store.open(tmp_path / "missing")


# -- the 500-operation randomized equivalence check -----------------------------------

def random_operations(store, rng, count=500):
    """Drive the store through `count` successful random mutations."""
    works, units, witnesses, layer_paths = [], [], [], []
    annotation_ids = []
    kinds = ["Direct", "Indirect", "Both", "Default"]
    performed = 0
    attempts = 0
    while performed < count and attempts < count * 50:
        attempts += 1
        roll = rng.random()
        try:
            if not works or roll < 0.03:
                wid = f"W{len(works)}"
                store.create_work(wid, f"work {wid}", "Deva")
                works.append(wid)
            elif not units or roll < 0.25:
                wid = rng.choice(works)
                uid = f"{rng.randint(1, 3)}.{rng.randint(1, 3)}.{rng.randint(1, 99)}"
                store.add_unit(wid, uid, "Sutra",
                               " ".join(rng.choice("कखगघचछ") for _ in range(rng.randint(1, 8))))
                units.append((wid, uid))
            elif roll < 0.40:
                wid, uid = rng.choice(units)
                parent = (f"{wid}/{uid}" if rng.random() < 0.7 or not layer_paths
                          else rng.choice(layer_paths))
                if not parent.startswith(wid):
                    parent = f"{wid}/{uid}"
                label = f"L{rng.randint(0, 200)}"
                doc = store.add_layer(parent, label, "text")
                layer_paths.append(doc["path"])
            elif roll < 0.50 and layer_paths:
                path = rng.choice(layer_paths)
                node = store.resolve(path)
                store.edit_layer(path, f"edit {rng.random():.3f}",
                                 expected_revision=node["revision"])
            elif roll < 0.60:
                wid = f"ms{len(witnesses)}"
                store.add_witness(wid, wid.upper(),
                                  rng.choice(["Manuscript", "PrintedEdition"]))
                witnesses.append(wid)
            elif roll < 0.75 and witnesses and units:
                wid, uid = rng.choice(units)
                store.record_reading(f"{wid}/{uid}", rng.choice(witnesses),
                                     " ".join(rng.choice("कखगघ") for _ in range(3)))
            elif roll < 0.95 and layer_paths:
                path = rng.choice(layer_paths)
                wid = path.split("/")[0]
                target = rng.choice([u for w, u in units if w == wid])
                unit_doc = store.resolve(f"{wid}/{target}")
                n = unit_doc["token_count"]
                start = rng.randrange(n)
                end = rng.randint(start + 1, n)
                doc = store.annotate(path, target, start, end, rng.choice(kinds))
                annotation_ids.append(doc["id"])
            elif annotation_ids:
                store.delete_annotation(annotation_ids.pop(
                    rng.randrange(len(annotation_ids))))
            else:
                continue
            performed += 1
        except ThtError:
            continue
    assert performed == count, f"only {performed} operations succeeded"


def test_random_log_replay_matches_live_snapshot(tmp_path):
    store = Store.init(tmp_path / "d")
    rng = random.Random(20260809)
    random_operations(store, rng, count=500)
    events = store.events()
    assert [e.seq for e in events] == list(range(1, len(events) + 1))
    snapshot = replay(events, sibling_limit=store.sibling_limit)
    assert dumps_canonical(export_corpus(snapshot)) == dumps_canonical(
        store.export_document())
    store.close()
