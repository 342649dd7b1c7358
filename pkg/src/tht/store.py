"""Event-sourced persistence: append-only JSON-lines audit log, materialized
corpus snapshot, and canonical import/export.

Every mutation validates against the current snapshot, is appended to the
log (flushed and fsynced) and only then applied, so a reader never observes
state that is not yet durable. Replaying the log reproduces the snapshot
exactly. The sibling limit is pinned in the data dir's config at init time
so replays do not depend on the current environment.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path as FsPath
from typing import Iterable, Sequence

from . import corpus as corpus_model
from . import evidence, phylogeny
from .collation import pseudo_witness, tokenize
from .corpus import Corpus, Path, unit_sort_key
from .errors import (
    CorruptLog,
    IntegrityViolation,
    ThtError,
    UnsupportedVersion,
    ValidationFailed,
)

FORMAT_MARKER = "tht-corpus"
FORMAT_VERSION = 1

ACTIONS = ("CreateWork", "AddUnit", "AddLayer", "EditLayer", "RecordReading",
           "Annotate", "DeleteAnnotation", "AddWitness", "Import")

LOG_NAME = "events.log"
SNAPSHOT_NAME = "corpus.json"
TAXONOMY_NAME = "taxonomy.json"
CONFIG_NAME = "config.json"
USERS_NAME = "users.json"


@dataclass(frozen=True)
class Event:
    seq: int
    timestamp: str
    actor: str
    action: str
    payload: dict
    resulting_revision: int | None = None

    def to_json(self) -> str:
        doc = {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "actor": self.actor,
            "action": self.action,
            "payload": self.payload,
            "resulting_revision": self.resulting_revision,
        }
        return json.dumps(doc, ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "Event":
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptLog(f"unparseable event line: {exc}") from None
        try:
            return cls(seq=doc["seq"], timestamp=doc["timestamp"],
                       actor=doc["actor"], action=doc["action"],
                       payload=doc["payload"],
                       resulting_revision=doc.get("resulting_revision"))
        except KeyError as exc:
            raise CorruptLog(f"event line missing field {exc}") from None


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def read_log(path: FsPath | str) -> list[Event]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(Event.from_json(line))
    return events


def replay(events: Iterable[Event],
           sibling_limit: int = corpus_model.DEFAULT_SIBLING_LIMIT) -> Corpus:
    """Deterministically rebuild a corpus snapshot from an event sequence."""
    snapshot = Corpus(sibling_limit=sibling_limit)
    expected = 1
    for event in events:
        if event.seq != expected:
            raise CorruptLog(f"event seq {event.seq}, expected {expected}")
        expected += 1
        if event.action == "Import":
            snapshot = load_document(event.payload["document"],
                                     sibling_limit=sibling_limit)
            continue
        if event.action not in ACTIONS:
            raise CorruptLog(f"unknown action {event.action!r} at seq {event.seq}")
        try:
            planned = corpus_model.plan(snapshot, event.action, event.payload)
            planned.commit()
        except ThtError as exc:
            raise CorruptLog(
                f"event seq {event.seq} ({event.action}) no longer applies: "
                f"{exc.code}: {exc.message}") from exc
    return snapshot


class Store:
    """Single-writer store over one data directory."""

    def __init__(self, data_dir: FsPath | str, *, create: bool = False,
                 sibling_limit: int | None = None):
        self.data_dir = FsPath(data_dir)
        self._lock = threading.Lock()
        if create:
            self._initialize(sibling_limit)
        if not self.log_path.exists():
            raise ValidationFailed(
                f"{self.data_dir} is not an initialized data dir (missing {LOG_NAME})")
        config = self._read_config()
        self.sibling_limit = config.get(
            "sibling_limit", corpus_model.DEFAULT_SIBLING_LIMIT)
        events = read_log(self.log_path)
        self.corpus = replay(events, sibling_limit=self.sibling_limit)
        if self.taxonomy_path.exists():
            with open(self.taxonomy_path, encoding="utf-8") as fh:
                self.corpus.taxonomy = evidence.load_taxonomy(json.load(fh))
        self._log_fh = open(self.log_path, "a", encoding="utf-8")
        self._next_seq = len(events) + 1

    # -- lifecycle -------------------------------------------------------------

    @classmethod
    def init(cls, data_dir: FsPath | str,
             sibling_limit: int | None = None) -> "Store":
        return cls(data_dir, create=True, sibling_limit=sibling_limit)

    @classmethod
    def open(cls, data_dir: FsPath | str) -> "Store":
        return cls(data_dir)

    def _initialize(self, sibling_limit: int | None) -> None:
        if self.log_path.exists():
            raise ValidationFailed(f"{self.data_dir} is already initialized")
        if sibling_limit is None:
            sibling_limit = int(os.environ.get(
                "THT_SIBLING_LIMIT", corpus_model.DEFAULT_SIBLING_LIMIT))
        self.data_dir.mkdir(parents=True, exist_ok=True)
        _atomic_write(self.config_path, json.dumps(
            {"sibling_limit": sibling_limit}, indent=2) + "\n")
        _atomic_write(self.taxonomy_path, json.dumps(
            evidence.DEFAULT_TAXONOMY.to_document(),
            ensure_ascii=False, indent=2) + "\n")
        self.log_path.touch()

    @property
    def log_path(self) -> FsPath:
        return self.data_dir / LOG_NAME

    @property
    def snapshot_path(self) -> FsPath:
        return self.data_dir / SNAPSHOT_NAME

    @property
    def taxonomy_path(self) -> FsPath:
        return self.data_dir / TAXONOMY_NAME

    @property
    def config_path(self) -> FsPath:
        return self.data_dir / CONFIG_NAME

    @property
    def users_path(self) -> FsPath:
        return self.data_dir / USERS_NAME

    def _read_config(self) -> dict:
        if self.config_path.exists():
            with open(self.config_path, encoding="utf-8") as fh:
                return json.load(fh)
        return {}

    def close(self) -> None:
        self.save_snapshot()
        self._log_fh.close()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- the single writer -------------------------------------------------------

    def execute(self, action: str, payload: dict, actor: str = "system") -> dict:
        """Validate, persist the event durably, then apply and acknowledge."""
        with self._lock:
            if action == "Import":
                loaded = load_document(payload["document"],
                                       sibling_limit=self.sibling_limit)
                self._append(action, payload, actor, None)
                self.corpus = loaded
                return {"works": sorted(loaded.works),
                        "witnesses": sorted(loaded.witnesses)}
            planned = corpus_model.plan(self.corpus, action, payload)
            self._append(action, planned.payload, actor, planned.resulting_revision)
            return planned.commit()

    def _append(self, action: str, payload: dict, actor: str,
                resulting_revision: int | None) -> None:
        event = Event(seq=self._next_seq, timestamp=_utc_now(), actor=actor,
                      action=action, payload=payload,
                      resulting_revision=resulting_revision)
        self._log_fh.write(event.to_json() + "\n")
        self._log_fh.flush()
        os.fsync(self._log_fh.fileno())
        self._next_seq += 1

    def events(self) -> list[Event]:
        return read_log(self.log_path)

    # -- mutation wrappers ---------------------------------------------------------

    def create_work(self, work_id: str, title: str, script: str,
                    actor: str = "system") -> dict:
        return self.execute("CreateWork",
                            {"id": work_id, "title": title, "script": script}, actor)

    def add_unit(self, work_id: str, unit_id: str, kind, base_text: str,
                 actor: str = "system") -> dict:
        kind = kind.render() if isinstance(kind, corpus_model.UnitKind) else kind
        return self.execute("AddUnit", {"work_id": work_id, "unit_id": unit_id,
                                        "kind": kind, "base_text": base_text}, actor)

    def add_layer(self, parent_path: str, label: str, text: str,
                  actor: str = "system") -> dict:
        return self.execute("AddLayer", {"parent_path": parent_path,
                                         "label": label, "text": text}, actor)

    def edit_layer(self, path: str, new_text: str, expected_revision: int,
                   actor: str = "system") -> dict:
        return self.execute("EditLayer",
                            {"path": path, "new_text": new_text,
                             "expected_revision": expected_revision}, actor)

    def add_witness(self, witness_id: str, siglum: str, kind: str,
                    date: str | None = None, actor: str = "system") -> dict:
        return self.execute("AddWitness", {"id": witness_id, "siglum": siglum,
                                           "kind": kind, "date": date}, actor)

    def record_reading(self, unit_id: str, witness_id: str, text: str,
                       actor: str = "system", work_id: str | None = None) -> dict:
        return self.execute("RecordReading",
                            {"unit_id": unit_id, "witness_id": witness_id,
                             "text": text, "work_id": work_id}, actor)

    def annotate(self, source_layer_path: str, target_unit_id: str,
                 start: int, end: int, kind, subtype: str | None = None,
                 quoted_form: str | None = None, note: str | None = None,
                 actor: str = "system") -> dict:
        kind = kind.value if isinstance(kind, evidence.EvidenceKind) else kind
        return self.execute("Annotate", {
            "source_layer_path": source_layer_path,
            "target_unit_id": target_unit_id,
            "start": start, "end": end, "kind": kind, "subtype": subtype,
            "quoted_form": quoted_form, "note": note}, actor)

    def delete_annotation(self, annotation_id: str, actor: str = "system") -> dict:
        return self.execute("DeleteAnnotation", {"id": annotation_id}, actor)

    def register_pseudo_witness(self, layer_label: str, work_id: str,
                                unit_scope: Sequence[str] | None = None,
                                actor: str = "system") -> dict:
        """Extract a commentary's supported token subsequences and make sure a
        CommentaryDerived witness entry exists for it (idempotent)."""
        per_unit = pseudo_witness(self.corpus, layer_label, work_id, unit_scope)
        witness_id = f"comm:{layer_label}"
        if witness_id not in self.corpus.witnesses:
            self.execute("AddWitness", {"id": witness_id, "siglum": layer_label,
                                        "kind": "CommentaryDerived", "date": None,
                                        "derived": True}, actor)
        return {"witness_id": witness_id,
                "units": {uid: list(seq.tokens) for uid, seq in per_unit.items()}}

    # -- taxonomy (configuration, not corpus history) -------------------------------

    def load_taxonomy(self, document: dict) -> evidence.EvidenceTaxonomy:
        taxonomy = evidence.load_taxonomy(document)
        with self._lock:
            self.corpus.taxonomy = taxonomy
            _atomic_write(self.taxonomy_path, json.dumps(
                taxonomy.to_document(), ensure_ascii=False, indent=2) + "\n")
        return taxonomy

    # -- reads -----------------------------------------------------------------------

    def resolve(self, path: str) -> dict:
        return self.corpus.node_document(path)

    def support_report(self, work_id: str, unit_ids: Sequence[str],
                       layer_label: str) -> evidence.SupportStats:
        return evidence.support_report(self.corpus, work_id, unit_ids, layer_label)

    def transmission_report(self, work_id: str,
                            unit_id: str) -> evidence.TransmissionReport:
        return evidence.transmission_report(self.corpus, work_id, unit_id)

    def build_tree(self, work_id: str, request: phylogeny.TreeRequest):
        return phylogeny.build_tree(self.corpus, work_id, request)

    # -- interchange -------------------------------------------------------------------

    def export_document(self) -> dict:
        return export_corpus(self.corpus)

    def export_to_file(self, path: FsPath | str) -> None:
        _atomic_write(FsPath(path), dumps_canonical(self.export_document()))

    def save_snapshot(self) -> None:
        _atomic_write(self.snapshot_path, dumps_canonical(self.export_document()))

    def import_document(self, document: dict, actor: str = "system") -> dict:
        return self.execute("Import", {"document": document}, actor)


def _atomic_write(path: FsPath, content: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


# -- canonical interchange ---------------------------------------------------------------

def dumps_canonical(document: dict) -> str:
    return json.dumps(document, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _annotation_sort_key(doc: dict):
    return (unit_sort_key(doc["target_unit_id"]), doc["start"], doc["end"],
            doc["kind"], doc["subtype"] or "", doc["id"])


def _export_layer(layer) -> dict:
    annotations = [corpus_model.annotation_document(a) for a in layer.annotations]
    annotations.sort(key=_annotation_sort_key)
    return {
        "label": layer.label,
        "text": layer.text,
        "revision": layer.revision,
        "annotations": annotations,
        "layers": [_export_layer(child) for child in layer.layers],
    }


def export_corpus(snapshot: Corpus) -> dict:
    """Canonical interchange document: content-equal corpora serialize to
    identical bytes (keys sorted, derived lists in canonical order)."""
    works = []
    for work_id in sorted(snapshot.works):
        work = snapshot.works[work_id]
        units = []
        for unit in work.units:  # model keeps dotted-decimal order
            readings = sorted(
                ({"witness_id": r.witness_id, "text": r.text} for r in unit.readings),
                key=lambda r: r["witness_id"])
            units.append({
                "id": unit.id,
                "kind": unit.kind.render(),
                "base_text": unit.base_text,
                "readings": readings,
                "layers": [_export_layer(l) for l in unit.layers],
            })
        works.append({"id": work.id, "title": work.title,
                      "script": work.script, "units": units})
    witnesses = [
        {"id": w.id, "siglum": w.siglum, "kind": w.kind, "date": w.date}
        for w in sorted(snapshot.witnesses.values(), key=lambda w: w.id)
    ]
    return {
        "format": FORMAT_MARKER,
        "version": FORMAT_VERSION,
        "witnesses": witnesses,
        "works": works,
        "taxonomy": snapshot.taxonomy.to_document(),
    }


def load_document(document: object,
                  sibling_limit: int = corpus_model.DEFAULT_SIBLING_LIMIT) -> Corpus:
    """Validate an interchange document and materialize it as a corpus."""
    if not isinstance(document, dict):
        raise IntegrityViolation("interchange document must be an object")
    if document.get("format") != FORMAT_MARKER:
        raise UnsupportedVersion(
            f"format marker must be {FORMAT_MARKER!r}, got {document.get('format')!r}")
    if document.get("version") != FORMAT_VERSION:
        raise UnsupportedVersion(
            f"unsupported version {document.get('version')!r}")
    snapshot = Corpus(sibling_limit=sibling_limit)
    try:
        snapshot.taxonomy = evidence.load_taxonomy(document.get("taxonomy", {}))
    except ThtError as exc:
        raise IntegrityViolation(f"bad taxonomy: {exc.message}") from exc

    for wdoc in document.get("witnesses", []):
        wid = wdoc["id"]
        if wid in snapshot.witnesses:
            raise IntegrityViolation(f"duplicate witness id {wid!r}")
        if wdoc["kind"] not in corpus_model.WITNESS_KINDS:
            raise IntegrityViolation(f"unknown witness kind {wdoc['kind']!r}")
        snapshot.witnesses[wid] = corpus_model.Witness(
            id=wid, siglum=wdoc["siglum"], kind=wdoc["kind"],
            date=wdoc.get("date"))

    # First pass materializes every unit so annotations in any layer tree can
    # target units that appear later in the document.
    for work_doc in document.get("works", []):
        work_id = work_doc["id"]
        if work_id in snapshot.works:
            raise IntegrityViolation(f"duplicate work id {work_id!r}")
        work = corpus_model.Work(id=work_id, title=work_doc["title"],
                                 script=work_doc["script"])
        snapshot.works[work_id] = work
        seen_units: set[str] = set()
        for unit_doc in work_doc.get("units", []):
            uid = unit_doc["id"]
            if uid in seen_units or not corpus_model.UNIT_ID_RE.match(uid):
                raise IntegrityViolation(f"bad or duplicate unit id {uid!r}")
            seen_units.add(uid)
            kind = corpus_model.UnitKind.parse(unit_doc["kind"])
            base_text = unit_doc["base_text"]
            unit = corpus_model.FunctionalUnit(
                id=uid, kind=kind, base_text=base_text,
                token_count=len(tokenize(base_text, work.script)))
            work.units.append(unit)
            for rdoc in unit_doc.get("readings", []):
                if rdoc["witness_id"] not in snapshot.witnesses:
                    raise IntegrityViolation(
                        f"reading on {uid!r} references missing witness "
                        f"{rdoc['witness_id']!r}")
                unit.readings.append(corpus_model.Reading(
                    witness_id=rdoc["witness_id"], unit_id=uid,
                    text=rdoc["text"]))
            unit.readings.sort(key=lambda r: r.witness_id)
        work.units.sort(key=lambda u: unit_sort_key(u.id))

    for work_doc in document.get("works", []):
        work = snapshot.works[work_doc["id"]]
        for unit_doc in work_doc.get("units", []):
            unit = work.get_unit(unit_doc["id"])
            unit.layers = [
                _load_layer(ldoc, Path(work.id, unit.id, ()), 1, snapshot, work)
                for ldoc in unit_doc.get("layers", [])
            ]
    return snapshot


def _load_layer(doc: dict, parent_path: Path, depth: int,
                snapshot: Corpus, work) -> corpus_model.Layer:
    label = doc["label"]
    path = Path(parent_path.work_id, parent_path.unit_id,
                parent_path.layer_labels + (label,))
    layer = corpus_model.Layer(label=label, text=doc["text"],
                               revision=doc.get("revision", 1), depth=depth)
    seen_ids: set[str] = set()
    for adoc in doc.get("annotations", []):
        target = work.get_unit(adoc["target_unit_id"])
        if target is None:
            raise IntegrityViolation(
                f"annotation {adoc.get('id')!r} targets missing unit "
                f"{adoc['target_unit_id']!r}")
        if adoc["source_layer_path"] != path.render():
            raise IntegrityViolation(
                f"annotation {adoc.get('id')!r} source path "
                f"{adoc['source_layer_path']!r} does not match its position "
                f"{path.render()!r}")
        if not (0 <= adoc["start"] < adoc["end"] <= target.token_count):
            raise IntegrityViolation(
                f"annotation {adoc.get('id')!r} span out of range")
        if adoc["id"] in seen_ids:
            raise IntegrityViolation(f"duplicate annotation id {adoc['id']!r}")
        seen_ids.add(adoc["id"])
        layer.annotations.append(evidence.EvidenceAnnotation(
            id=adoc["id"], source_layer_path=adoc["source_layer_path"],
            target_unit_id=adoc["target_unit_id"],
            start=adoc["start"], end=adoc["end"],
            kind=evidence.EvidenceKind.parse(adoc["kind"]),
            subtype=adoc.get("subtype"), quoted_form=adoc.get("quoted_form"),
            note=adoc.get("note")))
    layer.layers = [
        _load_layer(child, path, depth + 1, snapshot, work)
        for child in doc.get("layers", [])
    ]
    return layer
