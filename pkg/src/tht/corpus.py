"""Hierarchical corpus model: works, dotted-id functional units, recursively
nested commentary layers, witnesses, and readings.

Mutations are two-phase: ``plan(corpus, action, payload)`` validates against
the current state and returns a commit closure, so the store can persist an
event between validation and the actual state change. Planners never mutate
on failure. Reads hand out plain document dicts; internal node objects stay
inside the package.
"""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from . import evidence
from .collation import tokenize
from .errors import (
    AmbiguousUnit,
    DuplicateId,
    DuplicateLabel,
    DuplicateReading,
    ForbiddenWitnessKind,
    InvalidLabel,
    MalformedId,
    RevisionConflict,
    SiblingLimitExceeded,
    SpanOutOfRange,
    UnknownAnnotation,
    UnknownPath,
    UnknownUnit,
    UnknownWitness,
    UnknownWork,
)

UNIT_ID_RE = re.compile(r"^\d+(\.\d+)*$")
# Work ids and layer labels appear as path segments; "/" and "~" are the
# path separators (internal and URL-side) and whitespace would break both.
NAME_RE = re.compile(r"^[^\s/~]+$")

DEFAULT_SIBLING_LIMIT = 8

WITNESS_KINDS = ("Manuscript", "PrintedEdition", "CommentaryDerived")

# Fixed section kinds carried by 4-segment ids, in their fixed order.
SECTION_KIND_POSITIONS = {
    "IntroductionMeaning": 1,
    "Examples": 2,
    "OtherOccurrences": 3,
}

KIND_CATEGORIES = ("Sutra",) + tuple(SECTION_KIND_POSITIONS) + ("Other",)


@dataclass(frozen=True)
class UnitKind:
    """Functional-unit kind: a fixed category, or Other with a free name."""

    category: str
    name: str | None = None

    @classmethod
    def parse(cls, value: "UnitKind | str") -> "UnitKind":
        if isinstance(value, UnitKind):
            value = value.render()
        if not isinstance(value, str):
            raise MalformedId(f"unit kind must be a string, got {type(value).__name__}")
        if value.startswith("Other:"):
            name = value[len("Other:"):]
            if not name:
                raise MalformedId("Other kind requires a non-empty name")
            return cls("Other", name)
        if value == "Other":
            raise MalformedId("Other kind requires a name, use 'Other:<name>'")
        if value not in KIND_CATEGORIES:
            raise MalformedId(f"unknown unit kind {value!r}")
        return cls(value)

    def render(self) -> str:
        if self.category == "Other":
            return f"Other:{self.name}"
        return self.category


@dataclass
class Reading:
    witness_id: str
    unit_id: str
    text: str


@dataclass
class Witness:
    id: str
    siglum: str
    kind: str
    date: str | None = None


@dataclass
class Layer:
    label: str
    text: str
    revision: int = 1
    depth: int = 1
    annotations: list[evidence.EvidenceAnnotation] = field(default_factory=list)
    layers: list["Layer"] = field(default_factory=list)


@dataclass
class FunctionalUnit:
    id: str
    kind: UnitKind
    base_text: str
    token_count: int
    readings: list[Reading] = field(default_factory=list)
    layers: list[Layer] = field(default_factory=list)


@dataclass
class Work:
    id: str
    title: str
    script: str
    units: list[FunctionalUnit] = field(default_factory=list)

    def get_unit(self, unit_id: str) -> FunctionalUnit | None:
        for unit in self.units:
            if unit.id == unit_id:
                return unit
        return None


def unit_sort_key(unit_id: str) -> tuple[int, ...]:
    return tuple(int(seg) for seg in unit_id.split("."))


def is_ancestor_unit(ancestor_id: str, unit_id: str) -> bool:
    """Dotted-prefix ancestry: 1.1.1 is an ancestor of 1.1.1.2."""
    return unit_id.startswith(ancestor_id + ".")


@dataclass(frozen=True)
class Path:
    """Address of a work, unit, or layer: work id, then unit id, then labels."""

    work_id: str
    unit_id: str | None = None
    layer_labels: tuple[str, ...] = ()

    @classmethod
    def parse(cls, path: "Path | str") -> "Path":
        if isinstance(path, Path):
            return path
        segments = [s for s in str(path).split("/") if s != ""]
        if not segments:
            raise UnknownPath("empty path")
        if len(segments) == 1:
            return cls(work_id=segments[0])
        return cls(work_id=segments[0], unit_id=segments[1],
                   layer_labels=tuple(segments[2:]))

    def render(self) -> str:
        segments = [self.work_id]
        if self.unit_id is not None:
            segments.append(self.unit_id)
        segments.extend(self.layer_labels)
        return "/".join(segments)


@dataclass(frozen=True)
class ResolvedNode:
    """Result of path resolution. ``kind`` is one of work/unit/layer."""

    kind: str
    path: Path
    work: Work
    unit: FunctionalUnit | None = None
    layer: Layer | None = None


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


class Corpus:
    """Materialized snapshot of the whole corpus.

    Single-writer discipline is enforced by the store; this class assumes it
    is only ever mutated through committed plans, one at a time.
    """

    def __init__(self, sibling_limit: int = DEFAULT_SIBLING_LIMIT):
        self.works: dict[str, Work] = {}
        self.witnesses: dict[str, Witness] = {}
        self.taxonomy: evidence.EvidenceTaxonomy = evidence.DEFAULT_TAXONOMY
        self.sibling_limit = sibling_limit

    # -- reads ---------------------------------------------------------------

    def get_work(self, work_id: str) -> Work:
        work = self.works.get(work_id)
        if work is None:
            raise UnknownWork(f"no work {work_id!r}")
        return work

    def resolve(self, path: Path | str) -> ResolvedNode:
        p = Path.parse(path)
        work = self.works.get(p.work_id)
        if work is None:
            raise UnknownPath(f"no work {p.work_id!r}")
        if p.unit_id is None:
            return ResolvedNode("work", p, work)
        unit = work.get_unit(p.unit_id)
        if unit is None:
            raise UnknownPath(f"no unit {p.unit_id!r} in work {p.work_id!r}")
        if not p.layer_labels:
            return ResolvedNode("unit", p, work, unit)
        node: Layer | None = None
        siblings = unit.layers
        for label in p.layer_labels:
            node = next((l for l in siblings if l.label == label), None)
            if node is None:
                raise UnknownPath(f"no layer {label!r} under {p.render()!r}")
            siblings = node.layers
        return ResolvedNode("layer", p, work, unit, node)

    def find_unit(self, unit_id: str, work_id: str | None = None) -> tuple[Work, FunctionalUnit]:
        """Locate a unit by bare id (must be corpus-unique) or within a work.

        Accepts a "WORK/UNIT" qualified id in place of a bare one.
        """
        if work_id is None and "/" in unit_id:
            work_id, unit_id = unit_id.split("/", 1)
        if work_id is not None:
            work = self.get_work(work_id)
            unit = work.get_unit(unit_id)
            if unit is None:
                raise UnknownUnit(f"no unit {unit_id!r} in work {work_id!r}")
            return work, unit
        hits = [(w, u) for w in self.works.values()
                for u in w.units if u.id == unit_id]
        if not hits:
            raise UnknownUnit(f"no unit {unit_id!r}")
        if len(hits) > 1:
            owners = sorted(w.id for w, _ in hits)
            raise AmbiguousUnit(
                f"unit {unit_id!r} exists in works {owners}; qualify as WORK/UNIT")
        return hits[0]

    def iter_layers(self, work_id: str) -> Iterator[tuple[Path, Layer]]:
        """Every layer in a work, depth-first, with its full path."""
        work = self.get_work(work_id)
        for unit in work.units:
            stack = [(Path(work.id, unit.id, (l.label,)), l) for l in reversed(unit.layers)]
            while stack:
                path, layer = stack.pop()
                yield path, layer
                for child in reversed(layer.layers):
                    stack.append((Path(path.work_id, path.unit_id,
                                       path.layer_labels + (child.label,)), child))

    def units_in_scope(self, work_id: str,
                       unit_ids: Sequence[str] | None) -> list[FunctionalUnit]:
        work = self.get_work(work_id)
        if unit_ids is None:
            return list(work.units)
        units = []
        for uid in unit_ids:
            unit = work.get_unit(uid)
            if unit is None:
                raise UnknownUnit(f"no unit {uid!r} in work {work_id!r}")
            units.append(unit)
        return units

    def supported_indices(self, work_id: str, unit_ids: Sequence[str],
                          layer_label: str) -> dict[str, frozenset[int]]:
        return evidence.supported_indices(self.get_work(work_id), unit_ids, layer_label)

    def find_annotation(self, annotation_id: str):
        for work in self.works.values():
            for path, layer in self.iter_layers(work.id):
                for ann in layer.annotations:
                    if ann.id == annotation_id:
                        return work, path, layer, ann
        return None

    # -- documents -------------------------------------------------------------

    def layer_document(self, path: Path, layer: Layer, *, deep: bool = False) -> dict:
        doc = {
            "path": path.render(),
            "label": layer.label,
            "text": layer.text,
            "revision": layer.revision,
            "depth": layer.depth,
        }
        if deep:
            doc["annotations"] = [annotation_document(a) for a in layer.annotations]
            doc["layers"] = [
                self.layer_document(
                    Path(path.work_id, path.unit_id, path.layer_labels + (c.label,)),
                    c, deep=True)
                for c in layer.layers
            ]
        return doc

    def unit_document(self, work: Work, unit: FunctionalUnit, *, deep: bool = False) -> dict:
        doc = {
            "id": unit.id,
            "kind": unit.kind.render(),
            "base_text": unit.base_text,
            "token_count": unit.token_count,
        }
        if deep:
            doc["tokens"] = list(tokenize(unit.base_text, work.script).tokens)
            doc["readings"] = [
                {"witness_id": r.witness_id, "unit_id": r.unit_id, "text": r.text}
                for r in unit.readings
            ]
            doc["layers"] = [
                self.layer_document(Path(work.id, unit.id, (l.label,)), l, deep=True)
                for l in unit.layers
            ]
        return doc

    def work_document(self, work_id: str, *, deep: bool = False) -> dict:
        work = self.get_work(work_id)
        doc = {"id": work.id, "title": work.title, "script": work.script,
               "unit_ids": [u.id for u in work.units]}
        if deep:
            doc["units"] = [self.unit_document(work, u, deep=True) for u in work.units]
        return doc

    def node_document(self, path: Path | str) -> dict:
        node = self.resolve(path)
        if node.kind == "work":
            return self.work_document(node.work.id, deep=True)
        if node.kind == "unit":
            return self.unit_document(node.work, node.unit, deep=True)
        return self.layer_document(node.path, node.layer, deep=True)


def annotation_document(ann: evidence.EvidenceAnnotation) -> dict:
    return {
        "id": ann.id,
        "source_layer_path": ann.source_layer_path,
        "target_unit_id": ann.target_unit_id,
        "start": ann.start,
        "end": ann.end,
        "kind": ann.kind.value,
        "subtype": ann.subtype,
        "quoted_form": ann.quoted_form,
        "note": ann.note,
    }


# -- mutation planners ---------------------------------------------------------

@dataclass(frozen=True)
class PlannedOp:
    """A validated mutation: the canonical payload to log plus the commit."""

    payload: dict
    commit: Callable[[], dict]
    resulting_revision: int | None = None


def _require_name(value: str, what: str) -> str:
    if not isinstance(value, str) or not NAME_RE.match(value):
        raise InvalidLabel(
            f"{what} must be non-empty without whitespace, '/' or '~': got {value!r}")
    return value


def _check_unit_kind_shape(unit_id: str, kind: UnitKind) -> None:
    segments = unit_id.split(".")
    if kind.category == "Sutra" and len(segments) != 3:
        raise MalformedId(f"Sutra units need 3-segment ids, got {unit_id!r}")
    position = SECTION_KIND_POSITIONS.get(kind.category)
    if position is not None:
        if len(segments) != 4 or int(segments[-1]) != position:
            raise MalformedId(
                f"{kind.category} units need 4-segment ids ending in .{position}, "
                f"got {unit_id!r}")


def plan_create_work(corpus: Corpus, payload: dict) -> PlannedOp:
    work_id = _require_name(payload["id"], "work id")
    if work_id in corpus.works:
        raise DuplicateId(f"work {work_id!r} already exists")
    title = _nfc(payload["title"])
    script = payload["script"]
    canonical = {"id": work_id, "title": title, "script": script}

    def commit() -> dict:
        corpus.works[work_id] = Work(id=work_id, title=title, script=script)
        return corpus.work_document(work_id)

    return PlannedOp(canonical, commit)


def plan_add_unit(corpus: Corpus, payload: dict) -> PlannedOp:
    work = corpus.get_work(payload["work_id"])
    unit_id = payload["unit_id"]
    if not isinstance(unit_id, str) or not UNIT_ID_RE.match(unit_id):
        raise MalformedId(f"unit id must match digits.dotted form, got {unit_id!r}")
    if work.get_unit(unit_id) is not None:
        raise DuplicateId(f"unit {unit_id!r} already in work {work.id!r}")
    kind = UnitKind.parse(payload["kind"])
    _check_unit_kind_shape(unit_id, kind)
    base_text = _nfc(payload["base_text"])
    token_count = len(tokenize(base_text, work.script))
    canonical = {"work_id": work.id, "unit_id": unit_id,
                 "kind": kind.render(), "base_text": base_text}

    def commit() -> dict:
        unit = FunctionalUnit(id=unit_id, kind=kind, base_text=base_text,
                              token_count=token_count)
        key = unit_sort_key(unit_id)
        at = len(work.units)
        for i, existing in enumerate(work.units):
            if unit_sort_key(existing.id) > key:
                at = i
                break
        work.units.insert(at, unit)
        return corpus.unit_document(work, unit)

    return PlannedOp(canonical, commit)


def plan_add_layer(corpus: Corpus, payload: dict) -> PlannedOp:
    parent = corpus.resolve(payload["parent_path"])
    if parent.kind == "work":
        raise UnknownPath(
            f"layers attach to units or layers, not to work {parent.work.id!r}")
    label = _require_name(payload["label"], "layer label")
    siblings = parent.layer.layers if parent.kind == "layer" else parent.unit.layers
    if any(l.label == label for l in siblings):
        raise DuplicateLabel(f"label {label!r} already used under {parent.path.render()!r}")
    if len(siblings) >= corpus.sibling_limit:
        raise SiblingLimitExceeded(
            f"{parent.path.render()!r} already has {len(siblings)} layers "
            f"(limit {corpus.sibling_limit})")
    depth = 1 if parent.kind == "unit" else parent.layer.depth + 1
    text = _nfc(payload["text"])
    canonical = {"parent_path": parent.path.render(), "label": label, "text": text}
    path = Path(parent.path.work_id, parent.path.unit_id,
                parent.path.layer_labels + (label,))

    def commit() -> dict:
        layer = Layer(label=label, text=text, revision=1, depth=depth)
        siblings.append(layer)
        return corpus.layer_document(path, layer)

    return PlannedOp(canonical, commit, resulting_revision=1)


def plan_edit_layer(corpus: Corpus, payload: dict) -> PlannedOp:
    node = corpus.resolve(payload["path"])
    if node.kind != "layer":
        raise UnknownPath(f"{node.path.render()!r} is not a layer")
    expected = payload["expected_revision"]
    if node.layer.revision != expected:
        raise RevisionConflict(
            f"layer {node.path.render()!r} is at revision {node.layer.revision}, "
            f"edit expected {expected}")
    text = _nfc(payload["new_text"])
    canonical = {"path": node.path.render(), "new_text": text,
                 "expected_revision": expected}

    def commit() -> dict:
        node.layer.text = text
        node.layer.revision += 1
        return corpus.layer_document(node.path, node.layer)

    return PlannedOp(canonical, commit, resulting_revision=expected + 1)


def plan_add_witness(corpus: Corpus, payload: dict) -> PlannedOp:
    witness_id = _require_name(payload["id"], "witness id")
    if witness_id in corpus.witnesses:
        raise DuplicateId(f"witness {witness_id!r} already exists")
    kind = payload["kind"]
    if kind not in WITNESS_KINDS:
        raise ForbiddenWitnessKind(f"unknown witness kind {kind!r}")
    if kind == "CommentaryDerived" and not payload.get("derived"):
        raise ForbiddenWitnessKind(
            "CommentaryDerived witnesses come from pseudo-witness extraction only")
    siglum = _nfc(payload["siglum"])
    date = payload.get("date")
    canonical = {"id": witness_id, "siglum": siglum, "kind": kind, "date": date,
                 "derived": bool(payload.get("derived"))}

    def commit() -> dict:
        corpus.witnesses[witness_id] = Witness(id=witness_id, siglum=siglum,
                                               kind=kind, date=date)
        return {"id": witness_id, "siglum": siglum, "kind": kind, "date": date}

    return PlannedOp(canonical, commit)


def plan_record_reading(corpus: Corpus, payload: dict) -> PlannedOp:
    work, unit = corpus.find_unit(payload["unit_id"], payload.get("work_id"))
    witness_id = payload["witness_id"]
    if witness_id not in corpus.witnesses:
        raise UnknownWitness(f"no witness {witness_id!r}")
    if any(r.witness_id == witness_id for r in unit.readings):
        raise DuplicateReading(
            f"witness {witness_id!r} already has a reading for unit {unit.id!r}")
    text = _nfc(payload["text"])
    canonical = {"work_id": work.id, "unit_id": unit.id,
                 "witness_id": witness_id, "text": text}

    def commit() -> dict:
        reading = Reading(witness_id=witness_id, unit_id=unit.id, text=text)
        unit.readings.append(reading)
        unit.readings.sort(key=lambda r: r.witness_id)
        return {"witness_id": witness_id, "unit_id": unit.id,
                "work_id": work.id, "text": text}

    return PlannedOp(canonical, commit)


def _annotation_id(content: dict, existing: set[str]) -> str:
    blob = json.dumps(content, sort_keys=True, ensure_ascii=False)
    digest = hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]
    candidate = f"ann-{digest}"
    n = 1
    while candidate in existing:
        n += 1
        candidate = f"ann-{digest}-{n}"
    return candidate


def plan_annotate(corpus: Corpus, payload: dict) -> PlannedOp:
    source = corpus.resolve(payload["source_layer_path"])
    if source.kind != "layer":
        raise UnknownPath(f"{source.path.render()!r} is not a layer")
    work = source.work
    target = work.get_unit(payload["target_unit_id"])
    if target is None:
        raise UnknownUnit(
            f"no unit {payload['target_unit_id']!r} in work {work.id!r}")
    start, end = int(payload["start"]), int(payload["end"])
    if not (0 <= start < end <= target.token_count):
        raise SpanOutOfRange(
            f"span [{start},{end}) invalid for unit {target.id!r} "
            f"with {target.token_count} tokens (empty spans forbidden)")
    kind = evidence.EvidenceKind.parse(payload["kind"])
    subtype = payload.get("subtype")
    evidence.check_subtype(corpus.taxonomy, kind, subtype)
    quoted_form = payload.get("quoted_form")
    if quoted_form is not None:
        quoted_form = _nfc(quoted_form)
    note = payload.get("note")
    content = {
        "source_layer_path": source.path.render(),
        "target_unit_id": target.id,
        "start": start, "end": end,
        "kind": kind.value, "subtype": subtype,
        "quoted_form": quoted_form, "note": note,
    }
    ann_id = payload.get("id")
    if ann_id is None:
        existing = {a.id for _, l in corpus.iter_layers(work.id) for a in l.annotations}
        ann_id = _annotation_id(content, existing)
    canonical = dict(content, id=ann_id)

    def commit() -> dict:
        ann = evidence.EvidenceAnnotation(
            id=ann_id, source_layer_path=source.path.render(),
            target_unit_id=target.id, start=start, end=end,
            kind=kind, subtype=subtype, quoted_form=quoted_form, note=note)
        source.layer.annotations.append(ann)
        return annotation_document(ann)

    return PlannedOp(canonical, commit)


def plan_delete_annotation(corpus: Corpus, payload: dict) -> PlannedOp:
    hit = corpus.find_annotation(payload["id"])
    if hit is None:
        raise UnknownAnnotation(f"no annotation {payload['id']!r}")
    _, path, layer, ann = hit
    canonical = {"id": ann.id}

    def commit() -> dict:
        layer.annotations.remove(ann)
        return annotation_document(ann)

    return PlannedOp(canonical, commit)


PLANNERS: dict[str, Callable[[Corpus, dict], PlannedOp]] = {
    "CreateWork": plan_create_work,
    "AddUnit": plan_add_unit,
    "AddLayer": plan_add_layer,
    "EditLayer": plan_edit_layer,
    "AddWitness": plan_add_witness,
    "RecordReading": plan_record_reading,
    "Annotate": plan_annotate,
    "DeleteAnnotation": plan_delete_annotation,
}


def plan(corpus: Corpus, action: str, payload: dict) -> PlannedOp:
    planner = PLANNERS.get(action)
    if planner is None:
        raise UnknownPath(f"unknown action {action!r}")
    return planner(corpus, payload)
