"""Evidence taxonomy, token-anchored support annotations, and the word-level
analytics: support statistics, transmission uniformity, archetype hints.

A base-text token counts as supported by a commentary label when at least one
non-default annotation made by a layer carrying that label covers it. "Both"
asserts direct and indirect evidence at once and counts as support; "Default"
is unclassified and never counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterator, Mapping, Sequence

from .collation import tokenize
from .errors import (
    DuplicateSubtype,
    MalformedTaxonomy,
    SubtypeMismatch,
    UnknownLayerLabel,
    UnknownUnit,
)

if TYPE_CHECKING:  # pragma: no cover
    from .corpus import Corpus, Layer, Work


class EvidenceKind(str, Enum):
    DIRECT = "Direct"
    INDIRECT = "Indirect"
    BOTH = "Both"
    DEFAULT = "Default"

    @classmethod
    def parse(cls, value: "EvidenceKind | str") -> "EvidenceKind":
        if isinstance(value, EvidenceKind):
            return value
        try:
            return cls(value)
        except ValueError:
            raise SubtypeMismatch(
                f"evidence kind must be one of {[k.value for k in cls]}, got {value!r}"
            ) from None


#: Kinds that count toward support statistics.
SUPPORTING_KINDS = frozenset(
    {EvidenceKind.DIRECT, EvidenceKind.INDIRECT, EvidenceKind.BOTH})

#: Kinds that may carry a subtype.
SUBTYPED_KINDS = frozenset({EvidenceKind.DIRECT, EvidenceKind.INDIRECT})


@dataclass(frozen=True)
class EvidenceTaxonomy:
    """Configured subtype lists for direct and indirect evidence."""

    direct: tuple[str, ...] = ()
    indirect: tuple[str, ...] = ()

    def subtypes_for(self, kind: EvidenceKind) -> tuple[str, ...]:
        if kind == EvidenceKind.DIRECT:
            return self.direct
        if kind == EvidenceKind.INDIRECT:
            return self.indirect
        return ()

    def to_document(self) -> dict:
        return {"Direct": list(self.direct), "Indirect": list(self.indirect)}


# Shipped defaults; projects are expected to install their own taxonomy.
DEFAULT_TAXONOMY = EvidenceTaxonomy(
    direct=("full-quotation", "pratīka"),
    indirect=("paraphrase", "gloss"),
)


def load_taxonomy(document: object) -> EvidenceTaxonomy:
    """Validate a {"Direct": [...], "Indirect": [...]} config document."""
    if not isinstance(document, Mapping):
        raise MalformedTaxonomy("taxonomy document must be a mapping")
    unknown = set(document) - {"Direct", "Indirect"}
    if unknown:
        raise MalformedTaxonomy(f"unknown taxonomy keys {sorted(unknown)}")
    lists: dict[str, tuple[str, ...]] = {}
    for key in ("Direct", "Indirect"):
        raw = document.get(key, [])
        if not isinstance(raw, (list, tuple)) or not all(
                isinstance(s, str) and s for s in raw):
            raise MalformedTaxonomy(f"{key} subtypes must be non-empty strings")
        seen = set()
        for name in raw:
            if name in seen:
                raise DuplicateSubtype(f"subtype {name!r} repeated under {key}")
            seen.add(name)
        lists[key] = tuple(raw)
    return EvidenceTaxonomy(direct=lists["Direct"], indirect=lists["Indirect"])


def check_subtype(taxonomy: EvidenceTaxonomy, kind: EvidenceKind,
                  subtype: str | None) -> None:
    if subtype is None:
        return
    if kind not in SUBTYPED_KINDS:
        raise SubtypeMismatch(f"kind {kind.value} carries no subtypes, got {subtype!r}")
    if subtype not in taxonomy.subtypes_for(kind):
        raise SubtypeMismatch(
            f"subtype {subtype!r} not in the {kind.value} taxonomy "
            f"{list(taxonomy.subtypes_for(kind))}")


@dataclass(frozen=True)
class EvidenceAnnotation:
    """A classified support claim from one layer onto base-text tokens.

    ``start``/``end`` is a half-open token interval over the target unit's
    base text; spans are never empty.
    """

    id: str
    source_layer_path: str
    target_unit_id: str
    start: int
    end: int
    kind: EvidenceKind
    subtype: str | None = None
    quoted_form: str | None = None
    note: str | None = None

    @property
    def source_label(self) -> str:
        return self.source_layer_path.rsplit("/", 1)[-1]


@dataclass(frozen=True)
class SupportStats:
    layer_label: str
    unit_ids: tuple[str, ...]
    total_tokens: int
    supported_token_indices: Mapping[str, tuple[int, ...]]
    supported_count: int

    @property
    def percentage(self) -> float:
        if self.total_tokens == 0:
            return 0.0
        return 100.0 * self.supported_count / self.total_tokens

    def to_document(self) -> dict:
        return {
            "layer_label": self.layer_label,
            "unit_ids": list(self.unit_ids),
            "total_tokens": self.total_tokens,
            "supported_count": self.supported_count,
            "supported_token_indices": {
                uid: list(ix) for uid, ix in self.supported_token_indices.items()},
            "percentage": self.percentage,
        }


@dataclass(frozen=True)
class Variation:
    token_index: int
    base_form: str
    quoted_form: str


@dataclass(frozen=True)
class LayerTransmission:
    label: str
    uniform: bool
    variations: tuple[Variation, ...]


@dataclass(frozen=True)
class TransmissionReport:
    unit_id: str
    layers: Mapping[str, LayerTransmission]
    archetype_hints: tuple[str, ...]

    def to_document(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "layers": {
                label: {
                    "uniform": lt.uniform,
                    "variations": [
                        {"token_index": v.token_index, "base_form": v.base_form,
                         "quoted_form": v.quoted_form}
                        for v in lt.variations
                    ],
                }
                for label, lt in self.layers.items()
            },
            "archetype_hints": list(self.archetype_hints),
        }


# -- traversal helpers --------------------------------------------------------

def _iter_work_layers(work: "Work") -> Iterator["Layer"]:
    for unit in work.units:
        stack = list(reversed(unit.layers))
        while stack:
            layer = stack.pop()
            yield layer
            stack.extend(reversed(layer.layers))


def _labels_in_tree(layers: Sequence["Layer"]) -> set[str]:
    labels: set[str] = set()
    stack = list(layers)
    while stack:
        layer = stack.pop()
        labels.add(layer.label)
        stack.extend(layer.layers)
    return labels


def scoped_labels(work: "Work", unit_ids: Sequence[str]) -> set[str]:
    """Labels of all layers attached to the listed units or to their
    dotted-prefix ancestor units, recursively."""
    from .corpus import is_ancestor_unit  # local import avoids a cycle

    labels: set[str] = set()
    for uid in unit_ids:
        for unit in work.units:
            if unit.id == uid or is_ancestor_unit(unit.id, uid):
                labels |= _labels_in_tree(unit.layers)
    return labels


def supported_indices(work: "Work", unit_ids: Sequence[str],
                      layer_label: str) -> dict[str, frozenset[int]]:
    """Union of supporting spans per unit, attributed to the label of the
    layer that made each annotation (sub-commentary evidence stays with the
    sub-commentary)."""
    wanted = set(unit_ids)
    acc: dict[str, set[int]] = {}
    for layer in _iter_work_layers(work):
        if layer.label != layer_label:
            continue
        for ann in layer.annotations:
            if ann.kind not in SUPPORTING_KINDS:
                continue
            if ann.target_unit_id in wanted:
                acc.setdefault(ann.target_unit_id, set()).update(
                    range(ann.start, ann.end))
    return {uid: frozenset(ix) for uid, ix in acc.items()}


def support_report(corpus: "Corpus", work_id: str, unit_ids: Sequence[str],
                   layer_label: str) -> SupportStats:
    """Word-level support of the listed units by one commentary label."""
    from .corpus import unit_sort_key

    work = corpus.get_work(work_id)
    units = corpus.units_in_scope(work_id, list(unit_ids))
    if layer_label not in scoped_labels(work, [u.id for u in units]):
        raise UnknownLayerLabel(
            f"no layer labeled {layer_label!r} under units {sorted(unit_ids)} "
            f"or their ancestors")
    indices = supported_indices(work, [u.id for u in units], layer_label)
    ordered = sorted((u.id for u in units), key=unit_sort_key)
    total = sum(u.token_count for u in units)
    count = sum(len(ix) for ix in indices.values())
    return SupportStats(
        layer_label=layer_label,
        unit_ids=tuple(ordered),
        total_tokens=total,
        supported_token_indices={
            uid: tuple(sorted(indices.get(uid, frozenset()))) for uid in ordered},
        supported_count=count,
    )


def _annotations_for_label(work: "Work", layer_label: str,
                           unit_id: str) -> list[EvidenceAnnotation]:
    out = []
    for layer in _iter_work_layers(work):
        if layer.label != layer_label:
            continue
        out.extend(a for a in layer.annotations if a.target_unit_id == unit_id)
    return out


def transmission_report(corpus: "Corpus", work_id: str,
                        unit_id: str) -> TransmissionReport:
    """Per-layer uniformity of quoted evidence against the base text, plus
    archetype hints for labels silent on a manuscript-attested unit."""
    work = corpus.get_work(work_id)
    unit = work.get_unit(unit_id)
    if unit is None:
        raise UnknownUnit(f"no unit {unit_id!r} in work {work_id!r}")
    base_tokens = tokenize(unit.base_text, work.script).tokens

    has_ms_reading = any(
        corpus.witnesses.get(r.witness_id) is not None
        and corpus.witnesses[r.witness_id].kind == "Manuscript"
        for r in unit.readings)

    labels = sorted(scoped_labels(work, [unit_id]))
    per_layer: dict[str, LayerTransmission] = {}
    hints: list[str] = []
    for label in labels:
        variations: list[Variation] = []
        for ann in _annotations_for_label(work, label, unit_id):
            if ann.quoted_form is None:
                continue
            quoted = tokenize(ann.quoted_form, work.script).tokens
            spanned = base_tokens[ann.start:ann.end]
            for pos in range(max(len(quoted), len(spanned))):
                base_form = spanned[pos] if pos < len(spanned) else ""
                quoted_form = quoted[pos] if pos < len(quoted) else ""
                if base_form != quoted_form:
                    variations.append(
                        Variation(ann.start + pos, base_form, quoted_form))
        per_layer[label] = LayerTransmission(
            label=label, uniform=not variations, variations=tuple(variations))
        supported = supported_indices(work, [unit_id], label)
        if not supported.get(unit_id) and has_ms_reading:
            hints.append(f"post-{label}")
    return TransmissionReport(unit_id=unit_id, layers=per_layer,
                              archetype_hints=tuple(hints))
