"""Distance matrices over witnesses and commentary pseudo-witnesses, UPGMA
and neighbor-joining tree construction, Newick serialization.

Determinism rules used throughout: taxa are sorted lexicographically, every
cluster is keyed by its lexicographically smallest leaf, merge ties prefer
the smallest key pair, and children are emitted in key order. Identical
matrices therefore always yield byte-identical Newick.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

from .collation import normalized_distance, pseudo_witness, tokenize
from .errors import InsufficientOverlap, InsufficientTaxa, ValidationFailed

if TYPE_CHECKING:  # pragma: no cover
    from .corpus import Corpus

SOURCE_SELECTORS = ("manuscripts", "commentaries", "both")
METHODS = ("upgma", "nj")


@dataclass(frozen=True)
class DistanceMatrix:
    taxa: tuple[str, ...]
    d: tuple[tuple[float, ...], ...]

    @classmethod
    def create(cls, taxa: Sequence[str], rows: Sequence[Sequence[float]]) -> "DistanceMatrix":
        taxa = tuple(taxa)
        n = len(taxa)
        if n < 2:
            raise InsufficientTaxa(f"need at least 2 taxa, got {n}")
        if len(set(taxa)) != n:
            raise ValidationFailed(f"duplicate taxon labels in {taxa}")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValidationFailed(f"matrix must be {n}x{n}")
        for i in range(n):
            if rows[i][i] != 0:
                raise ValidationFailed(f"diagonal must be zero at {taxa[i]!r}")
            for j in range(n):
                if rows[i][j] < 0:
                    raise ValidationFailed("distances must be non-negative")
                if rows[i][j] != rows[j][i]:
                    raise ValidationFailed(
                        f"matrix not symmetric at ({taxa[i]!r},{taxa[j]!r})")
        return cls(taxa=taxa, d=tuple(tuple(float(x) for x in r) for r in rows))

    def value(self, a: str, b: str) -> float:
        return self.d[self.taxa.index(a)][self.taxa.index(b)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([""] + list(self.taxa))
        for label, row in zip(self.taxa, self.d):
            writer.writerow([label] + [repr(x) for x in row])
        return buf.getvalue()

    def to_document(self) -> dict:
        return {"taxa": list(self.taxa), "distances": [list(r) for r in self.d]}


@dataclass
class PhyloNode:
    label: str | None
    branch_length: float = 0.0
    children: list["PhyloNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class PhyloTree:
    root: PhyloNode
    rooted: bool
    clamped: bool = False  # True when NJ produced (and zeroed) a negative length

    def leaf_labels(self) -> list[str]:
        out: list[str] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.label or "")
            else:
                stack.extend(reversed(node.children))
        return out


@dataclass(frozen=True)
class TreeRequest:
    sources: str = "manuscripts"
    method: str = "upgma"
    units: tuple[str, ...] | None = None  # None means all units

    def __post_init__(self):
        if self.sources not in SOURCE_SELECTORS:
            raise ValidationFailed(
                f"sources must be one of {SOURCE_SELECTORS}, got {self.sources!r}")
        if self.method not in METHODS:
            raise ValidationFailed(
                f"method must be one of {METHODS}, got {self.method!r}")


# -- matrix construction -------------------------------------------------------

def taxon_sequences(corpus: "Corpus", work_id: str,
                    request: TreeRequest) -> dict[str, dict[str, tuple[str, ...]]]:
    """Token sequences per taxon per unit.

    Physical witnesses (manuscripts and printed editions) contribute their
    readings under their siglum; commentary labels contribute pseudo-witness
    subsequences. Units with no content for a taxon are simply absent.
    """
    work = corpus.get_work(work_id)
    units = corpus.units_in_scope(work_id, list(request.units) if request.units else None)
    unit_ids = [u.id for u in units]
    sequences: dict[str, dict[str, tuple[str, ...]]] = {}

    def put(label: str, seqs: dict[str, tuple[str, ...]]) -> None:
        if label in sequences:
            raise ValidationFailed(f"taxon label {label!r} is not unique")
        sequences[label] = seqs

    if request.sources in ("manuscripts", "both"):
        for witness in sorted(corpus.witnesses.values(), key=lambda w: w.id):
            if witness.kind == "CommentaryDerived":
                continue
            seqs: dict[str, tuple[str, ...]] = {}
            for unit in units:
                reading = next((r for r in unit.readings
                                if r.witness_id == witness.id), None)
                if reading is None:
                    continue
                tokens = tokenize(reading.text, work.script).tokens
                if tokens:
                    seqs[unit.id] = tokens
            if seqs:
                put(witness.siglum, seqs)

    if request.sources in ("commentaries", "both"):
        labels = sorted({layer.label for _, layer in corpus.iter_layers(work_id)})
        for label in labels:
            per_unit = pseudo_witness(corpus, label, work_id, unit_ids)
            seqs = {uid: seq.tokens for uid, seq in per_unit.items() if seq.tokens}
            if seqs:
                put(label, seqs)

    return sequences


def build_matrix(corpus: "Corpus", work_id: str, request: TreeRequest) -> DistanceMatrix:
    """Mean normalized token distance over the units each taxon pair shares."""
    sequences = taxon_sequences(corpus, work_id, request)
    taxa = sorted(sequences)
    if len(taxa) < 2:
        raise InsufficientTaxa(
            f"selection {request.sources!r} resolves {len(taxa)} taxa, need 2")
    n = len(taxa)
    rows = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = sequences[taxa[i]], sequences[taxa[j]]
            shared = sorted(set(a) & set(b))
            if not shared:
                raise InsufficientOverlap(
                    f"taxa {taxa[i]!r} and {taxa[j]!r} share no unit with content",
                    detail=[taxa[i], taxa[j]])
            mean = sum(normalized_distance(a[u], b[u]) for u in shared) / len(shared)
            rows[i][j] = rows[j][i] = mean
    return DistanceMatrix.create(taxa, rows)


# -- UPGMA ----------------------------------------------------------------------

@dataclass
class _Cluster:
    key: str  # lexicographically smallest leaf label
    size: int
    height: float
    node: PhyloNode


def upgma(matrix: DistanceMatrix) -> PhyloTree:
    """Average-linkage agglomeration into a rooted ultrametric tree.

    The closest pair merges first (ties: smallest label pair); a merged
    node sits at half the merge distance, so every leaf ends up at the same
    depth from the root.
    """
    clusters: dict[str, _Cluster] = {
        label: _Cluster(key=label, size=1, height=0.0,
                        node=PhyloNode(label=label))
        for label in matrix.taxa
    }
    dist: dict[tuple[str, str], float] = {}
    for i, a in enumerate(matrix.taxa):
        for j in range(i + 1, len(matrix.taxa)):
            b = matrix.taxa[j]
            dist[_pair(a, b)] = matrix.d[i][j]

    while len(clusters) > 1:
        (a, b), merge_dist = min(dist.items(), key=lambda kv: (kv[1], kv[0]))
        ca, cb = clusters.pop(a), clusters.pop(b)
        height = merge_dist / 2.0
        ca.node.branch_length = height - ca.height
        cb.node.branch_length = height - cb.height
        children = sorted((ca, cb), key=lambda c: c.key)
        merged = _Cluster(
            key=children[0].key,
            size=ca.size + cb.size,
            height=height,
            node=PhyloNode(label=None, children=[c.node for c in children]),
        )
        del dist[_pair(a, b)]
        for other in clusters:
            da = dist.pop(_pair(a, other))
            db = dist.pop(_pair(b, other))
            dist[_pair(merged.key, other)] = (ca.size * da + cb.size * db) / merged.size
        clusters[merged.key] = merged

    root = next(iter(clusters.values())).node
    root.branch_length = 0.0
    return PhyloTree(root=root, rooted=True)


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


# -- neighbor joining -------------------------------------------------------------

def neighbor_joining(matrix: DistanceMatrix) -> PhyloTree:
    """Standard NJ with Q-criterion selection; the unrooted result is
    rendered with a trifurcating root. Negative branch lengths are clamped
    to zero and flagged on the tree."""
    n = len(matrix.taxa)
    if n < 3:
        raise InsufficientTaxa(f"neighbor joining needs at least 3 taxa, got {n}")

    nodes: dict[str, PhyloNode] = {t: PhyloNode(label=t) for t in matrix.taxa}
    keys: dict[str, str] = {t: t for t in matrix.taxa}  # node id -> min leaf key
    dist: dict[tuple[str, str], float] = {}
    for i, a in enumerate(matrix.taxa):
        for j in range(i + 1, n):
            dist[_pair(a, b := matrix.taxa[j])] = matrix.d[i][j]

    clamped = False

    def clamp(x: float) -> float:
        nonlocal clamped
        if x < 0.0:
            clamped = True
            return 0.0
        return x

    active = set(matrix.taxa)
    while len(active) > 3:
        m = len(active)
        r = {k: sum(dist[_pair(k, o)] for o in active if o != k) for k in active}
        best: tuple[float, tuple[str, str]] | None = None
        for a in active:
            for b in active:
                if a >= b:
                    continue
                q = (m - 2) * dist[_pair(a, b)] - r[a] - r[b]
                cand = (q, _pair(keys[a], keys[b]))
                if best is None or cand < best:
                    best, pick = cand, (a, b)
        a, b = pick
        dab = dist[_pair(a, b)]
        la = 0.5 * dab + (r[a] - r[b]) / (2.0 * (m - 2))
        lb = dab - la
        nodes[a].branch_length = clamp(la)
        nodes[b].branch_length = clamp(lb)
        children = sorted((a, b), key=lambda k: keys[k])
        new_id = f"_{len(nodes)}"
        nodes[new_id] = PhyloNode(label=None,
                                  children=[nodes[c] for c in children])
        keys[new_id] = min(keys[a], keys[b])
        for other in active:
            if other in (a, b):
                continue
            duo = 0.5 * (dist[_pair(a, other)] + dist[_pair(b, other)] - dab)
            dist[_pair(new_id, other)] = duo
        active.discard(a)
        active.discard(b)
        active.add(new_id)

    # Final trifurcation via the three-point formulas.
    x, y, z = sorted(active, key=lambda k: keys[k])
    dxy, dxz, dyz = dist[_pair(x, y)], dist[_pair(x, z)], dist[_pair(y, z)]
    nodes[x].branch_length = clamp((dxy + dxz - dyz) / 2.0)
    nodes[y].branch_length = clamp((dxy + dyz - dxz) / 2.0)
    nodes[z].branch_length = clamp((dxz + dyz - dxy) / 2.0)
    root = PhyloNode(label=None, children=[nodes[x], nodes[y], nodes[z]])
    return PhyloTree(root=root, rooted=False, clamped=clamped)


# -- Newick ----------------------------------------------------------------------

_NEEDS_QUOTING = set("(),:;'")


def _format_length(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return s or "0"


def _format_label(label: str) -> str:
    if any(c in _NEEDS_QUOTING or c.isspace() for c in label):
        return "'" + label.replace("'", "''") + "'"
    return label


def to_newick(tree: PhyloTree) -> str:
    """Newick text: branch lengths at 6 decimals with trailing zeros trimmed,
    labels quoted when they contain structural characters or whitespace."""

    def render(node: PhyloNode, at_root: bool) -> str:
        if node.is_leaf:
            body = _format_label(node.label or "")
        else:
            body = "(" + ",".join(render(c, False) for c in node.children) + ")"
            if node.label:
                body += _format_label(node.label)
        if at_root:
            return body
        return f"{body}:{_format_length(node.branch_length)}"

    return render(tree.root, True) + ";"


def build_tree(corpus: "Corpus", work_id: str,
               request: TreeRequest) -> tuple[DistanceMatrix, PhyloTree]:
    matrix = build_matrix(corpus, work_id, request)
    tree = upgma(matrix) if request.method == "upgma" else neighbor_joining(matrix)
    return matrix, tree
