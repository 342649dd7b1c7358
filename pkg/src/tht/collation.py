"""Tokenization, token-level edit distance, optimal alignment, and extraction
of commentary-derived pseudo-witnesses.

Distances are Levenshtein over whole tokens (unit costs), normalized by the
longer sequence length. Token granularity matches the word level at which
evidence is counted; nothing here attempts sandhi splitting or stemming.
"""

from __future__ import annotations

import string
import unicodedata
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .errors import UnknownLayerLabel

if TYPE_CHECKING:  # pragma: no cover
    from .corpus import Corpus

DANDA = "।"
DOUBLE_DANDA = "॥"

# Separator characters beyond Unicode whitespace: danda, double danda, and
# ASCII punctuation. Avagraha (U+093D) is not a separator.
_SEPARATORS = DANDA + DOUBLE_DANDA + string.punctuation
_SEP_TABLE = {ord(c): " " for c in _SEPARATORS}


@dataclass(frozen=True)
class TokenSequence:
    """An ordered run of NFC-normalized tokens plus where it came from."""

    tokens: tuple[str, ...]
    source: str | None = None

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]


def tokenize(text: str, script_tag: str = "Deva") -> TokenSequence:
    """Split ``text`` into word tokens.

    NFC-normalizes, treats danda/double-danda and ASCII punctuation as
    separators alongside Unicode whitespace, and drops empty pieces.
    ``script_tag`` is carried for future script-specific rules; the current
    rules are script-independent.
    """
    normalized = unicodedata.normalize("NFC", text)
    pieces = normalized.translate(_SEP_TABLE).split()
    return TokenSequence(tokens=tuple(pieces), source=None)


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Levenshtein distance over tokens with unit insert/delete/substitute costs."""
    m, n = len(a), len(b)
    if m == 0:
        return n
    if n == 0:
        return m
    prev = list(range(n + 1))
    for i in range(1, m + 1):
        cur = [i] + [0] * n
        ai = a[i - 1]
        for j in range(1, n + 1):
            cur[j] = min(
                prev[j] + 1,                       # delete a[i-1]
                cur[j - 1] + 1,                    # insert b[j-1]
                prev[j - 1] + (ai != b[j - 1]),    # match / substitute
            )
        prev = cur
    return prev[n]


def normalized_distance(a: Sequence[str], b: Sequence[str]) -> float:
    """edit_distance scaled into [0, 1] by max length; 0 when both are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return edit_distance(a, b) / longest


@dataclass(frozen=True)
class AlignOp:
    """One alignment step. ``i`` indexes into A, ``j`` into B; an index is
    None when the op does not consume from that side."""

    kind: str  # "match" | "substitute" | "delete" | "insert"
    i: int | None
    j: int | None


# Preference order when alignment costs tie.
_OP_RANK = {"match": 0, "substitute": 1, "delete": 2, "insert": 3}


def align(a: Sequence[str], b: Sequence[str]) -> list[AlignOp]:
    """One cost-optimal alignment of A onto B.

    Ties are broken by preferring Match > Substitute > Delete > Insert so the
    result is deterministic. The number of non-match ops equals
    ``edit_distance(a, b)``.
    """
    m, n = len(a), len(b)
    # cost[i][j] = distance between a[:i] and b[:j]
    cost = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        cost[i][0] = i
    for j in range(1, n + 1):
        cost[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost[i][j] = min(
                cost[i - 1][j] + 1,
                cost[i][j - 1] + 1,
                cost[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    ops: list[AlignOp] = []
    i, j = m, n
    while i > 0 or j > 0:
        candidates: list[tuple[int, AlignOp]] = []
        if i > 0 and j > 0:
            step = int(a[i - 1] != b[j - 1])
            if cost[i - 1][j - 1] + step == cost[i][j]:
                kind = "substitute" if step else "match"
                candidates.append((_OP_RANK[kind], AlignOp(kind, i - 1, j - 1)))
        if i > 0 and cost[i - 1][j] + 1 == cost[i][j]:
            candidates.append((_OP_RANK["delete"], AlignOp("delete", i - 1, None)))
        if j > 0 and cost[i][j - 1] + 1 == cost[i][j]:
            candidates.append((_OP_RANK["insert"], AlignOp("insert", None, j - 1)))
        _, op = min(candidates, key=lambda c: c[0])
        ops.append(op)
        if op.i is not None:
            i -= 1
        if op.j is not None:
            j -= 1
    ops.reverse()
    return ops


def pseudo_witness(
    corpus: "Corpus",
    layer_label: str,
    work_id: str,
    unit_scope: Sequence[str] | None = None,
) -> dict[str, TokenSequence]:
    """Per-unit token subsequences of the base text supported by one commentary.

    For each unit in scope, returns the base-text tokens (in base order)
    covered by at least one non-default annotation made by a layer with the
    given label. Empty sequences are returned for units the layer does not
    support at all.
    """
    work = corpus.get_work(work_id)
    units = corpus.units_in_scope(work_id, unit_scope)
    labels = {layer.label for _, layer in corpus.iter_layers(work_id)}
    if layer_label not in labels:
        raise UnknownLayerLabel(f"no layer labeled {layer_label!r} in work {work_id!r}")
    supported = corpus.supported_indices(work_id, [u.id for u in units], layer_label)
    out: dict[str, TokenSequence] = {}
    for unit in units:
        base = tokenize(unit.base_text, work.script)
        picks = tuple(base.tokens[i] for i in sorted(supported.get(unit.id, ())))
        out[unit.id] = TokenSequence(tokens=picks, source=f"{work_id}:{layer_label}")
    return out
