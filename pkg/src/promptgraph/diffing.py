"""Word-level prompt comparison.

Three steps: a Myers minimal edit script over token texts identifies
inserts and removes; removed/inserted pairs of the same word collapse into
reorders; finally the weights of aligned words are compared. The op count
``m`` of the resulting diff is the edit distance used for edge weighting.
"""

from __future__ import annotations

from dataclasses import dataclass

from .prompts import PromptTokens

INSERT = "insert"
REMOVE = "remove"
REORDER = "reorder"
INCREASE_WEIGHT = "increase_weight"
DECREASE_WEIGHT = "decrease_weight"
ACTIONS = frozenset({INSERT, REMOVE, REORDER, INCREASE_WEIGHT, DECREASE_WEIGHT})
WEIGHT_ACTIONS = frozenset({INCREASE_WEIGHT, DECREASE_WEIGHT})


@dataclass(frozen=True)
class EditOp:
    word: str
    action: str
    weight_before: float | None = None
    weight_after: float | None = None

    def __post_init__(self) -> None:
        if self.action not in ACTIONS:
            raise ValueError(f"unknown action {self.action!r}")
        has_weights = self.weight_before is not None and self.weight_after is not None
        if self.action in WEIGHT_ACTIONS:
            if not has_weights:
                raise ValueError("weight actions need weight_before and weight_after")
            if self.weight_before == self.weight_after:
                raise ValueError("weight action with unchanged weight")
        elif self.weight_before is not None or self.weight_after is not None:
            raise ValueError(f"{self.action} op must not carry weights")


@dataclass(frozen=True)
class Alignment:
    """Myers output: matched (i, j) index pairs plus unmatched indices."""

    matched: tuple[tuple[int, int], ...]
    removed: tuple[int, ...]
    inserted: tuple[int, ...]

    @property
    def cost(self) -> int:
        return len(self.removed) + len(self.inserted)


@dataclass(frozen=True)
class PromptDiff:
    src_step: str | None
    tgt_step: str | None
    ops: tuple[EditOp, ...]

    @property
    def m(self) -> int:
        return len(self.ops)


def myers_align(a: PromptTokens, b: PromptTokens) -> Alignment:
    """Minimal insert/delete script over token texts (weights ignored)."""
    xs = [t.text for t in a.tokens]
    ys = [t.text for t in b.tokens]
    n, m = len(xs), len(ys)

    # Greedy O(ND) forward pass, recording the furthest-reaching x per
    # diagonal k at each depth d for backtracking.
    v: dict[int, int] = {1: 0}
    trace: list[dict[int, int]] = []
    found = False
    for d in range(n + m + 1):
        trace.append(dict(v))
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and v.get(k - 1, 0) < v.get(k + 1, 0)):
                x = v.get(k + 1, 0)
            else:
                x = v.get(k - 1, 0) + 1
            y = x - k
            while x < n and y < m and xs[x] == ys[y]:
                x += 1
                y += 1
            v[k] = x
            if x >= n and y >= m:
                found = True
                break
        if found:
            break

    matched: list[tuple[int, int]] = []
    removed: list[int] = []
    inserted: list[int] = []
    x, y = n, m
    for d in range(len(trace) - 1, -1, -1):
        vd = trace[d]
        k = x - y
        if k == -d or (k != d and vd.get(k - 1, 0) < vd.get(k + 1, 0)):
            prev_k = k + 1
        else:
            prev_k = k - 1
        prev_x = vd.get(prev_k, 0)
        prev_y = prev_x - prev_k
        while x > prev_x and y > prev_y:
            matched.append((x - 1, y - 1))
            x -= 1
            y -= 1
        if d > 0:
            if x == prev_x:
                inserted.append(prev_y)
            else:
                removed.append(prev_x)
            x, y = prev_x, prev_y

    matched.reverse()
    removed.reverse()
    inserted.reverse()
    return Alignment(matched=tuple(matched), removed=tuple(removed), inserted=tuple(inserted))


def detect_reorders(
    alignment: Alignment, a: PromptTokens, b: PromptTokens
) -> list[EditOp]:
    """Collapse removed/inserted pairs of the same token into reorder ops.

    Pairing is greedy in positional order and one-to-one, and requires the
    weights to match as well (a moved word that also changed weight stays a
    remove+insert pair, which keeps op application exact). Unpaired edits
    come through unchanged.
    """
    pending: dict[tuple[str, float], list[int]] = {}
    for j in alignment.inserted:
        t = b.tokens[j]
        pending.setdefault((t.text, t.weight), []).append(j)

    ops: list[EditOp] = []
    consumed: set[int] = set()
    for i in alignment.removed:
        t = a.tokens[i]
        queue = pending.get((t.text, t.weight))
        if queue:
            consumed.add(queue.pop(0))
            ops.append(EditOp(word=t.text, action=REORDER))
        else:
            ops.append(EditOp(word=t.text, action=REMOVE))
    for j in alignment.inserted:
        if j not in consumed:
            ops.append(EditOp(word=b.tokens[j].text, action=INSERT))
    return ops


def compare_weights(
    alignment: Alignment, a: PromptTokens, b: PromptTokens
) -> list[EditOp]:
    """Weight-change ops for aligned tokens whose weights differ."""
    ops = []
    for i, j in alignment.matched:
        wa, wb = a.tokens[i].weight, b.tokens[j].weight
        if wa != wb:
            action = INCREASE_WEIGHT if wb > wa else DECREASE_WEIGHT
            ops.append(
                EditOp(word=a.tokens[i].text, action=action, weight_before=wa, weight_after=wb)
            )
    return ops


def diff_prompts(
    a: PromptTokens,
    b: PromptTokens,
    src_step: str | None = None,
    tgt_step: str | None = None,
) -> PromptDiff:
    """Full three-step comparison; m = len(ops) after reorder collapsing."""
    alignment = myers_align(a, b)
    ops = detect_reorders(alignment, a, b)
    ops.extend(compare_weights(alignment, a, b))
    return PromptDiff(src_step=src_step, tgt_step=tgt_step, ops=tuple(ops))
