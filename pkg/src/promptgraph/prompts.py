"""Prompt parsing: weighted tokens, phrase units, and set similarity.

Prompts for diffusion models are comma-separated tag lists that may carry
inline emphasis syntax:

    (word:1.3)   explicit weight
    (word)       weight x1.1
    [word]       weight x0.9

Nested groups multiply. Malformed syntax (unbalanced brackets, non-numeric
or non-positive weights) degrades to plain text and is reported as a
warning, never an exception.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

ATTENTION_UP = 1.1
ATTENTION_DOWN = 0.9

_WEIGHT_RE = re.compile(r"\s*(\d+(?:\.\d+)?|\.\d+)\s*$")
_OPENERS = {"(": ")", "[": "]"}
_CLOSERS = {")", "]"}
_BRACKETS = frozenset("()[]")


@dataclass(frozen=True)
class WeightedToken:
    """One normalized word (or merged phrase) with its emphasis weight.

    ``span`` is the character range in the raw prompt; it is metadata and
    excluded from equality so serialize/reparse round trips compare clean.
    """

    text: str
    weight: float = 1.0
    span: tuple[int, int] = field(default=(0, 0), compare=False)

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("token text must be non-empty")
        if not self.weight > 0:
            raise ValueError(f"token weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class PromptTokens:
    raw: str
    tokens: tuple[WeightedToken, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def token_set(self) -> frozenset[str]:
        return frozenset(t.text for t in self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class PhraseTable:
    """Multi-word sequences treated as single tokens during parsing."""

    units: frozenset[tuple[str, ...]] = frozenset()

    def __post_init__(self) -> None:
        for unit in self.units:
            if len(unit) < 2:
                raise ValueError(f"phrase unit needs >=2 words: {unit!r}")

    def __bool__(self) -> bool:
        return bool(self.units)


EMPTY_PHRASES = PhraseTable()


def _normalize(word: str) -> str:
    return word.casefold().replace(".", "").replace(",", "").strip()


def _find_close(raw: str, start: int, end: int) -> int | None:
    """Index of the bracket matching raw[start], or None if unbalanced."""
    stack = [raw[start]]
    i = start + 1
    while i < end:
        ch = raw[i]
        if ch in _OPENERS:
            stack.append(ch)
        elif ch in _CLOSERS:
            if _OPENERS[stack[-1]] != ch:
                return None
            stack.pop()
            if not stack:
                return i
        i += 1
    return None


def _split_weight_suffix(raw: str, start: int, end: int) -> tuple[int, float | None, bool]:
    """Look for a top-level ``:w`` suffix in raw[start:end].

    Returns (content_end, weight, malformed). A colon at bracket depth 0
    must be followed by a positive decimal; anything else marks the group
    malformed.
    """
    depth = 0
    colon = -1
    for i in range(start, end):
        ch = raw[i]
        if ch in _OPENERS:
            depth += 1
        elif ch in _CLOSERS:
            depth -= 1
        elif ch == ":" and depth == 0:
            colon = i
    if colon < 0:
        return end, None, False
    m = _WEIGHT_RE.fullmatch(raw[colon + 1 : end])
    if m is None:
        return end, None, True
    weight = float(m.group(1))
    if not weight > 0:
        return end, None, True
    return colon, weight, False


class _Scanner:
    def __init__(self, raw: str):
        self.raw = raw
        self.pieces: list[tuple[str, float, tuple[int, int]]] = []
        self.warnings: list[str] = []

    def scan(self, start: int, end: int, factor: float, syntax: bool) -> None:
        raw = self.raw
        i = start
        word_start = -1

        def flush(upto: int) -> None:
            nonlocal word_start
            if word_start >= 0:
                self.pieces.append((raw[word_start:upto], factor, (word_start, upto)))
                word_start = -1

        while i < end:
            ch = raw[i]
            if ch.isspace() or ch == ",":
                flush(i)
            elif syntax and ch in _OPENERS:
                flush(i)
                close = _find_close(raw, i, end)
                if close is None:
                    self.warnings.append(f"unbalanced {ch!r} at {i}; treated as plain text")
                    self.scan(i + 1, end, factor, syntax=False)
                    return
                content_end, weight, malformed = _split_weight_suffix(raw, i + 1, close)
                if malformed:
                    self.warnings.append(
                        f"bad weight in group at {i}..{close}; treated as plain text"
                    )
                    self.scan(i + 1, close, factor, syntax=False)
                elif weight is not None:
                    self.scan(i + 1, content_end, factor * weight, syntax)
                else:
                    default = ATTENTION_UP if ch == "(" else ATTENTION_DOWN
                    self.scan(i + 1, content_end, factor * default, syntax)
                i = close
            elif not syntax and ch in _BRACKETS:
                flush(i)  # bracket chars separate words in plain-text mode
            else:
                if word_start < 0:
                    word_start = i
            i += 1
        flush(end)


def _merge_phrases(
    tokens: list[WeightedToken], phrases: PhraseTable
) -> list[WeightedToken]:
    if not phrases:
        return tokens
    by_first: dict[str, list[tuple[str, ...]]] = {}
    for unit in phrases.units:
        by_first.setdefault(unit[0], []).append(unit)
    for units in by_first.values():
        units.sort(key=len, reverse=True)  # longest match wins

    out: list[WeightedToken] = []
    i = 0
    while i < len(tokens):
        merged = None
        for unit in by_first.get(tokens[i].text, ()):
            k = len(unit)
            if i + k <= len(tokens) and tuple(t.text for t in tokens[i : i + k]) == unit:
                run = tokens[i : i + k]
                merged = WeightedToken(
                    text=" ".join(unit),
                    weight=sum(t.weight for t in run) / k,
                    span=(run[0].span[0], run[-1].span[1]),
                )
                i += k
                break
        if merged is None:
            out.append(tokens[i])
            i += 1
        else:
            out.append(merged)
    return out


def parse_prompt(raw: str, phrases: PhraseTable = EMPTY_PHRASES) -> PromptTokens:
    """Parse a raw prompt into ordered weighted tokens.

    Weight syntax is consumed; words are case-folded with commas/periods
    stripped; contiguous runs matching a phrase unit merge into a single
    token (weight = mean of the run). Parse problems are recorded as
    warnings on the result, and the offending span is kept as plain text.
    """
    scanner = _Scanner(raw)
    scanner.scan(0, len(raw), 1.0, syntax=True)
    tokens = []
    for word, weight, span in scanner.pieces:
        text = _normalize(word)
        if text:
            tokens.append(WeightedToken(text=text, weight=weight, span=span))
    tokens = _merge_phrases(tokens, phrases)
    return PromptTokens(raw=raw, tokens=tuple(tokens), warnings=tuple(scanner.warnings))


def serialize_tokens(tokens: PromptTokens | tuple[WeightedToken, ...]) -> str:
    """Render tokens back to prompt text with explicit weight syntax."""
    seq = tokens.tokens if isinstance(tokens, PromptTokens) else tokens
    parts = []
    for t in seq:
        parts.append(t.text if t.weight == 1.0 else f"({t.text}:{t.weight!r})")
    return ", ".join(parts)


def jaccard_similarity(a: PromptTokens, b: PromptTokens) -> float:
    """|A n B| / |A u B| over distinct token texts; 1.0 when both empty."""
    sa, sb = a.token_set, b.token_set
    if not sa and not sb:
        return 1.0
    union = len(sa | sb)
    return len(sa & sb) / union


def detect_phrases(corpus: list[PromptTokens]) -> PhraseTable:
    """Find multi-word units whose words always appear together.

    A maximal contiguous run of words becomes a unit when every adjacent
    pair inside it is inseparable across the whole corpus (each occurrence
    of the left word is immediately followed by the right word and vice
    versa) and the full run occurs in at least two prompts.
    """
    if not corpus:
        raise ValueError("phrase detection needs a non-empty corpus")

    next_of: dict[str, set[str | None]] = {}
    prev_of: dict[str, set[str | None]] = {}
    for pt in corpus:
        texts = [t.text for t in pt.tokens]
        for i, w in enumerate(texts):
            next_of.setdefault(w, set()).add(texts[i + 1] if i + 1 < len(texts) else None)
            prev_of.setdefault(w, set()).add(texts[i - 1] if i > 0 else None)

    def inseparable(a: str, b: str) -> bool:
        return a != b and next_of[a] == {b} and prev_of[b] == {a}

    # Words have at most one inseparable successor/predecessor, so the
    # adjacency forms disjoint chains; walk each chain from its head.
    words = sorted(next_of)
    heads = [
        w
        for w in words
        if not any(inseparable(p, w) for p in (prev_of[w] - {None}))  # type: ignore[arg-type]
    ]
    units: set[tuple[str, ...]] = set()
    for head in heads:
        chain = [head]
        seen = {head}
        while True:
            succs = next_of[chain[-1]] - {None}
            nxt = next(iter(succs)) if len(succs) == 1 else None
            if nxt is None or nxt in seen or not inseparable(chain[-1], nxt):
                break
            chain.append(nxt)
            seen.add(nxt)
        if len(chain) < 2:
            continue
        unit = tuple(chain)
        support = sum(1 for pt in corpus if _contains_run(pt, unit))
        if support >= 2:
            units.add(unit)
    return PhraseTable(units=frozenset(units))


def _contains_run(pt: PromptTokens, unit: tuple[str, ...]) -> bool:
    texts = tuple(t.text for t in pt.tokens)
    k = len(unit)
    return any(texts[i : i + k] == unit for i in range(len(texts) - k + 1))
