#!/usr/bin/env python3
"""Walk through prompt parsing, phrase detection, and word-level diffing.

Run: python3 demos/01_prompts_and_diffs.py
"""

from promptgraph import detect_phrases, diff_prompts, jaccard_similarity, parse_prompt

print("=== weighted token parsing ===")
for raw in ["a white vase", "(flowers:1.3), vase", "((glow)) [muted] backdrop"]:
    pt = parse_prompt(raw)
    print(f"{raw!r:40} -> {[(t.text, round(t.weight, 3)) for t in pt.tokens]}")

print()
print("=== malformed weight syntax degrades, never crashes ===")
pt = parse_prompt("(flowers:abc) vase")
print("tokens:  ", [(t.text, t.weight) for t in pt.tokens])
print("warnings:", list(pt.warnings))

print()
print("=== phrase units: words that always travel together ===")
corpus = [parse_prompt(p) for p in ["new york city", "visit new york city at night"]]
table = detect_phrases(corpus)
print("units:", sorted(table.units))
merged = parse_prompt("visit new york city at night", table)
print("merged tokens:", [t.text for t in merged.tokens])

print()
print("=== jaccard similarity over token sets ===")
a = parse_prompt("a pig in the sky")
b = parse_prompt("a pig in the sky, in monet style")
print(f"similarity: {jaccard_similarity(a, b):.4f}  (5 shared / 7 distinct)")

print()
print("=== three-step diff: myers alignment, reorders, weights ===")
pairs = [
    ("masterpiece, 1boy, smile", "masterpiece, 1girl, smile"),
    ("cat dog", "dog cat"),
    ("(flowers:1.0) vase", "(flowers:1.3) vase"),
]
for raw_a, raw_b in pairs:
    diff = diff_prompts(parse_prompt(raw_a), parse_prompt(raw_b))
    ops = [
        f"{o.action}({o.word}"
        + (f" {o.weight_before}->{o.weight_after})" if o.weight_before else ")")
        for o in diff.ops
    ]
    print(f"{raw_a!r} -> {raw_b!r}\n    m={diff.m}  ops: {ops}")
