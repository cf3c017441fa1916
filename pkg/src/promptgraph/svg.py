"""Static SVG rendering of a layout document.

A lightweight export for reports and quick inspection: nodes as
order-shaded rectangles, member edges drawn tapered (wide at the source),
glyph circles with frequency slices, bubble outlines as rounded boxes.
The interactive frontend does the full treatment; this stays dependency
free and produces a standalone file.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

ACTION_COLORS = {
    "insert": "#466E8F",
    "increase_weight": "#466E8F",
    "remove": "#CD3033",
    "decrease_weight": "#CD3033",
    "reorder": "#57B28F",
}


def _shade(order_shade: float) -> str:
    level = int(round(230 - 180 * order_shade))
    return f"rgb({level},{level},{level})"


def _taper(src: tuple[float, float], tgt: tuple[float, float], width: float) -> str:
    dx, dy = tgt[0] - src[0], tgt[1] - src[1]
    length = math.hypot(dx, dy) or 1.0
    nx, ny = -dy / length, dx / length
    half = width / 2
    points = [
        (src[0] + nx * half, src[1] + ny * half),
        (src[0] - nx * half, src[1] - ny * half),
        (tgt[0], tgt[1]),
    ]
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in points)


def _slice_path(cx: float, cy: float, r: float, a0: float, a1: float) -> str:
    x0, y0 = cx + r * math.cos(a0), cy + r * math.sin(a0)
    x1, y1 = cx + r * math.cos(a1), cy + r * math.sin(a1)
    large = 1 if (a1 - a0) > math.pi else 0
    return f"M {cx:.2f} {cy:.2f} L {x0:.2f} {y0:.2f} A {r:.2f} {r:.2f} 0 {large} 1 {x1:.2f} {y1:.2f} Z"


def export_svg(doc: dict, width: float = 1200.0, height: float = 800.0) -> str:
    """Render a layout document to a standalone SVG string."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    positions = {n["image_id"]: (n["x"], n["y"]) for n in doc.get("nodes", [])}

    for bubble in doc.get("bubbles", []):
        pts = [positions[i] for i in bubble["members"] if i in positions]
        if not pts:
            continue
        pad = 44.0
        x0 = min(p[0] for p in pts) - pad
        y0 = min(p[1] for p in pts) - pad
        x1 = max(p[0] for p in pts) + pad
        y1 = max(p[1] for p in pts) + pad
        dash = ' stroke-dasharray="6,4"' if bubble["style"] == "dashed" else ""
        fill = "none" if bubble["style"] == "dashed" else "#f2f4f7"
        parts.append(
            f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" height="{y1 - y0:.2f}" '
            f'rx="28" fill="{fill}" stroke="#b8c0cc" stroke-width="1"{dash}/>'
        )

    glyph_of_bundle: dict[int, int] = {}
    for gi, glyph in enumerate(doc.get("glyphs", [])):
        for bi in glyph["bundles"]:
            glyph_of_bundle[bi] = gi
    glyphs = doc.get("glyphs", [])

    for bundle in doc.get("bundles", []):
        if not bundle["visible"]:
            continue
        color = ACTION_COLORS.get(bundle["action"], "#888888")
        gi = glyph_of_bundle.get(bundle["id"])
        via = (glyphs[gi]["x"], glyphs[gi]["y"]) if gi is not None else None
        for member in bundle["members"]:
            src = positions.get(member["src"])
            tgt = positions.get(member["tgt"])
            if src is None or tgt is None:
                continue
            w = 2.0 + 10.0 * member["weight"]
            if via is not None:
                parts.append(
                    f'<polygon points="{_taper(src, via, w)}" fill="{color}" fill-opacity="0.45"/>'
                )
                parts.append(
                    f'<polygon points="{_taper(via, tgt, w * 0.6)}" fill="{color}" fill-opacity="0.45"/>'
                )
            else:
                parts.append(
                    f'<polygon points="{_taper(src, tgt, w)}" fill="{color}" fill-opacity="0.45"/>'
                )

    for glyph in glyphs:
        cx, cy, r = glyph["x"], glyph["y"], 12.0
        angle = -math.pi / 2
        for s in glyph["slices"]:
            span = s["angle_fraction"] * 2 * math.pi
            color = ACTION_COLORS.get(s["action"], "#888888")
            opacity = 0.35 if s["opacity_class"] == "low" else 0.9
            radius = max(2.0, r * s["radius_fraction"])
            if s["angle_fraction"] >= 1.0 - 1e-9:
                parts.append(
                    f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{radius:.2f}" '
                    f'fill="{color}" fill-opacity="{opacity}"/>'
                )
            else:
                parts.append(
                    f'<path d="{_slice_path(cx, cy, radius, angle, angle + span)}" '
                    f'fill="{color}" fill-opacity="{opacity}"/>'
                )
            angle += span
        label = escape(" ".join(glyph["label_words"]))
        parts.append(
            f'<text x="{cx + 16:.2f}" y="{cy + 4:.2f}" font-size="11" '
            f'font-family="sans-serif" fill="#333">{label}</text>'
        )

    for node in doc.get("nodes", []):
        size = node["size"]
        x, y = node["x"] - size / 2, node["y"] - size / 2
        fill = _shade(node["order_shade"]) if node["mode"] == "rect" else "#ffffff"
        parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{size:g}" height="{size:g}" '
            f'fill="{fill}" stroke="{_shade(node["order_shade"])}" stroke-width="3"/>'
        )
        parts.append(
            f'<text x="{node["x"]:.2f}" y="{node["y"] + 4:.2f}" font-size="10" '
            f'text-anchor="middle" font-family="sans-serif" fill="#555">'
            f'{node["step_order"]}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts)
