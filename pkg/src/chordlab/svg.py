"""SVG 1.1 figures for square-tree configurations and chord diagrams."""
from __future__ import annotations

from pathlib import Path
from typing import Union

from .cycles import Config2D, EmptyInput
from .diagram import ChordDiagram
from .report import atomic_write_text

SIZE = 480
PAD = 24


class _Frame:
    """Affine map from data coordinates to the pixel square (y up)."""

    def __init__(self, xs, ys):
        lo = min(min(xs), min(ys))
        hi = max(max(xs), max(ys))
        if hi == lo:
            hi, lo = hi + 1, lo - 1
        self.lo, self.hi = lo, hi
        self.k = (SIZE - 2 * PAD) / (hi - lo)

    def x(self, v) -> float:
        return PAD + (float(v) - self.lo) * self.k

    def y(self, v) -> float:
        return SIZE - PAD - (float(v) - self.lo) * self.k

    def len(self, v) -> float:
        return float(v) * self.k


def _document(body: list[str], title: str) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
        '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{title}</title>",
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    return "\n".join(head + body + ["</svg>", ""])


def _config_svg(c: Config2D) -> str:
    xs = [p[0] for p in c.points] + [sc[0] - h for sc, h in c.squares] \
        + [sc[0] + h for sc, h in c.squares]
    ys = [p[1] for p in c.points] + [sc[1] - h for sc, h in c.squares] \
        + [sc[1] + h for sc, h in c.squares]
    fr = _Frame(xs, ys)
    body = []
    # larger squares first so nested ones stay visible
    for (cx, cy), h in sorted(c.squares, key=lambda s: -s[1]):
        body.append(f'<rect x="{fr.x(cx - h):.3f}" y="{fr.y(cy + h):.3f}" '
                    f'width="{fr.len(2 * h):.3f}" height="{fr.len(2 * h):.3f}" '
                    'fill="none" stroke="#4a6fa5" stroke-width="0.8"/>')
    for x, y in c.points:
        body.append(f'<circle cx="{fr.x(x):.3f}" cy="{fr.y(y):.3f}" r="3" fill="black"/>')
    title = f"{len(c)}-configuration" + (f", depth {c.depth}" if c.depth else "")
    return _document(body, title)


def _diagram_svg(d: ChordDiagram) -> str:
    xs = [ch.a for ch in d.chords]
    ys = [ch.b for ch in d.chords]
    fr = _Frame(xs, ys)
    lo, hi = fr.lo, fr.hi
    body = [f'<line x1="{fr.x(lo):.3f}" y1="{fr.y(lo):.3f}" x2="{fr.x(hi):.3f}" '
            f'y2="{fr.y(hi):.3f}" stroke="#999999" stroke-dasharray="4 3"/>']
    for ch in d.chords:
        body.append(f'<circle cx="{fr.x(ch.a):.3f}" cy="{fr.y(ch.b):.3f}" r="3" '
                    'fill="black"/>')
    return _document(body, f"{d.n}-chord diagram in the half-plane a &lt; b")


def render_svg(c: Union[Config2D, ChordDiagram], path=None) -> str:
    """SVG text for ``c``; also written to ``path`` when given."""
    if isinstance(c, Config2D):
        if not c.points:
            raise EmptyInput("configuration has no points")
        text = _config_svg(c)
    elif isinstance(c, ChordDiagram):
        if c.n == 0:
            raise EmptyInput("diagram has no chords")
        text = _diagram_svg(c)
    else:
        raise TypeError(f"cannot render {type(c).__name__}")
    if path is not None:
        atomic_write_text(Path(path), text)
    return text

