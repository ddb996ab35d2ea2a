"""Deterministic 512x512 PNG rendering for the 2D domains."""

from __future__ import annotations

import io
import re

from PIL import Image, ImageDraw

from ..domains import BlocksState, DomainId, ShoeboxState, TileState
from ..domains.sliding_tile import BLANK

CANVAS = 512
MARGIN = 16
BACKGROUND = (255, 255, 255)
INK = (0, 0, 0)

# 5x7 digit glyphs, one string per row, '#' = ink.
GLYPHS: dict[str, tuple[str, ...]] = {
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),
    "3": ("#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": ("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),
}
GLYPH_W, GLYPH_H = 5, 7

BLOCK_COLORS = {
    "red": (220, 40, 40),
    "blue": (40, 80, 220),
    "green": (40, 170, 70),
    "yellow": (235, 210, 40),
    "orange": (240, 140, 30),
    "purple": (140, 60, 180),
    "cyan": (40, 200, 210),
}
UNKNOWN_COLOR = (128, 128, 128)
BLOCK_SIZE, BLOCK_GAP, TABLE_Y = 56, 12, 448

TILE_FILL = (200, 200, 200)
TILE_BORDER = 2

KIND_COLORS = {
    "ball": (220, 40, 40),
    "card": (40, 80, 220),
    "cube": (40, 170, 70),
    "peg": (240, 140, 30),
    "element": (128, 128, 128),
}
BIN_TOP, BIN_BOTTOM, LOOSE_TOP = 300, 420, 60


class RenderError(ValueError):
    code = "UNRENDERABLE_DOMAIN"


def text_width(text: str, scale: int) -> int:
    return (len(text) * (GLYPH_W + 1) - 1) * scale


def draw_number(draw: ImageDraw.ImageDraw, text: str, cx: int, cy: int, scale: int, fill=INK) -> None:
    """Draw digits centered on (cx, cy), one blank glyph column between digits."""
    x0 = cx - text_width(text, scale) // 2
    y0 = cy - GLYPH_H * scale // 2
    for k, ch in enumerate(text):
        gx = x0 + k * (GLYPH_W + 1) * scale
        for r, row in enumerate(GLYPHS[ch]):
            for c, bit in enumerate(row):
                if bit == "#":
                    x, y = gx + c * scale, y0 + r * scale
                    draw.rectangle((x, y, x + scale - 1, y + scale - 1), fill=fill)


def tile_layout(width: int, height: int) -> tuple[int, int, int, int]:
    """(x0, y0, cell size, glyph scale) for a width x height grid."""
    cell = (CANVAS - 2 * MARGIN) // max(width, height)
    x0 = (CANVAS - cell * width) // 2
    y0 = (CANVAS - cell * height) // 2
    return x0, y0, cell, cell // 16


def _render_tiles(s: TileState, draw: ImageDraw.ImageDraw) -> None:
    x0, y0, cell, scale = tile_layout(s.width, s.height)
    for r, row in enumerate(s.rows()):
        for c, v in enumerate(row):
            box = (x0 + c * cell, y0 + r * cell, x0 + (c + 1) * cell - 1, y0 + (r + 1) * cell - 1)
            draw.rectangle(box, fill=BACKGROUND if v == BLANK else TILE_FILL, outline=INK, width=TILE_BORDER)
            if v != BLANK:
                draw_number(draw, str(v), x0 + c * cell + cell // 2, y0 + r * cell + cell // 2, scale)


def _render_blocks(s: BlocksState, draw: ImageDraw.ImageDraw) -> None:
    draw.rectangle((MARGIN, TABLE_Y, CANVAS - MARGIN - 1, TABLE_Y + 5), fill=INK)
    n = len(s.stacks)
    total = n * BLOCK_SIZE + (n - 1) * BLOCK_GAP
    x = (CANVAS - total) // 2
    for stack in s.stacks:
        for level, b in enumerate(stack):
            top = TABLE_Y - (level + 1) * BLOCK_SIZE
            draw.rectangle((x, top, x + BLOCK_SIZE - 1, top + BLOCK_SIZE - 1),
                           fill=BLOCK_COLORS.get(b, UNKNOWN_COLOR), outline=INK, width=2)
        x += BLOCK_SIZE + BLOCK_GAP
    if s.holding:
        cx = CANVAS // 2
        draw.rectangle((cx - 2, 0, cx + 1, 12), fill=INK)
        draw.rectangle((cx - BLOCK_SIZE // 2, 12, cx + BLOCK_SIZE // 2 - 1, 12 + BLOCK_SIZE - 1),
                       fill=BLOCK_COLORS.get(s.holding, UNKNOWN_COLOR), outline=INK, width=2)


def _label(name: str) -> str:
    m = re.search(r"(\d+)$", name)
    return m.group(1) if m else ""


def _token(draw: ImageDraw.ImageDraw, kind: str, name: str, cx: int, cy: int, r: int) -> None:
    color = KIND_COLORS.get(kind, KIND_COLORS["element"])
    box = (cx - r, cy - r, cx + r - 1, cy + r - 1)
    if kind == "ball":
        draw.ellipse(box, fill=color, outline=INK)
    elif kind == "peg":
        draw.polygon([(cx, cy - r), (cx - r, cy + r - 1), (cx + r - 1, cy + r - 1)], fill=color, outline=INK)
    elif kind == "card":
        draw.rectangle((cx - r, cy - r // 2, cx + r - 1, cy + r // 2 - 1), fill=color, outline=INK)
    else:
        draw.rectangle(box, fill=color, outline=INK)
    label = _label(name)
    if label:
        draw_number(draw, label, cx, cy + r + 14, 2)


def _render_shoebox(s: ShoeboxState, draw: ImageDraw.ImageDraw) -> None:
    n = max(len(s.locations), 1)
    gap = 8
    width = min(96, (CANVAS - 2 * MARGIN - (n - 1) * gap) // n)
    x = (CANVAS - (n * width + (n - 1) * gap)) // 2
    centers = {}
    for loc in s.locations:
        draw.rectangle((x, BIN_TOP, x + width - 1, BIN_BOTTOM), outline=INK, width=3)
        draw_number(draw, _label(loc), x + width // 2, BIN_BOTTOM + 24, 3)
        centers[loc] = x + width // 2
        x += width + gap
    r = min(20, width // 2 - 6)
    loose = [e for e in s.elements if e.location is None]
    for e in s.elements:
        if e.location is not None:
            _token(draw, e.kind, e.name, centers[e.location], (BIN_TOP + BIN_BOTTOM) // 2 - 10, r)
    if loose:
        step = (CANVAS - 2 * MARGIN) // len(loose)
        for i, e in enumerate(loose):
            _token(draw, e.kind, e.name, MARGIN + step * i + step // 2, LOOSE_TOP + r, r)


def render_image(s) -> Image.Image:
    if s.domain is DomainId.KITCHEN:
        raise RenderError("UNRENDERABLE_DOMAIN: kitchen images are ingested, not rendered")
    img = Image.new("RGB", (CANVAS, CANVAS), BACKGROUND)
    draw = ImageDraw.Draw(img)
    if isinstance(s, TileState):
        _render_tiles(s, draw)
    elif isinstance(s, BlocksState):
        _render_blocks(s, draw)
    elif isinstance(s, ShoeboxState):
        _render_shoebox(s, draw)
    return img


def render_png(s) -> bytes:
    buf = io.BytesIO()
    render_image(s).save(buf, format="PNG", optimize=False, compress_level=6)
    return buf.getvalue()
