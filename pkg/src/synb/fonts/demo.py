"""Self-contained demo font corpus.

Builds a directory of real TrueType files without downloading anything:
procedurally drawn geometric faces whose glyph skeletons depend only on
the codepoint (so a symbol looks like the same class in every family)
while stroke weight, slant, proportions and jitter vary per family.
Hangul syllables are composed from their jamo decomposition so the full
block of 11,172 syllables is covered by the pan-script families.

The corpus also ships three deliberately bogus families (two rectangle
renderers and one barcode-like renderer) that the default blacklist
removes, plus a small below-threshold language so exclusion paths are
exercised.
"""

from __future__ import annotations

import argparse
from functools import lru_cache
from pathlib import Path

import numpy as np
from fontTools.fontBuilder import FontBuilder
from fontTools.pens.ttGlyphPen import TTGlyphPen

from ..rng import substream
from .languages import LANGUAGE_RANGES

UPM = 1000
ADVANCE = 640
BODY = 700  # glyph box height above baseline

CORPUS_VERSION = "demo-corpus-1"

# (family, styles, scripts, bogus-mode)
# styles: subset of {"Regular", "Bold", "Italic", "BoldItalic"}
_CORE = ("english", "greek", "russian")
_FULL = ("Regular", "Bold", "Italic", "BoldItalic")
FAMILY_PLAN: list[tuple[str, tuple[str, ...], tuple[str, ...], str]] = [
    ("Arbor", _FULL, _CORE, ""),
    ("Breva", _FULL, _CORE, ""),
    ("Cardo Demo", _FULL, _CORE, ""),
    ("Dalton", _FULL, _CORE, ""),
    ("Elmore", ("Regular", "Bold"), _CORE, ""),
    ("Fenwick", ("Regular", "Bold"), _CORE, ""),
    ("Glenna", ("Regular", "Bold"), _CORE, ""),
    ("Harrow", ("Regular", "Bold"), _CORE, ""),
    ("Isling", ("Regular",), _CORE, ""),
    ("Jarrah", ("Regular",), _CORE, ""),
    ("Kelso", ("Regular",), _CORE, ""),
    ("Lorian", ("Regular",), _CORE, ""),
    # pan-script families carry the Hangul block (10 => meets threshold)
    ("Mosaic Pan", ("Regular",), _CORE + ("korean",), ""),
    ("Nerida Pan", ("Regular",), _CORE + ("korean",), ""),
    ("Oswin Pan", ("Regular",), _CORE + ("korean",), ""),
    ("Pelior Pan", ("Regular",), _CORE + ("korean",), ""),
    ("Quorra Pan", ("Regular",), _CORE + ("korean",), ""),
    ("Rhodes Pan", ("Regular",), _CORE + ("korean",), ""),
    ("Selwyn Pan", ("Regular",), _CORE + ("korean",), ""),
    ("Tindra Pan", ("Regular",), _CORE + ("korean",), ""),
    ("Umbra Pan", ("Regular",), _CORE + ("korean",), ""),
    ("Verlan Pan", ("Regular",), _CORE + ("korean",), ""),
    # below the 10-font inclusion threshold on purpose
    ("Windmere", ("Regular",), _CORE + ("hebrew",), ""),
    ("Xanthe", ("Regular",), _CORE + ("hebrew",), ""),
    ("Yarrow", ("Regular",), _CORE + ("hebrew",), ""),
    # bogus renderers, blacklisted by the shipped default list
    ("Blocco", ("Regular",), _CORE, "solid-rect"),
    ("Blocco Due", ("Regular",), _CORE, "hollow-rect"),
    ("Barlines", ("Regular",), _CORE, "barcode"),
]

DEFAULT_BLACKLIST = ("blocco--regular", "blocco-due--regular", "barlines--regular")


@lru_cache(maxsize=None)
def _strokes_for_codepoint(cp: int) -> list[tuple[float, float, float, float]]:
    """Skeleton segments for one symbol in the unit box, codepoint-seeded.

    Returns line segments (x0, y0, x1, y1) with y up. Identical across
    families so a codepoint reads as one visual class everywhere.
    """
    rng = substream("skeleton", cp)
    # anchor grid 3x4; strokes connect distinct anchors
    xs = np.array([0.12, 0.5, 0.88])
    ys = np.array([0.0, 0.33, 0.66, 1.0])
    n_strokes = int(rng.integers(3, 6))
    segs = []
    seen = set()
    for _ in range(n_strokes * 3):
        if len(segs) >= n_strokes:
            break
        a = (int(rng.integers(0, 3)), int(rng.integers(0, 4)))
        b = (int(rng.integers(0, 3)), int(rng.integers(0, 4)))
        if a == b or (a, b) in seen or (b, a) in seen:
            continue
        seen.add((a, b))
        segs.append((xs[a[0]], ys[a[1]], xs[b[0]], ys[b[1]]))
    # guarantee at least one long stroke so glyphs stay visible
    if not segs:
        segs.append((0.12, 0.0, 0.88, 1.0))
    return segs


_HANGUL_BASE = 0xAC00
_N_LEAD, _N_VOWEL, _N_TAIL = 19, 21, 28


@lru_cache(maxsize=None)
def _jamo_units(kind: str, idx: int) -> tuple[tuple[float, float, float, float], ...]:
    """Seeded mini-skeleton of one jamo in the unit box."""
    rng = substream("jamo", kind, idx)
    grid = (0.08, 0.5, 0.92)
    n = int(rng.integers(2, 4))
    out = []
    for _ in range(n):
        ax, ay = int(rng.integers(0, 3)), int(rng.integers(0, 3))
        bx, by = int(rng.integers(0, 3)), int(rng.integers(0, 3))
        if (ax, ay) == (bx, by):
            bx = (bx + 1) % 3
        out.append((grid[ax], grid[ay], grid[bx], grid[by]))
    return tuple(out)


def _hangul_strokes(cp: int) -> list[tuple[float, float, float, float]]:
    """Block-composed skeleton for a Hangul syllable.

    The lead consonant occupies the top-left region, the vowel the right
    or middle band, and the optional tail the bottom band; each jamo has
    its own seeded mini-skeleton, reused across all syllables.
    """

    def jamo_segs(kind: str, idx: int, box: tuple[float, float, float, float]):
        x0, y0, x1, y1 = box
        return [
            (x0 + ux0 * (x1 - x0), y0 + uy0 * (y1 - y0),
             x0 + ux1 * (x1 - x0), y0 + uy1 * (y1 - y0))
            for ux0, uy0, ux1, uy1 in _jamo_units(kind, idx)
        ]

    s = cp - _HANGUL_BASE
    lead, rest = divmod(s, _N_VOWEL * _N_TAIL)
    vowel, tail = divmod(rest, _N_TAIL)
    vertical_vowel = vowel in (0, 1, 2, 3, 4, 5, 6, 7, 20)  # right-side vowels
    ybot = 0.38 if tail else 0.0
    segs = []
    if vertical_vowel:
        segs += jamo_segs("lead", lead, (0.0, ybot + 0.05, 0.55, 1.0))
        segs += jamo_segs("vowel", vowel, (0.62, ybot + 0.05, 1.0, 1.0))
    else:
        segs += jamo_segs("lead", lead, (0.0, ybot + 0.52, 1.0, 1.0))
        segs += jamo_segs("vowel", vowel, (0.0, ybot + 0.05, 1.0, ybot + 0.45))
    if tail:
        segs += jamo_segs("tail", tail, (0.1, 0.0, 0.9, 0.3))
    return segs


def _rect(pen, x, y, w, h):
    pen.moveTo((round(x), round(y)))
    pen.lineTo((round(x + w), round(y)))
    pen.lineTo((round(x + w), round(y + h)))
    pen.lineTo((round(x), round(y + h)))
    pen.closePath()


def _stroke_quad(pen, x0, y0, x1, y1, width):
    dx, dy = x1 - x0, y1 - y0
    norm = float(np.hypot(dx, dy))
    if norm < 1e-9:
        return
    nx, ny = -dy / norm * width / 2, dx / norm * width / 2
    ex, ey = dx / norm * width / 2, dy / norm * width / 2  # extend caps
    pts = [
        (x0 - ex + nx, y0 - ey + ny),
        (x1 + ex + nx, y1 + ey + ny),
        (x1 + ex - nx, y1 + ey - ny),
        (x0 - ex - nx, y0 - ey - ny),
    ]
    pen.moveTo((round(pts[0][0]), round(pts[0][1])))
    for p in pts[1:]:
        pen.lineTo((round(p[0]), round(p[1])))
    pen.closePath()


def _draw_glyph(pen, cp: int, style: dict, jrng, bogus: str):
    if bogus == "solid-rect":
        _rect(pen, 80, 0, ADVANCE - 160, BODY)
        return
    if bogus == "hollow-rect":
        _rect(pen, 80, 0, ADVANCE - 160, BODY)
        pen.moveTo((160, 80))
        pen.lineTo((160, BODY - 80))
        pen.lineTo((ADVANCE - 160, BODY - 80))
        pen.lineTo((ADVANCE - 160, 80))
        pen.closePath()
        return
    if bogus == "barcode":
        x = 60.0
        while x < ADVANCE - 80:
            w = float(jrng.uniform(18, 60))
            if jrng.random() < 0.6:
                _rect(pen, x, 0, min(w, ADVANCE - 80 - x), BODY)
            x += w + float(jrng.uniform(14, 40))
        return

    width, slant, sx, jitter = style["width"], style["slant"], style["sx"], style["jitter"]
    segs = (
        _hangul_strokes(cp)
        if _HANGUL_BASE <= cp < _HANGUL_BASE + _N_LEAD * _N_VOWEL * _N_TAIL
        else _strokes_for_codepoint(cp)
    )
    for x0, y0, x1, y1 in segs:
        j = jrng.uniform(-jitter, jitter, size=4)
        x0, y0, x1, y1 = x0 + j[0], y0 + j[1], x1 + j[2], y1 + j[3]
        # unit box -> font units, slanted
        X0 = (60 + x0 * (ADVANCE - 120)) * sx + slant * y0 * BODY
        X1 = (60 + x1 * (ADVANCE - 120)) * sx + slant * y1 * BODY
        _stroke_quad(pen, X0, y0 * BODY, X1, y1 * BODY, width)


def _codepoints_for(scripts: tuple[str, ...]) -> list[int]:
    cps: list[int] = []
    for script in scripts:
        for lo, hi in LANGUAGE_RANGES[script]:
            cps.extend(range(lo, hi + 1))
    return sorted(set(cps))


def build_font(family: str, style: str, scripts: tuple[str, ...], bogus: str = "") -> FontBuilder:
    bold = "Bold" in style
    italic = "Italic" in style
    cps = _codepoints_for(scripts)

    fam = substream("family-style", family)
    params = {
        "width": float(fam.uniform(0.09, 0.16)) * BODY * (1.6 if bold else 1.0),
        "slant": 0.2 if italic else float(fam.uniform(-0.03, 0.03)),
        "sx": float(fam.uniform(0.8, 1.05)),
        "jitter": float(fam.uniform(0.0, 0.035)),
    }
    # one jitter stream per face, consumed over codepoints in fixed order
    jrng = substream("jitter", family, style)

    glyph_order = [".notdef"]
    cmap = {}
    glyphs = {}
    pen = TTGlyphPen(None)
    _rect(pen, 60, 0, ADVANCE - 120, BODY)
    glyphs[".notdef"] = pen.glyph()
    for cp in cps:
        name = f"uni{cp:04X}"
        glyph_order.append(name)
        cmap[cp] = name
        pen = TTGlyphPen(None)
        _draw_glyph(pen, cp, params, jrng, bogus)
        glyphs[name] = pen.glyph()

    fb = FontBuilder(UPM, isTTF=True)
    fb.setupGlyphOrder(glyph_order)
    fb.setupCharacterMap(cmap)
    fb.setupGlyf(glyphs)
    fb.setupHorizontalMetrics({n: (ADVANCE, 40) for n in glyph_order})
    fb.setupHorizontalHeader(ascent=800, descent=-200)
    fb.setupNameTable(
        {
            "familyName": family,
            "styleName": style,
            "psName": f"{family.replace(' ', '')}-{style}",
            "version": f"Version 1.0 ({CORPUS_VERSION})",
        }
    )
    fb.setupOS2(sTypoAscender=800, sTypoDescender=-200, usWinAscent=800, usWinDescent=200)
    fb.font["head"].macStyle = (1 if bold else 0) | (2 if italic else 0)
    fb.font["OS/2"].fsSelection = ((0x20 if bold else 0) | (0x01 if italic else 0)) or 0x40
    fb.setupPost()
    return fb


def build_corpus(out_dir: str | Path, force: bool = False) -> Path:
    """Build the demo corpus into out_dir; skips work when up to date.

    Returns the directory path. A VERSION stamp file guards staleness.
    """
    out = Path(out_dir)
    stamp = out / "VERSION"
    if stamp.exists() and stamp.read_text().strip() == CORPUS_VERSION and not force:
        return out
    out.mkdir(parents=True, exist_ok=True)
    for family, styles, scripts, bogus in FAMILY_PLAN:
        for style in styles:
            fname = f"{family.replace(' ', '')}-{style}.ttf"
            fb = build_font(family, style, scripts, bogus)
            fb.save(str(out / fname))
    blacklist = out / "blacklist.txt"
    blacklist.write_text(
        "# fonts removed from the default catalog: they render boxes or\n"
        "# barcode stripes instead of the requested symbol\n"
        + "".join(f"{fid}\n" for fid in DEFAULT_BLACKLIST)
    )
    stamp.write_text(CORPUS_VERSION + "\n")
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description="build the demo font corpus")
    parser.add_argument("--out", default="demo_fonts", help="output directory")
    parser.add_argument("--force", action="store_true", help="rebuild even if current")
    args = parser.parse_args(argv)
    path = build_corpus(args.out, force=args.force)
    n = len(list(path.glob("*.ttf")))
    print(f"{n} font files in {path}")


if __name__ == "__main__":
    main()
