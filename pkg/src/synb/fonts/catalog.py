"""Font discovery, validation, and per-language alphabets.

A catalog maps every parseable TrueType/OpenType file under a directory
to a FontRecord. Records are grouped into families; the regular face of
a family is its canonical record and serves as the value of the "font"
latent attribute, while bold/italic faces of the same family back the
bold/italic attributes when they exist (styles are synthesized
otherwise). A font claims a language only when it can rasterize every
codepoint of that language's reference alphabet.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from fontTools.pens.boundsPen import BoundsPen
from fontTools.ttLib import TTFont, TTLibError

from .languages import LANGUAGE_MIN_FONTS, LANGUAGE_RANGES, language_codepoints
from .outlines import (
    GlyphOutline,
    MissingGlyphError,
    extract_outline,
    synth_bold,
    synth_italic,
)

log = logging.getLogger(__name__)

FONT_SUFFIXES = (".ttf", ".otf")


class CatalogError(Exception):
    """Catalog cannot be built (missing directory, nothing loadable)."""


class UnknownLanguageError(KeyError):
    pass


class ExcludedLanguageError(ValueError):
    """Language has fewer supporting fonts than the inclusion threshold."""


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-") or "unnamed"


@dataclass(frozen=True)
class FontRecord:
    id: str
    path: Path
    family: str
    style: str
    face_bold: bool  # this file's own style flags
    face_italic: bool
    supports_bold: bool  # a real bold face exists in the family
    supports_italic: bool
    languages: frozenset[str]
    blacklisted: bool


@dataclass(frozen=True)
class Alphabet:
    """A language's codepoints in canonical order plus its eligible fonts.

    Class index of a symbol = its position in ``codepoints``.
    """

    language: str
    codepoints: tuple[str, ...]
    fonts: tuple[str, ...]

    def __post_init__(self):
        if not self.codepoints:
            raise ValueError("alphabet must not be empty")
        if len(set(self.codepoints)) != len(self.codepoints):
            raise ValueError("alphabet codepoints must be duplicate-free")

    def class_index(self, char: str) -> int:
        return self.codepoints.index(char)


def _face_style_flags(tt: TTFont) -> tuple[bool, bool]:
    bold = italic = False
    if "head" in tt:
        mac = tt["head"].macStyle
        bold, italic = bool(mac & 1), bool(mac & 2)
    if "OS/2" in tt:
        sel = tt["OS/2"].fsSelection
        bold = bold or bool(sel & 0x20)
        italic = italic or bool(sel & 0x01)
    return bold, italic


def _names(tt: TTFont) -> tuple[str, str]:
    name = tt["name"]
    family = name.getDebugName(16) or name.getDebugName(1) or "unnamed"
    style = name.getDebugName(17) or name.getDebugName(2) or "regular"
    return family.strip(), style.strip()


def _covered_languages(tt: TTFont, cmap: dict) -> frozenset[str]:
    """Languages whose entire reference alphabet this face can rasterize."""
    mapped = cmap.keys()
    has_glyf = "glyf" in tt
    loca = tt["loca"] if has_glyf and "loca" in tt else None
    glyph_ids = tt.getReverseGlyphMap() if loca is not None else None
    glyph_set = None if loca is not None else tt.getGlyphSet()

    def nonempty(cp: int) -> bool:
        gname = cmap[cp]
        if loca is not None:
            gid = glyph_ids.get(gname)
            if gid is None:
                return False
            return loca[gid + 1] - loca[gid] > 0
        pen = BoundsPen(glyph_set)
        glyph_set[gname].draw(pen)
        return pen.bounds is not None

    out = set()
    for lang, ranges in LANGUAGE_RANGES.items():
        cps = [cp for lo, hi in ranges for cp in range(lo, hi + 1)]
        if all(cp in mapped for cp in cps) and all(nonempty(cp) for cp in cps):
            out.add(lang)
    return frozenset(out)


class FontCatalog:
    """Immutable after load; safe for concurrent reads."""

    def __init__(self, records: list[FontRecord], warnings: list[str]):
        self.fonts: dict[str, FontRecord] = {r.id: r for r in sorted(records, key=lambda r: r.id)}
        self.warnings = list(warnings)
        # family -> (bold, italic) -> record id
        self._faces: dict[str, dict[tuple[bool, bool], str]] = {}
        for rec in self.fonts.values():
            fam = self._faces.setdefault(rec.family, {})
            fam.setdefault((rec.face_bold, rec.face_italic), rec.id)
        self._canonical: list[str] = []
        for family in sorted(self._faces):
            faces = self._faces[family]
            key = min(faces, key=lambda bi: (bi[0] + bi[1], bi[0], bi[1]))
            self._canonical.append(faces[key])
        self._canonical.sort()
        self._tt_cache: dict[str, tuple[TTFont, dict]] = {}
        self._outline_cache: dict[tuple[str, str, bool, bool], GlyphOutline] = {}

    def __len__(self) -> int:
        return len(self.fonts)

    def record(self, font_id: str) -> FontRecord:
        try:
            return self.fonts[font_id]
        except KeyError:
            raise KeyError(f"unknown font id: {font_id!r}") from None

    def eligible(self, language: str | None = None) -> list[FontRecord]:
        """Canonical, non-blacklisted records, optionally filtered by language."""
        out = []
        for fid in self._canonical:
            rec = self.fonts[fid]
            if rec.blacklisted:
                continue
            if language is not None and language not in rec.languages:
                continue
            out.append(rec)
        return out

    def languages(self) -> list[str]:
        """Languages meeting the font-count inclusion threshold."""
        out = []
        for lang in LANGUAGE_RANGES:
            if len(self.eligible(lang)) >= LANGUAGE_MIN_FONTS:
                out.append(lang)
        return out

    def alphabet(self, language: str, max_symbols: int | None = None,
                 max_fonts: int | None = None) -> Alphabet:
        """The language's alphabet, optionally capped.

        Caps are prefixes of canonical order: the first max_symbols
        codepoints in Unicode order, the first max_fonts eligible fonts
        in id order.
        """
        if language not in LANGUAGE_RANGES:
            raise UnknownLanguageError(f"unknown language: {language!r}")
        fonts = [r.id for r in self.eligible(language)]
        if len(fonts) < LANGUAGE_MIN_FONTS:
            raise ExcludedLanguageError(
                f"language {language!r} has {len(fonts)} supporting fonts; "
                f"threshold is {LANGUAGE_MIN_FONTS}"
            )
        cps = language_codepoints(language)
        if max_symbols is not None:
            cps = cps[:max_symbols]
        if max_fonts is not None:
            fonts = fonts[:max_fonts]
        return Alphabet(language=language, codepoints=tuple(cps), fonts=tuple(fonts))

    # -- outlines ---------------------------------------------------------

    def _glyph_source(self, font_id: str) -> tuple[TTFont, dict]:
        if font_id not in self._tt_cache:
            tt = TTFont(str(self.fonts[font_id].path), lazy=True)
            self._tt_cache[font_id] = (tt, tt.getBestCmap())
        return self._tt_cache[font_id]

    def _style_face(self, rec: FontRecord, bold: bool, italic: bool) -> str | None:
        faces = self._faces.get(rec.family, {})
        return faces.get((bold, italic))

    def glyph_outline(self, font_id: str, char: str, bold: bool = False,
                      italic: bool = False) -> GlyphOutline:
        """Closed-path outline in font units with a tight bbox.

        Uses the family's real bold/italic face when one covers the
        codepoint; otherwise synthesizes the style from the record's own
        face. Deterministic for fixed inputs.
        """
        key = (font_id, char, bold, italic)
        cached = self._outline_cache.get(key)
        if cached is not None:
            return cached
        rec = self.record(font_id)
        cp = ord(char)

        want = (bold, italic)
        outline = None
        face_id = self._style_face(rec, *want) if want != (rec.face_bold, rec.face_italic) else font_id
        if face_id is not None:
            tt, cmap = self._glyph_source(face_id)
            if cp in cmap:
                try:
                    outline = extract_outline(tt.getGlyphSet(), cmap[cp])
                except MissingGlyphError:
                    outline = None
        if outline is None:
            # fall back to this record's own face, then synthesize
            tt, cmap = self._glyph_source(font_id)
            if cp not in cmap:
                raise MissingGlyphError(f"font {font_id!r} has no glyph for {char!r}")
            outline = extract_outline(tt.getGlyphSet(), cmap[cp])
            if bold and not rec.face_bold:
                outline = synth_bold(outline)
            if italic and not rec.face_italic:
                outline = synth_italic(outline)
        self._outline_cache[key] = outline
        return outline

    def summary(self) -> dict:
        return {
            "n_fonts": len(self.fonts),
            "n_blacklisted": sum(r.blacklisted for r in self.fonts.values()),
            "n_eligible": len(self.eligible()),
            "languages": {
                lang: len(self.eligible(lang))
                for lang in LANGUAGE_RANGES
                if self.eligible(lang)
            },
            "included_languages": self.languages(),
            "warnings": self.warnings,
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def read_blacklist(path: str | Path | None) -> set[str]:
    """Line-oriented font ids; '#' starts a comment."""
    if path is None:
        return set()
    out = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            out.add(entry)
    return out


def load_catalog(font_dir: str | Path, blacklist: str | Path | None = None) -> FontCatalog:
    """Scan a directory tree for loadable fonts.

    Unparseable files become warnings, not errors. Blacklisted fonts are
    loaded but flagged. Raises CatalogError for a missing directory or
    when nothing loads.
    """
    root = Path(font_dir)
    if not root.is_dir():
        raise CatalogError(f"font directory does not exist: {root}")
    banned = read_blacklist(blacklist)

    raw: list[dict] = []
    warnings: list[str] = []
    paths = sorted(p for p in root.rglob("*") if p.suffix.lower() in FONT_SUFFIXES)
    for path in paths:
        try:
            tt = TTFont(str(path), lazy=True)
            cmap = tt.getBestCmap()
            if not cmap:
                raise TTLibError("no usable cmap")
            family, style = _names(tt)
            bold, italic = _face_style_flags(tt)
            langs = _covered_languages(tt, cmap)
            tt.close()
        except Exception as exc:  # any broken file is skipped with a note
            warnings.append(f"{path.name}: {exc}")
            continue
        raw.append(
            dict(path=path, family=family, style=style, bold=bold, italic=italic, langs=langs)
        )
    if not raw:
        raise CatalogError(f"no loadable fonts under {root}")

    by_family: dict[str, list[dict]] = {}
    for info in raw:
        by_family.setdefault(info["family"], []).append(info)

    records: list[FontRecord] = []
    used_ids: set[str] = set()
    for family, faces in by_family.items():
        has_bold = any(f["bold"] and not f["italic"] for f in faces)
        has_italic = any(f["italic"] and not f["bold"] for f in faces)
        for info in faces:
            fid = f"{_slug(family)}--{_slug(info['style'])}"
            while fid in used_ids:
                fid += "-x"
            used_ids.add(fid)
            records.append(
                FontRecord(
                    id=fid,
                    path=info["path"],
                    family=family,
                    style=info["style"],
                    face_bold=info["bold"],
                    face_italic=info["italic"],
                    supports_bold=has_bold,
                    supports_italic=has_italic,
                    languages=info["langs"],
                    blacklisted=fid in banned,
                )
            )
    unknown = banned - {r.id for r in records}
    for name in sorted(unknown):
        warnings.append(f"blacklist entry matches no font: {name}")
    return FontCatalog(records, warnings)
