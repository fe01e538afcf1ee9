"""Reference alphabets for the languages the catalog knows about.

Each language maps to one or more codepoint ranges (inclusive). The
canonical symbol order of a language is Unicode scalar order over those
ranges; class index = position in that order. A font supports a language
only if it can rasterize every codepoint of the reference alphabet, so
the alphabet served to samplers is identical across installations.
"""

from __future__ import annotations

# language -> inclusive (start, end) codepoint ranges, canonical order
LANGUAGE_RANGES: dict[str, tuple[tuple[int, int], ...]] = {
    "english": ((0x0061, 0x007A),),            # a-z
    "greek": ((0x03B1, 0x03C9),),              # alpha-omega, incl. final sigma
    "russian": ((0x0430, 0x044F),),            # Cyrillic a-ya
    "korean": ((0xAC00, 0xD7A3),),             # all 11,172 Hangul syllables
    "hebrew": ((0x05D0, 0x05EA),),             # alef-tav
    "arabic": ((0x0621, 0x063A), (0x0641, 0x064A)),
    "thai": ((0x0E01, 0x0E2E),),               # consonants
    "armenian": ((0x0561, 0x0586),),           # lowercase
    "georgian": ((0x10D0, 0x10F0),),           # Mkhedruli
    "hindi": ((0x0915, 0x0939),),              # Devanagari consonants
    "chinese": ((0x4E00, 0x4FFF),),            # leading slice of the CJK block
}

# Languages with fewer than this many supporting fonts are excluded
# from the multilingual catalog.
LANGUAGE_MIN_FONTS = 10


def language_codepoints(language: str) -> tuple[str, ...]:
    """Canonical codepoint list for a known language."""
    try:
        ranges = LANGUAGE_RANGES[language]
    except KeyError:
        raise KeyError(f"unknown language: {language!r}") from None
    return tuple(chr(cp) for lo, hi in ranges for cp in range(lo, hi + 1))


def known_languages() -> tuple[str, ...]:
    return tuple(LANGUAGE_RANGES)
