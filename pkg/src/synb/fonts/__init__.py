from .catalog import (
    Alphabet,
    CatalogError,
    ExcludedLanguageError,
    FontCatalog,
    FontRecord,
    UnknownLanguageError,
    load_catalog,
    read_blacklist,
)
from .languages import LANGUAGE_MIN_FONTS, LANGUAGE_RANGES, known_languages, language_codepoints
from .outlines import GlyphOutline, MissingGlyphError, synth_bold, synth_italic

__all__ = [
    "Alphabet",
    "CatalogError",
    "ExcludedLanguageError",
    "FontCatalog",
    "FontRecord",
    "GlyphOutline",
    "LANGUAGE_MIN_FONTS",
    "LANGUAGE_RANGES",
    "MissingGlyphError",
    "UnknownLanguageError",
    "known_languages",
    "language_codepoints",
    "load_catalog",
    "read_blacklist",
    "synth_bold",
    "synth_italic",
]
