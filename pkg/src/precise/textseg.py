"""Deterministic text segmentation primitives.

Sentences, words, syllables, and character counts feeding the readability
formulas. Everything here is a pure function of the input text: no language
models, no pronunciation dictionaries, no global state. Input is normalized
to Unicode NFC before segmentation, and all offsets index the normalized
string.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

# Sentence-final abbreviations that do not close a sentence. Matching is
# case-sensitive so "no." still terminates a sentence while "No. 3" does not.
DEFAULT_ABBREVIATIONS = frozenset(
    {"Dr", "Mr", "Mrs", "Ms", "St", "vs", "e.g", "i.e", "No", "Fig"}
)

TERMINATORS = frozenset(".!?")

# Vowel letters for the syllable heuristic; 'y' counts as a vowel.
VOWELS = frozenset("aeiouy")

# A word is a maximal run of letters/digits, optionally chained by single
# internal apostrophes or hyphens ("well-expanded", "patient's").
_WORD_RE = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*")


@dataclass(frozen=True)
class Token:
    """One word as matched in the source, with its span."""

    text: str
    start: int
    end: int


@dataclass(frozen=True)
class SentenceSpan:
    """Half-open [start, end) span of one sentence in the source."""

    start: int
    end: int


@dataclass(frozen=True)
class TokenStats:
    """The raw counts consumed by every readability formula."""

    words: int
    sentences: int
    syllables: int
    complex_words: int
    characters: int


def normalize(text: str) -> str:
    """Return the canonical composed (NFC) form of ``text``."""
    return unicodedata.normalize("NFC", text)


def _is_abbreviation(text: str, dot_index: int, abbreviations: frozenset[str]) -> bool:
    """True if the period at ``dot_index`` ends a known abbreviation."""
    j = dot_index
    while j > 0 and not text[j - 1].isspace():
        j -= 1
    candidate = text[j:dot_index]
    # Strip leading punctuation such as an opening parenthesis or quote.
    k = 0
    while k < len(candidate) and not candidate[k].isalnum():
        k += 1
    return candidate[k:] in abbreviations


def segment_sentences(
    text: str, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
) -> list[SentenceSpan]:
    """Split ``text`` into sentence spans.

    A terminator (. ! ?) followed by whitespace or end-of-text closes a
    sentence unless the preceding token is a known abbreviation. Nonempty
    text with no terminator yields a single span. Spans never include the
    surrounding whitespace.
    """
    text = normalize(text)
    n = len(text)
    spans: list[SentenceSpan] = []
    start: int | None = None
    for i, ch in enumerate(text):
        if start is None:
            if not ch.isspace():
                start = i
            continue
        if ch in TERMINATORS and (i + 1 == n or text[i + 1].isspace()):
            if ch == "." and _is_abbreviation(text, i, abbreviations):
                continue
            spans.append(SentenceSpan(start, i + 1))
            start = None
    if start is not None:
        end = n
        while end > start and text[end - 1].isspace():
            end -= 1
        spans.append(SentenceSpan(start, end))
    return spans


def tokenize_words(text: str) -> list[Token]:
    """Extract word tokens in source order.

    Tokens are maximal runs of letters/digits; a single internal apostrophe
    or hyphen may join two alphanumeric runs, so "well-expanded" is one
    token. Punctuation and whitespace never appear in a token.
    """
    text = normalize(text)
    return [Token(m.group(), m.start(), m.end()) for m in _WORD_RE.finditer(text)]


def _is_consonant(ch: str) -> bool:
    return ch.isalpha() and ch not in VOWELS


def count_syllables(word: str) -> int:
    """Heuristic syllable count for one word; always at least 1.

    Counts maximal vowel-letter runs (a, e, i, o, u, y, case-insensitive),
    subtracting one for a silent final consonant+'e' unless the word ends in
    consonant+'le' ("table" keeps its final syllable, "disease" loses one).

    Raises ValueError if the word contains no letters.
    """
    w = word.lower()
    if not any(c.isalpha() for c in w):
        raise ValueError(f"cannot count syllables of {word!r}: no letters")
    runs = 0
    prev_vowel = False
    for ch in w:
        is_vowel = ch in VOWELS
        if is_vowel and not prev_vowel:
            runs += 1
        prev_vowel = is_vowel
    if len(w) >= 2 and w.endswith("e") and _is_consonant(w[-2]):
        le_exception = len(w) >= 3 and w.endswith("le") and _is_consonant(w[-3])
        if not le_exception:
            runs -= 1
    return max(1, runs)


# Words at or above this syllable count are "complex" for the fog index.
COMPLEX_SYLLABLE_THRESHOLD = 3


def is_complex(word: str) -> bool:
    """True if the word meets the complex-word syllable threshold."""
    return count_syllables(word) >= COMPLEX_SYLLABLE_THRESHOLD


def text_stats(
    text: str, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
) -> TokenStats:
    """Aggregate word, sentence, syllable, complex-word, and character counts.

    Characters are letters and digits inside tokens only; punctuation and
    whitespace are excluded. A token with no letters (a bare number) counts
    as one syllable so that syllables never undercount words. Nonempty
    terminator-free text counts as one sentence; wordless text as zero.
    """
    text = normalize(text)
    tokens = tokenize_words(text)
    words = len(tokens)
    sentences = len(segment_sentences(text, abbreviations)) if words else 0
    syllables = 0
    complex_words = 0
    characters = 0
    for token in tokens:
        if any(c.isalpha() for c in token.text):
            s = count_syllables(token.text)
        else:
            s = 1
        syllables += s
        if s >= COMPLEX_SYLLABLE_THRESHOLD:
            complex_words += 1
        characters += sum(1 for c in token.text if c.isalnum())
    return TokenStats(
        words=words,
        sentences=sentences,
        syllables=syllables,
        complex_words=complex_words,
        characters=characters,
    )
