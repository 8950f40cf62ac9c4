"""Readability metrics and their grade-band tables.

Three classical scores computed from token statistics: Flesch Reading Ease
(higher = easier), Gunning Fog Index (years of schooling), and the Automated
Readability Index (US grade level). Raw scores map onto the conventional
interpretation tables; out-of-range scores clamp to the nearest band and are
flagged rather than rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .textseg import TokenStats, text_stats


class UndefinedMetricError(ValueError):
    """A readability formula was asked to divide by zero words or sentences."""


@dataclass(frozen=True)
class FreBand:
    school_level: str
    difficulty: str
    out_of_range: bool = False


@dataclass(frozen=True)
class GfiGrade:
    label: str
    clamped: bool = False


@dataclass(frozen=True)
class AriGrade:
    label: str
    ages: str
    clamped: bool = False


@dataclass(frozen=True)
class ReadabilityScores:
    fre: float
    gfi: float
    ari: float
    fre_band: FreBand
    gfi_grade: GfiGrade
    ari_grade: AriGrade


# Flesch Reading Ease interpretation, ordered easiest first. Adjacent rows
# share printed endpoints; lookup is half-open [lower, upper) with 100
# closed into the top band.
FRE_BANDS: tuple[tuple[float, float, str, str], ...] = (
    (90.0, 100.0, "Fifth Grade", "Easily understood by 11yo"),
    (80.0, 90.0, "Sixth Grade", "Easy and conversational"),
    (70.0, 80.0, "Seventh Grade", "Fairly easy"),
    (60.0, 70.0, "Eighth/Ninth Grade", "Plain english, easy for 13-15yo"),
    (50.0, 60.0, "Tenth/Twelfth Grade", "Fairly difficult"),
    (30.0, 50.0, "College", "Difficult"),
    (10.0, 30.0, "College Graduate", "Very difficult"),
    (0.0, 10.0, "Professional", "Extremely difficult"),
)

# Gunning Fog Index is integer-keyed; the raw index rounds to nearest
# (half away from zero) and clamps into the table's range.
GFI_GRADES: dict[int, str] = {
    17: "College Graduate",
    16: "College Senior",
    15: "College Junior",
    14: "College Sophomore",
    13: "College Freshman",
    12: "Twelfth Grade",
    11: "Eleventh Grade",
    10: "Tenth Grade",
    9: "Ninth Grade",
    8: "Eighth Grade",
    7: "Seventh Grade",
    6: "Sixth Grade",
}

# ARI takes the ceiling of the raw index and clamps into 1..14.
ARI_GRADES: dict[int, tuple[str, str]] = {
    1: ("Kindergarten", "5-6"),
    2: ("First/Second Grade", "6-7"),
    3: ("Third Grade", "7-9"),
    4: ("Fourth Grade", "9-10"),
    5: ("Fifth Grade", "10-11"),
    6: ("Sixth Grade", "11-12"),
    7: ("Seventh Grade", "12-13"),
    8: ("Eighth Grade", "13-14"),
    9: ("Ninth Grade", "14-15"),
    10: ("Tenth Grade", "15-16"),
    11: ("Eleventh Grade", "16-17"),
    12: ("Twelfth Grade", "17-18"),
    13: ("College Student", "18-24"),
    14: ("Professor", "24+"),
}


def _require_scorable(stats: TokenStats) -> None:
    if stats.words < 1 or stats.sentences < 1:
        raise UndefinedMetricError(
            f"readability undefined for {stats.words} words / "
            f"{stats.sentences} sentences"
        )


def flesch_reading_ease(stats: TokenStats) -> float:
    """206.835 - 1.015 * (words/sentences) - 84.6 * (syllables/words)."""
    _require_scorable(stats)
    return (
        206.835
        - 1.015 * (stats.words / stats.sentences)
        - 84.6 * (stats.syllables / stats.words)
    )


def gunning_fog(stats: TokenStats) -> float:
    """0.4 * [words/sentences + 100 * (complex words / words)]."""
    _require_scorable(stats)
    return 0.4 * (
        stats.words / stats.sentences
        + 100.0 * (stats.complex_words / stats.words)
    )


def ari(stats: TokenStats) -> float:
    """4.71 * (characters/words) + 0.5 * (words/sentences) - 21.43."""
    _require_scorable(stats)
    return (
        4.71 * (stats.characters / stats.words)
        + 0.5 * (stats.words / stats.sentences)
        - 21.43
    )


def fre_band(score: float) -> FreBand:
    """Map a Flesch score to its school level and difficulty labels.

    Scores above 100 map to the top band and scores below 0 to the bottom
    band, flagged out-of-range.
    """
    if score > 100.0:
        lower, upper, level, difficulty = FRE_BANDS[0]
        return FreBand(level, difficulty, out_of_range=True)
    if score < 0.0:
        lower, upper, level, difficulty = FRE_BANDS[-1]
        return FreBand(level, difficulty, out_of_range=True)
    for lower, upper, level, difficulty in FRE_BANDS:
        if lower <= score < upper or (upper == 100.0 and score == 100.0):
            return FreBand(level, difficulty)
    raise AssertionError(f"no band for {score!r}")  # bands partition [0, 100]


def gfi_grade(index: float) -> GfiGrade:
    """Round a fog index to the nearest integer and look up its grade."""
    nearest = math.floor(index + 0.5)
    clamped = min(max(nearest, 6), 17)
    return GfiGrade(GFI_GRADES[clamped], clamped=clamped != nearest)


def ari_grade(index: float) -> AriGrade:
    """Take the ceiling of a raw ARI and look up its grade and age range."""
    ceiling = math.ceil(index)
    clamped = min(max(ceiling, 1), 14)
    label, ages = ARI_GRADES[clamped]
    return AriGrade(label, ages, clamped=clamped != ceiling)


def score_stats(stats: TokenStats) -> ReadabilityScores:
    """Compute all three metrics and their band labels from counts."""
    fre_value = flesch_reading_ease(stats)
    gfi_value = gunning_fog(stats)
    ari_value = ari(stats)
    return ReadabilityScores(
        fre=fre_value,
        gfi=gfi_value,
        ari=ari_value,
        fre_band=fre_band(fre_value),
        gfi_grade=gfi_grade(gfi_value),
        ari_grade=ari_grade(ari_value),
    )


def score_text(text: str) -> ReadabilityScores:
    """Segment ``text`` and compute all three metrics with band labels."""
    stats = text_stats(text)
    if stats.words < 1:
        raise UndefinedMetricError("cannot score text with no words")
    return score_stats(stats)
