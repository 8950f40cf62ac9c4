"""
Sentence segmentation, token counts, and readability scores
===========================================================

Walks one radiology report through the text layer: split into sentences,
count tokens and syllables, then turn the counts into the three readability
scores with their school-level interpretations.
"""

from precise.readability import score_text
from precise.textseg import count_syllables, segment_sentences, text_stats, tokenize_words

REPORT = (
    "Cardiomegaly is present. The lungs are clear of consolidation. "
    "No pleural effusion is identified. Dr. Smith reviewed the images."
)

print("report:")
print(f"  {REPORT}\n")

# abbreviation-aware splitting: the period after "Dr" does not end a sentence
sentences = segment_sentences(REPORT)
print(f"{len(sentences)} sentences:")
for span in sentences:
    print(f"  [{span.start:3d}:{span.end:3d}] {REPORT[span.start:span.end]}")

words = tokenize_words(REPORT)
print(f"\n{len(words)} words; syllables for the first few:")
for token in words[:6]:
    print(f"  {token.text:<15} {count_syllables(token.text)}")

stats = text_stats(REPORT)
print(
    f"\ncounts: {stats.words} words, {stats.sentences} sentences, "
    f"{stats.syllables} syllables, {stats.complex_words} complex, "
    f"{stats.characters} characters"
)

scores = score_text(REPORT)
print("\nreadability:")
print(f"  FRE {scores.fre:8.3f} -> {scores.fre_band.school_level} ({scores.fre_band.difficulty})")
print(f"  GFI {scores.gfi:8.3f} -> {scores.gfi_grade.label}")
print(f"  ARI {scores.ari:8.3f} -> {scores.ari_grade.label}, ages {scores.ari_grade.ages}")
