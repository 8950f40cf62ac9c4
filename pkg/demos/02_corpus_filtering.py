"""
Filtering a report corpus before simplification
===============================================

Loads the bundled 60-report fixture corpus, drops the unusable entries, and
shows which rule rejected each one. Rules run in a fixed order per report:
empty text, then invalid characters, then too few words.
"""

from pathlib import Path

from precise.ingest import filter_reports, load_reports

corpus_path = Path(__file__).resolve().parent.parent / "fixtures" / "filter_corpus.csv"
reports = load_reports(corpus_path)
print(f"loaded {len(reports)} reports from {corpus_path.name}")

outcome = filter_reports(reports, min_words=5)
print(f"kept {len(outcome.kept)}, rejected {len(outcome.rejected)}\n")

print("rejections:")
for rejection in outcome.rejected:
    preview = rejection.report.text[:40].replace("\n", " ")
    print(f"  {rejection.report.id:<14} {rejection.reason:<14} {preview!r}")

# kept reports stay in corpus order, ready for the simplification stage
print("\nfirst three kept:")
for report in outcome.kept[:3]:
    print(f"  {report.id}: {report.text[:60]}...")
