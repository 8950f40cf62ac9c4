"""
Deterministic mock simplification
=================================

The mock backend stands in for a remote language model in offline runs. It
rewrites jargon through a fixed glossary, splits long sentences at a
coordinating conjunction, and prefixes a framing phrase, so its output is
reproducible byte for byte.
"""

from precise.ingest import Report
from precise.readability import score_text
from precise.simplify import MockBackend, build_prompt, simplify_one

REPORT = Report(
    id="demo-1",
    text=(
        "Cardiomegaly is present with a small pleural effusion, and there is "
        "bibasilar atelectasis without focal consolidation in either lung today."
    ),
    source="demo",
)

# the exact prompt an HTTP backend would send for the same report
print("prompt sent to a real model:")
print(build_prompt(REPORT.text))
print()

pair = simplify_one(REPORT, MockBackend())
print("mock rewrite:")
print(f"  {pair.generated_text}\n")

before = score_text(pair.original_text)
after = score_text(pair.generated_text)
print("readability before -> after:")
print(f"  FRE {before.fre:7.2f} -> {after.fre:7.2f}  (higher is easier)")
print(f"  GFI {before.gfi:7.2f} -> {after.gfi:7.2f}  (lower is easier)")
print(f"  ARI {before.ari:7.2f} -> {after.ari:7.2f}  (lower is easier)")
