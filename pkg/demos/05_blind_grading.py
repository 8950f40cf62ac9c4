"""
A blind grading study end to end
================================

Creates an understandability study over three report pairs, plays two
graders who only ever see blinded item views, and prints the unsealed
results. The event log written along the way is the single source of truth:
a second store replaying it reconstructs the same state.
"""

import tempfile
from pathlib import Path

from precise.grading import UNDERSTANDABILITY_RUBRIC, GradingStore
from precise.ingest import Report
from precise.simplify import MockBackend, simplify_one

REPORTS = [
    ("rpt-1", "Cardiomegaly is present. The lungs are clear of consolidation."),
    ("rpt-2", "Small bilateral pleural effusions are noted with atelectasis."),
    ("rpt-3", "No acute osseous abnormality. Degenerative changes are seen."),
]

workdir = Path(tempfile.mkdtemp(prefix="grading-demo-"))
log_path = workdir / "events.jsonl"

backend = MockBackend()
pairs = [simplify_one(Report(id=rid, text=text, source="demo"), backend) for rid, text in REPORTS]

store = GradingStore(log_path)
study = store.create_study(pairs, UNDERSTANDABILITY_RUBRIC, ["alice-token", "bob-token"], seed=7)
print(f"study {study.study_id}: {len(study.items)} blinded items, log at {log_path}\n")

# each grader walks their queue; the view never names the arm
for token in ("alice-token", "bob-token"):
    while True:
        view = store.next_item(study.study_id, token)
        if view is None:
            break
        score = 2 if view["text"].startswith("Your chest X-ray") else 1
        store.submit_score(study.study_id, token, view["item_id"], score)
        print(f"  {token[:5]} scored item {view['item_id']} ({view['position']}/{view['total']})")

progress = store.progress(study.study_id)
print(f"\nstate: {progress['state']} ({progress['scored']}/{progress['total']} cells)")

results = store.results(study.study_id)  # unsealed only once every cell is in
for arm in ("original", "generated"):
    info = results["arms"][arm]
    print(f"  {arm:<10} mean {info['mean']:.2f}  counts {info['counts']}")
print(f"  kappa between graders: {results['agreement']['kappa'][0][1]}")
print(f"  mann-whitney p: {results['mann_whitney']['p_value']:.6f}")

# durability: replaying the log from disk yields the same progress
replayed = GradingStore(log_path)
assert replayed.progress(study.study_id) == progress
print("\nreplay from the event log reproduced the state")
