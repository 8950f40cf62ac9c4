"""Blind grading studies over simplified-report pairs.

A study presents texts one at a time to each grader for a 0-2 score.
Understandability studies mix each pair's two texts into one seeded shuffle
and hide which arm a text came from until the study completes; reliability
studies show the generated summary beside its source report. Every state
change is an event appended (and fsynced) to a jsonl log, which is the only
persistence: restart recovery is a replay of that log.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from random import Random
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .simplify import SimplifiedPair
from .stats import cohens_kappa, mann_whitney_u, percent_agreement

logger = logging.getLogger(__name__)

ARM_ORIGINAL = "original"
ARM_GENERATED = "generated"
VALID_SCORES = (0, 1, 2)

_ITEM_ID_BITS = 48


class GradingError(Exception):
    """Base class; ``status`` mirrors the HTTP mapping used by the service."""

    status = 400


class UnknownStudyError(GradingError):
    status = 404


class UnknownTokenError(GradingError):
    status = 403


class UnknownItemError(GradingError):
    status = 404


class InvalidScoreError(GradingError):
    status = 422


class DuplicateScoreError(GradingError):
    status = 409

    def __init__(self, message: str, prior_sequence: int):
        super().__init__(message)
        self.prior_sequence = prior_sequence


class BlindingError(GradingError):
    """Results were requested on an open study without reveal authorization."""

    status = 403


@dataclass(frozen=True)
class Rubric:
    kind: str  # "reliability" or "understandability"
    labels: Tuple[Tuple[int, str, str], ...]  # (score, label, description)

    def label_for(self, score: int) -> str:
        for s, label, _ in self.labels:
            if s == score:
                return label
        raise KeyError(score)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "labels": [
                {"score": s, "label": label, "description": desc}
                for s, label, desc in self.labels
            ],
        }


RELIABILITY_RUBRIC = Rubric(
    kind="reliability",
    labels=(
        (0, "Unreliable", "The summary contradicts or omits findings of the source report."),
        (1, "Inconsistent", "The summary partly matches the source report but has gaps or errors."),
        (2, "Appropriate", "The summary faithfully conveys the source report's findings."),
    ),
)

UNDERSTANDABILITY_RUBRIC = Rubric(
    kind="understandability",
    labels=(
        (0, "Not understandable", "A lay reader cannot follow what the text says."),
        # middle label is ours; the source scale names only the endpoints
        (1, "Partially understandable", "A lay reader follows some of the text but not all of it."),
        (2, "Fully understandable", "A lay reader can follow the whole text."),
    ),
)

RUBRICS = {r.kind: r for r in (RELIABILITY_RUBRIC, UNDERSTANDABILITY_RUBRIC)}


def rubric_by_kind(kind: str) -> Rubric:
    try:
        return RUBRICS[kind]
    except KeyError:
        raise ValueError(f"unknown rubric kind {kind!r}") from None


@dataclass(frozen=True)
class StudyItem:
    item_id: str
    text: str
    hidden_arm: str
    pair_ref: str
    companion_text: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "text": self.text,
            "hidden_arm": self.hidden_arm,
            "pair_ref": self.pair_ref,
            "companion_text": self.companion_text,
        }


@dataclass(frozen=True)
class Study:
    study_id: str
    rubric: Rubric
    items: Tuple[StudyItem, ...]
    grader_tokens: Tuple[str, ...]
    seed: int
    created_at: str
    reveal_key: str


@dataclass(frozen=True)
class ScoreEvent:
    study_id: str
    grader_token: str
    item_id: str
    score: int
    submitted_at: str
    sequence_number: int

    def as_dict(self) -> dict:
        return {
            "study_id": self.study_id,
            "grader_token": self.grader_token,
            "item_id": self.item_id,
            "score": self.score,
            "submitted_at": self.submitted_at,
            "sequence_number": self.sequence_number,
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _draw_item_ids(rng: Random, count: int) -> List[str]:
    ids: List[str] = []
    seen = set()
    while len(ids) < count:
        candidate = f"{rng.getrandbits(_ITEM_ID_BITS):012x}"
        if candidate not in seen:
            seen.add(candidate)
            ids.append(candidate)
    return ids


def build_study(
    pairs: Sequence[SimplifiedPair],
    rubric: Rubric,
    grader_tokens: Sequence[str],
    seed: int,
    study_id: Optional[str] = None,
) -> Study:
    """Construct a study deterministically from (pairs, seed).

    Understandability interleaves both texts of every pair into one shuffled
    sequence; reliability keeps corpus order and attaches the source report as
    companion text. Item ids and the reveal key come from the same seeded
    generator, drawn after the shuffle so ids carry no arm information.
    """
    if not pairs:
        raise ValueError("a study requires at least one pair")
    tokens = tuple(grader_tokens)
    if not tokens:
        raise ValueError("a study requires at least one grader token")
    if len(set(tokens)) != len(tokens):
        raise ValueError("grader tokens must be unique")
    seen_refs = set()
    for p in pairs:
        if p.report_id in seen_refs:
            raise ValueError(f"duplicate report_id in pairs: {p.report_id!r}")
        seen_refs.add(p.report_id)

    rng = Random(seed)
    if rubric.kind == "understandability":
        raw: List[Tuple[str, str, str, Optional[str]]] = []
        for p in pairs:
            raw.append((p.original_text, ARM_ORIGINAL, p.report_id, None))
            raw.append((p.generated_text, ARM_GENERATED, p.report_id, None))
        rng.shuffle(raw)
    elif rubric.kind == "reliability":
        raw = [(p.generated_text, ARM_GENERATED, p.report_id, p.original_text) for p in pairs]
    else:
        raise ValueError(f"unknown rubric kind {rubric.kind!r}")

    ids = _draw_item_ids(rng, len(raw))
    items = tuple(
        StudyItem(item_id=i, text=t, hidden_arm=arm, pair_ref=ref, companion_text=comp)
        for i, (t, arm, ref, comp) in zip(ids, raw)
    )
    reveal_key = f"{rng.getrandbits(64):016x}"
    return Study(
        study_id=study_id or str(uuid.uuid4()),
        rubric=rubric,
        items=items,
        grader_tokens=tokens,
        seed=seed,
        created_at=_now(),
        reveal_key=reveal_key,
    )


class StudyState:
    """A study plus its accumulated score events."""

    def __init__(self, study: Study):
        self.study = study
        self.scores: Dict[Tuple[str, str], ScoreEvent] = {}
        self._item_index = {item.item_id: i for i, item in enumerate(study.items)}

    @property
    def total_cells(self) -> int:
        return len(self.study.items) * len(self.study.grader_tokens)

    @property
    def state(self) -> str:
        return "complete" if len(self.scores) == self.total_cells else "open"

    def item(self, item_id: str) -> StudyItem:
        try:
            return self.study.items[self._item_index[item_id]]
        except KeyError:
            raise UnknownItemError(f"no item {item_id!r} in study {self.study.study_id}") from None

    def scored_by(self, token: str) -> int:
        return sum(1 for (t, _), _e in self.scores.items() if t == token)

    def next_unscored(self, token: str) -> Optional[StudyItem]:
        for item in self.study.items:
            if (token, item.item_id) not in self.scores:
                return item
        return None


def blinded_item_view(state: StudyState, item: StudyItem, token: str) -> dict:
    """The only item serialization graders see while a study is open."""
    view = {
        "item_id": item.item_id,
        "text": item.text,
        "position": state.scored_by(token) + 1,
        "total": len(state.study.items),
    }
    if item.companion_text is not None:
        view["companion_text"] = item.companion_text
    return view


class EventLog:
    """Append-only jsonl log, fsynced per append."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._fh = open(self.path, "a", encoding="utf-8")

    def append(self, event: dict) -> None:
        self._fh.write(json.dumps(event) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()


def _study_from_event(record: dict) -> Study:
    items = tuple(
        StudyItem(
            item_id=i["item_id"],
            text=i["text"],
            hidden_arm=i["hidden_arm"],
            pair_ref=i["pair_ref"],
            companion_text=i.get("companion_text"),
        )
        for i in record["items"]
    )
    return Study(
        study_id=record["study_id"],
        rubric=rubric_by_kind(record["rubric"]),
        items=items,
        grader_tokens=tuple(record["grader_tokens"]),
        seed=record["seed"],
        created_at=record["created_at"],
        reveal_key=record["reveal_key"],
    )


def _study_to_event(study: Study) -> dict:
    return {
        "type": "create_study",
        "study_id": study.study_id,
        "rubric": study.rubric.kind,
        "items": [i.as_dict() for i in study.items],
        "grader_tokens": list(study.grader_tokens),
        "seed": study.seed,
        "created_at": study.created_at,
        "reveal_key": study.reveal_key,
    }


def replay_log(path: Union[str, Path]) -> Dict[str, StudyState]:
    """Rebuild study states by folding the event log.

    A corrupt line ends the replay: everything before it is recovered and a
    warning names the offending line number.
    """
    states: Dict[str, StudyState] = {}
    log_path = Path(path)
    if not log_path.exists():
        return states
    with open(log_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                event = json.loads(line)
                etype = event["type"]
                if etype == "create_study":
                    study = _study_from_event(event)
                    states[study.study_id] = StudyState(study)
                elif etype == "score":
                    state = states[event["study_id"]]
                    ev = ScoreEvent(
                        study_id=event["study_id"],
                        grader_token=event["grader_token"],
                        item_id=event["item_id"],
                        score=int(event["score"]),
                        submitted_at=event["submitted_at"],
                        sequence_number=int(event["sequence_number"]),
                    )
                    state.scores[(ev.grader_token, ev.item_id)] = ev
                elif etype == "reveal_access":
                    pass  # audit record; no state change
                else:
                    raise ValueError(f"unknown event type {etype!r}")
            except (ValueError, KeyError, TypeError) as exc:
                logger.warning(
                    "event log %s corrupt at line %d (%s); recovered %d prior line(s)",
                    log_path, lineno, exc, lineno - 1,
                )
                break
    return states


class GradingStore:
    """In-memory study states backed by the append-only event log.

    All mutations take the store lock, so duplicate checks, sequence-number
    assignment, and the durable append happen atomically.
    """

    def __init__(self, log_path: Union[str, Path]):
        self._states = replay_log(log_path)
        self._log = EventLog(log_path)
        self._lock = threading.RLock()

    def close(self) -> None:
        self._log.close()

    @property
    def study_ids(self) -> List[str]:
        with self._lock:
            return list(self._states)

    def _state(self, study_id: str) -> StudyState:
        try:
            return self._states[study_id]
        except KeyError:
            raise UnknownStudyError(f"no study {study_id!r}") from None

    def create_study(
        self,
        pairs: Sequence[SimplifiedPair],
        rubric: Rubric,
        grader_tokens: Sequence[str],
        seed: int,
    ) -> Study:
        study = build_study(pairs, rubric, grader_tokens, seed)
        with self._lock:
            self._log.append(_study_to_event(study))
            self._states[study.study_id] = StudyState(study)
        return study

    def get_study(self, study_id: str) -> StudyState:
        with self._lock:
            return self._state(study_id)

    def _require_token(self, state: StudyState, token: str) -> None:
        if token not in state.study.grader_tokens:
            raise UnknownTokenError(f"token not recognized for study {state.study.study_id}")

    def next_item(self, study_id: str, token: str) -> Optional[dict]:
        with self._lock:
            state = self._state(study_id)
            self._require_token(state, token)
            item = state.next_unscored(token)
            if item is None:
                return None
            return blinded_item_view(state, item, token)

    def submit_score(self, study_id: str, token: str, item_id: str, score: int) -> ScoreEvent:
        with self._lock:
            state = self._state(study_id)
            self._require_token(state, token)
            item = state.item(item_id)
            if not isinstance(score, int) or isinstance(score, bool) or score not in VALID_SCORES:
                raise InvalidScoreError(f"score must be one of {VALID_SCORES}, got {score!r}")
            key = (token, item.item_id)
            if key in state.scores:
                prior = state.scores[key]
                raise DuplicateScoreError(
                    f"item {item_id} already scored by this grader "
                    f"(event {prior.sequence_number})",
                    prior_sequence=prior.sequence_number,
                )
            event = ScoreEvent(
                study_id=study_id,
                grader_token=token,
                item_id=item.item_id,
                score=score,
                submitted_at=_now(),
                sequence_number=len(state.scores) + 1,
            )
            self._log.append({"type": "score", **event.as_dict()})
            state.scores[key] = event
            return event

    def progress(self, study_id: str) -> dict:
        with self._lock:
            state = self._state(study_id)
            per_grader = {}
            for i, token in enumerate(state.study.grader_tokens, start=1):
                per_grader[f"grader_{i}"] = {
                    "scored": state.scored_by(token),
                    "total": len(state.study.items),
                }
            return {
                "study_id": study_id,
                "state": state.state,
                "scored": len(state.scores),
                "total": state.total_cells,
                "per_grader": per_grader,
            }

    def results(self, study_id: str, reveal: Optional[str] = None) -> dict:
        with self._lock:
            state = self._state(study_id)
            if state.state != "complete":
                if reveal is None or reveal != state.study.reveal_key:
                    raise BlindingError(
                        "results are sealed until every grader scores every item"
                    )
                self._log.append(
                    {"type": "reveal_access", "study_id": study_id, "at": _now()}
                )
            return study_results(state)


def study_results(state: StudyState) -> dict:
    """Assemble the full post-study bundle: per-arm score distributions,
    pairwise grader agreement, the arm-comparison rank test, and the raw
    item-by-grader grid."""
    study = state.study
    graders = study.grader_tokens
    labels = [f"grader_{i}" for i in range(1, len(graders) + 1)]

    # per-arm distributions over every (grader, item) score
    arms: Dict[str, Dict[str, object]] = {}
    arm_scores: Dict[str, List[int]] = {}
    for item in study.items:
        for token in graders:
            event = state.scores.get((token, item.item_id))
            if event is None:
                continue
            bucket = arms.setdefault(
                item.hidden_arm,
                {"counts": {str(s): 0 for s in VALID_SCORES}, "total": 0},
            )
            bucket["counts"][str(event.score)] += 1
            bucket["total"] += 1
            arm_scores.setdefault(item.hidden_arm, []).append(event.score)
    for arm, bucket in arms.items():
        total = bucket["total"]
        bucket["mean"] = sum(arm_scores[arm]) / total if total else None
        bucket["fractions"] = {
            s: bucket["counts"][s] / total if total else 0.0 for s in bucket["counts"]
        }

    # grader-pair agreement over items both graders scored
    n = len(graders)
    percent_matrix = [[1.0] * n for _ in range(n)]
    kappa_matrix: List[List[Optional[float]]] = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            r1, r2 = [], []
            for item in study.items:
                e1 = state.scores.get((graders[i], item.item_id))
                e2 = state.scores.get((graders[j], item.item_id))
                if e1 is not None and e2 is not None:
                    r1.append(e1.score)
                    r2.append(e2.score)
            if r1:
                agreement = cohens_kappa(r1, r2, VALID_SCORES)
                percent_matrix[i][j] = percent_matrix[j][i] = agreement.percent_agreement
                kappa_matrix[i][j] = kappa_matrix[j][i] = agreement.kappa

    mw = None
    if ARM_ORIGINAL in arm_scores and ARM_GENERATED in arm_scores:
        mw = mann_whitney_u(
            arm_scores[ARM_ORIGINAL], arm_scores[ARM_GENERATED], mode="auto"
        ).as_dict()

    grid = []
    for item in study.items:
        row = {
            "item_id": item.item_id,
            "pair_ref": item.pair_ref,
            "arm": item.hidden_arm,
            "scores": {},
        }
        for label, token in zip(labels, graders):
            event = state.scores.get((token, item.item_id))
            row["scores"][label] = event.score if event else None
        grid.append(row)

    return {
        "study_id": study.study_id,
        "rubric": study.rubric.as_dict(),
        "state": state.state,
        "n_items": len(study.items),
        "n_graders": n,
        "graders": labels,
        "arms": arms,
        "agreement": {"percent": percent_matrix, "kappa": kappa_matrix},
        "mann_whitney": mw,
        "grid": grid,
        "score_count": len(state.scores),
    }
