"""Report simplification through a pluggable backend.

Two backends ship: an HTTP chat-completions client with retries and a
client-side rate cap, and a deterministic offline mock that rewrites jargon
through a fixed glossary. Batches persist one pair per jsonl line and can
resume, skipping ids already on disk.
"""

from __future__ import annotations

import json
import os
import random
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Protocol, Sequence, Tuple, Union

from .ingest import Report
from .textseg import segment_sentences, tokenize_words

PROMPT_INSTRUCTION = (
    "Generate a paragraph summarizing the radiology report text at a "
    "6th-grade level and in a patient-friendly manner."
)

MOCK_PREFIX = "Your chest X-ray shows: "
SENTENCE_SPLIT_WORD_LIMIT = 15
SPLIT_MIN_CONJUNCTION_INDEX = 8  # 0-based token index of the earliest split point
COORDINATING_CONJUNCTIONS = frozenset(["and", "but", "or", "nor", "for", "so", "yet"])

ENV_API_KEY = "PRECISE_API_KEY"
ENV_API_URL = "PRECISE_API_URL"
ENV_MODEL = "PRECISE_MODEL"

# Jargon glossary for the offline mock: term -> plain-language phrase.
# Multi-word terms listed here win over their substrings via longest-first matching.
MOCK_GLOSSARY = {
    "pleural effusion": "fluid around the lungs",
    "pleural effusions": "fluid around the lungs",
    "cardiac silhouette": "outline of the heart",
    "cardiomediastinal silhouette": "outline of the heart and middle chest",
    "degenerative changes": "wear-and-tear changes",
    "costophrenic angle": "corner where the ribs meet the diaphragm",
    "costophrenic angles": "corners where the ribs meet the diaphragm",
    "cardiomegaly": "an enlarged heart",
    "pneumothorax": "a collapsed lung",
    "atelectasis": "partial collapse of lung tissue",
    "consolidation": "a filled-in area of the lung",
    "opacity": "a cloudy area",
    "opacities": "cloudy areas",
    "infiltrate": "a hazy spot that may be infection",
    "infiltrates": "hazy spots that may be infection",
    "edema": "swelling from extra fluid",
    "effusion": "a fluid buildup",
    "effusions": "fluid buildups",
    "mediastinum": "the space between the lungs",
    "mediastinal": "middle-chest",
    "hilar": "near the lung roots",
    "bibasilar": "at the bottom of both lungs",
    "bilateral": "on both sides",
    "apical": "at the top of the lung",
    "pulmonary": "lung",
    "vasculature": "blood vessels",
    "vascularity": "blood vessel pattern",
    "interstitial": "within the lung's supporting tissue",
    "parenchymal": "lung-tissue",
    "granuloma": "a small healed scar nodule",
    "granulomas": "small healed scar nodules",
    "calcified": "hardened with calcium",
    "calcification": "a calcium deposit",
    "osseous": "bone",
    "thoracic": "chest",
    "hemidiaphragm": "one side of the breathing muscle",
    "pneumonia": "a lung infection",
    "emphysema": "lung damage that traps air",
    "hyperinflated": "over-expanded",
    "hyperinflation": "over-expansion of the lungs",
    "scoliosis": "a curved spine",
    "spondylosis": "wear of the spine joints",
    "lesion": "an abnormal spot",
    "nodule": "a small lump",
    "nodules": "small lumps",
}

_GLOSSARY_RE = re.compile(
    r"\b(?:" + "|".join(re.escape(term) for term in sorted(MOCK_GLOSSARY, key=len, reverse=True)) + r")\b",
    re.IGNORECASE,
)


class BackendError(RuntimeError):
    """Base for failures raised by a simplifier backend."""


class BackendUnavailableError(BackendError):
    """Transport or server failure persisted past the retry budget."""


class EmptyGenerationError(BackendError):
    """The backend returned an empty completion twice in a row."""


class SimplifyError(RuntimeError):
    """A per-report failure; carries the report id for batch accounting."""

    def __init__(self, report_id: str, message: str):
        super().__init__(f"report {report_id}: {message}")
        self.report_id = report_id


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"  # "http-chat" or "mock"
    endpoint: str = ""
    model: str = "mock"
    timeout: float = 60.0
    max_retries: int = 3
    retry_backoff: float = 1.0
    requests_per_minute: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("http-chat", "mock"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.timeout <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout}")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    attempts: int


@dataclass(frozen=True)
class SimplifiedPair:
    report_id: str
    original_text: str
    generated_text: str
    backend_id: str
    model_id: str
    created_at: str
    attempt_count: int

    def as_dict(self) -> dict:
        return {
            "report_id": self.report_id,
            "original_text": self.original_text,
            "generated_text": self.generated_text,
            "backend_id": self.backend_id,
            "model_id": self.model_id,
            "created_at": self.created_at,
            "attempt_count": self.attempt_count,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "SimplifiedPair":
        return cls(
            report_id=record["report_id"],
            original_text=record["original_text"],
            generated_text=record["generated_text"],
            backend_id=record["backend_id"],
            model_id=record["model_id"],
            created_at=record["created_at"],
            attempt_count=record["attempt_count"],
        )


class Backend(Protocol):
    backend_id: str
    model_id: str

    def complete(self, prompt: str) -> CompletionResult: ...


def build_prompt(report: Union[Report, str]) -> str:
    """Instruction, blank line, then the verbatim report text."""
    text = report.text if isinstance(report, Report) else report
    if not text.strip():
        raise ValueError("cannot build a prompt for an empty report")
    return PROMPT_INSTRUCTION + "\n\n" + text


def _apply_glossary(text: str) -> str:
    return _GLOSSARY_RE.sub(lambda m: MOCK_GLOSSARY[m.group(0).lower()], text)


def _split_long_sentence(sentence: str) -> Optional[Tuple[str, str]]:
    tokens = tokenize_words(sentence)
    if len(tokens) <= SENTENCE_SPLIT_WORD_LIMIT:
        return None
    for idx, tok in enumerate(tokens):
        if idx >= SPLIT_MIN_CONJUNCTION_INDEX and tok.text.lower() in COORDINATING_CONJUNCTIONS:
            head = sentence[: tok.start].rstrip()
            if head.endswith(","):
                head = head[:-1]
            tail = sentence[tok.start :]
            return head + ".", tail[0].upper() + tail[1:]
    return None


def mock_simplify(text: str) -> str:
    """Deterministic offline rewrite: glossary substitution, long-sentence
    splitting at a coordinating conjunction, and a fixed patient-facing prefix."""
    if not text.strip():
        raise ValueError("mock_simplify requires nonempty text")
    substituted = _apply_glossary(text)
    sentences = [substituted[s.start : s.end] for s in segment_sentences(substituted)]
    out: List[str] = []
    queue = list(reversed(sentences))
    while queue:
        sentence = queue.pop()
        split = _split_long_sentence(sentence)
        if split is None:
            out.append(sentence)
        else:
            # re-examine both halves; the tail may still run long
            queue.append(split[1])
            queue.append(split[0])
    return MOCK_PREFIX + " ".join(out)


class MockBackend:
    """Offline stand-in for the hosted model; pure and reentrant."""

    backend_id = "mock"
    model_id = "mock"

    def complete(self, prompt: str) -> CompletionResult:
        marker = PROMPT_INSTRUCTION + "\n\n"
        text = prompt[len(marker) :] if prompt.startswith(marker) else prompt
        return CompletionResult(text=mock_simplify(text), attempts=1)


class RateLimiter:
    """Token bucket capped at ``per_minute`` requests; thread-safe."""

    def __init__(self, per_minute: int, clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        if per_minute < 1:
            raise ValueError(f"per_minute must be >= 1, got {per_minute}")
        self._rate = per_minute / 60.0
        self._capacity = float(per_minute)
        self._tokens = float(per_minute)
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self._capacity, self._tokens + (now - self._last) * self._rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self._rate
            self._sleep(wait)


class HttpChatBackend:
    """Chat-completions client: single user message, temperature pinned to 0.

    The bearer token is read from the environment at request time and never
    stored on the instance, echoed into errors, or written anywhere.
    """

    backend_id = "http-chat"

    def __init__(
        self,
        config: BackendConfig,
        session=None,
        sleep: Callable[[float], None] = time.sleep,
        rng: Optional[random.Random] = None,
        rate_limiter: Optional[RateLimiter] = None,
    ):
        if config.kind != "http-chat":
            raise ValueError(f"HttpChatBackend requires kind 'http-chat', got {config.kind!r}")
        if not config.endpoint:
            raise ValueError("http-chat backend requires an endpoint url")
        self.config = config
        self.model_id = config.model
        self._sleep = sleep
        self._rng = rng or random.Random()
        if session is None:
            import requests

            session = requests.Session()
        self._session = session
        if rate_limiter is None and config.requests_per_minute:
            rate_limiter = RateLimiter(config.requests_per_minute)
        self._rate_limiter = rate_limiter

    def _post_once(self, body: dict):
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(ENV_API_KEY)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        if self._rate_limiter is not None:
            self._rate_limiter.acquire()
        return self._session.post(
            self.config.endpoint, json=body, headers=headers, timeout=self.config.timeout
        )

    def _backoff(self, attempt: int) -> None:
        base = self.config.retry_backoff * (2 ** (attempt - 1))
        self._sleep(base + self._rng.uniform(0.0, base / 2.0))

    def complete(self, prompt: str) -> CompletionResult:
        import requests

        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        attempts = 0
        empty_retried = False
        last_failure = "no request issued"
        while attempts < self.config.max_retries + 1:
            attempts += 1
            try:
                response = self._post_once(body)
            except requests.RequestException as exc:
                last_failure = f"transport error: {type(exc).__name__}"
                if attempts < self.config.max_retries + 1:
                    self._backoff(attempts)
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_failure = f"http {response.status_code}"
                if attempts < self.config.max_retries + 1:
                    self._backoff(attempts)
                continue
            if response.status_code != 200:
                raise BackendUnavailableError(
                    f"http {response.status_code} from completion endpoint"
                )
            try:
                payload = response.json()
                text = payload["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError):
                raise BackendUnavailableError("malformed completion response body")
            if text and text.strip():
                return CompletionResult(text=text, attempts=attempts)
            # empty generation gets exactly one extra attempt
            if empty_retried:
                raise EmptyGenerationError(f"empty completion after {attempts} attempts")
            empty_retried = True
            last_failure = "empty completion"
        raise BackendUnavailableError(
            f"giving up after {attempts} attempts (last failure: {last_failure})"
        )


def make_backend(config: BackendConfig) -> Backend:
    if config.kind == "mock":
        return MockBackend()
    return HttpChatBackend(config)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def simplify_one(report: Report, backend: Backend) -> SimplifiedPair:
    """Run one report through the backend; wraps failures with the report id."""
    try:
        prompt = build_prompt(report)
        result = backend.complete(prompt)
    except (BackendError, ValueError) as exc:
        raise SimplifyError(report.id, str(exc)) from exc
    if not result.text.strip():
        raise SimplifyError(report.id, "backend returned empty text")
    return SimplifiedPair(
        report_id=report.id,
        original_text=report.text,
        generated_text=result.text,
        backend_id=backend.backend_id,
        model_id=backend.model_id,
        created_at=_utc_now(),
        attempt_count=result.attempts,
    )


@dataclass(frozen=True)
class BatchSummary:
    succeeded: int
    failed: int
    skipped: int
    failures: Tuple[Tuple[str, str], ...] = ()


def load_pairs(path: Union[str, Path]) -> List[SimplifiedPair]:
    """Read a pairs jsonl file, failing loudly on any corrupt line."""
    pairs: List[SimplifiedPair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                pairs.append(SimplifiedPair.from_dict(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:line {lineno}: corrupt pair record ({exc})") from exc
    return pairs


def batch_simplify(
    corpus: Sequence[Report],
    backend: Backend,
    output_path: Union[str, Path],
    resume: bool = True,
    max_in_flight: int = 1,
) -> BatchSummary:
    """Simplify a corpus into a pairs jsonl file.

    With ``resume``, ids already persisted are skipped and new pairs append;
    otherwise the file is rewritten. Requests may overlap up to
    ``max_in_flight``, but lines land in corpus order so an interrupted run
    plus a resumed one produces the same file as one uninterrupted pass.
    """
    if max_in_flight < 1:
        raise ValueError(f"max_in_flight must be >= 1, got {max_in_flight}")
    out = Path(output_path)
    done: set = set()
    if resume and out.exists():
        done = {pair.report_id for pair in load_pairs(out)}
    todo = [r for r in corpus if r.id not in done]
    skipped = len(corpus) - len(todo)

    succeeded = 0
    failures: List[Tuple[str, str]] = []

    def run(report: Report):
        try:
            return simplify_one(report, backend)
        except SimplifyError as exc:
            return exc

    def _record_outcome(outcome, fh, failures):
        if isinstance(outcome, SimplifyError):
            failures.append((outcome.report_id, str(outcome)))
        else:
            fh.write(json.dumps(outcome.as_dict()) + "\n")
            fh.flush()

    mode = "a" if (resume and out.exists()) else "w"
    with open(out, mode, encoding="utf-8") as fh:
        if max_in_flight == 1:
            outcomes: Iterator = (run(r) for r in todo)
            for outcome in outcomes:
                _record_outcome(outcome, fh, failures)
                succeeded += 0 if isinstance(outcome, SimplifyError) else 1
        else:
            with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
                for outcome in pool.map(run, todo):
                    _record_outcome(outcome, fh, failures)
                    succeeded += 0 if isinstance(outcome, SimplifyError) else 1
    return BatchSummary(
        succeeded=succeeded,
        failed=len(failures),
        skipped=skipped,
        failures=tuple(failures),
    )
