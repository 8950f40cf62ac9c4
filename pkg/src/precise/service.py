"""HTTP+JSON surface for grading studies.

Thin adapter over GradingStore: every route delegates to the store and maps
its error classes onto HTTP statuses. Optionally serves a static directory so
a browser client can live at the same origin as the API.
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Union

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse

from .grading import GradingError, GradingStore, rubric_by_kind
from .simplify import load_pairs

try:  # pydantic v1 and v2 both work here
    from pydantic import BaseModel
except ImportError:  # pragma: no cover
    BaseModel = object


class CreateStudyBody(BaseModel):
    rubric: str
    pairs_path: str
    grader_tokens: List[str]
    seed: int = 0


class ScoreBody(BaseModel):
    token: str
    item_id: str
    score: int


def create_app(store: GradingStore, static_dir: Optional[Union[str, Path]] = None) -> FastAPI:
    app = FastAPI(title="grading service", docs_url=None, redoc_url=None)
    app.state.store = store

    @app.exception_handler(GradingError)
    async def grading_error_handler(request: Request, exc: GradingError):
        return JSONResponse(status_code=exc.status, content={"error": str(exc)})

    @app.post("/api/studies")
    def create_study(body: CreateStudyBody):
        try:
            rubric = rubric_by_kind(body.rubric)
            pairs = load_pairs(body.pairs_path)
        except (ValueError, OSError) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        try:
            study = store.create_study(pairs, rubric, body.grader_tokens, body.seed)
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return {
            "study_id": study.study_id,
            "reveal_key": study.reveal_key,
            "grader_tokens": list(study.grader_tokens),
            "n_items": len(study.items),
        }

    @app.get("/api/studies/{study_id}/next")
    def next_item(study_id: str, token: str):
        view = store.next_item(study_id, token)
        if view is None:
            return {"done": True}
        return view

    @app.post("/api/studies/{study_id}/scores")
    def submit_score(study_id: str, body: ScoreBody):
        event = store.submit_score(study_id, body.token, body.item_id, body.score)
        return {"accepted": True, "sequence": event.sequence_number}

    @app.get("/api/studies/{study_id}/progress")
    def progress(study_id: str):
        return store.progress(study_id)

    @app.get("/api/studies/{study_id}/results")
    def results(study_id: str, reveal: Optional[str] = None):
        return store.results(study_id, reveal=reveal)

    if static_dir is not None:
        root = Path(static_dir)

        @app.get("/")
        def index():
            return FileResponse(root / "index.html")

        @app.get("/{asset_path:path}")
        def asset(asset_path: str):
            target = (root / asset_path).resolve()
            # keep path traversal inside the static root
            if not str(target).startswith(str(root.resolve())) or not target.is_file():
                return JSONResponse(status_code=404, content={"error": "not found"})
            return FileResponse(target)

    return app
