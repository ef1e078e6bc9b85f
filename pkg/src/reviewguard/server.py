"""HTTP service for the two-round blind human-validation protocol.

Round lifecycle (open -> blind labeling -> close -> reveal) is server
state. While a round is open, task payloads carry no machine-label
fields at all: blindness is enforced at the wire, not in the client.
"""

import random
import threading
from importlib import resources
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .annotate import AnnotationRecord, AnnotationStore, agreement_report
from .annotate.records import AnnotationInvariantError
from .corpus import Store
from .errors import ReviewGuardError
from .jsonio import read_json, write_json
from .taxonomy import DR, SR


class RoundState:
    """Persistent record of validation rounds and their samples."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.rounds = {}
        if self.path.exists():
            raw = read_json(self.path)
            self.rounds = {int(k): v for k, v in raw.get("rounds", {}).items()}

    def _save(self) -> None:
        write_json(self.path, {"rounds": {str(k): v for k, v in self.rounds.items()}})

    def open_round(self, review_ids, seed: int, criteria_version: str = "v1") -> int:
        with self._lock:
            number = max(self.rounds, default=0) + 1
            self.rounds[number] = {
                "status": "open",
                "review_ids": list(review_ids),
                "seed": seed,
                "criteria_version": criteria_version,
            }
            self._save()
            return number

    def close_round(self, number: int) -> None:
        with self._lock:
            info = self.rounds.get(number)
            if info is None:
                raise KeyError(number)
            info["status"] = "closed"
            self._save()

    def get(self, number: int) -> dict | None:
        return self.rounds.get(number)


def sample_round(machine_records, size: int, seed: int) -> list:
    """Uniform sample stratified by machine verdict, recorded seed."""
    by_verdict = {SR: [], DR: []}
    for record in machine_records:
        by_verdict[record.verdict].append(record.review_id)
    for ids in by_verdict.values():
        ids.sort()
    total = sum(len(v) for v in by_verdict.values())
    if total == 0:
        raise ReviewGuardError("no machine-pass annotations to sample from")
    size = min(size, total)
    rng = random.Random(seed)
    take_sr = round(size * len(by_verdict[SR]) / total)
    take_sr = min(take_sr, len(by_verdict[SR]))
    take_dr = min(size - take_sr, len(by_verdict[DR]))
    take_sr = size - take_dr
    sample = rng.sample(by_verdict[SR], take_sr) + rng.sample(by_verdict[DR], take_dr)
    return sorted(sample)


class LabelSubmission(BaseModel):
    review_id: str
    round: int
    annotator_id: str
    verdict: str
    subtypes: list[str] = []
    rationale: str = ""


def create_app(store: Store, annotations: AnnotationStore, rounds: RoundState,
               ui_dir=None) -> FastAPI:
    app = FastAPI(title="reviewguard validator")

    def require_round(number: int) -> dict:
        info = rounds.get(number)
        if info is None:
            raise HTTPException(status_code=404, detail=f"round {number} does not exist")
        return info

    @app.get("/api/rounds")
    def list_rounds():
        return {
            "rounds": [
                {
                    "round": number,
                    "status": info["status"],
                    "n_items": len(info["review_ids"]),
                    "seed": info["seed"],
                    "criteria_version": info.get("criteria_version", "v1"),
                }
                for number, info in sorted(rounds.rounds.items())
            ]
        }

    class RoundRequest(BaseModel):
        size: int = 100
        seed: int = 0
        criteria_version: str = "v1"

    @app.post("/api/rounds")
    def open_round(req: RoundRequest):
        sample = sample_round(annotations.machine_pass(), req.size, req.seed)
        number = rounds.open_round(sample, req.seed, req.criteria_version)
        return {"round": number, "status": "open", "n_items": len(sample)}

    @app.post("/api/rounds/{number}/close")
    def close_round(number: int):
        require_round(number)
        rounds.close_round(number)
        return {"round": number, "status": "closed"}

    @app.get("/api/tasks")
    def tasks(round: int = Query(...), annotator: str = Query(...)):
        info = require_round(round)
        blind = info["status"] == "open"
        items = []
        for review_id in info["review_ids"]:
            review = store.review(review_id)
            paper = store.paper(review.paper_id)
            task = {
                "review_id": review_id,
                "text": review.text,
                "paper_title": paper.title,
                "paper_abstract": paper.abstract,
                "rating": review.rating,
                "confidence": review.confidence,
            }
            submitted = annotations.get(review_id, annotator, round)
            if submitted is not None:
                task["draft"] = {
                    "verdict": submitted.verdict,
                    "subtypes": list(submitted.subtypes),
                    "rationale": submitted.rationale,
                }
            if not blind:
                machine = annotations.machine_label(review_id)
                if machine is not None:
                    task["machine"] = {
                        "verdict": machine.verdict,
                        "subtypes": list(machine.subtypes),
                        "rationale": machine.rationale,
                    }
            items.append(task)
        return {
            "round": round,
            "status": info["status"],
            "criteria_version": info.get("criteria_version", "v1"),
            "tasks": items,
        }

    @app.post("/api/labels")
    def submit_label(label: LabelSubmission):
        info = require_round(label.round)
        if info["status"] != "open":
            raise HTTPException(status_code=409, detail=f"round {label.round} is closed")
        if label.review_id not in info["review_ids"]:
            raise HTTPException(
                status_code=404,
                detail=f"review {label.review_id} is not part of round {label.round}",
            )
        try:
            record = AnnotationRecord(
                review_id=label.review_id,
                verdict=label.verdict,
                subtypes=label.subtypes,
                rationale=label.rationale,
                source="human",
                annotator_id=label.annotator_id,
                round=label.round,
                criteria_version=info.get("criteria_version", "v1"),
            )
        except AnnotationInvariantError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        annotations.append(record)
        return {"ok": True, "record": record.to_json()}

    @app.get("/api/agreement")
    def agreement(round: int = Query(...), include_machine: bool = Query(True)):
        info = require_round(round)
        human_records = [
            r for r in annotations.for_round(round) if r.review_id in set(info["review_ids"])
        ]
        reference = None
        if include_machine:
            wanted = set(info["review_ids"])
            reference = [r for r in annotations.machine_pass() if r.review_id in wanted]
        try:
            report = agreement_report(human_records, reference=reference,
                                      round_label=str(round))
        except ReviewGuardError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return report.to_json()

    if ui_dir is None:
        candidate = resources.files("reviewguard.data") / "ui"
        ui_dir = Path(str(candidate)) if candidate.is_dir() else None
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

        @app.get("/", response_class=HTMLResponse)
        def index():
            index_path = Path(ui_dir) / "index.html"
            if index_path.exists():
                return index_path.read_text("utf-8")
            return "<html><body>validator UI assets not built</body></html>"

    return app


def serve(store_path, annotations_path, rounds_path, host: str = "127.0.0.1",
          port: int = 0, ui_dir=None) -> None:
    """Run the validation service; prints the bound port on the first line."""
    import socket

    import uvicorn

    store = Store(store_path)
    annotations = AnnotationStore(annotations_path)
    rounds = RoundState(rounds_path)
    app = create_app(store, annotations, rounds, ui_dir=ui_dir)

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((host, port))
    print(sock.getsockname()[1], flush=True)
    config = uvicorn.Config(app, log_level="warning")
    uvicorn.Server(config).run(sockets=[sock])
