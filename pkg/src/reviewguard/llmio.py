"""Shared client for chat, embedding, classification and logprob backends.

One HTTP contract covers every external model so fixtures can stand in
for all of them: chat is OpenAI-compatible (``POST /chat/completions``),
the rest are small JSON endpoints (``/embed``, ``/classify``,
``/score``). Every logical call produces exactly one CallRecord whether
it succeeds or not; rate limiting and the in-flight gate are the only
points of coordination between concurrent callers.
"""

import json
import os
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .errors import AuthError, BackendError, ConfigError
from .jsonio import append_jsonl, sha256_text, canonical_dumps

RETRYABLE_STATUS = {408, 429, 500, 502, 503, 504}
AUTH_STATUS = {401, 403}


@dataclass
class BackendConfig:
    base_url: str
    model_id: str
    auth_env: str | None = None
    temperature: float = 0.85
    top_p: float = 1.0
    max_in_flight: int = 4
    requests_per_minute: int = 60
    timeout: float = 60.0
    max_attempts: int = 3
    backoff_base: float = 0.5

    def __post_init__(self):
        if self.temperature < 0:
            raise ConfigError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_in_flight <= 0 or self.requests_per_minute <= 0:
            raise ConfigError("concurrency caps must be positive")
        if self.max_attempts < 1:
            raise ConfigError("retry policy needs at least one attempt")

    @classmethod
    def from_file(cls, path) -> "BackendConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown backend config keys in {path}: {sorted(unknown)}")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(f"invalid backend config {path}: {exc}") from exc


@dataclass
class CallRecord:
    request_hash: str
    model_id: str
    latency: float
    attempts: int
    usage: dict | None = None
    outcome: str = "ok"

    def to_json(self) -> dict:
        return {
            "request_hash": self.request_hash,
            "model_id": self.model_id,
            "latency": self.latency,
            "attempts": self.attempts,
            "usage": self.usage,
            "outcome": self.outcome,
        }


@dataclass
class _RateLimiter:
    """Sliding one-minute window over request dispatch times."""

    cap: int
    clock: callable
    sleep: callable
    window: deque = field(default_factory=deque)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def acquire(self) -> None:
        while True:
            with self.lock:
                now = self.clock()
                while self.window and now - self.window[0] >= 60.0:
                    self.window.popleft()
                if len(self.window) < self.cap:
                    self.window.append(now)
                    return
                wait = 60.0 - (now - self.window[0])
            self.sleep(max(wait, 0.0))


class Client:
    """Thread-safe backend client; callers only ever see their own results."""

    def __init__(self, config: BackendConfig, transport=None,
                 clock=time.monotonic, sleep=time.sleep, call_log=None):
        self.config = config
        self._clock = clock
        self._sleep = sleep
        self._call_log = Path(call_log) if call_log else None
        self._limiter = _RateLimiter(config.requests_per_minute, clock, sleep)
        self._gate = threading.Semaphore(config.max_in_flight)
        headers = {}
        if config.auth_env:
            token = os.environ.get(config.auth_env, "")
            if not token:
                raise AuthError(f"auth variable {config.auth_env} is not set")
            headers["Authorization"] = f"Bearer {token}"
        self._http = httpx.Client(
            base_url=config.base_url, headers=headers,
            timeout=config.timeout, transport=transport,
        )

    def close(self) -> None:
        self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _record(self, record: CallRecord) -> CallRecord:
        if self._call_log is not None:
            append_jsonl(self._call_log, record.to_json())
        return record

    def _post(self, path: str, payload: dict) -> tuple:
        """POST with retry/backoff; returns (response json, CallRecord)."""
        request_hash = sha256_text(canonical_dumps({"path": path, "payload": payload}))
        started = self._clock()
        attempts = 0
        outcome = "exhausted"
        usage = None
        try:
            with self._gate:
                last_error = None
                for attempt in range(1, self.config.max_attempts + 1):
                    attempts = attempt
                    self._limiter.acquire()
                    try:
                        response = self._http.post(path, json=payload)
                    except httpx.HTTPError as exc:
                        last_error = exc
                        outcome = "network_error"
                    else:
                        status = response.status_code
                        if status == 200:
                            body = response.json()
                            usage = body.get("usage") if isinstance(body, dict) else None
                            outcome = "ok"
                            return body, self._finish(request_hash, started, attempts, usage, outcome)
                        outcome = f"http_{status}"
                        if status in AUTH_STATUS:
                            raise AuthError(f"backend rejected credentials (HTTP {status})")
                        if status not in RETRYABLE_STATUS:
                            raise BackendError(f"backend error HTTP {status} on {path}")
                        last_error = BackendError(f"HTTP {status}")
                    if attempt < self.config.max_attempts:
                        self._sleep(self.config.backoff_base * 2 ** (attempt - 1))
                raise BackendError(
                    f"{path} failed after {attempts} attempts: {last_error}"
                )
        except BaseException:
            self._finish(request_hash, started, attempts, usage, outcome)
            raise

    def _finish(self, request_hash, started, attempts, usage, outcome) -> CallRecord:
        return self._record(CallRecord(
            request_hash=request_hash,
            model_id=self.config.model_id,
            latency=self._clock() - started,
            attempts=attempts,
            usage=usage,
            outcome=outcome,
        ))

    # -- operations ------------------------------------------------------

    def chat(self, messages, temperature=None, top_p=None) -> tuple:
        payload = {
            "model": self.config.model_id,
            "messages": list(messages),
            "temperature": self.config.temperature if temperature is None else temperature,
            "top_p": self.config.top_p if top_p is None else top_p,
        }
        body, record = self._post("/chat/completions", payload)
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed chat response: {exc}") from exc
        return text, record

    def embed(self, texts) -> tuple:
        texts = list(texts)
        if not texts:
            return [], None
        body, record = self._post("/embed", {"model": self.config.model_id, "texts": texts})
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise BackendError(
                f"embed returned {len(vectors) if isinstance(vectors, list) else 'no'} "
                f"vectors for {len(texts)} texts"
            )
        return vectors, record

    def classify(self, texts) -> tuple:
        texts = list(texts)
        if not texts:
            return [], None
        body, record = self._post("/classify", {"model": self.config.model_id, "texts": texts})
        scores = body.get("scores")
        if not isinstance(scores, list) or len(scores) != len(texts):
            raise BackendError(
                f"classify returned {len(scores) if isinstance(scores, list) else 'no'} "
                f"score rows for {len(texts)} texts"
            )
        return scores, record

    def token_logprobs(self, text: str) -> tuple:
        body, record = self._post("/score", {"model": self.config.model_id, "text": text})
        tokens = body.get("tokens")
        if not isinstance(tokens, list):
            raise BackendError("score endpoint returned no token records")
        return tokens, record
