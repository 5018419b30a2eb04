"""HTTP API: catalog generation, custom-question answering, health.

All endpoints speak JSON; errors carry {code, message}. Loaded checkpoints
are immutable; hot-swapping replaces the whole bundle atomically.
"""
import asyncio
import logging
import os
import re
import threading
from dataclasses import dataclass, field
from typing import List, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .checkpoint import load_model
from .corpus import Document, chunk_text
from .pipeline import FilterConfig, generate_catalog
from .retrieval import RetrievalConfig

logger = logging.getLogger(__name__)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8756
    qa_ckpt: Optional[str] = None
    qg_ckpt: Optional[str] = None
    chunk_size: int = 300
    top_k: int = 4
    max_request_chars: int = 100_000
    max_inflight: int = 4
    cors_origins: List[str] = field(default_factory=lambda: ["*"])
    overlap_threshold: float = 0.6

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        cfg = cls()
        cfg.qa_ckpt = os.environ.get("QNA_QA_CKPT", cfg.qa_ckpt)
        cfg.qg_ckpt = os.environ.get("QNA_QG_CKPT", cfg.qg_ckpt)
        cfg.port = int(os.environ.get("QNA_PORT", cfg.port))
        return cfg


class ModelBundle:
    """Holds the loaded models; swap() is an atomic pointer exchange."""

    def __init__(self, qa_model=None, qg_model=None,
                 qa_version: str = "", qg_version: str = ""):
        self._lock = threading.Lock()
        self._state = (qa_model, qg_model, qa_version, qg_version)

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "ModelBundle":
        bundle = cls()
        if config.qa_ckpt and config.qg_ckpt:
            bundle.load(config.qa_ckpt, config.qg_ckpt)
        return bundle

    def load(self, qa_path: str, qg_path: str) -> None:
        from .checkpoint import load_checkpoint

        qa_ckpt, qg_ckpt = load_checkpoint(qa_path), load_checkpoint(qg_path)
        self.swap(load_model(qa_path), load_model(qg_path),
                  qa_ckpt.meta.get("model_version", qa_ckpt.kind),
                  qg_ckpt.meta.get("model_version", qg_ckpt.kind))

    def swap(self, qa_model, qg_model, qa_version: str, qg_version: str) -> None:
        with self._lock:
            self._state = (qa_model, qg_model, qa_version, qg_version)

    def get(self):
        return self._state

    @property
    def ready(self) -> bool:
        qa, qg, _, _ = self._state
        return qa is not None and qg is not None


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(config: ServiceConfig = None, bundle: ModelBundle = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    bundle = bundle or ModelBundle.from_config(config)
    app = FastAPI(title="qnakit")
    app.state.config = config
    app.state.bundle = bundle
    # bounded FIFO queue around model inference
    inference_slots = asyncio.Semaphore(config.max_inflight)
    app.add_middleware(
        CORSMiddleware, allow_origins=config.cors_origins,
        allow_methods=["*"], allow_headers=["*"],
    )

    async def _read_json(request: Request):
        try:
            return await request.json()
        except Exception:
            return None

    @app.post("/api/catalog")
    async def catalog(request: Request):
        body = await _read_json(request)
        if body is None or "text" not in body:
            return _error(400, "missing_field", "body must contain 'text'")
        text = body["text"]
        if not isinstance(text, str) or not text.strip():
            return _error(400, "empty_text", "text must be non-empty")
        if len(text) > config.max_request_chars:
            return _error(400, "text_too_large",
                          f"text exceeds {config.max_request_chars} characters")
        if not bundle.ready:
            return _error(503, "models_not_loaded", "models are not loaded")
        qa_model, qg_model, _, _ = bundle.get()
        from .candidates import get_provider

        sentences = get_provider("desk").sentences(text)
        if not any(re.search(r"\w", s) for s, _ in sentences):
            return _error(422, "no_sentences", "no extractable sentences in text")
        async with inference_slots:
            result = await asyncio.to_thread(
                generate_catalog, text, qg_model, qa_model,
                filter_config=FilterConfig(overlap_threshold=config.overlap_threshold),
            )
        return {"items": [it.to_dict() for it in result.items],
                "warnings": result.warnings}

    @app.post("/api/answer")
    async def answer(request: Request):
        body = await _read_json(request)
        if body is None or "text" not in body or "question" not in body:
            return _error(400, "missing_field", "body must contain 'text' and 'question'")
        text, question = body["text"], body["question"]
        if not isinstance(text, str) or not text.strip() \
                or not isinstance(question, str) or not question.strip():
            return _error(400, "empty_text", "text and question must be non-empty")
        if len(text) > config.max_request_chars:
            return _error(400, "text_too_large",
                          f"text exceeds {config.max_request_chars} characters")
        if not bundle.ready:
            return _error(503, "models_not_loaded", "models are not loaded")
        qa_model, _, _, _ = bundle.get()
        paragraphs = chunk_text(text, config.chunk_size, "request")
        if not paragraphs:
            return _error(422, "no_sentences", "no tokens in text")
        doc = Document("request", paragraphs)
        k = min(config.top_k, len(paragraphs))
        async with inference_slots:
            pred = await asyncio.to_thread(
                qa_model.predict, question, doc, RetrievalConfig(k=k))
        if not pred.answerable:
            return {"answerable": False, "answer": None, "score": pred.score,
                    "message": "no_answer_found"}
        return {"answerable": True, "answer": pred.answer_text, "score": pred.score}

    @app.get("/api/health")
    async def health():
        if not bundle.ready:
            return _error(503, "models_not_loaded", "models are loading")
        _, _, qa_version, qg_version = bundle.get()
        return {"status": "ok",
                "model_versions": {"qa": qa_version, "qg": qg_version}}

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
