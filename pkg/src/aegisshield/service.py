"""HTTP service exposing the pipeline: sessions, per-stage generation,
and report downloads.

Provider keys live only in the in-memory session table; destroying a
session (or letting it expire) erases them. Nothing here writes keys to
disk or logs, and a restart invalidates every session.
"""

from __future__ import annotations

import os
import secrets
import threading
import time
import uuid

from fastapi import Body, FastAPI, HTTPException, Response

from .attack_kb import KnowledgeBase, load_bundles
from .domain import ApplicationProfile, PipelineConfig, validate_profile
from .errors import AegisError, ValidationError
from .gateway import Gateway, HttpChatProvider, MockChatProvider
from .intel import NvdClient, OtxClient
from .pipeline import (
    RunContext,
    assess_dread,
    fetch_intel,
    generate_attack_tree,
    generate_mitigations,
    generate_test_cases,
    generate_threats,
    map_threat,
)
from .report import render_markdown, render_pdf
from .domain import RunMetadata, ThreatModelRun

DEFAULT_SESSION_TTL_SECONDS = 3600


class Session:
    def __init__(self, llm_key: str, nvd_key: str | None, otx_key: str | None,
                 ttl: float, created_at: float):
        self.session_id = secrets.token_urlsafe(24)
        self.llm_key = llm_key
        self.nvd_key = nvd_key
        self.otx_key = otx_key
        self.ttl = ttl
        self.created_at = created_at
        self.runs: dict[str, dict] = {}

    def expired(self, now: float) -> bool:
        return now - self.created_at > self.ttl

    def erase(self) -> None:
        self.llm_key = ""
        self.nvd_key = None
        self.otx_key = None
        self.runs.clear()


class SessionTable:
    def __init__(self, clock=time.monotonic):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._clock = clock

    def create(self, llm_key: str, nvd_key=None, otx_key=None,
               ttl: float = DEFAULT_SESSION_TTL_SECONDS) -> Session:
        session = Session(llm_key, nvd_key, otx_key, ttl, self._clock())
        with self._lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is not None and session.expired(self._clock()):
                session.erase()
                del self._sessions[session_id]
                session = None
        if session is None:
            raise KeyError(session_id)
        return session

    def destroy(self, session_id: str) -> None:
        with self._lock:
            session = self._sessions.pop(session_id, None)
        if session is not None:
            session.erase()


def create_app(kb: KnowledgeBase | None = None, kb_paths=None,
               config: PipelineConfig | None = None,
               mock_provider_dir: str | None = None,
               persist_dir: str | None = None,
               clock=time.monotonic) -> FastAPI:
    """Build the service. With ``mock_provider_dir`` every session uses the
    file-based mock provider (tests, demos); otherwise sessions talk to
    the configured chat service with their own key overriding the
    server-side default. Runs live in session memory; ``persist_dir``
    additionally writes each generated run to disk."""
    app = FastAPI(title="AegisShield", version="0.1.0")
    sessions = SessionTable(clock=clock)
    config = config or PipelineConfig()
    knowledge_base = kb if kb is not None else (
        load_bundles(kb_paths) if kb_paths else KnowledgeBase()
    )
    if persist_dir:
        os.makedirs(persist_dir, exist_ok=True)

    def persist(rid: str, run: ThreatModelRun) -> None:
        if persist_dir:
            from .storage import persist_run

            persist_run(run, os.path.join(persist_dir, f"{rid}.json"))

    def session_or_401(session_id: str) -> Session:
        try:
            return sessions.get(session_id)
        except KeyError:
            raise HTTPException(status_code=401, detail="unknown or expired session")

    def gateway_for(session: Session) -> Gateway:
        if mock_provider_dir:
            return Gateway(MockChatProvider(directory=mock_provider_dir))
        provider = HttpChatProvider(api_key=session.llm_key or None)
        return Gateway(provider, retries=config.retries_per_stage)

    def clients_for(session: Session):
        nvd = NvdClient(api_key=session.nvd_key) if not mock_provider_dir else None
        otx_key = session.otx_key or os.environ.get("AEGIS_OTX_API_KEY", "")
        otx = OtxClient(api_key=otx_key) if (otx_key and not mock_provider_dir) else None
        return nvd, otx

    def run_record_or_404(session: Session, rid: str) -> dict:
        record = session.runs.get(rid)
        if record is None:
            raise HTTPException(status_code=404, detail="unknown run id")
        return record

    @app.get("/api/health")
    def health():
        return {"status": "ok", "kb_patterns": len(knowledge_base)}

    @app.post("/api/session")
    def create_session(payload: dict = Body(...)):
        llm_key = payload.get("llm_api_key", "")
        if not llm_key and not mock_provider_dir:
            raise HTTPException(status_code=400, detail="MissingLlmKey")
        ttl = float(payload.get("ttl_seconds", DEFAULT_SESSION_TTL_SECONDS))
        session = sessions.create(
            llm_key=llm_key,
            nvd_key=payload.get("nvd_api_key"),
            otx_key=payload.get("otx_api_key"),
            ttl=ttl,
        )
        return {"session_id": session.session_id}

    @app.delete("/api/session/{session_id}")
    def destroy_session(session_id: str):
        sessions.destroy(session_id)
        return {"status": "destroyed"}

    @app.post("/api/session/{session_id}/threat-model")
    def threat_model(session_id: str, payload: dict = Body(...)):
        session = session_or_401(session_id)
        gateway = gateway_for(session)
        try:
            profile = validate_profile(ApplicationProfile.from_doc(payload))
            nvd, otx = clients_for(session)
            nvd_block, otx_block, warnings = fetch_intel(profile, config, nvd, otx)
            ctx = RunContext(
                profile=profile, kb=knowledge_base, gateway=gateway, config=config,
                nvd_block=nvd_block, otx_block=otx_block, warnings=list(warnings),
            )
            threats, suggestions = generate_threats(ctx)
            mappings = [map_threat(ctx, threat) for threat in threats]
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except AegisError as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        rid = uuid.uuid4().hex[:12]
        run = ThreatModelRun(
            profile=profile, threats=threats, improvement_suggestions=suggestions,
            mappings=mappings,
            metadata=RunMetadata(provider_model_id=gateway.model_id, warnings=ctx.warnings),
        )
        session.runs[rid] = {"run": run, "ctx_blocks": (nvd_block, otx_block)}
        persist(rid, run)
        return {
            "run_id": rid,
            "threat_model": [t.to_doc() for t in threats],
            "improvement_suggestions": suggestions,
            "mappings": [m.to_doc() for m in mappings],
            "warnings": ctx.warnings,
        }

    def stage_context(session: Session, record: dict) -> RunContext:
        nvd_block, otx_block = record["ctx_blocks"]
        run: ThreatModelRun = record["run"]
        return RunContext(
            profile=run.profile, kb=knowledge_base, gateway=gateway_for(session),
            config=config, nvd_block=nvd_block, otx_block=otx_block,
            warnings=run.metadata.warnings,
        )

    @app.post("/api/session/{session_id}/run/{rid}/dread")
    def dread(session_id: str, rid: str):
        session = session_or_401(session_id)
        record = run_record_or_404(session, rid)
        run: ThreatModelRun = record["run"]
        ctx = stage_context(session, record)
        try:
            run.dread = assess_dread(ctx, run.threats, run.mappings)
            persist(rid, run)
        except AegisError as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        return {"dread": [d.to_doc() for d in run.dread]}

    @app.post("/api/session/{session_id}/run/{rid}/mitigations")
    def mitigations(session_id: str, rid: str):
        session = session_or_401(session_id)
        record = run_record_or_404(session, rid)
        run: ThreatModelRun = record["run"]
        ctx = stage_context(session, record)
        try:
            run.mitigations = generate_mitigations(ctx, run.threats, run.mappings)
            persist(rid, run)
        except AegisError as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        return {"mitigations": run.mitigations.to_doc()}

    @app.post("/api/session/{session_id}/run/{rid}/test-cases")
    def test_cases(session_id: str, rid: str):
        session = session_or_401(session_id)
        record = run_record_or_404(session, rid)
        run: ThreatModelRun = record["run"]
        ctx = stage_context(session, record)
        try:
            run.test_cases = generate_test_cases(ctx, run.threats)
            persist(rid, run)
        except AegisError as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        return {"test_cases": run.test_cases.to_doc()}

    @app.post("/api/session/{session_id}/run/{rid}/attack-tree")
    def attack_tree(session_id: str, rid: str):
        session = session_or_401(session_id)
        record = run_record_or_404(session, rid)
        run: ThreatModelRun = record["run"]
        ctx = stage_context(session, record)
        try:
            run.attack_tree = generate_attack_tree(ctx, run.threats, run.mappings)
            persist(rid, run)
        except AegisError as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        return {"attack_tree": run.attack_tree.to_doc()}

    @app.get("/api/session/{session_id}/run/{rid}/report.md")
    def report_markdown(session_id: str, rid: str):
        session = session_or_401(session_id)
        record = run_record_or_404(session, rid)
        markdown = render_markdown(record["run"])
        return Response(content=markdown, media_type="text/markdown")

    @app.get("/api/session/{session_id}/run/{rid}/report.pdf")
    def report_pdf(session_id: str, rid: str):
        session = session_or_401(session_id)
        record = run_record_or_404(session, rid)
        pdf = render_pdf(render_markdown(record["run"]))
        return Response(content=pdf, media_type="application/pdf")

    return app
