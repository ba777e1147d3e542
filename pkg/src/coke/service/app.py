"""HTTP service: online decide/observe sessions plus batch replay endpoints.

Sessions hold one engine each and enforce the decide -> observe alternation;
out-of-order calls get 409. Batch endpoints run whole inline datasets and
return the same result document the CLI writes.
"""

from __future__ import annotations

import threading
import uuid
from typing import Any

from fastapi import FastAPI, HTTPException

from ..engine import Decision, PolicyEngine
from ..errors import ConfigError, DataError, NoAdmissibleArmError
from ..replay import dataset_from_lines, generate_synthetic, registry_for_dataset, run_baseline, run_policy
from ..types import Question
from .schemas import (
    BaselineRequest,
    CreateSessionRequest,
    CreateSessionResponse,
    DecideRequest,
    DecideResponse,
    ObserveRequest,
    ReplayRequest,
    SessionState,
    ValidateRequest,
    ValidateResponse,
)


class _Session:
    def __init__(self, engine: PolicyEngine) -> None:
        self.engine = engine
        self.pending: Decision | None = None
        self.lock = threading.Lock()


def create_app() -> FastAPI:
    app = FastAPI(title="coke", description="cost-aware model selection service")
    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> _Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/sessions", response_model=CreateSessionResponse)
    def create_session(req: CreateSessionRequest) -> CreateSessionResponse:
        try:
            engine = PolicyEngine(req.config.to_config(), [a.to_spec() for a in req.arms])
        except (ConfigError, DataError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        session_id = uuid.uuid4().hex
        with registry_lock:
            sessions[session_id] = _Session(engine)
        return CreateSessionResponse(
            session_id=session_id,
            config=engine.config.to_dict(),
            clusters=sorted(engine.beliefs),
        )

    @app.post("/sessions/{session_id}/decide", response_model=DecideResponse)
    def decide(session_id: str, req: DecideRequest) -> DecideResponse:
        session = get_session(session_id)
        with session.lock:
            if session.pending is not None:
                raise HTTPException(
                    status_code=409,
                    detail=f"iteration {session.pending.k} is awaiting observe",
                )
            try:
                question = Question(
                    id=req.question.id,
                    embedding=req.question.embedding,
                    token_len=req.question.tokens,
                )
                decision = session.engine.decide(question)
            except NoAdmissibleArmError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            except (ConfigError, DataError, ValueError) as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            session.pending = decision
            return DecideResponse(
                k=decision.k,
                question_id=question.id,
                chosen_arm=decision.chosen_arm,
                chosen_cluster=decision.chosen_cluster,
                projected_cost=decision.projected_cost,
                theta_samples=decision.theta_samples,
                per_arm_scores=decision.per_arm_scores,
                budget_remaining=session.engine.ledger.budget_remaining,
            )

    @app.post("/sessions/{session_id}/observe")
    def observe(session_id: str, req: ObserveRequest) -> dict[str, Any]:
        session = get_session(session_id)
        with session.lock:
            if session.pending is None:
                raise HTTPException(status_code=409, detail="no decision is awaiting observe")
            if req.k != session.pending.k:
                raise HTTPException(
                    status_code=409,
                    detail=f"observe k={req.k} does not match pending iteration {session.pending.k}",
                )
            try:
                record = session.engine.observe(session.pending, req.reward)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            session.pending = None
            return record.to_dict()

    @app.get("/sessions/{session_id}", response_model=SessionState)
    def session_state(session_id: str) -> SessionState:
        session = get_session(session_id)
        with session.lock:
            engine = session.engine
            return SessionState(
                session_id=session_id,
                iteration=engine.iteration,
                budget_remaining=engine.ledger.budget_remaining,
                total_cost=engine.ledger.total_cost(),
                llm_calls=engine.ledger.llm_calls(),
                beliefs={
                    c: {"alpha": b.alpha, "beta": b.beta, "mean": b.mean, "pulls": float(b.pulls)}
                    for c, b in engine.beliefs.items()
                },
                ledger=engine.ledger.snapshot(),
                pending_k=session.pending.k if session.pending else None,
            )

    @app.get("/sessions/{session_id}/history")
    def session_history(session_id: str) -> dict[str, Any]:
        session = get_session(session_id)
        with session.lock:
            return {"records": [r.to_dict() for r in session.engine.history]}

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str) -> dict[str, bool]:
        with registry_lock:
            if session_id not in sessions:
                raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
            del sessions[session_id]
        return {"deleted": True}

    @app.post("/replay")
    def replay(req: ReplayRequest) -> dict[str, Any]:
        try:
            dataset = dataset_from_lines(req.name, [q.model_dump() for q in req.questions])
            result, _ = run_policy(
                dataset,
                [a.to_spec() for a in req.arms],
                req.config.to_config(),
                keep_order=req.keep_order,
                reference_arm=req.reference_arm,
            )
        except (ConfigError, DataError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return result.to_dict()

    @app.post("/baseline")
    def baseline(req: BaselineRequest) -> dict[str, Any]:
        try:
            dataset = dataset_from_lines(req.name, [q.model_dump() for q in req.questions])
            result = run_baseline(
                dataset,
                [a.to_spec() for a in req.arms],
                req.policy,
                seed=req.seed,
                reference_arm=req.reference_arm,
            )
        except (ConfigError, DataError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return result.to_dict()

    @app.post("/generate")
    def generate(gen: dict[str, Any]) -> dict[str, Any]:
        try:
            dataset = generate_synthetic(gen)
            registry = registry_for_dataset(gen, dataset)
        except (ConfigError, DataError, ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {
            "name": dataset.name,
            "d": dataset.d,
            "arm_ids": dataset.arm_ids,
            "marginals": dataset.marginals(),
            "registry": [s.to_dict() for s in registry],
            "questions": [
                {
                    "id": q.id,
                    "embedding": [float(x) for x in q.embedding],
                    "tokens": q.token_len,
                    "outcomes": q.outcomes,
                }
                for q in dataset.questions
            ],
        }

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest) -> ValidateResponse:
        try:
            dataset = dataset_from_lines(req.name, [q.model_dump() for q in req.questions])
        except (ConfigError, DataError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return ValidateResponse(
            ok=True,
            n=len(dataset),
            d=dataset.d,
            arm_ids=dataset.arm_ids,
            marginals=dataset.marginals(),
        )

    return app


app = create_app()
