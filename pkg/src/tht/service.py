"""Authenticated HTTP API over the store.

Paths travel in URLs with "~" in place of "/" ("KV~1.1.1~Ny"), which keeps
dotted unit ids and slashes unambiguous; labels and work ids may not contain
either separator, so the encoding round-trips. Domain errors map onto 404
(unknown things), 409 (stale revision), 401 (auth) and 422 (everything else),
always with a machine-readable ``code`` field in the body.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import os
import secrets
import time
from dataclasses import dataclass
from pathlib import Path as FsPath

from fastapi import Depends, FastAPI, Header, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    AUTH_CODES,
    AuthExpired,
    CONFLICT_CODES,
    InvalidCredentials,
    InvalidToken,
    NOT_FOUND_CODES,
    ThtError,
)
from .phylogeny import TreeRequest, to_newick
from .store import Store

DEFAULT_TOKEN_TTL = 12 * 3600  # seconds
PBKDF2_ITERATIONS = 60_000


# -- user accounts ---------------------------------------------------------------

@dataclass
class UserAccount:
    username: str
    salt: str
    password_hash: str
    iterations: int
    role: str = "Annotator"


class UserStore:
    """users.json holder; usernames are unique, hashes are salted PBKDF2."""

    def __init__(self, path: FsPath | str):
        self.path = FsPath(path)
        self.users: dict[str, UserAccount] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                doc = json.load(fh)
            for u in doc.get("users", []):
                self.users[u["username"]] = UserAccount(
                    username=u["username"], salt=u["salt"],
                    password_hash=u["hash"], iterations=u["iterations"],
                    role=u.get("role", "Annotator"))

    def save(self) -> None:
        doc = {"users": [
            {"username": u.username, "salt": u.salt, "hash": u.password_hash,
             "iterations": u.iterations, "role": u.role}
            for u in sorted(self.users.values(), key=lambda u: u.username)
        ]}
        tmp = self.path.with_name(self.path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, self.path)

    def add(self, username: str, password: str, role: str = "Annotator") -> None:
        if username in self.users:
            raise InvalidCredentials(f"user {username!r} already exists")
        salt = secrets.token_hex(16)
        digest = _pbkdf2(password, salt, PBKDF2_ITERATIONS)
        self.users[username] = UserAccount(username=username, salt=salt,
                                           password_hash=digest,
                                           iterations=PBKDF2_ITERATIONS, role=role)
        self.save()

    def verify(self, username: str, password: str) -> bool:
        account = self.users.get(username)
        if account is None:
            # Burn comparable time so unknown users are not distinguishable.
            _pbkdf2(password, "00" * 16, PBKDF2_ITERATIONS)
            return False
        candidate = _pbkdf2(password, account.salt, account.iterations)
        return hmac.compare_digest(candidate, account.password_hash)


def _pbkdf2(password: str, salt_hex: str, iterations: int) -> str:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"),
                               bytes.fromhex(salt_hex), iterations).hex()


# -- session tokens ------------------------------------------------------------------

def make_token(username: str, secret: str, ttl: float = DEFAULT_TOKEN_TTL,
               now: float | None = None) -> str:
    issued_at = time.time() if now is None else now
    payload = json.dumps({"u": username, "exp": issued_at + ttl},
                         sort_keys=True).encode("utf-8")
    sig = hmac.new(secret.encode("utf-8"), payload, hashlib.sha256).digest()
    return (_b64(payload) + "." + _b64(sig))


def parse_token(token: str, secret: str, now: float | None = None) -> str:
    """Return the username, or raise InvalidToken/AuthExpired."""
    try:
        payload_b64, sig_b64 = token.split(".")
        payload = _unb64(payload_b64)
        sig = _unb64(sig_b64)
    except (ValueError, TypeError):
        raise InvalidToken("malformed token") from None
    expected = hmac.new(secret.encode("utf-8"), payload, hashlib.sha256).digest()
    if not hmac.compare_digest(sig, expected):
        raise InvalidToken("token signature mismatch")
    doc = json.loads(payload)
    if (time.time() if now is None else now) >= doc["exp"]:
        raise AuthExpired("token expired")
    return doc["u"]


def _b64(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).decode("ascii").rstrip("=")


def _unb64(text: str) -> bytes:
    return base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))


# -- request bodies ------------------------------------------------------------------

class LoginBody(BaseModel):
    username: str
    password: str


class WorkBody(BaseModel):
    id: str
    title: str
    script: str = "Deva"


class UnitBody(BaseModel):
    id: str
    kind: str
    base_text: str


class LayerBody(BaseModel):
    label: str
    text: str = ""


class EditBody(BaseModel):
    text: str
    expected_revision: int


class EvidenceBody(BaseModel):
    unit_id: str
    start: int
    end: int
    kind: str
    subtype: str | None = None
    quoted_form: str | None = None
    note: str | None = None


class WitnessBody(BaseModel):
    id: str
    siglum: str
    kind: str
    date: str | None = None


class ReadingBody(BaseModel):
    witness_id: str
    text: str
    work_id: str | None = None


class TreeBody(BaseModel):
    sources: str = "manuscripts"
    method: str = "upgma"
    units: list[str] | None = None


def decode_path(url_path: str) -> str:
    return url_path.replace("~", "/")


def http_status(code: str) -> int:
    if code in AUTH_CODES:
        return 401
    if code in NOT_FOUND_CODES:
        return 404
    if code in CONFLICT_CODES:
        return 409
    return 422


def create_app(store: Store, users: UserStore, secret: str,
               token_ttl: float = DEFAULT_TOKEN_TTL) -> FastAPI:
    app = FastAPI(title="textual history tool", version="0.1.0")

    # The annotator frontend may be served from a different origin.
    from fastapi.middleware.cors import CORSMiddleware
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ThtError)
    async def domain_error(request: Request, exc: ThtError):
        body = {"code": exc.code, "message": exc.message}
        if exc.detail is not None:
            body["detail"] = exc.detail
        return JSONResponse(status_code=http_status(exc.code), content=body)

    def actor(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise InvalidToken("missing bearer token")
        return parse_token(authorization[len("Bearer "):], secret)

    @app.post("/api/login")
    def login(body: LoginBody):
        if not users.verify(body.username, body.password):
            raise InvalidCredentials("invalid credentials")
        return {"token": make_token(body.username, secret, token_ttl),
                "token_ttl_seconds": token_ttl}

    @app.get("/api/works")
    def list_works(user: str = Depends(actor)):
        return {"works": [store.corpus.work_document(wid)
                          for wid in sorted(store.corpus.works)]}

    @app.get("/api/works/{work_id}")
    def get_work(work_id: str, user: str = Depends(actor)):
        return store.corpus.work_document(work_id, deep=True)

    @app.post("/api/works", status_code=201)
    def create_work(body: WorkBody, user: str = Depends(actor)):
        return store.create_work(body.id, body.title, body.script, actor=user)

    @app.post("/api/works/{work_id}/units", status_code=201)
    def add_unit(work_id: str, body: UnitBody, user: str = Depends(actor)):
        return store.add_unit(work_id, body.id, body.kind, body.base_text,
                              actor=user)

    @app.post("/api/nodes/{node_path}/layers", status_code=201)
    def add_layer(node_path: str, body: LayerBody, user: str = Depends(actor)):
        return store.add_layer(decode_path(node_path), body.label, body.text,
                               actor=user)

    @app.get("/api/nodes/{node_path}")
    def get_node(node_path: str, user: str = Depends(actor)):
        return store.resolve(decode_path(node_path))

    @app.put("/api/layers/{layer_path}")
    def edit_layer(layer_path: str, body: EditBody, user: str = Depends(actor)):
        return store.edit_layer(decode_path(layer_path), body.text,
                                body.expected_revision, actor=user)

    @app.post("/api/layers/{layer_path}/evidence", status_code=201)
    def annotate(layer_path: str, body: EvidenceBody, user: str = Depends(actor)):
        return store.annotate(decode_path(layer_path), body.unit_id,
                              body.start, body.end, body.kind,
                              subtype=body.subtype, quoted_form=body.quoted_form,
                              note=body.note, actor=user)

    @app.get("/api/layers/{layer_path}/evidence")
    def list_evidence(layer_path: str, user: str = Depends(actor)):
        doc = store.resolve(decode_path(layer_path))
        return {"annotations": doc.get("annotations", [])}

    @app.post("/api/witnesses", status_code=201)
    def add_witness(body: WitnessBody, user: str = Depends(actor)):
        return store.add_witness(body.id, body.siglum, body.kind, body.date,
                                 actor=user)

    @app.post("/api/units/{unit_id}/readings", status_code=201)
    def record_reading(unit_id: str, body: ReadingBody, user: str = Depends(actor)):
        return store.record_reading(decode_path(unit_id), body.witness_id,
                                    body.text, actor=user, work_id=body.work_id)

    @app.get("/api/works/{work_id}/reports/support")
    def support(work_id: str, units: str, layer: str, user: str = Depends(actor)):
        unit_ids = [u for u in units.split(",") if u]
        return store.support_report(work_id, unit_ids, layer).to_document()

    @app.get("/api/works/{work_id}/reports/transmission")
    def transmission(work_id: str, unit: str, user: str = Depends(actor)):
        return store.transmission_report(work_id, unit).to_document()

    @app.get("/api/taxonomy")
    def get_taxonomy(user: str = Depends(actor)):
        return store.corpus.taxonomy.to_document()

    @app.get("/api/config")
    def get_config(user: str = Depends(actor)):
        return {"sibling_limit": store.sibling_limit}

    @app.post("/api/works/{work_id}/trees")
    def trees(work_id: str, body: TreeBody, user: str = Depends(actor)):
        request = TreeRequest(sources=body.sources, method=body.method,
                              units=tuple(body.units) if body.units else None)
        matrix, tree = store.build_tree(work_id, request)
        return {"newick": to_newick(tree), "matrix": matrix.to_document(),
                "method": request.method, "sources": request.sources,
                "clamped": tree.clamped}

    return app


def app_from_env() -> FastAPI:
    """Build the app from THT_* environment variables (used by `tht serve`)."""
    data_dir = os.environ.get("THT_DATA_DIR", "tht-data")
    secret = os.environ.get("THT_AUTH_SECRET")
    if not secret:
        secret = secrets.token_hex(32)
    store = Store.open(data_dir)
    users = UserStore(store.users_path)
    return create_app(store, users, secret)


def serve(store: Store, host: str = "127.0.0.1", port: int | None = None,
          secret: str | None = None) -> None:
    import uvicorn

    if port is None:
        port = int(os.environ.get("THT_PORT", "8077"))
    if secret is None:
        secret = os.environ.get("THT_AUTH_SECRET") or secrets.token_hex(32)
    users = UserStore(store.users_path)
    app = create_app(store, users, secret)
    uvicorn.run(app, host=host, port=port)
