"""HTTP API for the builder UI: validate, preview, generate, examples.

Stateless by design: templates travel in request bodies, nothing is stored
server-side, so identical requests always return identical responses.
"""

from __future__ import annotations

import hashlib
import json

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import corpus, template, xmlout

app = FastAPI(title="quizforge", docs_url=None, redoc_url=None)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
    expose_headers=["Content-Disposition", "X-Quizforge-Manifest"],
)


async def _json_body(request: Request):
    raw = await request.body()
    try:
        return json.loads(raw)
    except (ValueError, UnicodeDecodeError):
        return None


def _error(status: int, errors: list) -> JSONResponse:
    return JSONResponse({"errors": errors}, status_code=status)


def _template_errors(doc) -> list | None:
    try:
        template.load_template(doc)
        return None
    except template.TemplateError as e:
        return [{"path": e.path, "message": str(e)}]


@app.post("/api/validate")
async def api_validate(request: Request):
    doc = await _json_body(request)
    if doc is None:
        return _error(400, [{"path": "", "message": "malformed JSON body"}])
    errors = _template_errors(doc)
    if errors:
        return _error(422, errors)
    return {"ok": True}


@app.post("/api/preview")
async def api_preview(request: Request):
    body = await _json_body(request)
    if body is None or not isinstance(body, dict):
        return _error(400, [{"path": "", "message": "malformed JSON body"}])
    try:
        t = template.load_template(body.get("template"))
    except template.TemplateError as e:
        return _error(422, [{"path": e.path, "message": str(e)}])
    seed = body.get("seed", 0)
    index = body.get("index", 0)
    story = body.get("story")
    if not isinstance(seed, int) or not isinstance(index, int) or index < 0:
        return _error(422, [{"path": "seed/index",
                             "message": "seed and index must be integers, index >= 0"}])
    try:
        inst = template.instantiate(t, seed, index, story)
    except template.GenerationError as e:
        return _error(422, [{"path": "", "message": str(e)}])
    return {"qtxt": inst.qtxt, "htxt": inst.htxt, "atxt": inst.atxt,
            "category": inst.category, "quizname": inst.quizname}


@app.post("/api/generate")
async def api_generate(request: Request):
    body = await _json_body(request)
    if body is None or not isinstance(body, dict):
        return _error(400, [{"path": "", "message": "malformed JSON body"}])
    try:
        t = template.load_template(body.get("template"))
    except template.TemplateError as e:
        return _error(422, [{"path": e.path, "message": str(e)}])
    seed = body.get("seed", 0)
    n = body.get("n", t.count_default)
    story = body.get("story")
    if not isinstance(seed, int) or not isinstance(n, int) or n < 1:
        return _error(422, [{"path": "n/seed",
                             "message": "seed must be an integer, n >= 1"}])
    try:
        instances = template.instantiate_batch(t, seed, n, story)
        bank = xmlout.QuestionBank(
            instances[0].category if len({i.category for i in instances}) == 1
            else t.category,
            tuple(instances))
        content = xmlout.emit_xml(bank)
    except (template.GenerationError, xmlout.XmlOutError) as e:
        return _error(422, [{"path": "", "message": str(e)}])
    data = content.encode("utf-8")
    manifest = {"seed": seed, "n": n, "sha256": hashlib.sha256(data).hexdigest()}
    safe_name = t.name.replace("/", "_").replace(" ", "_") or "quiz"
    return Response(
        content=data,
        media_type="application/xml",
        headers={
            "Content-Disposition": f'attachment; filename="{safe_name}.xml"',
            "X-Quizforge-Manifest": json.dumps(manifest, sort_keys=True),
        },
    )


@app.get("/api/examples")
async def api_examples():
    return corpus.list_examples()


@app.get("/api/examples/{example_id}")
async def api_example(example_id: int):
    try:
        return corpus.load_example_document(example_id)
    except KeyError:
        return _error(404, [{"path": "", "message": f"no example {example_id}"}])
