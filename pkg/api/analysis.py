from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
import logging
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from cli import analyze_document, certify_document, newton_document, parse_polynomial, suspend_document
from exceptions import LeadtermError, PolynomialSyntaxError
from newton_polytope import build_newton_polyhedron
from schemas import FormRequest, PolynomialRequest

logger = logging.getLogger(__name__)

app = FastAPI()

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _run(build):
    try:
        return build()
    except PolynomialSyntaxError as e:
        raise HTTPException(status_code=422, detail={"code": e.code, "message": str(e), "position": e.position})
    except LeadtermError as e:
        logger.info("rejected request: %s", e)
        raise HTTPException(status_code=400, detail={"code": e.code, "message": str(e)})


def _polynomial(request: PolynomialRequest):
    f = parse_polynomial(request.f, request.n)
    return f, build_newton_polyhedron(f.supp())


@app.post("/newton")
def newton(request: PolynomialRequest):
    def build():
        f, P = _polynomial(request)
        return newton_document(f, P)
    return _run(build)


@app.post("/analyze")
def analyze(request: FormRequest):
    def build():
        f, P = _polynomial(request)
        return analyze_document(f, request.forms, P)
    return _run(build)


@app.post("/certify")
def certify(request: FormRequest):
    def build():
        f, P = _polynomial(request)
        return certify_document(f, request.forms, request.face, P, trials=request.trials, seed=request.seed)
    return _run(build)


@app.post("/suspend-check")
def suspend_check(request: FormRequest):
    def build():
        f, P = _polynomial(request)
        return suspend_document(f, request.forms, request.face, P, trials=request.trials, seed=request.seed)
    return _run(build)


@app.get("/")
async def health():
    return {"status": "healthy", "message": "Leadterm analysis API is running",
            "endpoints": ["/newton", "/analyze", "/certify", "/suspend-check"]}
