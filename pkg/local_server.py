from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

# Import sub-apps
from api.analysis import app as analysis_app
from api.health import VERSION, app as health_app

app = FastAPI(title="Leadterm - Local Server", version=VERSION)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

@app.get("/")
async def root():
    return {
        "service": "Leadterm",
        "description": "Newton-polyhedron leading-term certifier",
        "version": VERSION,
        "routes": ["/api/analysis", "/api/health"],
    }

# Mount API apps under /api/* like Vercel
app.mount("/api/analysis", analysis_app)
app.mount("/api/health", health_app)
