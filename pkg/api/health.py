from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from datetime import datetime
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import mpmath
import numpy as np
import scipy

import config

VERSION = "1.0.0"

app = FastAPI()

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

@app.get("/")
async def health():
    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "version": VERSION,
        "message": "Leadterm certifier is running",
        "numerics": {"numpy": np.__version__, "scipy": scipy.__version__, "mpmath": mpmath.__version__},
        "defaults": {
            "seed": config.SEED,
            "samples": config.SAMPLES,
            "workers": config.WORKERS,
            "trials": config.TRIALS,
        },
    }
