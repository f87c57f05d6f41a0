"""
Runtime defaults, overridable through the environment.
"""

import os

WORKERS = int(os.getenv("LEADTERM_WORKERS", "1"))
SAMPLES = int(os.getenv("LEADTERM_SAMPLES", "10000000"))
SEED = int(os.getenv("LEADTERM_SEED", "20240601"))
TOL = float(os.getenv("LEADTERM_TOL", "1e-10"))
TRIALS = int(os.getenv("LEADTERM_TRIALS", "24"))

# Newton iteration for the non-degeneracy search
NEWTON_MAX_ITER = 200
START_MODULUS_RANGE = (0.3, 3.0)

# Monte Carlo
BLOCK_SIZE = 1 << 16
LOG_RADIUS_SPAN = 60.0
BOOTSTRAP_ROUNDS = 400
MAX_RELATIVE_STDERR = 0.25

# Beta products
MPMATH_DIGITS = 50

HOST = os.getenv("LEADTERM_HOST", "0.0.0.0")
PORT = int(os.getenv("LEADTERM_PORT", "8000"))
