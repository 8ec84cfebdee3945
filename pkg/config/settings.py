# =============================================================================
# FILE: config/settings.py
# PURPOSE: Every tunable number of the toolkit, read once from the environment
# =============================================================================
#
# Values come from (lowest to highest priority):
#   1. the defaults written below
#   2. a .env file in the project root (loaded by python-dotenv)
#   3. real environment variables
#
# Library functions take these as keyword defaults, so a single call can still
# override any of them:
#
#   from config import settings
#   make_density(a, cluster_tol=settings.CLUSTER_TOL)
#
# =============================================================================

import os
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / '.env')


def _env_float(name, default):
    raw = os.environ.get(name)
    return float(raw) if raw not in (None, '') else default


def _env_int(name, default):
    raw = os.environ.get(name)
    return int(raw) if raw not in (None, '') else default


# -----------------------------------------------------------------------------
# Run defaults
# -----------------------------------------------------------------------------
DEFAULT_SEED = _env_int('NCLP_SEED', 0)
DEFAULT_JOBS = _env_int('NCLP_JOBS', os.cpu_count() or 1)
LOG_LEVEL = os.environ.get('NCLP_LOG_LEVEL', 'INFO').upper()

MAX_DIM = 64

# -----------------------------------------------------------------------------
# Spectral tolerances
# -----------------------------------------------------------------------------
# ‖a − a*‖_∞ ≤ HERMITIAN_TOL · max(1, ‖a‖_∞)
HERMITIAN_TOL = 1e-10
# eigenvalues λ ≤ KERNEL_THRESHOLD · λ_max count as zero
KERNEL_THRESHOLD = 1e-12
# a retained eigenvalue below −NEGATIVE_EIGEN_TOL · λ_max means "not PSD"
NEGATIVE_EIGEN_TOL = 1e-10
TRACE_TOL = 1e-12
CLUSTER_TOL = _env_float('NCLP_CLUSTER_TOL', 1e-9)

# -----------------------------------------------------------------------------
# Structural checks
# -----------------------------------------------------------------------------
CORNER_TOL = 1e-10
TRIANGULAR_TOL = 1e-10
GRAM_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
ILL_CONDITIONED = 1e12

# -----------------------------------------------------------------------------
# Operator-norm ascent
# -----------------------------------------------------------------------------
ASCENT_STEP = 0.1
ASCENT_DECAY = 0.5
ASCENT_PATIENCE = 20
ASCENT_ITERATIONS = 200
POWER_ITERATIONS = 60

# -----------------------------------------------------------------------------
# Worker pool
# -----------------------------------------------------------------------------
# Trials are shipped to workers in chunks; order of results is restored by
# trial index before anything is written.
WORKER_CHUNKSIZE = 8

# -----------------------------------------------------------------------------
# Logging
# -----------------------------------------------------------------------------
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
            'stream': 'ext://sys.stderr',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
}
