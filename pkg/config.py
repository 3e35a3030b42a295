"""
Configuration settings for BlockMax Lab
"""
import os
from dotenv import load_dotenv

load_dotenv()

VERSION = "1.0.0"

# Server Configuration
HOST = os.getenv("HOST", "0.0.0.0")
PORT = int(os.getenv("PORT", 8000))
DEBUG = os.getenv("DEBUG", "False").lower() == "true"
CORS_ORIGINS = os.getenv("CORS_ORIGINS", "http://localhost:3000,http://localhost:5173").split(",")

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Simulation Defaults (desk scale; full scale behind --full-scale)
DEFAULT_N = int(os.getenv("DEFAULT_N", 1000))
DEFAULT_REPS = int(os.getenv("DEFAULT_REPS", 200))
FULL_SCALE_REPS = int(os.getenv("FULL_SCALE_REPS", 1000))
MASTER_SEED = int(os.getenv("MASTER_SEED", 20240521))
MAX_PARALLEL_WORKERS = int(os.getenv("MAX_PARALLEL_WORKERS", 4))  # Replications evaluated concurrently
DEFAULT_BLOCK_SPAN = int(os.getenv("DEFAULT_BLOCK_SPAN", 10))  # M = {m, ..., m+span-1}
FAILURE_FLAG_RATE = float(os.getenv("FAILURE_FLAG_RATE", "0.01"))  # Flag cells failing in >1% of reps
SCORE_SCALE = float(os.getenv("SCORE_SCALE", "1e4"))  # Reported statistics are multiplied by this

# Second-Order Parameter Search
RHO_K_LO = float(os.getenv("RHO_K_LO", "-2.0"))
RHO_K_HI = float(os.getenv("RHO_K_HI", "-0.1"))
RHO_ETA = float(os.getenv("RHO_ETA", "0.5"))
RHO_GRID_STEP = float(os.getenv("RHO_GRID_STEP", "0.01"))
RHO_REFINE_TOL = float(os.getenv("RHO_REFINE_TOL", "1e-4"))
RHO_BLOCKS = os.getenv("RHO_BLOCKS", "2..50")
RHO_DIAG_LO = float(os.getenv("RHO_DIAG_LO", "0.1"))
RHO_DIAG_HI = float(os.getenv("RHO_DIAG_HI", "0.5"))
RHO_DIAG_STEP = float(os.getenv("RHO_DIAG_STEP", "0.01"))

# Numerical Tolerances
QUAD_ABS_TOL = float(os.getenv("QUAD_ABS_TOL", "1e-10"))
QUAD_LIMIT = int(os.getenv("QUAD_LIMIT", 200))  # Max subintervals for adaptive quadrature
FD_REL_STEP = float(os.getenv("FD_REL_STEP", "1e-6"))
LOG_RATIO_EPS = float(os.getenv("LOG_RATIO_EPS", "1e-12"))
DEGENERATE_EPS = float(os.getenv("DEGENERATE_EPS", "1e-10"))
MAX_CONDITION = float(os.getenv("MAX_CONDITION", "1e12"))
TCDF_ABS_TOL = float(os.getenv("TCDF_ABS_TOL", "1e-6"))
TCDF_QMC_SEED = int(os.getenv("TCDF_QMC_SEED", 12345))
TCDF_MAXPTS = int(os.getenv("TCDF_MAXPTS", 200000))
BISECT_TOL = float(os.getenv("BISECT_TOL", "1e-12"))

# Pilot Ground Truth (models without a closed-form attractor)
PILOT_N = int(os.getenv("PILOT_N", 200000))
PILOT_BLOCK = int(os.getenv("PILOT_BLOCK", 200))

# File Storage
TEMP_DIR = os.getenv("TEMP_DIR", "temp_files")
UPLOAD_DIR = os.path.join(TEMP_DIR, "uploads")
OUTPUT_DIR = os.path.join(TEMP_DIR, "outputs")
QUEUE_FILE = os.getenv("QUEUE_FILE", os.path.join(TEMP_DIR, "queue.json"))

# Job Management
JOB_RETENTION_HOURS = int(os.getenv("JOB_RETENTION_HOURS", "24"))
MAX_CONCURRENT_JOBS = int(os.getenv("MAX_CONCURRENT_JOBS", "2"))

# Resource Estimation
RAM_USAGE_MULTIPLIER = float(os.getenv("RAM_USAGE_MULTIPLIER", "6.0"))  # Working set vs raw per-rep arrays
MIN_RAM_BUFFER = int(os.getenv("MIN_RAM_BUFFER", 100 * 1024 * 1024))  # Keep 100MB RAM buffer
MIN_FREE_RAM_REQUIRED = int(os.getenv("MIN_FREE_RAM_REQUIRED", 100 * 1024 * 1024))
MAX_UPLOAD_BYTES = int(os.getenv("MAX_UPLOAD_BYTES", 20 * 1024 * 1024))  # 20MB data CSV limit

# Allowed data file extensions
ALLOWED_EXTENSIONS = [".csv"]
