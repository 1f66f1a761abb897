import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Default logging level, overridable via env var
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Defaults for the numerical engine; config_services reads the overrides
DEFAULT_TOL_ODE = "1e-6"
DEFAULT_STEPS = "512"
DEFAULT_RANK_RTOL = "1e-10"  # relative to the largest singular value
DEFAULT_APPROX_TOL = "1e-9"
DEFAULT_TOL_GRID_FACTOR = "1e-4"  # tol_grid = factor * h**2
DEFAULT_EVOLUTION_SOLVER = "stepping"  # or "integral"

# Manifest used by the CLI when --manifest is not given
DEFAULT_MANIFEST = "manifest.json"
DEFAULT_JSON_INDENT = "2"
