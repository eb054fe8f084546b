import logging
import os
from dataclasses import dataclass

logger = logging.getLogger(__name__)

LOG_LEVEL = os.environ.get("TREESAT_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

MACRO_STATE_BUDGET = int(os.environ.get("TREESAT_MACRO_BUDGET", 2**20))
SATURATION_BUDGET_FACTOR = int(os.environ.get("TREESAT_SAT_BUDGET_FACTOR", 10))
MAX_ITERATIONS = int(os.environ.get("TREESAT_MAX_ITERATIONS", 100))
DEFAULT_CACHE_MODE = os.environ.get("TREESAT_CACHE_MODE", "semiglobal")
DEFAULT_PREREFINE_DEPTH = int(os.environ.get("TREESAT_PREREFINE_DEPTH", 0))
TRACE_LOOKAHEAD = int(os.environ.get("TREESAT_TRACE_LOOKAHEAD", 3))
EXACT_TRACE_MAX_STATES = int(os.environ.get("TREESAT_EXACT_TRACE_MAX_STATES", 6))

# Caps the depth-bounded type exploration used by pre-refinement; stopping
# early only keeps more pairs, which is still an over-approximation.
PREREFINE_TYPE_BUDGET = int(os.environ.get("TREESAT_PREREFINE_TYPE_BUDGET", 4096))


@dataclass(frozen=True)
class SimulationOptions:
    """Knobs of the lookahead simulation engine shared by every reduction step."""

    cache: str = DEFAULT_CACHE_MODE
    prerefine_depth: int = DEFAULT_PREREFINE_DEPTH
    jobs: int = 1


DEFAULT_OPTIONS = SimulationOptions()


def configure_logging(level: str | None = None) -> None:
    """Configure root logging for command-line runs (logs go to stderr)."""
    logging.basicConfig(level=(level or LOG_LEVEL).upper(), format=LOG_FORMAT)
