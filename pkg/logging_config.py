import logging
import sys
from config import LOG_LEVEL


def setup_logging(level: str = LOG_LEVEL):
    """Global logging setup; stdout is reserved for command output."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(sys.stderr),
        ],
    )
