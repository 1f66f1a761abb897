# main.py
import logging
import sys

from cli.app import main

logger = logging.getLogger(__name__)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("[MAIN] [ENTRY] Interrupted by user")
        sys.exit(130)
