import logging
import logging.config
from pathlib import Path

import yaml

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def setup_logging(config_path: str = "config/logging_config.yaml", quiet: bool = False) -> None:
    """Configure process-wide logging from a YAML dictConfig file.

    Falls back to basicConfig on stderr when the file is missing or unusable.
    """
    path = Path(config_path)
    try:
        with path.open("r", encoding="utf-8") as f:
            config = yaml.safe_load(f) or {}
        logging.config.dictConfig(config)
    except FileNotFoundError:
        logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
    except Exception as e:
        logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
        logging.getLogger(__name__).warning(f"Ignoring logging config {config_path}: {str(e)}")
    if quiet:
        logging.getLogger().setLevel(logging.WARNING)
