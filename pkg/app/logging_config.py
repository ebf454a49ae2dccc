# app/logging_config.py
"""
Configuración de logging estructurado (JSON).
La salida de los comandos va a stdout, así que los logs se escriben en stderr.
"""

import logging
import sys
from pythonjsonlogger import jsonlogger

from app.config import settings


def setup_logging(level: str | None = None):
    """Configura logging estructurado en formato JSON"""

    logger = logging.getLogger()

    # Evitar handlers duplicados si se llama varias veces (tests, CLI repetida)
    if not any(getattr(h, "_giant_component", False) for h in logger.handlers):
        logHandler = logging.StreamHandler(sys.stderr)
        logHandler._giant_component = True

        formatter = jsonlogger.JsonFormatter(
            fmt='%(asctime)s %(name)s %(levelname)s %(message)s %(pathname)s %(lineno)d',
            datefmt='%Y-%m-%dT%H:%M:%S'
        )
        logHandler.setFormatter(formatter)
        logger.addHandler(logHandler)

    logger.setLevel((level or settings.log_level).upper())

    return logger
