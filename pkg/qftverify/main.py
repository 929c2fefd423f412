from __future__ import annotations

import logging
import os

from flask import Flask, jsonify

from .config import configure_logging, get_settings
from .exceptions import ConfigError, QFTVerifyError

configure_logging()

logger = logging.getLogger(__name__)


def create_app() -> Flask:

    app = Flask(__name__.split(".")[0])

    settings = get_settings()
    app.config.setdefault("SECRET_KEY", os.getenv("SECRET_KEY", "dev-secret-key"))
    app.config.setdefault("QFTV_WORKERS", settings.workers)
    app.config.setdefault("QFTV_MAX_QUBITS", settings.max_qubits)

    # Register blueprints
    from .routes import register_blueprints

    register_blueprints(app)

    @app.errorhandler(ConfigError)
    def config_error(e: ConfigError):
        return jsonify(error=str(e), errors=[{"loc": loc, "msg": msg} for loc, msg in e.errors]), 422

    @app.errorhandler(QFTVerifyError)
    def verify_error(e: QFTVerifyError):
        logger.warning("Request failed: %s", e)
        return jsonify(error=str(e), type=type(e).__name__), 400

    return app
