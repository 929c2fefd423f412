from __future__ import annotations

import logging

from flask import Blueprint, Response, current_app, request

from qftverify.config import parse_config
from qftverify.exceptions import ConfigError
from qftverify.services.suites import run_suite

logger = logging.getLogger(__name__)

bp = Blueprint("suites", __name__, url_prefix="/suites")


@bp.route("/run", methods=["POST"])
def run():
    """
    Run one experiment suite synchronously.

    Body: the experiment configuration as JSON (same schema as the YAML files).
    Returns the structured report; ``all_passed`` tells whether every case held.
    """
    body = request.get_json(silent=True)
    if body is None:
        raise ConfigError("request body must be a JSON object", [("<body>", "expected JSON")])
    cfg = parse_config(body, "<request>")
    logger.info("HTTP run of suite %s (seed %d)", cfg.suite, cfg.seed)
    record = run_suite(cfg, workers=current_app.config.get("QFTV_WORKERS"))
    return Response(record.model_dump_json(), mimetype="application/json")
