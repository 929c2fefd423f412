from __future__ import annotations

from flask import Blueprint, Response, request
from pydantic import ValidationError

from qftverify.exceptions import ConfigError
from qftverify.models.specs import NoiseSpec
from qftverify.services.closeness import closeness_report
from qftverify.services.noise import build_channel
from qftverify.services.verify import derive_seed

bp = Blueprint("channels", __name__, url_prefix="/channels")


@bp.route("/closeness", methods=["POST"])
def closeness():
    """
    Exact closeness measures of one channel.

    Body: a noise spec as JSON. Inverse-targeted channels get the S side,
    forward-targeted ones the T side. Seeded kinds without a ``seed`` use one
    derived from seed 0 and the channel id.
    """
    body = request.get_json(silent=True)
    try:
        spec = NoiseSpec.model_validate(body if isinstance(body, dict) else {})
    except ValidationError as e:
        errors = [(".".join(str(p) for p in err["loc"]) or "<root>", err["msg"]) for err in e.errors()]
        raise ConfigError("invalid noise spec", errors) from e
    if spec.needs_seed and spec.seed is None:
        spec = spec.model_copy(update={"seed": derive_seed(0, "channel", spec.id)})
    ch = build_channel(spec)
    report = closeness_report(None, ch) if spec.target == "forward" else closeness_report(ch)
    return Response(report.model_dump_json(), mimetype="application/json")
