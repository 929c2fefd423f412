from __future__ import annotations

from flask import Flask


def register_blueprints(app: Flask) -> None:
    """Register all blueprints for the application."""

    from .channels import bp as channels_bp
    from .health import bp as health_bp
    from .suites import bp as suites_bp

    app.register_blueprint(health_bp)
    app.register_blueprint(suites_bp)
    app.register_blueprint(channels_bp)
