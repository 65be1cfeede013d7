"""
stablesim: simulation and verification of indicator fractional stable motions.

The package is a Flask application used through its command line. The app
carries configuration, logging and the SQLite index of the binary cache;
the numerical modules (sampling, subordinators, engine, oracle,
diagnostics) are plain functions over numpy arrays and can be used without
an application context.
"""

import os
import sys
import logging

from flask import Flask
from flask_sqlalchemy import SQLAlchemy

from config import config

# Initialize extensions
db = SQLAlchemy()

LOG_FORMAT = '%(asctime)s %(levelname)s [%(name)s] %(message)s'


def _configure_logging(app):
    """Route the package logger through the app's handlers and level"""
    package_logger = logging.getLogger('stablesim')
    level = getattr(logging, str(app.config.get('LOG_LEVEL', 'INFO')).upper(), logging.INFO)
    package_logger.setLevel(level)

    if app.config.get('LOG_TO_STDOUT'):
        already_attached = any(getattr(h, '_stablesim_stream', False) for h in package_logger.handlers)
        if not already_attached:
            stream_handler = logging.StreamHandler(sys.stderr)
            stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
            stream_handler._stablesim_stream = True
            package_logger.addHandler(stream_handler)
    app.logger.setLevel(level)


def create_app(config_class=None):
    if config_class is None:
        config_class = config[os.getenv('STABLESIM_ENV', 'default')]

    app = Flask(__name__)
    app.config.from_object(config_class)

    if hasattr(config_class, 'init_app'):
        config_class.init_app(app)

    _configure_logging(app)

    db.init_app(app)

    from stablesim.cli import register_commands
    register_commands(app)

    with app.app_context():
        # Importing the models registers the tables
        from stablesim import models  # noqa: F401
        db.create_all()

    app.logger.debug(f"stablesim app created with {config_class.__name__}")
    return app
