import os
import logging
import multiprocessing
from sqlalchemy import event
from sqlalchemy.engine import Engine


def _env_bool(name, default):
    return os.environ.get(name, default).lower() in ['true', 'on', '1']


class Config:
    SECRET_KEY = os.environ.get('SECRET_KEY') or 'stablesim-local'
    SQLALCHEMY_TRACK_MODIFICATIONS = False

    # Binary cache (noise fields, subordinator ensembles) and its SQLite index
    CACHE_DIR = os.environ.get('STABLESIM_CACHE_DIR') or os.path.abspath('.stablesim-cache')
    SQLALCHEMY_DATABASE_URI = os.environ.get('STABLESIM_DATABASE_URL') or \
        'sqlite:///' + os.path.join(CACHE_DIR, 'index.sqlite3')

    # Simulation defaults used when a run config leaves a key out
    DEFAULT_ALPHA = float(os.environ.get('STABLESIM_ALPHA') or 1.5)
    DEFAULT_HURST = float(os.environ.get('STABLESIM_HURST') or 0.5)
    DEFAULT_T_MAX = float(os.environ.get('STABLESIM_T_MAX') or 10.0)
    DEFAULT_N_STEPS = int(os.environ.get('STABLESIM_N_STEPS') or 1000)
    DEFAULT_N_PATHS = int(os.environ.get('STABLESIM_N_PATHS') or 1000)
    DEFAULT_N_REPLICATES = int(os.environ.get('STABLESIM_N_REPLICATES') or 10000)
    DEFAULT_SEED = int(os.environ.get('STABLESIM_SEED') or 20240101)
    PILOT_QUANTILE = 0.999
    CELLS_PER_HALF_AXIS = 500

    # Resource guards
    MAX_FIELD_ENTRIES = int(os.environ.get('STABLESIM_MAX_FIELD_ENTRIES') or 20_000_000)
    MAX_LOCAL_TIME_ENTRIES = int(os.environ.get('STABLESIM_MAX_LOCAL_TIME_ENTRIES') or 50_000_000)
    NOISE_BLOCK_ROWS = 64          # rows per noise substream; never tied to worker count
    FBM_DENSE_THRESHOLD = 64       # grids this small use the dense Cholesky factor
    DEFAULT_THREADS = int(os.environ.get('STABLESIM_THREADS') or min(8, multiprocessing.cpu_count()))

    # Reports
    REPORT_SCHEMA_VERSION = 1
    REPORT_TIMEZONE = os.environ.get('STABLESIM_TIMEZONE') or 'UTC'

    # Logging configuration
    LOG_TO_STDOUT = _env_bool('LOG_TO_STDOUT', 'true')
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'

    @staticmethod
    def get_database_config():
        """SQLite engine options for the cache index"""
        return {
            'pool_pre_ping': True,
            'echo': False,
            'future': True,
            'connect_args': {
                'check_same_thread': False,
                'timeout': 30.0,
            }
        }

    SQLALCHEMY_ENGINE_OPTIONS = {}

    @classmethod
    def init_app(cls, app):
        os.makedirs(app.config['CACHE_DIR'], exist_ok=True)
        app.config['SQLALCHEMY_ENGINE_OPTIONS'] = cls.get_database_config()
        cls._configure_sqlite_pragmas(app)

    @staticmethod
    def _configure_sqlite_pragmas(app):
        """Install SQLite pragmas on every new index connection"""
        @event.listens_for(Engine, "connect")
        def set_sqlite_pragmas(dbapi_connection, connection_record):
            try:
                module_name = getattr(dbapi_connection, "__class__", type(dbapi_connection)).__module__
                if 'sqlite3' in module_name.lower():
                    cursor = dbapi_connection.cursor()
                    cursor.execute("PRAGMA journal_mode=WAL")
                    cursor.execute("PRAGMA synchronous=NORMAL")
                    cursor.execute("PRAGMA busy_timeout=5000")
                    cursor.close()
            except Exception as e:
                # A missing pragma only costs speed
                app.logger.warning(f"Could not apply SQLite pragmas: {e}")


class DevelopmentConfig(Config):
    DEBUG = True
    LOG_LEVEL = 'DEBUG'


class ProductionConfig(Config):
    DEBUG = False

    @classmethod
    def init_app(cls, app):
        super().init_app(app)

        from logging.handlers import RotatingFileHandler

        if not os.path.exists('logs'):
            os.mkdir('logs')

        file_handler = RotatingFileHandler('logs/stablesim.log',
                                           maxBytes=10240000, backupCount=10)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'))
        file_handler.setLevel(logging.INFO)
        logging.getLogger('stablesim').addHandler(file_handler)
        app.logger.addHandler(file_handler)
        app.logger.info('stablesim startup - Production Mode')


class TestingConfig(Config):
    TESTING = True
    SQLALCHEMY_DATABASE_URI = 'sqlite://'
    LOG_TO_STDOUT = False
    DEFAULT_THREADS = 1
    MAX_FIELD_ENTRIES = 5_000_000

    @staticmethod
    def get_database_config():
        return {'future': True}


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': ProductionConfig
}
