"""
Error handling around experiments and the cache index.
"""

import time
import logging
from functools import wraps

from sqlalchemy.exc import OperationalError, SQLAlchemyError

from stablesim.errors import ExperimentError, StableSimError

logger = logging.getLogger(__name__)


def experiment_guard(experiment):
    """Log start and outcome of an experiment; re-raise module errors with its name"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            logger.info(f"experiment {experiment.value}: start")
            started = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except ExperimentError:
                raise
            except StableSimError as e:
                logger.error(f"experiment {experiment.value} failed: {e}")
                raise ExperimentError(experiment.value, e) from e
            elapsed = time.perf_counter() - started
            if not result.applicable:
                logger.info(f"experiment {experiment.value}: not applicable ({elapsed:.1f}s)")
            else:
                verdict = 'PASS' if result.passed else 'FAIL'
                logger.info(f"experiment {experiment.value}: {verdict} ({elapsed:.1f}s)")
            return result
        return wrapper
    return decorator


def db_retry_on_locked(max_retries=3, delay=0.1, backoff=2.0):
    """
    Decorator to retry index operations while SQLite reports a locked database
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            retries = 0
            while True:
                try:
                    return func(*args, **kwargs)
                except OperationalError as e:
                    is_locked = 'database is locked' in str(e).lower()
                    if is_locked and retries < max_retries - 1:
                        retries += 1
                        wait_time = delay * (backoff ** (retries - 1))
                        logger.warning(f"Cache index locked (attempt {retries}/{max_retries}), "
                                       f"retrying in {wait_time:.2f} seconds")
                        from stablesim import db
                        db.session.rollback()
                        time.sleep(wait_time)
                        continue
                    logger.error(f"Cache index operation failed after {retries + 1} attempts: {e}")
                    raise
        return wrapper
    return decorator


def safe_commit():
    """Commit the index session; roll back and return False on failure"""
    from stablesim import db

    @db_retry_on_locked()
    def _commit():
        db.session.commit()

    try:
        _commit()
        return True
    except SQLAlchemyError as e:
        logger.warning(f"Cache index commit failed, rolling back: {e}")
        try:
            db.session.rollback()
        except SQLAlchemyError as rollback_error:
            logger.warning(f"Rollback failed: {rollback_error}")
        return False
