import logging

from fastapi import HTTPException
from pydantic import ValidationError

from core.errors import ConfigError, DataError, NumericalError

logger = logging.getLogger(__name__)


def http_error(e: Exception, action: str) -> HTTPException:
    """Map a failure to the HTTP status the routers report for it."""
    if isinstance(e, HTTPException):
        return e
    if isinstance(e, (ConfigError, ValidationError)):
        return HTTPException(status_code=400, detail=str(e))
    if isinstance(e, DataError):
        return HTTPException(status_code=422, detail=str(e))
    if isinstance(e, NumericalError):
        return HTTPException(status_code=500, detail=f"Numerical failure while {action}: {e}")
    if isinstance(e, ValueError):
        return HTTPException(status_code=400, detail=str(e))
    logger.exception("unexpected error while %s", action)
    return HTTPException(status_code=500, detail=f"Error while {action}: {str(e)}")
