"""
Utility for re-running precision-sensitive searches at growing precision.
"""

import logging
import math
from typing import Any, Callable, TypeVar

import config

from . import InsufficientPrecisionError

# Configure module-specific logger
logger = logging.getLogger(__name__)

# Type variable for the return type of the retried function
T = TypeVar("T")

# Default retry configuration
DEFAULT_GROWTH = config.common.PRECISION_GROWTH
DEFAULT_MAX_PRECISION = config.common.MAX_PRECISION


def retry_with_precision(
    operation: Callable[..., T],
    *args: Any,
    dps: int = config.common.RELATION_PRECISION,
    growth: float = DEFAULT_GROWTH,
    max_precision: int = DEFAULT_MAX_PRECISION,
    **kwargs: Any,
) -> T:
    """
    Call `operation(*args, dps=..., **kwargs)`, raising the precision after
    each InsufficientPrecisionError.

    Args:
        operation: Function taking a `dps` keyword
        *args: Positional arguments to pass to the operation
        dps: Starting precision in decimal digits
        growth: Multiplicative factor applied to the precision per retry
        max_precision: Precision beyond which the last error is re-raised
        **kwargs: Keyword arguments to pass to the operation

    Returns:
        The result of the operation

    Raises:
        InsufficientPrecisionError: When max_precision is reached
    """
    if growth <= 1:
        raise ValueError("precision growth factor must exceed 1")

    attempt = 0
    while True:
        try:
            if attempt > 0:
                logger.debug(f"Retry attempt {attempt} for {operation.__name__} at {dps} digits")
            return operation(*args, dps=dps, **kwargs)
        except InsufficientPrecisionError as e:
            next_dps = math.ceil(dps * growth)
            if next_dps > max_precision:
                logger.error(f"Precision limit ({max_precision}) reached for {operation.__name__}: {e}")
                raise
            logger.warning(f"{operation.__name__} needs more precision: {e}. Retrying at {next_dps} digits")
            dps = next_dps
            attempt += 1
