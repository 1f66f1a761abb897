import logging
from functools import wraps
from typing import Callable, Any, Tuple, Type
from tenacity import retry, retry_if_not_exception_type, stop_after_attempt, wait_exponential

logger = logging.getLogger(__name__)


def retry_operation(max_attempts: int = 3, backoff_multiplier: float = 0.1, max_backoff: float = 2.0,
                    give_up_on: Tuple[Type[BaseException], ...] = ()) -> Callable:
    """
    Decorator for retrying synchronous operations

    Args:
        max_attempts: Maximum number of attempts
        backoff_multiplier: Multiplier for exponential backoff
        max_backoff: Maximum delay between attempts
        give_up_on: Exception types re-raised immediately without retrying

    Returns:
        Decorated function
    """

    def decorator(func: Callable) -> Callable:
        @wraps(func)
        @retry(
            stop=stop_after_attempt(max_attempts),
            wait=wait_exponential(multiplier=backoff_multiplier, min=0, max=max_backoff),
            retry=retry_if_not_exception_type(give_up_on),
            reraise=True,
        )
        def wrapper(*args, **kwargs) -> Any:
            try:
                return func(*args, **kwargs)
            except Exception as e:
                logger.warning(f"[RETRY] Attempt to execute {func.__name__} failed: {e}")
                raise

        return wrapper

    return decorator


# Missing or unreadable-by-design files fail at once; transient I/O errors are retried
retry_file_operation = retry_operation(
    max_attempts=3,
    backoff_multiplier=0.1,
    max_backoff=1.0,
    give_up_on=(FileNotFoundError, IsADirectoryError, PermissionError, UnicodeDecodeError),
)
