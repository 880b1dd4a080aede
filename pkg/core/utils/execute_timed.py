import asyncio
import logging

logger = logging.getLogger(__name__)


def execute_with_timeout(func, timeout=60, **kwargs):
    """Execute a blocking function in a worker thread with a timeout.
    Args:
        func: The function to execute
        timeout: Timeout in seconds
        **kwargs: Arguments to pass to the function
    """
    async def _execute():
        try:
            return await asyncio.wait_for(asyncio.to_thread(func, **kwargs), timeout=timeout)
        except asyncio.TimeoutError:
            logger.error(f"Timeout executing {func.__name__} with {kwargs}")
            raise

    return _execute()


async def gather_grid(func, parameter: str, values, timeout=60, **fixed):
    """Evaluate func(**{parameter: v}, **fixed) for every grid value; results keep grid order."""
    tasks = [execute_with_timeout(func, timeout=timeout, **{parameter: value}, **fixed) for value in values]
    return await asyncio.gather(*tasks)


def run_grid(func, parameter: str, values, timeout=60, **fixed) -> list:
    return asyncio.run(gather_grid(func, parameter, list(values), timeout, **fixed))
