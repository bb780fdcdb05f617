import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List

from shared.config import get_settings
from shared.thresholds import SweepRow, sweep_row, validate_sweep_range


logger = logging.getLogger(__name__)


def run_sweep_rows(dmin: int, dmax: int) -> List[SweepRow]:
    """Evaluate sweep rows on a thread pool; rows come back in degree order."""
    validate_sweep_range(dmin, dmax)
    settings = get_settings()
    degrees = list(range(dmin, dmax + 1))
    started = time.perf_counter()
    threads = max(1, settings.threads)
    try:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(sweep_row, degrees))
        else:
            rows = [sweep_row(d) for d in degrees]
    except Exception:
        logger.exception("sweep failed on [%d, %d]", dmin, dmax, extra={"command": "sweep"})
        raise
    elapsed_ms = int((time.perf_counter() - started) * 1000)
    logger.info(
        "swept %d degrees on %d threads",
        len(rows),
        threads,
        extra={"command": "sweep", "elapsed_ms": elapsed_ms},
    )
    return rows
