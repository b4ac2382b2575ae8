"""Fan independent runs out to worker processes"""

import logging
from multiprocessing import Pool

_logger = logging.getLogger(__name__)


def map_runs(func, tasks, jobs=1):
    """``[func(t) for t in tasks]``, optionally spread over ``jobs`` processes

    Results always come back in task order, so the outcome does not depend
    on the number of workers or on which worker finished first.
    """
    tasks = list(tasks)
    jobs = max(1, int(jobs))
    if jobs == 1 or len(tasks) <= 1:
        results = []
        for i, task in enumerate(tasks):
            results.append(func(task))
            _logger.debug("run %d/%d done", i + 1, len(tasks))
        return results

    workers = min(jobs, len(tasks))
    _logger.debug("running %d tasks on %d processes", len(tasks), workers)
    results = []
    with Pool(workers) as pool:
        for i, result in enumerate(pool.imap(func, tasks)):
            results.append(result)
            _logger.debug("run %d/%d done", i + 1, len(tasks))
    return results
