import logging
import os
from concurrent.futures import ProcessPoolExecutor

mainlogger = logging.getLogger('mainlogger')


def get_dist_info(workers=None):
    """ (rank, world_size) of the driving process; rank is always 0 here. """
    world_size = workers if workers else (os.cpu_count() or 1)
    return 0, max(1, int(world_size))


def _run_shard(check, spec, rank, world_size):
    return check.run(spec, rank=rank, world_size=world_size)


def run_check(check, spec, workers=None):
    """
    Run one check, sharding its instance list over worker processes. Shard
    reports are merged in rank order and sorted, so the result does not
    depend on the number of workers unless the time budget cuts a shard short.
    """
    _, world_size = get_dist_info(workers)
    if world_size == 1:
        return check.run(spec).finalize()
    with ProcessPoolExecutor(max_workers=world_size) as pool:
        futures = [pool.submit(_run_shard, check, spec, rank, world_size) for rank in range(world_size)]
        shards = [f.result() for f in futures]
    report = shards[0]
    for other in shards[1:]:
        report.merge(other)
    mainlogger.info(f"{spec.id}: merged {world_size} shards, verdict {report.verdict}")
    return report.finalize()


def run_checks(pairs, workers=None):
    """ pairs: [(check, spec), ...] in registry order. """
    return [run_check(check, spec, workers) for check, spec in pairs]
