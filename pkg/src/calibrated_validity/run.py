"""Run the validation pipeline: cluster, draw random clusterings, compute
indexes and stability, calibrate, aggregate and report. Independent pieces
of work run as tasks on an asyncio loop backed by a process pool.
"""
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from logging import Logger
import asyncio
import math
import pathlib
import numpy as np
from .lib.calibrate import CalibrationRegime, ClusteringCollection, Entry, \
    RegimeKind, aggregate, attach_cvnn, rank_scores, select_by_index, \
    zscore_calibrate
from .lib.cluster_algos import MethodId, cluster
from .lib.config import RunConfig
from .lib.core import DataMatrix, DissimilarityMatrix, Partition, RngSeed, \
    adjusted_rand_index, euclidean_dissimilarity, read_csv
from .lib.errors import ConfigError, ValidityError
from .lib.indexes import IndexParams, IndexValue, evaluate_indexes
from .lib.randclust import RandomMethodId, random_clustering
from .lib.report import ReplicateResult, ResultBundle, SelectionRow, \
    SimulationSummary, emit_plots, write_results, write_summary
from .lib.scenarios import SCENARIOS, ScenarioSpec
from .lib.stability import StabilityConfig, StabilityId, bootstab, \
    prediction_strength

# Stream ids below a replicate's seed
DATA_STREAM, PROPER_STREAM, RANDOM_STREAM, STABILITY_STREAM = 0, 1, 2, 3

Task = Tuple[Hashable, Callable[[], object]]
CellResult = Tuple[Optional[Partition], Dict[str, IndexValue],
                   Tuple[str, ...]]

# Set once per worker process by share_dataset
_dataset: Dict[str, object] = {}


def share_dataset(d: DissimilarityMatrix, data: DataMatrix) -> None:
    """Make the data set of the current run visible to the task functions
    of this process. Used as the pool initializer so the matrices are sent
    to each worker once instead of with every task.

    :param d: Dissimilarities
    :param data: The data
    """
    _dataset['d'] = d
    _dataset['data'] = data


def _proper_cell(method: MethodId, k: int, params: IndexParams,
                 ids: Sequence[str], seed: RngSeed,
                 restarts: int) -> CellResult:
    """Cluster with one method at one K and evaluate the indexes. A failure
    is returned as an empty cell.
    """
    d, data = _dataset['d'], _dataset['data']
    try:
        part = cluster(method, k, d, data, seed, restarts)
        return part, evaluate_indexes(d, part, params, ids), ()
    except ValidityError as exc:
        return None, {}, (f"{method.value} failed at K={k}: {exc}",)


def _random_cell(generator: RandomMethodId, k: int, params: IndexParams,
                 ids: Sequence[str], seed: RngSeed) -> CellResult:
    d = _dataset['d']
    part = random_clustering(generator, d, k, seed)
    return part, evaluate_indexes(d, part, params, ids), ()


def _stability_cell(method: MethodId, k: int, statistic: StabilityId,
                    config: StabilityConfig, restarts: int,
                    logger: Logger) -> Tuple[IndexValue, Tuple[str, ...]]:
    compute = prediction_strength if statistic is StabilityId.PS \
        else bootstab
    d, data = _dataset['d'], _dataset['data']
    try:
        result = compute(d, method, k, config, logger, data, restarts)
    except ValidityError as exc:
        return IndexValue.of(statistic.value, math.nan), \
            (f"{statistic.value} failed for {method.value} at K={k}: {exc}",)
    return IndexValue.of(statistic.value, result.value), result.notes


async def _gather(tasks: Sequence[Task], workers: int,
                  initializer: Optional[Callable[..., None]],
                  initargs: Tuple) -> List[object]:
    """Run the tasks in a process pool and wait for all of them

    :param tasks: Keyed zero-argument callables
    :param workers: Number of worker processes
    :param initializer: Called once in each worker before its first task
    :param initargs: Arguments of the initializer
    :return: Results in task order
    """
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers, initializer=initializer,
                             initargs=initargs) as pool:
        futures = [loop.run_in_executor(pool, task) for _, task in tasks]
        return await asyncio.gather(*futures)


def run_tasks(tasks: Sequence[Task], workers: int, logger: Logger,
              initializer: Optional[Callable[..., None]] = None,
              initargs: Tuple = ()) -> Dict[Hashable, object]:
    """Run independent tasks inline or on a process pool. Every task draws
    its randomness from its own stream, so the schedule never changes the
    results.

    :param tasks: Keyed zero-argument callables
    :param workers: Number of worker processes; 1 runs inline
    :param logger: A logger object
    :param initializer: Called once per process before the tasks run
    :param initargs: Arguments of the initializer
    :return: Result per task key
    """
    logger.debug(f"run.py: Running {len(tasks)} tasks on {workers} workers")
    if workers == 1:
        if initializer is not None:
            initializer(*initargs)
        return {key: task() for key, task in tasks}
    loop = asyncio.new_event_loop()
    try:
        results = loop.run_until_complete(
            _gather(tasks, workers, initializer, initargs))
    finally:
        loop.close()
    return {key: result for (key, _), result in zip(tasks, results)}


def _build_tasks(config: RunConfig, seed: RngSeed,
                 logger: Logger) -> List[Task]:
    params = IndexParams(config.p, config.kappa)
    ids = config.evaluated_index_ids()
    wanted = config.required_ids()
    methods = [MethodId(m) for m in config.methods]
    ks = range(config.kmin, config.kmax + 1)
    tasks: List[Task] = []
    for method in methods:
        for k in ks:
            tasks.append((('proper', method.order, k), partial(
                _proper_cell, method, k, params, ids,
                seed.child(PROPER_STREAM, method.order, k),
                config.kmeans_restarts)))
            stability = StabilityConfig(
                config.a, seed.child(STABILITY_STREAM, k))
            for statistic in StabilityId:
                if statistic.value in wanted:
                    tasks.append((('stability', method.order, k,
                                   statistic.value), partial(
                        _stability_cell, method, k, statistic,
                        stability, config.kmeans_restarts, logger)))
    for k in ks:
        for generator in RandomMethodId:
            for draw in range(config.b):
                tasks.append((('random', k, generator.order, draw), partial(
                    _random_cell, generator, k, params, ids,
                    seed.child(RANDOM_STREAM, k, generator.order, draw))))
    return tasks


def build_collection(data: DataMatrix, config: RunConfig, seed: RngSeed,
                     logger: Logger,
                     d: Optional[DissimilarityMatrix] = None) \
        -> ClusteringCollection:
    """Compute every proper and random clustering of one data set with its
    raw index and stability values

    :param data: The data
    :param config: The run configuration
    :param seed: The replicate's random stream
    :param logger: A logger object
    :param d: Dissimilarities, Euclidean when omitted
    :return: The collection, proper entries first
    """
    d = d if d is not None else euclidean_dissimilarity(data)
    results = run_tasks(_build_tasks(config, seed, logger), config.workers,
                        logger, share_dataset, (d, data))
    entries = []
    ks = range(config.kmin, config.kmax + 1)
    for method in (MethodId(m) for m in config.methods):
        for k in ks:
            part, raw, notes = results[('proper', method.order, k)]
            raw = dict(raw)
            notes = list(notes)
            for note in notes:
                logger.warning(f"run.py: {note}")
            for statistic in StabilityId:
                key = ('stability', method.order, k, statistic.value)
                if key in results and part is not None:
                    value, stability_notes = results[key]
                    raw[statistic.value] = value
                    for note in stability_notes:
                        message = f"run.py: {method.value} K={k}: {note}"
                        if value.degenerate:
                            logger.warning(message)
                        else:
                            logger.debug(message)
                    notes += list(stability_notes)
            for value in raw.values():
                if value.degenerate:
                    logger.debug(f"run.py: {value.index_id} is degenerate "
                                 f"for {method.value} at K={k}")
            entries.append(Entry(method.value, k, part, raw,
                                 notes=tuple(notes)))
    for k in ks:
        for generator in RandomMethodId:
            for draw in range(config.b):
                part, raw, _ = results[('random', k, generator.order, draw)]
                entries.append(Entry(generator.value, k, part, raw, draw))
    collection = ClusteringCollection(tuple(entries), config.required_ids())
    collection.check_sizes(config.b, len(config.methods))
    return attach_cvnn(collection)


def evaluate_replicate(replicate: int, data: DataMatrix,
                       truth: Optional[Partition], config: RunConfig,
                       logger: Logger) -> ReplicateResult:
    """Run the whole pipeline on one data set

    :param replicate: Replicate number
    :param data: The data
    :param truth: The true partition, if known
    :param config: The run configuration
    :param logger: A logger object
    :return: The replicate's results
    """
    seed = RngSeed(config.seed, (replicate,))
    logger.info(f"run.py: Replicate {replicate}: n={data.n}, "
                f"K={config.kmin}..{config.kmax}")
    collection = build_collection(data, config, seed, logger)
    regime = CalibrationRegime(RegimeKind(config.regime), config.b)
    calibration = zscore_calibrate(collection, regime, logger)
    composite_scores, rankings = {}, {}
    for spec in config.composite_specs():
        scores = aggregate(calibration, spec, logger)
        composite_scores[spec.name] = scores
        rankings[spec.name] = rank_scores(collection, scores)
    for index_id in config.indexes:
        rankings[index_id] = select_by_index(collection, index_id)
    ari = {}
    if truth is not None:
        ari = {p: adjusted_rand_index(e.partition, truth)
               for p, e in enumerate(collection.entries)
               if e.is_proper and not e.failed}
    return ReplicateResult(replicate, collection, calibration,
                           composite_scores, rankings, ari, truth)


def load_data(config: RunConfig, replicate: int) \
        -> Tuple[DataMatrix, Optional[Partition]]:
    """Load the data file or generate a scenario replicate

    :param config: The run configuration
    :param replicate: Replicate number
    :return: The data and the truth, if known
    """
    if config.scenario is not None:
        seed = RngSeed(config.seed, (replicate, DATA_STREAM))
        return SCENARIOS[config.scenario].generate(seed)
    return read_csv(config.data_csv, config.header, config.class_column)


def _run_replicates(config: RunConfig, logger: Logger) -> ResultBundle:
    config.validate()
    count = config.replicates if config.scenario is not None else 1
    loaded = [load_data(config, r) for r in range(count)]
    for data, _ in loaded:
        config.validate(data.n)
    results = [evaluate_replicate(r, data, truth, config, logger)
               for r, (data, truth) in enumerate(loaded)]
    scenario = SCENARIOS[config.scenario] if config.scenario else None
    return ResultBundle(config, results, scenario)


def _write_outputs(bundle: ResultBundle, logger: Logger,
                   summary: Optional[SimulationSummary] = None) -> None:
    out_dir = pathlib.Path(bundle.config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results(bundle, out_dir, logger)
    write_summary(bundle, out_dir, logger, summary)
    emit_plots(bundle, out_dir, logger)
    logger.info(f"run.py: Results written to {out_dir}")


def run_validation(config: RunConfig, logger: Logger) -> ResultBundle:
    """Validate the clusterings of a data file or scenario and write
    results.csv, summary.txt and the plots

    :param config: The run configuration
    :param logger: A logger object
    :return: The results
    """
    bundle = _run_replicates(config, logger)
    _write_outputs(bundle, logger)
    return bundle


def selection_table(bundle: ResultBundle) -> List[SelectionRow]:
    """Count, for every method and every index or composite, how often each
    K was selected over the replicates, with the mean ARI of the choices

    :param bundle: The results
    :return: One row per method and selector
    """
    config = bundle.config
    selectors = list(config.indexes) + bundle.composite_names
    rows = []
    for method in config.methods:
        for selector in selectors:
            counts: Dict[int, int] = {}
            aris = []
            for result in bundle.replicates:
                if selector in result.composite_scores:
                    ranked = [r for r in rank_scores(
                        result.collection, result.composite_scores[selector])
                        if r.source == method]
                else:
                    ranked = select_by_index(result.collection, selector,
                                             [method])
                if not ranked:
                    continue
                best = ranked[0]
                counts[best.k] = counts.get(best.k, 0) + 1
                if best.position in result.ari:
                    aris.append(result.ari[best.position])
            mean_ari = float(np.mean(aris)) if aris else None
            rows.append(SelectionRow(selector, method, counts, mean_ari))
    return rows


def run_simulation_study(config: RunConfig, logger: Logger) \
        -> SimulationSummary:
    """Run a scenario over several replicates and tabulate the selected
    numbers of clusters per index and composite

    :param config: The run configuration, with a scenario
    :param logger: A logger object
    :return: The selection tables
    """
    if config.scenario is None:
        raise ConfigError('A simulation study needs a scenario')
    spec: ScenarioSpec = SCENARIOS.get(config.scenario)
    if spec is not None and spec.stand_in:
        logger.info(f"run.py: {spec.name}: {spec.stand_in}")
    bundle = _run_replicates(config, logger)
    summary = SimulationSummary(bundle, selection_table(bundle))
    _write_outputs(bundle, logger, summary)
    out_dir = pathlib.Path(config.out)
    summary.to_frame().to_csv(out_dir / 'simulation.csv', index=False,
                              float_format='%.12g')
    return summary
