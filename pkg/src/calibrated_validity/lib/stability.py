"""Resampling stability of a clustering method: prediction strength and
Bootstab, with a supervised classification rule matched to each method.
"""
from typing import Callable, Optional, Sequence, Tuple, Union
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from logging import Logger
import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats.contingency import crosstab
from .cluster_algos import DEFAULT_RESTARTS, MethodId, cluster
from .core import DataMatrix, DissimilarityMatrix, Partition, RngSeed
from .errors import ContractError, ResampleError

Fit = Callable[[np.ndarray, RngSeed], Partition]
Plan = Tuple[np.ndarray, np.ndarray]


class ClassifierRule(str, Enum):
    """Supervised rules that extend a clustering to unclustered objects
    """
    NEAREST_CENTROID = 'nearest_centroid'
    NEAREST_NEIGHBOUR = 'nearest_neighbour'
    FURTHEST_NEIGHBOUR = 'furthest_neighbour'
    AVERAGE_DISSIMILARITY = 'average_dissimilarity'


METHOD_RULES = {
    MethodId.KMEANS: ClassifierRule.NEAREST_CENTROID,
    MethodId.PAM: ClassifierRule.NEAREST_CENTROID,
    MethodId.WARD: ClassifierRule.NEAREST_CENTROID,
    MethodId.SINGLE: ClassifierRule.NEAREST_NEIGHBOUR,
    MethodId.COMPLETE: ClassifierRule.FURTHEST_NEIGHBOUR,
    MethodId.AVERAGE: ClassifierRule.AVERAGE_DISSIMILARITY,
}


class StabilityId(str, Enum):
    """Stability statistics as they appear next to the indexes
    """
    PS = 'ps'
    BOOTSTAB = 'bootstab'

    @property
    def larger_is_better(self) -> bool:
        return self is StabilityId.PS


# Methods whose centroid is the cluster mean; PAM uses the medoid
MEAN_CENTROID_METHODS = frozenset({MethodId.KMEANS, MethodId.WARD})


def rule_for(method: Union[MethodId, str]) -> ClassifierRule:
    """The classification rule associated with a clustering method

    :param method: The clustering method
    :return: Its rule
    """
    return METHOD_RULES[MethodId(method)]


@dataclass(frozen=True)
class StabilityConfig:
    """Resampling settings

    :param a: Number of resampling repetitions
    :param seed: Random stream; repetition a uses the child stream a
    :param max_resamples: Attempts per repetition before giving up
    """
    a: int = 50
    seed: RngSeed = RngSeed(0)
    max_resamples: int = 20

    def __post_init__(self) -> None:
        if self.a < 1:
            raise ContractError(f"A={self.a} must be at least 1")


@dataclass(frozen=True)
class StabilityResult:
    """A stability statistic with the diagnostics gathered on the way

    :param value: The statistic
    :param notes: Human readable diagnostics
    """
    value: float
    notes: Tuple[str, ...] = field(default=())


def _medoids(d: DissimilarityMatrix, idx: np.ndarray, part: Partition) \
        -> np.ndarray:
    """Medoid object of every cluster of a partition over a subset

    :param d: Dissimilarities of all objects
    :param idx: The objects the partition covers
    :param part: The partition
    :return: Object index of each cluster's medoid
    """
    medoids = np.empty(part.k, dtype=int)
    for k in range(part.k):
        members = idx[part.labels == k]
        inner = d.values[np.ix_(members, members)].sum(axis=1)
        medoids[k] = members[int(np.argmin(inner))]
    return medoids


def classify(d: DissimilarityMatrix, train_idx: Sequence[int],
             train_part: Partition, test_idx: Sequence[int],
             rule: Union[ClassifierRule, str],
             data: Optional[DataMatrix] = None, mean_centroid: bool = False,
             logger: Optional[Logger] = None) -> np.ndarray:
    """Classify objects to the clusters of a partition of other objects.
    Ties go to the lowest cluster id.

    :param d: Dissimilarities of all objects
    :param train_idx: Objects covered by the trained partition
    :param train_part: The trained partition over train_idx
    :param test_idx: Objects to classify
    :param rule: The classification rule
    :param data: Coordinates, needed for mean centroids
    :param mean_centroid: Use cluster means instead of medoids for the
        nearest centroid rule
    :param logger: Receives the medoid fallback diagnostic
    :return: A cluster label per test object
    """
    rule = ClassifierRule(rule)
    train_idx = np.asarray(train_idx, dtype=int)
    test_idx = np.asarray(test_idx, dtype=int)
    if train_part.n != train_idx.size:
        raise ContractError('Trained partition does not match its objects')
    if test_idx.size == 0:
        return np.empty(0, dtype=int)
    if rule is ClassifierRule.NEAREST_CENTROID:
        if mean_centroid and data is None:
            if logger:
                logger.warning('stability.py: mean centroids need '
                               'coordinates, falling back to medoids')
            mean_centroid = False
        if mean_centroid:
            points = data.subset(train_idx)
            centres = np.array([points[train_part.labels == k].mean(axis=0)
                                for k in range(train_part.k)])
            scores = cdist(data.subset(test_idx), centres, 'euclidean')
        else:
            medoids = _medoids(d, train_idx, train_part)
            scores = d.values[np.ix_(test_idx, medoids)]
    else:
        block = d.values[np.ix_(test_idx, train_idx)]
        scores = np.empty((test_idx.size, train_part.k))
        for k in range(train_part.k):
            to_members = block[:, train_part.labels == k]
            if rule is ClassifierRule.NEAREST_NEIGHBOUR:
                scores[:, k] = to_members.min(axis=1)
            elif rule is ClassifierRule.FURTHEST_NEIGHBOUR:
                scores[:, k] = to_members.max(axis=1)
            else:
                scores[:, k] = to_members.mean(axis=1)
    return np.argmin(scores, axis=1)


def _fit_method(method: MethodId, k: int, d: DissimilarityMatrix,
                data: Optional[DataMatrix], restarts: int, idx: np.ndarray,
                seed: RngSeed) -> Partition:
    sub_data = DataMatrix(data.subset(idx)) if data is not None else None
    return cluster(method, k, d.subset(idx), sub_data, seed, restarts)


def method_fit(method: Union[MethodId, str], k: int, d: DissimilarityMatrix,
               data: Optional[DataMatrix] = None,
               restarts: int = DEFAULT_RESTARTS) -> Fit:
    """A picklable callable clustering any subset of objects with a method

    :param method: The clustering method
    :param k: Number of clusters
    :param d: Dissimilarities of all objects
    :param data: Coordinates of all objects
    :param restarts: k-means initialisations
    :return: fit(idx, seed) -> Partition over idx
    """
    return partial(_fit_method, MethodId(method), k, d, data, restarts)


def split_plan(n: int, seed: RngSeed) -> Plan:
    """A random split into halves of sizes floor(n/2) and ceil(n/2)

    :param n: Number of objects
    :param seed: Random stream
    :return: The two halves, each sorted
    """
    order = seed.generator().permutation(n)
    return np.sort(order[:n // 2]), np.sort(order[n // 2:])


def bootstrap_plan(n: int, seed: RngSeed) -> Plan:
    """Two bootstrap samples of size n drawn with replacement

    :param n: Number of objects
    :param seed: Random stream
    :return: The two samples as arrays of object indexes
    """
    rng = seed.generator()
    return rng.integers(0, n, size=n), rng.integers(0, n, size=n)


def _min_preserved_share(train: np.ndarray, predicted: np.ndarray,
                         k: int) -> Tuple[float, int]:
    """Smallest per-cluster share of ordered co-member pairs whose
    co-membership survives the cross classification

    :param train: Cluster labels of the half
    :param predicted: Labels predicted from the other half
    :param k: Number of clusters
    :return: The minimum share and the number of singleton clusters
    """
    shares, singletons = [], 0
    for cluster_id in range(k):
        members = predicted[train == cluster_id]
        size = members.size
        if size <= 1:
            shares.append(1.0)
            singletons += 1
            continue
        counts = np.bincount(members).astype(float)
        shares.append(float(np.sum(counts * (counts - 1))) /
                      (size * (size - 1)))
    return min(shares), singletons


def prediction_strength_for_fit(d: DissimilarityMatrix, fit: Fit, k: int,
                                rule: Union[ClassifierRule, str],
                                config: StabilityConfig, logger: Logger,
                                data: Optional[DataMatrix] = None,
                                mean_centroid: bool = False,
                                plans: Optional[Sequence[Plan]] = None) \
        -> StabilityResult:
    """Prediction strength of an arbitrary clustering procedure

    :param d: Dissimilarities of all objects
    :param fit: Clusters a subset of objects into k clusters
    :param k: Number of clusters
    :param rule: Classification rule for the cross prediction
    :param config: Resampling settings
    :param logger: A logger object
    :param data: Coordinates, for mean centroids
    :param mean_centroid: Nearest centroid uses cluster means
    :param plans: Explicit splits; replaces random splitting when given
    :return: PS in [0, 1]
    """
    if k < 2 or d.n < 4:
        raise ContractError('Prediction strength needs K >= 2 and n >= 4')
    repetitions = len(plans) if plans is not None else config.a
    total, singletons, retries = 0.0, 0, 0
    for a in range(repetitions):
        stream = config.seed.child(a)
        for attempt in range(config.max_resamples):
            halves = plans[a] if plans is not None else \
                split_plan(d.n, stream.child(attempt))
            try:
                parts = [fit(halves[t], stream.child(attempt, t + 1))
                         for t in range(2)]
                break
            except ContractError as exc:
                if plans is not None:
                    raise
                retries += 1
                logger.debug(f"stability.py: split {a} attempt {attempt} "
                             f"failed: {exc}")
        else:
            raise ResampleError(f"No usable split for K={k} after "
                                f"{config.max_resamples} attempts")
        for t in range(2):
            other = 1 - t
            predicted = classify(d, halves[other], parts[other], halves[t],
                                 rule, data, mean_centroid, logger)
            share, empty = _min_preserved_share(parts[t].labels, predicted, k)
            total += share
            singletons += empty
    notes = []
    if singletons:
        notes.append(f"{singletons} singleton clusters counted as fully "
                     f"preserved")
    if retries:
        notes.append(f"{retries} splits resampled")
    return StabilityResult(total / (2 * repetitions), tuple(notes))


def prediction_strength(d: DissimilarityMatrix,
                        method: Union[MethodId, str], k: int,
                        config: StabilityConfig, logger: Logger,
                        data: Optional[DataMatrix] = None,
                        restarts: int = DEFAULT_RESTARTS,
                        plans: Optional[Sequence[Plan]] = None) \
        -> StabilityResult:
    """Prediction strength of a clustering method at K, averaged over A
    random half splits, using the method's classification rule

    :param d: Dissimilarities of all objects
    :param method: The clustering method
    :param k: Number of clusters
    :param config: Resampling settings
    :param logger: A logger object
    :param data: Coordinates of all objects
    :param restarts: k-means initialisations
    :param plans: Explicit splits
    :return: PS in [0, 1]; larger is better
    """
    method = MethodId(method)
    fit = method_fit(method, k, d, data, restarts)
    return prediction_strength_for_fit(
        d, fit, k, rule_for(method), config, logger, data,
        method in MEAN_CENTROID_METHODS, plans)


def _co_membership_disagreement(first: np.ndarray,
                                second: np.ndarray) -> float:
    """Share of the n^2 ordered pairs (diagonal included) whose
    co-membership differs between two labellings

    :param first: Labels under the first clustering
    :param second: Labels under the second clustering
    :return: The share in [0, 1]
    """
    n = first.size
    table = crosstab(first, second).count.astype(float)
    same_first = float(np.sum(table.sum(axis=1) ** 2))
    same_second = float(np.sum(table.sum(axis=0) ** 2))
    same_both = float(np.sum(table ** 2))
    return (same_first + same_second - 2 * same_both) / (n * n)


def bootstab_for_fit(d: DissimilarityMatrix, fit: Fit, k: int,
                     rule: Union[ClassifierRule, str],
                     config: StabilityConfig, logger: Logger,
                     data: Optional[DataMatrix] = None,
                     mean_centroid: bool = False,
                     plans: Optional[Sequence[Plan]] = None) \
        -> StabilityResult:
    """Bootstab of an arbitrary clustering procedure. Objects drawn more
    than once are clustered once.

    :param d: Dissimilarities of all objects
    :param fit: Clusters a subset of objects into k clusters
    :param k: Number of clusters
    :param rule: Classification rule for objects outside a sample
    :param config: Resampling settings
    :param logger: A logger object
    :param data: Coordinates, for mean centroids
    :param mean_centroid: Nearest centroid uses cluster means
    :param plans: Explicit bootstrap sample pairs
    :return: Bootstab in [0, 1]
    """
    if k < 2:
        raise ContractError('Bootstab needs K >= 2')
    repetitions = len(plans) if plans is not None else config.a
    everyone = np.arange(d.n)
    total, retries = 0.0, 0
    for a in range(repetitions):
        stream = config.seed.child(a)
        for attempt in range(config.max_resamples):
            samples = plans[a] if plans is not None else \
                bootstrap_plan(d.n, stream.child(attempt))
            distinct = [np.unique(s) for s in samples]
            try:
                if min(s.size for s in distinct) < k:
                    raise ContractError('Bootstrap sample has fewer than K '
                                        'distinct objects')
                parts = [fit(distinct[t], stream.child(attempt, t + 1))
                         for t in range(2)]
                break
            except ContractError as exc:
                if plans is not None:
                    raise
                retries += 1
                logger.debug(f"stability.py: bootstrap {a} attempt "
                             f"{attempt} failed: {exc}")
        else:
            raise ResampleError(f"No usable bootstrap sample for K={k} "
                                f"after {config.max_resamples} attempts")
        extended = []
        for t in range(2):
            labels = np.empty(d.n, dtype=int)
            labels[distinct[t]] = parts[t].labels
            outside = np.setdiff1d(everyone, distinct[t])
            labels[outside] = classify(d, distinct[t], parts[t], outside,
                                       rule, data, mean_centroid, logger)
            extended.append(labels)
        total += _co_membership_disagreement(*extended)
    notes = (f"{retries} bootstrap samples redrawn",) if retries else ()
    return StabilityResult(total / repetitions, notes)


def bootstab(d: DissimilarityMatrix, method: Union[MethodId, str], k: int,
             config: StabilityConfig, logger: Logger,
             data: Optional[DataMatrix] = None,
             restarts: int = DEFAULT_RESTARTS,
             plans: Optional[Sequence[Plan]] = None) -> StabilityResult:
    """Bootstab of a clustering method at K over A pairs of bootstrap
    samples, using the method's classification rule

    :param d: Dissimilarities of all objects
    :param method: The clustering method
    :param k: Number of clusters
    :param config: Resampling settings
    :param logger: A logger object
    :param data: Coordinates of all objects
    :param restarts: k-means initialisations
    :param plans: Explicit bootstrap sample pairs
    :return: Bootstab in [0, 1]; smaller is better
    """
    method = MethodId(method)
    fit = method_fit(method, k, d, data, restarts)
    return bootstab_for_fit(
        d, fit, k, rule_for(method), config, logger, data,
        method in MEAN_CENTROID_METHODS, plans)

