"""The proper clustering methods whose outputs are validated
"""
from typing import Optional, Union
from enum import Enum
import numpy as np
from scipy.cluster.hierarchy import cut_tree, linkage
from scipy.spatial.distance import cdist
from .core import DataMatrix, DissimilarityMatrix, Partition, RngSeed
from .errors import ContractError

MAX_LLOYD_ITERATIONS = 100
DEFAULT_RESTARTS = 10


class MethodId(str, Enum):
    """Clustering methods, in the order used to break ranking ties
    """
    KMEANS = 'kmeans'
    PAM = 'pam'
    SINGLE = 'single'
    COMPLETE = 'complete'
    AVERAGE = 'average'
    WARD = 'ward'

    @property
    def order(self) -> int:
        return list(MethodId).index(self)


LINKAGES = (MethodId.SINGLE, MethodId.COMPLETE, MethodId.AVERAGE,
            MethodId.WARD)


def _check_k(k: int, n: int) -> None:
    if k < 1 or k > n:
        raise ContractError(f"K={k} clusters requested for {n} objects")


def _lloyd(x: np.ndarray, centres: np.ndarray) -> tuple:
    """Run Lloyd iterations from the given centres until the labels settle

    :param x: The n x p data
    :param centres: The K x p starting centres
    :return: labels, within-cluster sum of squares
    """
    k = centres.shape[0]
    labels = None
    wss = np.inf
    for _ in range(MAX_LLOYD_ITERATIONS):
        sq_dist = cdist(x, centres, 'sqeuclidean')
        new_labels = np.argmin(sq_dist, axis=1)
        assigned = sq_dist[np.arange(x.shape[0]), new_labels]
        sizes = np.bincount(new_labels, minlength=k)
        for empty in np.flatnonzero(sizes == 0):
            # Move the point farthest from its centre into the empty cluster
            movable = sizes[new_labels] > 1
            farthest = int(np.argmax(np.where(movable, assigned, -1.0)))
            sizes[new_labels[farthest]] -= 1
            new_labels[farthest] = empty
            sizes[empty] = 1
            assigned[farthest] = 0.0
            centres[empty] = x[farthest]
        for j in range(k):
            centres[j] = x[new_labels == j].mean(axis=0)
        new_wss = float(np.sum((x - centres[new_labels]) ** 2))
        assert new_wss <= wss + 1e-9 * max(1.0, abs(new_wss)), \
            'k-means objective increased'
        wss = new_wss
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
    return labels, wss


def kmeans(data: DataMatrix, k: int, restarts: int = DEFAULT_RESTARTS,
           seed: Optional[RngSeed] = None) -> Partition:
    """Lloyd's k-means, best of several seeded random initialisations by
    within-cluster sum of squares

    :param data: The data matrix
    :param k: Number of clusters
    :param restarts: Number of random initialisations
    :param seed: Random stream; restart r uses the child stream r
    :return: The best partition found
    """
    _check_k(k, data.n)
    if restarts < 1:
        raise ContractError('k-means needs at least one restart')
    seed = seed or RngSeed(0)
    x = np.asarray(data.values, dtype=float)
    best_labels, best_wss = None, np.inf
    for restart in range(restarts):
        rng = seed.child(restart).generator()
        start = rng.choice(data.n, size=k, replace=False)
        labels, wss = _lloyd(x, x[np.sort(start)].copy())
        if wss < best_wss:
            best_labels, best_wss = labels, wss
    return Partition(best_labels, k)


def pam_cost(d: DissimilarityMatrix, medoids: np.ndarray) -> float:
    """Sum of dissimilarities of every object to its closest medoid

    :param d: The dissimilarities
    :param medoids: Medoid object indexes
    :return: The PAM objective
    """
    return float(d.values[:, medoids].min(axis=1).sum())


def _build(dist: np.ndarray, k: int) -> list:
    """Greedy BUILD phase: add the medoid giving the largest cost decrease

    :param dist: The dissimilarity values
    :param k: Number of medoids
    :return: Medoid indexes in order of selection
    """
    medoids = [int(np.argmin(dist.sum(axis=0)))]
    nearest = dist[:, medoids[0]].copy()
    for _ in range(1, k):
        gain = np.maximum(nearest[:, None] - dist, 0.0).sum(axis=0)
        gain[medoids] = -1.0
        chosen = int(np.argmax(gain))
        medoids.append(chosen)
        nearest = np.minimum(nearest, dist[:, chosen])
    return medoids


def pam(d: DissimilarityMatrix, k: int) -> Partition:
    """Partitioning around medoids: BUILD followed by best-improvement
    SWAP until no single swap lowers the total dissimilarity to the
    medoids. Deterministic; ties go to the lowest index.

    :param d: The dissimilarities
    :param k: Number of clusters
    :return: The partition induced by the final medoids
    """
    _check_k(k, d.n)
    dist = d.values
    medoids = np.array(sorted(_build(dist, k)))
    cost = pam_cost(d, medoids)
    while k < d.n:
        to_medoids = dist[:, medoids]
        order = np.argsort(to_medoids, axis=1, kind='stable')
        first = to_medoids[np.arange(d.n), order[:, 0]]
        second = to_medoids[np.arange(d.n), order[:, 1]] if k > 1 \
            else np.full(d.n, np.inf)
        best_cost, best_swap = cost, None
        candidates = np.setdiff1d(np.arange(d.n), medoids)
        for j in range(k):
            without = np.where(order[:, 0] == j, second, first)
            swap_costs = np.minimum(without[:, None],
                                    dist[:, candidates]).sum(axis=0)
            h = int(np.argmin(swap_costs))
            if swap_costs[h] < best_cost - 1e-10 * max(1.0, cost):
                best_cost, best_swap = float(swap_costs[h]), (j, candidates[h])
        if best_swap is None:
            break
        medoids[best_swap[0]] = best_swap[1]
        medoids.sort()
        cost = best_cost
    labels = np.argmin(dist[:, medoids], axis=1)
    # A medoid always belongs to its own cluster, even with coincident points
    labels[medoids] = np.arange(k)
    return Partition(labels, k)


def hierarchical(d: DissimilarityMatrix, method: Union[MethodId, str],
                 k: int) -> Partition:
    """Agglomerative clustering cut to exactly K clusters.

    Ward uses the Lance-Williams update on squared dissimilarities with
    square-root merge heights.

    :param d: The dissimilarities
    :param method: single, complete, average or ward
    :param k: Number of clusters
    :return: The cut of the merge tree
    """
    method = MethodId(method)
    if method not in LINKAGES:
        raise ContractError(f"{method.value} is not a linkage method")
    _check_k(k, d.n)
    if k == d.n:
        return Partition(np.arange(d.n), k)
    tree = linkage(d.condensed(), method=method.value)
    return Partition.from_codes(cut_tree(tree, n_clusters=k).ravel())


def cluster(method: Union[MethodId, str], k: int, d: DissimilarityMatrix,
            data: Optional[DataMatrix] = None, seed: Optional[RngSeed] = None,
            restarts: int = DEFAULT_RESTARTS) -> Partition:
    """Run a clustering method by id

    :param method: The method
    :param k: Number of clusters
    :param d: Dissimilarities of the objects
    :param data: Coordinates, required by k-means
    :param seed: Random stream for methods that draw random numbers
    :param restarts: k-means initialisations
    :return: The partition
    """
    method = MethodId(method)
    if method is MethodId.KMEANS:
        if data is None:
            raise ContractError('k-means needs the data matrix')
        return kmeans(data, k, restarts, seed)
    if method is MethodId.PAM:
        return pam(d, k)
    return hierarchical(d, method, k)
