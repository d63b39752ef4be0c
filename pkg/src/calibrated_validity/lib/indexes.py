"""Internal cluster validity indexes.

Every index is a pure function of a DissimilarityMatrix and a Partition.
Degenerate cases return ``inf`` or ``nan`` instead of raising; the
``evaluate_indexes`` wrapper flags them so calibration can skip them.
"""
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
from dataclasses import dataclass
from enum import Enum
import math
import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform
from scipy.stats import entropy as shannon_entropy
from scipy.stats import pearsonr
from sklearn.metrics import silhouette_score
from .core import DissimilarityMatrix, Partition
from .errors import ContractError


class IndexId(str, Enum):
    """Index ids, with the direction in which each index improves
    """
    ASW = 'asw'
    CH = 'ch'
    DUNN = 'dunn'
    CVNN_SEP = 'cvnn_sep'
    CVNN_COM = 'cvnn_com'
    PEARSON_GAMMA = 'pearson_gamma'
    AVE_WITHIN = 'ave_within'
    SEP_INDEX = 'sep_index'
    WIDEST_GAP = 'widest_gap'
    ENTROPY = 'entropy'

    @property
    def larger_is_better(self) -> bool:
        return self in _LARGER_IS_BETTER


_LARGER_IS_BETTER = frozenset({IndexId.ASW, IndexId.CH, IndexId.DUNN,
                               IndexId.PEARSON_GAMMA, IndexId.SEP_INDEX,
                               IndexId.ENTROPY})


@dataclass(frozen=True)
class IndexParams:
    """Tuning parameters of the indexes

    :param p: Share of border points per cluster used by the separation index
    :param kappa: Neighbourhood size of CVNN
    """
    p: float = 0.1
    kappa: int = 10

    def __post_init__(self) -> None:
        if not 0 < self.p < 1:
            raise ContractError(f"p={self.p} must lie in (0, 1)")
        if self.kappa < 1:
            raise ContractError(f"kappa={self.kappa} must be at least 1")


@dataclass(frozen=True)
class IndexValue:
    """One raw index evaluation

    :param index_id: The index
    :param value: Its raw value, possibly inf or nan
    :param degenerate: True when the value must not enter calibration
    """
    index_id: str
    value: float
    degenerate: bool

    @classmethod
    def of(cls, index_id: str, value: float) -> 'IndexValue':
        return cls(index_id, float(value), not math.isfinite(value))


def _require_k(part: Partition, d: Optional[DissimilarityMatrix] = None) \
        -> None:
    if part.k < 2:
        raise ContractError(f"Indexes need K >= 2, got K={part.k}")
    if d is not None and d.n != part.n:
        raise ContractError(f"Partition covers {part.n} objects, "
                            f"dissimilarities {d.n}")


def _same_cluster(part: Partition) -> np.ndarray:
    return part.labels[:, None] == part.labels[None, :]


def asw(d: DissimilarityMatrix, part: Partition) -> float:
    """Average silhouette width. Objects in singleton clusters get s_i = 0,
    as do objects with a_i = b_i = 0.

    :param d: The dissimilarities
    :param part: The partition
    :return: The ASW in [-1, 1]
    """
    _require_k(part, d)
    if part.k == part.n:
        return 0.0
    return float(silhouette_score(d.values, part.labels,
                                  metric='precomputed'))


def _pair_sums(values: np.ndarray, part: Partition) -> np.ndarray:
    """Per-cluster sums over ordered within-cluster pairs

    :param values: An n x n matrix
    :param part: The partition
    :return: Vector of K sums
    """
    one_hot = part.one_hot()
    return np.einsum('ik,ij,jk->k', one_hot, values, one_hot)


def calinski_harabasz(d: DissimilarityMatrix, part: Partition) -> float:
    """Calinski-Harabasz index from squared dissimilarities over ordered
    pairs. Returns inf when all within-cluster dissimilarities are zero.

    :param d: The dissimilarities
    :param part: The partition
    :return: The CH index
    """
    _require_k(part, d)
    if part.n <= part.k:
        raise ContractError('Calinski-Harabasz needs n > K')
    squared = d.values ** 2
    within = float(np.sum(_pair_sums(squared, part) / part.sizes))
    between = float(squared.sum()) / part.n - within
    if within <= 0:
        return math.inf
    return between * (part.n - part.k) / (within * (part.k - 1))


def dunn(d: DissimilarityMatrix, part: Partition) -> float:
    """Minimum between-cluster dissimilarity over maximum within-cluster
    dissimilarity. Returns inf when no within-cluster pair exists or the
    diameter is zero, nan when both parts are zero.

    :param d: The dissimilarities
    :param part: The partition
    :return: The Dunn index (may exceed 1)
    """
    _require_k(part, d)
    same = _same_cluster(part)
    np.fill_diagonal(same, False)
    separation = float(d.values[~_same_cluster(part)].min())
    if not same.any():
        return math.inf
    diameter = float(d.values[same].max())
    if diameter == 0:
        return math.nan if separation == 0 else math.inf
    return separation / diameter


def cvnn_components(d: DissimilarityMatrix, part: Partition,
                    kappa: int = 10) -> Tuple[float, float]:
    """Separation and compactness statistics of CVNN for one clustering.

    :param d: The dissimilarities
    :param part: The partition
    :param kappa: Number of nearest neighbours (ties by lowest index)
    :return: (sep in [0, 1], com = mean within-cluster dissimilarity)
    """
    _require_k(part, d)
    if not 1 <= kappa <= d.n - 1:
        raise ContractError(f"kappa={kappa} must lie in 1..{d.n - 1}")
    neighbours = d.neighbour_order()[:, :kappa]
    foreign = part.labels[neighbours] != part.labels[:, None]
    share = foreign.sum(axis=1) / kappa
    sep = float(np.max(np.bincount(part.labels, weights=share,
                                   minlength=part.k) / part.sizes))
    within_pairs = float(np.sum(part.sizes * (part.sizes - 1)))
    if within_pairs == 0:
        return sep, 0.0
    com = float(np.sum(_pair_sums(d.values, part))) / within_pairs
    return sep, com


def cvnn_aggregate(components: Sequence[Tuple[float, float]]) -> List[float]:
    """Combine CVNN components over a set of clusterings: each score is
    sep / max sep + com / max com, with 0/0 taken as 0. Smaller is better.

    :param components: (sep, com) per clustering
    :return: One score per clustering, in input order
    """
    if not components:
        raise ContractError('CVNN needs at least one clustering')
    seps = np.array([c[0] for c in components], dtype=float)
    coms = np.array([c[1] for c in components], dtype=float)
    max_sep, max_com = seps.max(), coms.max()
    sep_term = seps / max_sep if max_sep > 0 else np.zeros_like(seps)
    com_term = coms / max_com if max_com > 0 else np.zeros_like(coms)
    return (sep_term + com_term).tolist()


def pearson_gamma(d: DissimilarityMatrix, part: Partition) -> float:
    """Pearson correlation between the unordered pair dissimilarities and
    the indicator of the pair being split across clusters. nan when
    either vector is constant.

    :param d: The dissimilarities
    :param part: The partition
    :return: The correlation
    """
    _require_k(part, d)
    upper = np.triu_indices(part.n, 1)
    dist = d.values[upper]
    split = (part.labels[upper[0]] != part.labels[upper[1]]).astype(float)
    if np.ptp(dist) == 0 or np.ptp(split) == 0:
        return math.nan
    return float(pearsonr(dist, split)[0])


def ave_within(d: DissimilarityMatrix, part: Partition) -> float:
    """Average within-cluster dissimilarity giving every object the same
    weight; ordered pairs, singleton clusters contribute 0.

    :param d: The dissimilarities
    :param part: The partition
    :return: The index (smaller is better)
    """
    _require_k(part, d)
    sums = _pair_sums(d.values, part)
    denominators = np.maximum(part.sizes - 1, 1)
    return float(np.sum(sums / denominators)) / part.n


def sep_index(d: DissimilarityMatrix, part: Partition, p: float = 0.1) \
        -> float:
    """Mean of the smallest distances to the nearest foreign object,
    taking max(1, floor(p * n_k)) border objects from every cluster.

    :param d: The dissimilarities
    :param part: The partition
    :param p: Border share per cluster
    :return: The separation index (larger is better)
    """
    _require_k(part, d)
    if not 0 < p < 1:
        raise ContractError(f"p={p} must lie in (0, 1)")
    foreign = np.where(_same_cluster(part), np.inf, d.values).min(axis=1)
    total, count = 0.0, 0
    for k in range(part.k):
        border = np.sort(foreign[part.labels == k])
        take = max(1, math.floor(p * part.sizes[k] + 1e-9))
        total += float(border[:take].sum())
        count += take
    return total / count


def _single_linkage_height(dist: np.ndarray) -> float:
    """Height of the last single linkage merge, which is the largest edge
    of a minimum spanning tree. Zero dissimilarities are ordinary edges.

    :param dist: Square dissimilarity matrix of one cluster
    :return: The height, 0 for a single object
    """
    if dist.shape[0] < 2:
        return 0.0
    tree = linkage(squareform(dist, checks=False), method='single')
    return float(tree[-1, 2])


def widest_gap(d: DissimilarityMatrix, part: Partition) -> float:
    """Widest within-cluster gap: over all clusters and all splits of a
    cluster into two parts, the largest minimum cross dissimilarity. This
    equals the largest edge of the cluster's minimum spanning tree.

    :param d: The dissimilarities
    :param part: The partition
    :return: The gap (smaller is better)
    """
    _require_k(part, d)
    gaps = [_single_linkage_height(d.values[np.ix_(members, members)])
            for members in (part.members(k) for k in range(part.k))]
    return max(gaps)


def entropy(part: Partition) -> float:
    """Entropy of the cluster sizes, natural log

    :param part: The partition
    :return: The entropy in [0, ln K]
    """
    _require_k(part)
    return float(shannon_entropy(part.sizes))


_SINGLE = {
    IndexId.ASW: asw,
    IndexId.CH: calinski_harabasz,
    IndexId.DUNN: dunn,
    IndexId.PEARSON_GAMMA: pearson_gamma,
    IndexId.AVE_WITHIN: ave_within,
    IndexId.WIDEST_GAP: widest_gap,
}


def evaluate_indexes(d: DissimilarityMatrix, part: Partition,
                     params: IndexParams = IndexParams(),
                     ids: Optional[Iterable[str]] = None) \
        -> Dict[str, IndexValue]:
    """Evaluate several indexes on one clustering

    :param d: The dissimilarities
    :param part: The partition
    :param params: Index tuning parameters
    :param ids: Index ids to evaluate, all when omitted
    :return: IndexValue per index id
    """
    wanted = [IndexId(i) for i in ids] if ids is not None else list(IndexId)
    values: Dict[str, IndexValue] = {}
    for index_id in wanted:
        if index_id in _SINGLE:
            value = _SINGLE[index_id](d, part)
        elif index_id is IndexId.SEP_INDEX:
            value = sep_index(d, part, params.p)
        elif index_id is IndexId.ENTROPY:
            value = entropy(part)
        else:
            continue
        values[index_id.value] = IndexValue.of(index_id.value, value)
    if IndexId.CVNN_SEP in wanted or IndexId.CVNN_COM in wanted:
        sep, com = cvnn_components(d, part, params.kappa)
        values[IndexId.CVNN_SEP.value] = IndexValue.of(
            IndexId.CVNN_SEP.value, sep)
        values[IndexId.CVNN_COM.value] = IndexValue.of(
            IndexId.CVNN_COM.value, com)
    return values
