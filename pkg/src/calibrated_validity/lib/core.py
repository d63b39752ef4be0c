"""Data model for datasets, dissimilarities and partitions, plus the
adjusted Rand index used to score clusterings against a known truth
"""
from typing import Iterable, Optional, Sequence, Tuple, Union
from dataclasses import dataclass, field
import pathlib
import numpy as np
import pandas as pd
from scipy.spatial.distance import pdist, squareform
from sklearn.metrics import adjusted_rand_score
from .errors import ContractError, DimensionError, InvalidDataError

SYMMETRY_TOLERANCE = 1e-12


def _read_only(values: np.ndarray) -> np.ndarray:
    """Return a read-only view on an array

    :param values: The array to protect
    :return: A view with the writeable flag cleared
    """
    view = values.view()
    view.flags.writeable = False
    return view


@dataclass(frozen=True)
class RngSeed:
    """A reproducible random stream, identified by a master seed and a path
    of stream ids.

    The same (master, stream) pair always produces the same draws, whatever
    order the streams are consumed in.

    :param master: The master seed of the run
    :param stream: The stream id path below the master seed
    """
    master: int
    stream: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.master < 0 or any(s < 0 for s in self.stream):
            raise ContractError('Seeds and stream ids must be non-negative')

    def child(self, *ids: int) -> 'RngSeed':
        """Derive a sub-stream

        :param ids: Stream ids appended to this seed's path
        :return: The derived seed
        """
        return RngSeed(self.master, self.stream + tuple(int(i) for i in ids))

    def generator(self) -> np.random.Generator:
        """Build the numpy generator for this stream

        :return: A freshly seeded Generator
        """
        seq = np.random.SeedSequence(self.master, spawn_key=self.stream)
        return np.random.default_rng(seq)


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """An n x p matrix of finite real values, one row per object

    :param values: The data values
    """
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise InvalidDataError('Data must be a two dimensional matrix')
        if values.shape[0] < 2:
            raise InvalidDataError('Data needs at least two objects')
        if not np.all(np.isfinite(values)):
            raise InvalidDataError('Data contains non-finite values')
        object.__setattr__(self, 'values', _read_only(values))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def subset(self, idx: Sequence[int]) -> np.ndarray:
        """The rows of a subset of objects, as a plain array

        :param idx: Object indexes
        :return: The selected rows
        """
        return self.values[np.asarray(idx, dtype=int)]


class DissimilarityMatrix:
    """A dense symmetric n x n matrix of nonnegative dissimilarities with a
    zero diagonal. The triangle inequality is not required.

    :param values: The square matrix of dissimilarities
    """

    def __init__(self, values: Union[np.ndarray, Sequence[Sequence[float]]]) \
            -> None:
        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise InvalidDataError('Dissimilarities must be a square matrix')
        if not np.all(np.isfinite(values)):
            raise InvalidDataError('Dissimilarities contain non-finite values')
        if np.any(values < 0):
            raise InvalidDataError('Dissimilarities must be nonnegative')
        if np.any(np.diag(values) != 0):
            raise InvalidDataError('Dissimilarity diagonal must be zero')
        scale = max(float(np.max(values, initial=0.0)), 1.0)
        if np.max(np.abs(values - values.T), initial=0.0) > \
                SYMMETRY_TOLERANCE * scale:
            raise InvalidDataError('Dissimilarities must be symmetric')
        # Remove rounding asymmetry so every index sees d(i,j) == d(j,i)
        values = (values + values.T) / 2
        self._values = _read_only(values)
        self._order: Optional[np.ndarray] = None

    def __repr__(self) -> str:
        return f"DissimilarityMatrix(n={self.n})"

    @property
    def n(self) -> int:
        return self._values.shape[0]

    @property
    def values(self) -> np.ndarray:
        return self._values

    def condensed(self) -> np.ndarray:
        """The upper triangle as a vector in scipy's condensed order

        :return: Vector of the n(n-1)/2 unordered pair dissimilarities
        """
        return squareform(self._values, checks=False)

    def subset(self, idx: Sequence[int]) -> 'DissimilarityMatrix':
        """The dissimilarities among a subset of objects

        :param idx: Distinct object indexes
        :return: A new DissimilarityMatrix over the subset
        """
        idx = np.asarray(idx, dtype=int)
        return DissimilarityMatrix(self._values[np.ix_(idx, idx)])

    def neighbour_order(self) -> np.ndarray:
        """For every object, all other objects sorted by increasing
        dissimilarity, ties broken by lowest index. Computed once.

        :return: An n x (n-1) array of object indexes
        """
        if self._order is None:
            masked = self._values.copy()
            np.fill_diagonal(masked, np.inf)
            order = np.argsort(masked, axis=1, kind='stable')[:, :-1]
            self._order = _read_only(order)
        return self._order


@dataclass(frozen=True, eq=False)
class Partition:
    """Cluster labels for n objects, coded 0..K-1, every cluster nonempty

    :param labels: The label of each object
    :param k: The number of clusters; inferred from the labels if omitted
    """
    labels: np.ndarray
    k: int = field(default=0)

    def __post_init__(self) -> None:
        labels = np.array(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise InvalidDataError('Labels must be a nonempty vector')
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise InvalidDataError('Labels must be integer cluster ids')
        labels = labels.astype(int)
        k = self.k if self.k else int(labels.max()) + 1
        if labels.min() < 0 or labels.max() >= k:
            raise InvalidDataError(f"Labels must lie in 0..{k - 1}")
        sizes = np.bincount(labels, minlength=k)
        if np.any(sizes == 0):
            empty = np.flatnonzero(sizes == 0).tolist()
            raise InvalidDataError(f"Clusters {empty} are empty")
        object.__setattr__(self, 'labels', _read_only(labels))
        object.__setattr__(self, 'k', k)
        object.__setattr__(self, '_sizes', _read_only(sizes))

    @classmethod
    def from_codes(cls, codes: Iterable) -> 'Partition':
        """Build a partition from arbitrary cluster codes, numbering the
        clusters by order of first appearance

        :param codes: Any hashable cluster code per object
        :return: The partition
        """
        codes = np.asarray(list(codes))
        _, first, inverse = np.unique(codes, return_index=True,
                                      return_inverse=True)
        rank = np.empty(first.size, dtype=int)
        rank[np.argsort(first, kind='stable')] = np.arange(first.size)
        return cls(rank[inverse.ravel()], first.size)

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def sizes(self) -> np.ndarray:
        return self._sizes

    def members(self, k: int) -> np.ndarray:
        """Indexes of the objects in cluster k

        :param k: The cluster id
        :return: Object indexes in increasing order
        """
        return np.flatnonzero(self.labels == k)

    def one_hot(self) -> np.ndarray:
        """The n x K membership indicator matrix

        :return: Float matrix with a single 1 per row
        """
        indicator = np.zeros((self.n, self.k))
        indicator[np.arange(self.n), self.labels] = 1.0
        return indicator


def euclidean_dissimilarity(data: Union[DataMatrix, np.ndarray]) \
        -> DissimilarityMatrix:
    """Pairwise Euclidean distances between the rows of a data matrix

    :param data: The data
    :return: The dissimilarity matrix
    """
    if not isinstance(data, DataMatrix):
        data = DataMatrix(data)
    return DissimilarityMatrix(squareform(pdist(data.values, 'euclidean')))


def adjusted_rand_index(p1: Partition, p2: Partition) -> float:
    """Adjusted Rand index between two partitions of the same objects.

    :param p1: The first partition
    :param p2: The second partition
    :return: The ARI, 1 for identical partitions up to relabelling
    """
    if p1.n != p2.n:
        raise DimensionError(f"Partitions cover {p1.n} and {p2.n} objects")
    return float(adjusted_rand_score(p1.labels, p2.labels))


def read_csv(path: Union[str, pathlib.Path], header: bool = True,
             class_column: bool = False) \
        -> Tuple[DataMatrix, Optional[Partition]]:
    """Load a numeric data set, one row per object.

    A final integer column holds ground-truth classes when it is named
    ``class`` in the header row, or when ``class_column`` is set.

    :param path: Path to the CSV file
    :param header: If the first row holds column names
    :param class_column: If the final column is the ground truth
    :return: The data and the truth partition, if any
    """
    try:
        frame = pd.read_csv(path, header=0 if header else None)
    except (OSError, pd.errors.ParserError,
            pd.errors.EmptyDataError) as exc:
        raise InvalidDataError(f"Cannot read {path}: {exc}") from exc
    truth = None
    if header and str(frame.columns[-1]).strip().lower() == 'class':
        class_column = True
    if class_column:
        if frame.shape[1] < 2:
            raise InvalidDataError(f"{path} has no feature columns")
        classes = frame.iloc[:, -1]
        frame = frame.iloc[:, :-1]
        if classes.isna().any():
            raise InvalidDataError(f"{path} has missing class labels")
        truth = Partition.from_codes(classes.to_numpy())
    try:
        values = frame.to_numpy(dtype=float)
    except ValueError as exc:
        raise InvalidDataError(f"{path} contains non-numeric values") \
            from exc
    return DataMatrix(values), truth
