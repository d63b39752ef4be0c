"""Clustering collections, Z-score calibration against random clusterings
and composite indexes built as signed weighted means of calibrated values
"""
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, \
    Union
from dataclasses import dataclass, field, replace
from enum import Enum
from logging import Logger
import math
import numpy as np
import pandas as pd
from scipy.stats import zscore
from .cluster_algos import MethodId
from .core import Partition
from .errors import ContractError
from .indexes import IndexId, IndexValue, cvnn_aggregate
from .randclust import RandomMethodId
from .stability import StabilityId

CVNN = 'cvnn'
PROPER = 'proper'
RANDOM = 'random'

LARGER_IS_BETTER: Dict[str, bool] = {
    **{i.value: i.larger_is_better for i in IndexId},
    **{s.value: s.larger_is_better for s in StabilityId},
    CVNN: False,
}

# Ids a user can request or put in a composite; the CVNN parts are only
# ingredients of the collection-level cvnn value
SELECTABLE_IDS = tuple(i for i in LARGER_IS_BETTER
                       if i not in (IndexId.CVNN_SEP.value,
                                    IndexId.CVNN_COM.value))


_METHOD_VALUES = frozenset(m.value for m in MethodId)


@dataclass(frozen=True, eq=False)
class Entry:
    """One clustering in the collection with its raw index values

    :param source: A MethodId value for proper clusterings, a
        RandomMethodId value for random ones
    :param k: Number of clusters
    :param partition: The clustering, None when the method failed
    :param raw: Raw value per index id
    :param draw: Draw number b of a random clustering
    :param notes: Diagnostics gathered while computing the entry
    """
    source: str
    k: int
    partition: Optional[Partition]
    raw: Mapping[str, IndexValue] = field(default_factory=dict)
    draw: int = 0
    notes: Tuple[str, ...] = ()

    @property
    def kind(self) -> str:
        return PROPER if self.source in _METHOD_VALUES else RANDOM

    @property
    def is_proper(self) -> bool:
        return self.kind == PROPER

    @property
    def failed(self) -> bool:
        return self.partition is None

    def usable(self, index_id: str) -> Optional[float]:
        """The raw value of an index if it may enter calibration

        :param index_id: The index id
        :return: The value, or None when missing or degenerate
        """
        value = self.raw.get(index_id)
        if value is None or value.degenerate:
            return None
        return value.value


@dataclass(frozen=True, eq=False)
class ClusteringCollection:
    """All proper and random clusterings of one data set, over all K

    :param entries: The clusterings
    :param index_ids: The index ids requested for every entry
    """
    entries: Tuple[Entry, ...]
    index_ids: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, 'entries', tuple(self.entries))
        object.__setattr__(self, 'index_ids', tuple(self.index_ids))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ks(self) -> List[int]:
        return sorted({e.k for e in self.entries})

    def proper(self) -> List[Entry]:
        return [e for e in self.entries if e.is_proper]

    def at_k(self, k: int) -> List[Entry]:
        return [e for e in self.entries if e.k == k]

    def check_sizes(self, b: int, proper_per_k: int) -> None:
        """Check that every K holds 4B random and R_K proper entries

        :param b: Random clusterings per generator
        :param proper_per_k: Expected number of proper entries per K
        """
        for k in self.ks:
            at_k = self.at_k(k)
            randoms = sum(1 for e in at_k if not e.is_proper)
            if randoms != len(RandomMethodId) * b or \
                    len(at_k) - randoms != proper_per_k:
                raise ContractError(
                    f"K={k} holds {len(at_k) - randoms} proper and {randoms} "
                    f"random clusterings, expected {proper_per_k} and "
                    f"{len(RandomMethodId) * b}")


class RegimeKind(str, Enum):
    """Calibration groups: one per K or all K pooled
    """
    PER_K = 'perk'
    POOLED = 'pooled'


@dataclass(frozen=True)
class CalibrationRegime:
    """How calibration groups are formed

    :param kind: Per K or pooled over all K
    :param b: Random clusterings per generator and K
    """
    kind: RegimeKind = RegimeKind.POOLED
    b: int = 100

    def __post_init__(self) -> None:
        object.__setattr__(self, 'kind', RegimeKind(self.kind))
        if self.b < 1:
            raise ContractError(f"B={self.b} must be at least 1")


@dataclass(frozen=True, eq=False)
class Calibration:
    """Calibrated values of a collection

    :param collection: The calibrated collection
    :param regime: The regime used
    :param values: Calibrated value per index id, aligned with the entries
    :param notes: Diagnostics about degenerate groups
    """
    collection: ClusteringCollection
    regime: CalibrationRegime
    values: Tuple[Dict[str, float], ...]
    notes: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Component:
    """One index inside a composite. The sign follows the index's better
    direction and is filled in when omitted.

    :param index_id: The index or stability id
    :param weight: Positive weight
    :param sign: +1 for larger-is-better indexes, -1 otherwise
    """
    index_id: str
    weight: float = 1.0
    sign: int = 0

    def __post_init__(self) -> None:
        if self.index_id not in SELECTABLE_IDS:
            raise ContractError(f"Unknown index {self.index_id} in composite")
        if not math.isfinite(self.weight) or self.weight <= 0:
            raise ContractError(f"Weight of {self.index_id} must be positive")
        expected = 1 if LARGER_IS_BETTER[self.index_id] else -1
        if self.sign == 0:
            object.__setattr__(self, 'sign', expected)
        elif self.sign != expected:
            raise ContractError(f"{self.index_id} needs sign {expected}")


@dataclass(frozen=True)
class CompositeSpec:
    """A composite index: the signed weighted mean of calibrated indexes

    :param name: Name used in reports
    :param components: The components
    """
    name: str
    components: Tuple[Component, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'components', tuple(self.components))
        if not self.components:
            raise ContractError(f"Composite {self.name} has no components")
        ids = [c.index_id for c in self.components]
        if len(set(ids)) != len(ids):
            raise ContractError(f"Composite {self.name} repeats an index")

    @classmethod
    def from_weights(cls, name: str, weights: Mapping[str, float]) \
            -> 'CompositeSpec':
        """Build a composite from index weights, signs derived

        :param name: The composite name
        :param weights: Weight per index id
        :return: The composite
        """
        return cls(name, tuple(Component(i, float(w))
                               for i, w in weights.items()))

    @property
    def index_ids(self) -> List[str]:
        return [c.index_id for c in self.components]


def composite_a1() -> CompositeSpec:
    """Homogeneity, dissimilarity representation and stability

    :return: A1 = AveWithin, PearsonGamma and Bootstab, equal weights
    """
    return CompositeSpec('a1', (Component(IndexId.AVE_WITHIN.value, 1, -1),
                                Component(IndexId.PEARSON_GAMMA.value, 1, 1),
                                Component(StabilityId.BOOTSTAB.value, 1, -1)))


def composite_a2() -> CompositeSpec:
    """Separation, gap avoidance and stability

    :return: A2 = SepIndex, WidestGap and Bootstab, equal weights
    """
    return CompositeSpec('a2', (Component(IndexId.SEP_INDEX.value, 1, 1),
                                Component(IndexId.WIDEST_GAP.value, 1, -1),
                                Component(StabilityId.BOOTSTAB.value, 1, -1)))


def composite_species() -> CompositeSpec:
    """Within-cluster homogeneity, gap avoidance, separation and
    dissimilarity representation, as used to delimit species

    :return: The composite
    """
    return CompositeSpec.from_weights('species', {
        IndexId.AVE_WITHIN.value: 1, IndexId.WIDEST_GAP.value: 1,
        IndexId.SEP_INDEX.value: 1, IndexId.PEARSON_GAMMA.value: 1})


BUILTIN_COMPOSITES: Dict[str, Callable[[], CompositeSpec]] = {
    'a1': composite_a1,
    'a2': composite_a2,
    'species': composite_species,
}


def attach_cvnn(collection: ClusteringCollection) -> ClusteringCollection:
    """Add the collection-level CVNN value to every entry that has both
    CVNN components. CVNN normalises each component by its maximum over
    the clusterings being compared, so it only exists for a set.

    :param collection: The collection
    :return: A new collection whose entries carry a ``cvnn`` raw value
    """
    usable = [i for i, e in enumerate(collection.entries)
              if e.usable(IndexId.CVNN_SEP.value) is not None and
              e.usable(IndexId.CVNN_COM.value) is not None]
    if not usable:
        return collection
    scores = cvnn_aggregate([
        (collection.entries[i].raw[IndexId.CVNN_SEP.value].value,
         collection.entries[i].raw[IndexId.CVNN_COM.value].value)
        for i in usable])
    entries = list(collection.entries)
    for i, score in zip(usable, scores):
        raw = dict(entries[i].raw)
        raw[CVNN] = IndexValue.of(CVNN, score)
        entries[i] = replace(entries[i], raw=raw)
    return ClusteringCollection(tuple(entries), collection.index_ids)


def zscore_calibrate(collection: ClusteringCollection,
                     regime: CalibrationRegime, logger: Logger) \
        -> Calibration:
    """Z-score every index within its calibration group: all entries at
    the same K (per-K regime) or all entries (pooled regime). Degenerate
    values are left out and get no calibrated value. Stability values
    exist only for proper clusterings, so only those enter their groups.

    :param collection: The collection
    :param regime: The calibration regime
    :param logger: A logger object
    :return: The calibrated values
    """
    values: List[Dict[str, float]] = [{} for _ in collection.entries]
    notes = []
    index_ids = sorted({i for e in collection.entries for i in e.raw})
    groups: Dict[Tuple[str, Optional[int]], List[int]] = {}
    for position, entry in enumerate(collection.entries):
        group_k = entry.k if regime.kind is RegimeKind.PER_K else None
        for index_id in index_ids:
            if entry.usable(index_id) is not None:
                groups.setdefault((index_id, group_k), []).append(position)
    for (index_id, group_k), members in sorted(
            groups.items(), key=lambda g: (g[0][0], g[0][1] or 0)):
        raw = np.array([collection.entries[m].raw[index_id].value
                        for m in members])
        if raw.size < 2 or np.std(raw, ddof=1) == 0:
            where = f" at K={group_k}" if group_k is not None else ''
            note = (f"{index_id}{where}: {raw.size} values with no spread, "
                    f"calibrated to 0")
            notes.append(note)
            logger.warning(f"calibrate.py: {note}")
            calibrated = np.zeros(raw.size)
        else:
            calibrated = zscore(raw, ddof=1)
        for member, value in zip(members, calibrated):
            values[member][index_id] = float(value)
    return Calibration(collection, regime, tuple(values), tuple(notes))


def aggregate(calibration: Calibration, spec: CompositeSpec,
              logger: Logger) -> List[Optional[float]]:
    """Composite score of every entry: sum_j w_j s_j z_j / sum_j w_j.
    Entries lacking a calibrated value for any component get None.

    :param calibration: The calibrated collection
    :param spec: The composite
    :param logger: A logger object
    :return: Score per entry, larger is better
    """
    total_weight = sum(c.weight for c in spec.components)
    scores: List[Optional[float]] = []
    for entry, values in zip(calibration.collection.entries,
                             calibration.values):
        missing = [c.index_id for c in spec.components
                   if c.index_id not in values]
        if missing:
            message = (f"calibrate.py: {spec.name} skips {entry.source} "
                       f"K={entry.k}, no calibrated {', '.join(missing)}")
            if entry.is_proper:
                logger.warning(message)
            else:
                logger.debug(message)
            scores.append(None)
            continue
        scores.append(sum(c.weight * c.sign * values[c.index_id]
                          for c in spec.components) / total_weight)
    return scores


@dataclass(frozen=True)
class Ranked:
    """A proper clustering nominated by a composite or index

    :param source: The method id
    :param k: Number of clusters
    :param score: The score it was ranked by
    :param position: Its position in the collection
    """
    source: str
    k: int
    score: float
    position: int


def rank_scores(collection: ClusteringCollection,
                scores: Sequence[Optional[float]]) -> List[Ranked]:
    """Rank proper entries by precomputed scores, larger first

    :param collection: The collection
    :param scores: Score per entry, None where unavailable
    :return: The ranked proper clusterings
    """
    ranked = [Ranked(e.source, e.k, float(s), p)
              for p, (e, s) in enumerate(zip(collection.entries, scores))
              if e.is_proper and s is not None]
    return sorted(ranked, key=lambda r: (-r.score, r.k,
                                         MethodId(r.source).order))


def rank_clusterings(collection: ClusteringCollection, spec: CompositeSpec,
                     regime: CalibrationRegime, logger: Logger,
                     calibration: Optional[Calibration] = None) \
        -> List[Ranked]:
    """Rank the proper clusterings by a composite, best first. Ties go to
    the smaller K, then the earlier method. Random clusterings only shape
    the calibration.

    :param collection: The collection
    :param spec: The composite
    :param regime: The calibration regime
    :param logger: A logger object
    :param calibration: A calibration of the collection, reused if given
    :return: The ranked proper clusterings
    """
    if calibration is None:
        calibration = zscore_calibrate(collection, regime, logger)
    return rank_scores(collection, aggregate(calibration, spec, logger))


def select_by_index(collection: ClusteringCollection, index_id: str,
                    methods: Optional[Sequence[Union[MethodId, str]]] = None) \
        -> List[Ranked]:
    """Rank proper clusterings by one uncalibrated index, best first.
    CVNN is normalised over the proper clusterings being compared.

    :param collection: The collection
    :param index_id: Index or stability id
    :param methods: Restrict to these methods
    :return: The ranked proper clusterings, scores in raw units
    """
    if index_id not in SELECTABLE_IDS:
        raise ContractError(f"Unknown index {index_id}")
    allowed = {MethodId(m).value for m in methods} if methods else None
    pool = [p for p, e in enumerate(collection.entries)
            if e.is_proper and not e.failed and
            (allowed is None or e.source in allowed)]
    raw: Dict[int, float] = {}
    if index_id == CVNN:
        parts = [p for p in pool
                 if collection.entries[p].usable(IndexId.CVNN_SEP.value)
                 is not None and
                 collection.entries[p].usable(IndexId.CVNN_COM.value)
                 is not None]
        if parts:
            scores = cvnn_aggregate([
                (collection.entries[p].raw[IndexId.CVNN_SEP.value].value,
                 collection.entries[p].raw[IndexId.CVNN_COM.value].value)
                for p in parts])
            raw = dict(zip(parts, scores))
    else:
        for p in pool:
            value = collection.entries[p].usable(index_id)
            if value is not None:
                raw[p] = value
    sign = 1.0 if LARGER_IS_BETTER[index_id] else -1.0
    ranked = [Ranked(collection.entries[p].source, collection.entries[p].k,
                     v, p) for p, v in raw.items()]
    return sorted(ranked, key=lambda r: (-sign * r.score, r.k,
                                         MethodId(r.source).order))


def collection_to_frame(collection: ClusteringCollection,
                        calibration: Optional[Calibration] = None) \
        -> pd.DataFrame:
    """Long format table of a collection, one row per entry and index.
    Failed entries get a row per requested index with empty values.

    :param collection: The collection
    :param calibration: Calibrated values to include
    :return: Columns source, kind, K, draw, index_id, raw, calibrated,
        degenerate
    """
    rows = []
    for position, entry in enumerate(collection.entries):
        calibrated = calibration.values[position] if calibration else {}
        if entry.failed:
            for index_id in collection.index_ids:
                rows.append((entry.source, entry.kind, entry.k, entry.draw,
                             index_id, math.nan, math.nan, None))
            continue
        for index_id in sorted(entry.raw):
            value = entry.raw[index_id]
            rows.append((entry.source, entry.kind, entry.k, entry.draw,
                         index_id, value.value,
                         calibrated.get(index_id, math.nan),
                         value.degenerate))
    return pd.DataFrame(rows, columns=['source', 'kind', 'K', 'draw',
                                       'index_id', 'raw', 'calibrated',
                                       'degenerate'])
