from unittest import TestCase
import logging
import math
import numpy as np
from calibrated_validity.lib.calibrate import CVNN, Calibration, \
    CalibrationRegime, ClusteringCollection, Component, CompositeSpec, \
    Entry, RegimeKind, aggregate, attach_cvnn, collection_to_frame, \
    composite_a1, composite_a2, rank_clusterings, rank_scores, \
    select_by_index, zscore_calibrate
from calibrated_validity.lib.core import Partition
from calibrated_validity.lib.errors import ContractError
from calibrated_validity.lib.indexes import IndexValue

POOLED = CalibrationRegime(RegimeKind.POOLED, b=1)
PER_K = CalibrationRegime(RegimeKind.PER_K, b=1)


def entry(source, k, draw=0, **values):
    raw = {i: IndexValue.of(i, v) for i, v in values.items()}
    return Entry(source, k, Partition(np.arange(k)), raw, draw)


def collection(*entries):
    ids = sorted({i for e in entries for i in e.raw})
    return ClusteringCollection(entries, ids)


class TestCollection(TestCase):

    def test_kinds(self):
        self.assertTrue(entry('ward', 2).is_proper)
        self.assertEqual(entry('rk_single', 2).kind, 'random')
        failed = Entry('pam', 3, None)
        self.assertTrue(failed.failed)
        self.assertIsNone(failed.usable('asw'))

    def test_degenerate_values_unusable(self):
        e = entry('kmeans', 2, dunn=math.inf, asw=0.5)
        self.assertIsNone(e.usable('dunn'))
        self.assertEqual(e.usable('asw'), 0.5)

    def test_check_sizes(self):
        entries = [entry('kmeans', 2)] + \
            [entry(g, 2) for g in ('rk_centroid', 'rk_single', 'rk_complete',
                                   'rk_average')]
        collection(*entries).check_sizes(1, 1)
        with self.assertRaises(ContractError):
            collection(*entries).check_sizes(2, 1)
        with self.assertRaises(ContractError):
            collection(*entries[1:]).check_sizes(1, 1)

    def test_regime_contract(self):
        with self.assertRaises(ContractError):
            CalibrationRegime(b=0)
        self.assertIs(CalibrationRegime('perk').kind, RegimeKind.PER_K)


class TestZScore(TestCase):

    def setUp(self):
        self.logger = logging.getLogger('calibrate_test')

    def test_three_values(self):
        coll = collection(entry('kmeans', 2, asw=1.0),
                          entry('pam', 2, asw=2.0),
                          entry('single', 2, asw=3.0))
        calibration = zscore_calibrate(coll, POOLED, self.logger)
        self.assertEqual([v['asw'] for v in calibration.values],
                         [-1.0, 0.0, 1.0])
        self.assertEqual(calibration.notes, ())

    def test_constant_group(self):
        coll = collection(entry('kmeans', 2, ch=4.0), entry('pam', 2, ch=4.0))
        with self.assertLogs(self.logger, level='WARNING'):
            calibration = zscore_calibrate(coll, POOLED, self.logger)
        self.assertEqual([v['ch'] for v in calibration.values], [0.0, 0.0])
        self.assertEqual(len(calibration.notes), 1)

    def test_single_value_group(self):
        coll = collection(entry('kmeans', 2, ch=4.0), entry('pam', 3, ch=5.0))
        with self.assertLogs(self.logger, level='WARNING'):
            calibration = zscore_calibrate(coll, PER_K, self.logger)
        self.assertEqual([v['ch'] for v in calibration.values], [0.0, 0.0])
        self.assertEqual(len(calibration.notes), 2)

    def test_degenerate_left_out(self):
        coll = collection(entry('kmeans', 2, dunn=1.0),
                          entry('pam', 2, dunn=math.inf),
                          entry('single', 2, dunn=3.0))
        calibration = zscore_calibrate(coll, POOLED, self.logger)
        self.assertNotIn('dunn', calibration.values[1])
        self.assertAlmostEqual(calibration.values[0]['dunn'], -math.sqrt(0.5))
        self.assertAlmostEqual(calibration.values[2]['dunn'], math.sqrt(0.5))

    def test_per_k_removes_drift(self):
        entries = [entry('kmeans', k, asw=k * 10 + v)
                   for k in (2, 3) for v in (1.0, 2.0, 3.0)]
        coll = collection(*entries)
        per_k = zscore_calibrate(coll, PER_K, self.logger)
        pooled = zscore_calibrate(coll, POOLED, self.logger)
        for k in (2, 3):
            values = [v['asw'] for e, v in zip(coll.entries, per_k.values)
                      if e.k == k]
            self.assertAlmostEqual(float(np.mean(values)), 0.0)
            self.assertAlmostEqual(float(np.std(values, ddof=1)), 1.0)
        pooled_values = [v['asw'] for v in pooled.values]
        self.assertTrue(all(a < b for a, b in zip(pooled_values[:3],
                                                  pooled_values[3:])))
        self.assertAlmostEqual(float(np.mean(pooled_values)), 0.0)
        self.assertAlmostEqual(float(np.std(pooled_values, ddof=1)), 1.0)

    def test_groups_standardised_on_random_collections(self):
        rng = np.random.default_rng(5)
        sources = ('kmeans', 'pam', 'average', 'rk_centroid',
                   'rk_single', 'rk_complete', 'rk_average')
        for _ in range(40):
            ks = range(2, int(rng.integers(3, 8)))
            entries = []
            for k in ks:
                for source in sources:
                    for draw in range(int(rng.integers(1, 4))):
                        ch = float(rng.uniform(0, 1e4))
                        if rng.random() < 0.1:
                            ch = math.inf
                        entries.append(entry(source, k, draw,
                                             asw=float(rng.uniform(-1, 1)),
                                             ch=ch))
            coll = collection(*entries)
            for regime in (PER_K, POOLED):
                calibration = zscore_calibrate(coll, regime, self.logger)
                for index_id in ('asw', 'ch'):
                    for k in (ks if regime is PER_K else [None]):
                        group = [v[index_id] for e, v in
                                 zip(coll.entries, calibration.values)
                                 if index_id in v and k in (None, e.k)]
                        self.assertLessEqual(abs(np.mean(group)), 1e-12)
                        self.assertLessEqual(
                            abs(np.std(group, ddof=1) - 1.0), 1e-12)

    def test_random_entries_shape_the_groups(self):
        coll = collection(entry('kmeans', 2, asw=0.5),
                          entry('rk_centroid', 2, asw=0.1),
                          entry('rk_average', 2, draw=1, asw=0.3))
        calibration = zscore_calibrate(coll, POOLED, self.logger)
        self.assertAlmostEqual(calibration.values[0]['asw'], 1.0)


class TestComposites(TestCase):

    def setUp(self):
        self.logger = logging.getLogger('calibrate_test')

    def test_component_signs(self):
        self.assertEqual(Component('asw').sign, 1)
        self.assertEqual(Component('widest_gap').sign, -1)
        self.assertEqual(Component('ps').sign, 1)
        self.assertEqual(Component('bootstab').sign, -1)
        self.assertEqual(Component(CVNN).sign, -1)
        with self.assertRaises(ContractError):
            Component('asw', sign=-1)

    def test_invalid_components(self):
        with self.assertRaises(ContractError):
            Component('asw', weight=0)
        with self.assertRaises(ContractError):
            Component('asw', weight=math.nan)
        with self.assertRaises(ContractError):
            Component('silhouette')
        with self.assertRaises(ContractError):
            Component('cvnn_sep')
        with self.assertRaises(ContractError):
            CompositeSpec('empty', ())
        with self.assertRaises(ContractError):
            CompositeSpec('twice', (Component('asw'), Component('asw', 2)))

    def test_builtin(self):
        self.assertEqual(composite_a1().index_ids,
                         ['ave_within', 'pearson_gamma', 'bootstab'])
        self.assertEqual(composite_a2().index_ids,
                         ['sep_index', 'widest_gap', 'bootstab'])
        self.assertEqual([c.sign for c in composite_a2().components],
                         [1, -1, -1])

    def test_aggregate_signed_mean(self):
        coll = collection(entry('kmeans', 2, asw=1.0, ave_within=1.0),
                          entry('pam', 2, asw=3.0, ave_within=3.0))
        calibration = Calibration(coll, POOLED, (
            {'asw': -1.0, 'ave_within': -1.0},
            {'asw': 1.0, 'ave_within': 1.0}))
        spec = CompositeSpec.from_weights('x', {'asw': 1, 'ave_within': 3})
        self.assertEqual(aggregate(calibration, spec, self.logger),
                         [0.5, -0.5])
        balanced = CompositeSpec.from_weights('y', {'asw': 1, 'ave_within': 1})
        self.assertEqual(aggregate(calibration, balanced, self.logger),
                         [0.0, 0.0])

    def test_aggregate_missing_component(self):
        coll = collection(entry('kmeans', 2, asw=1.0), entry('pam', 2))
        calibration = Calibration(coll, POOLED, ({'asw': 1.0}, {}))
        spec = CompositeSpec.from_weights('x', {'asw': 1})
        with self.assertLogs(self.logger, level='WARNING'):
            scores = aggregate(calibration, spec, self.logger)
        self.assertEqual(scores, [1.0, None])


class TestRanking(TestCase):

    def setUp(self):
        self.logger = logging.getLogger('calibrate_test')

    def test_ties_prefer_smaller_k_then_method_order(self):
        coll = collection(entry('average', 3), entry('single', 2),
                          entry('kmeans', 2), entry('rk_single', 2))
        ranked = rank_scores(coll, [1.0, 1.0, 1.0, 5.0])
        self.assertEqual([(r.source, r.k) for r in ranked],
                         [('kmeans', 2), ('single', 2), ('average', 3)])
        self.assertEqual(ranked[0].position, 2)

    def test_random_clusterings_never_nominated(self):
        coll = collection(entry('kmeans', 2, asw=0.2),
                          entry('rk_centroid', 2, asw=0.9),
                          entry('pam', 3, asw=0.4))
        spec = CompositeSpec.from_weights('asw', {'asw': 1})
        ranked = rank_clusterings(coll, spec, POOLED, self.logger)
        self.assertEqual([r.source for r in ranked], ['pam', 'kmeans'])

    def test_argmax_invariant_to_weight_scale_and_shift(self):
        rng = np.random.default_rng(12)
        sources = ('kmeans', 'pam', 'ward', 'rk_centroid', 'rk_single')
        for _ in range(50):
            entries = [entry(s, k, asw=rng.normal(), widest_gap=rng.normal(),
                             ch=rng.normal())
                       for k in (2, 3, 4) for s in sources]
            weights = dict(zip(('asw', 'widest_gap', 'ch'),
                               rng.uniform(0.1, 2.0, 3)))
            scaled = {i: 7.5 * w for i, w in weights.items()}
            shift, stretch = rng.normal(), rng.uniform(0.5, 4.0)
            moved = [entry(e.source, e.k, **{
                i: stretch * v.value + shift for i, v in e.raw.items()})
                for e in entries]
            first = rank_clusterings(collection(*entries),
                                     CompositeSpec.from_weights('w', weights),
                                     PER_K, self.logger)[0]
            second = rank_clusterings(collection(*moved),
                                      CompositeSpec.from_weights('w', scaled),
                                      PER_K, self.logger)[0]
            self.assertEqual((first.source, first.k),
                             (second.source, second.k))

    def test_select_by_index(self):
        coll = collection(entry('kmeans', 2, ave_within=2.0),
                          entry('pam', 2, ave_within=1.0),
                          entry('rk_single', 2, ave_within=0.1),
                          entry('pam', 3, ave_within=math.inf))
        ranked = select_by_index(coll, 'ave_within')
        self.assertEqual([r.source for r in ranked], ['pam', 'kmeans'])
        only = select_by_index(coll, 'ave_within', methods=['kmeans'])
        self.assertEqual([r.source for r in only], ['kmeans'])
        with self.assertRaises(ContractError):
            select_by_index(coll, 'cvnn_com')

    def test_select_by_cvnn_over_proper_pool(self):
        coll = collection(entry('kmeans', 2, cvnn_sep=0.2, cvnn_com=2.0),
                          entry('pam', 2, cvnn_sep=0.4, cvnn_com=1.0),
                          entry('rk_single', 2, cvnn_sep=0.8, cvnn_com=8.0))
        ranked = select_by_index(coll, CVNN)
        self.assertEqual([(r.source, r.score) for r in ranked],
                         [('kmeans', 1.5), ('pam', 1.5)])


class TestCvnnAndFrames(TestCase):

    def test_attach_cvnn(self):
        coll = collection(entry('kmeans', 2, cvnn_sep=0.2, cvnn_com=2.0),
                          entry('rk_single', 2, cvnn_sep=0.4, cvnn_com=4.0),
                          entry('pam', 2, asw=0.1))
        attached = attach_cvnn(coll)
        self.assertEqual(attached.entries[0].usable(CVNN), 1.0)
        self.assertEqual(attached.entries[1].usable(CVNN), 2.0)
        self.assertIsNone(attached.entries[2].usable(CVNN))
        self.assertNotIn(CVNN, coll.entries[0].raw)

    def test_frame(self):
        coll = ClusteringCollection(
            (entry('kmeans', 2, asw=0.5, dunn=math.inf),
             Entry('pam', 2, None)), ('asw', 'dunn'))
        calibration = Calibration(coll, POOLED, ({'asw': 0.25}, {}))
        frame = collection_to_frame(coll, calibration)
        self.assertEqual(list(frame.columns),
                         ['source', 'kind', 'K', 'draw', 'index_id', 'raw',
                          'calibrated', 'degenerate'])
        self.assertEqual(len(frame), 4)
        asw = frame[(frame.source == 'kmeans') & (frame.index_id == 'asw')]
        self.assertEqual(asw.calibrated.iloc[0], 0.25)
        dunn = frame[(frame.source == 'kmeans') & (frame.index_id == 'dunn')]
        self.assertTrue(bool(dunn.degenerate.iloc[0]))
        self.assertTrue(math.isnan(dunn.calibrated.iloc[0]))
        self.assertTrue(frame[frame.source == 'pam'].raw.isna().all())
