"""Calibrated internal validation of clusterings
"""
from .lib.core import DataMatrix, DissimilarityMatrix, Partition, RngSeed, \
    adjusted_rand_index, euclidean_dissimilarity, read_csv
from .lib.cluster_algos import MethodId, cluster
from .lib.indexes import IndexId, IndexParams, evaluate_indexes
from .lib.calibrate import CompositeSpec, composite_a1, composite_a2
from .lib.config import RunConfig, load_config, save_config
from .run import run_simulation_study, run_validation
