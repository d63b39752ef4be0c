"""Run configuration: JSON files, per-user defaults and validation
"""
from typing import Any, Dict, List, Mapping, Optional, Union
from dataclasses import asdict, dataclass, field, fields
from logging import Logger
import json
import os
import pathlib
from appdirs import user_config_dir
from .calibrate import BUILTIN_COMPOSITES, CVNN, SELECTABLE_IDS, \
    CompositeSpec, RegimeKind
from .cluster_algos import MethodId
from .errors import ConfigError, ContractError
from .indexes import IndexId
from .scenarios import SCENARIOS

APP_NAME = 'calibrated-validity'
DEFAULTS_FILE = 'defaults.json'

# JSON spellings accepted for fields whose Python names are lower case
ALIASES = {'B': 'b', 'A': 'a'}

_INDEX_VALUES = frozenset(i.value for i in IndexId)


def _default_indexes() -> List[str]:
    return list(SELECTABLE_IDS)


@dataclass
class RunConfig:
    """Everything a validate or simulate run needs

    :param data_csv: CSV file with one row per object
    :param header: If the CSV has a header row
    :param class_column: If the last CSV column holds true classes
    :param scenario: Name of a simulated scenario
    :param replicates: Number of simulated data sets
    :param methods: Clustering method ids
    :param kmin: Smallest number of clusters
    :param kmax: Largest number of clusters
    :param indexes: Index and stability ids to compute and report
    :param composites: Names of the composites to compute
    :param custom_composites: Extra composites, name to index weights
    :param b: Random clusterings per generator and K
    :param a: Resampling repetitions of the stability statistics
    :param kappa: Neighbourhood size of CVNN
    :param p: Border share of the separation index
    :param regime: Calibration regime, pooled or perk
    :param seed: Master seed
    :param out: Output directory
    :param workers: Worker processes; 1 runs inline
    :param kmeans_restarts: Random initialisations of k-means
    """
    data_csv: Optional[str] = None
    header: bool = True
    class_column: bool = False
    scenario: Optional[str] = None
    replicates: int = 1
    methods: List[str] = field(default_factory=lambda: ['pam'])
    kmin: int = 2
    kmax: int = 10
    indexes: List[str] = field(default_factory=_default_indexes)
    composites: List[str] = field(default_factory=lambda: ['a1', 'a2'])
    custom_composites: Dict[str, Dict[str, float]] = \
        field(default_factory=dict)
    b: int = 100
    a: int = 50
    kappa: int = 10
    p: float = 0.1
    regime: str = RegimeKind.POOLED.value
    seed: int = 1
    out: str = 'results'
    workers: int = 1
    kmeans_restarts: int = 10

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> 'RunConfig':
        """Build a config from a decoded JSON object

        :param values: Field values; missing fields keep their defaults
        :return: The config
        """
        config = cls()
        config.update(values)
        return config

    def update(self, values: Mapping[str, Any]) -> None:
        """Overwrite fields from a mapping, ignoring None values

        :param values: Field values
        """
        known = {f.name for f in fields(self)}
        for key, value in values.items():
            name = ALIASES.get(key, key)
            if name not in known:
                raise ConfigError(f"Unknown configuration field {key}")
            if value is not None:
                setattr(self, name, value)

    def to_mapping(self) -> Dict[str, Any]:
        """The config as a JSON-ready dictionary

        :return: Field values
        """
        return asdict(self)

    def composite_specs(self) -> List[CompositeSpec]:
        """Resolve the requested composites

        :return: Built-in and custom composites, in request order
        """
        specs = []
        for name in self.composites:
            if name in self.custom_composites:
                try:
                    specs.append(CompositeSpec.from_weights(
                        name, self.custom_composites[name]))
                except ContractError as exc:
                    raise ConfigError(f"Composite {name}: {exc}") from exc
            elif name in BUILTIN_COMPOSITES:
                specs.append(BUILTIN_COMPOSITES[name]())
            else:
                raise ConfigError(f"Unknown composite {name}")
        return specs

    def required_ids(self) -> List[str]:
        """Ids that must be computed: the requested indexes plus every
        composite component, in canonical order

        :return: Index and stability ids
        """
        wanted = set(self.indexes)
        for spec in self.composite_specs():
            wanted.update(spec.index_ids)
        return [i for i in SELECTABLE_IDS if i in wanted]

    def evaluated_index_ids(self) -> List[str]:
        """Ids handed to the index evaluation, CVNN expanded into its parts

        :return: IndexId values
        """
        ids = []
        for index_id in self.required_ids():
            if index_id == CVNN:
                ids += [IndexId.CVNN_SEP.value, IndexId.CVNN_COM.value]
            elif index_id in _INDEX_VALUES:
                ids.append(index_id)
        return ids

    def validate(self, n: Optional[int] = None) -> None:
        """Check the configuration, and the K range against the number of
        objects once it is known

        :param n: Number of objects
        """
        if (self.data_csv is None) == (self.scenario is None):
            raise ConfigError('Give exactly one of a data file or a scenario')
        if self.scenario is not None and self.scenario not in SCENARIOS:
            raise ConfigError(f"Unknown scenario {self.scenario}")
        if not self.methods:
            raise ConfigError('No clustering methods given')
        for method in self.methods:
            if method not in {m.value for m in MethodId}:
                raise ConfigError(f"Unknown clustering method {method}")
        for index_id in self.indexes:
            if index_id not in SELECTABLE_IDS:
                raise ConfigError(f"Unknown index {index_id}")
        if self.regime not in {r.value for r in RegimeKind}:
            raise ConfigError(f"Unknown regime {self.regime}")
        for name, minimum in (('kmin', 2), ('replicates', 1), ('b', 1),
                              ('a', 1), ('kappa', 1), ('workers', 1),
                              ('kmeans_restarts', 1)):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or \
                    value < minimum:
                raise ConfigError(f"{name}={value!r} must be an integer "
                                  f">= {minimum}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed={self.seed!r} must be a non-negative "
                              f"integer")
        if self.kmax < self.kmin:
            raise ConfigError(f"kmax={self.kmax} is below kmin={self.kmin}")
        if not 0 < self.p < 1:
            raise ConfigError(f"p={self.p} must lie in (0, 1)")
        self.composite_specs()
        if n is not None:
            if self.kmax > n - 1:
                raise ConfigError(f"kmax={self.kmax} exceeds n-1={n - 1}")
            if self.kappa > n - 1:
                raise ConfigError(f"kappa={self.kappa} exceeds n-1={n - 1}")


def check_config_dir() -> str:
    """Check if the config directory exists and create it if not.

    :return: The path to the config directory
    """
    config_dir = user_config_dir(APP_NAME, APP_NAME)
    os.makedirs(config_dir, exist_ok=True)
    return config_dir


def config_defaults(logger: Logger) -> Dict[str, Any]:
    """Seed the user default file with the built-in defaults and save it

    :param logger: A Logger object
    :return: The default values
    """
    logger.debug('config.py: Adding default values to config file')
    config = RunConfig().to_mapping()
    save_default_config(config, logger)
    return config


def load_default_config(logger: Logger) -> Dict[str, Any]:
    """Load the user default file, creating it on first use

    :param logger: A Logger object
    :return: The stored values
    """
    config_file = os.path.join(check_config_dir(), DEFAULTS_FILE)
    if not os.path.isfile(config_file):
        logger.debug(f"config.py: Config file {config_file} does not exist")
        return config_defaults(logger)
    logger.debug(f"config.py: Loading config file {config_file}")
    return load_config(config_file)


def save_default_config(config: Mapping[str, Any], logger: Logger) -> None:
    """Save the user default file

    :param config: The values to store
    :param logger: A Logger object
    """
    config_file = os.path.join(check_config_dir(), DEFAULTS_FILE)
    logger.debug(f"config.py: Saving config file: {config_file}")
    save_config(config, config_file)


def load_config(file_name: Union[str, pathlib.Path]) -> Dict[str, Any]:
    """Load a JSON config file

    :param file_name: Path of the file
    :return: The decoded object
    """
    try:
        with open(file_name) as f:
            values = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Cannot read config {file_name}: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError(f"Config {file_name} must hold a JSON object")
    return values


def save_config(config: Mapping[str, Any],
                file_name: Union[str, pathlib.Path]) -> None:
    """Save a config as JSON

    :param config: The values
    :param file_name: Path of the file
    """
    with open(file_name, 'w') as f:
        json.dump(dict(config), f, indent=2, sort_keys=True)


def build_config(logger: Logger,
                 config_file: Optional[Union[str, pathlib.Path]] = None,
                 overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Layer built-in defaults, the user default file, a config file and
    command line values, later layers winning

    :param logger: A Logger object
    :param config_file: Optional JSON config file
    :param overrides: Values given on the command line; None means unset
    :return: The merged config
    """
    config = RunConfig.from_mapping(load_default_config(logger))
    if config_file is not None:
        logger.debug(f"config.py: Loading run config {config_file}")
        config.update(load_config(config_file))
    if overrides:
        config.update(overrides)
    return config
