"""Seeded generators of the simulated benchmark data sets. Each returns
the data and the partition into the groups it was generated from.
"""
from typing import Callable, Dict, Optional, Tuple
from dataclasses import dataclass
import numpy as np
from scipy.spatial.distance import pdist
from .cluster_algos import MethodId
from .core import DataMatrix, Partition, RngSeed
from .errors import ContractError, ResampleError

MAX_CENTRE_DRAWS = 1000

Generated = Tuple[DataMatrix, Partition]


def _as_generator(seed: RngSeed) -> np.random.Generator:
    if not isinstance(seed, RngSeed):
        raise ContractError('Scenario generators need an RngSeed')
    return seed.generator()


def _labels(sizes) -> Partition:
    return Partition(np.repeat(np.arange(len(sizes)), sizes), len(sizes))


def _multivariate_t2(rng: np.random.Generator, mean: np.ndarray,
                     cov: np.ndarray, size: int) -> np.ndarray:
    """Draws from a multivariate t distribution with two degrees of freedom,
    as a Gaussian draw divided by sqrt(chi2_2 / 2)

    :param rng: The generator
    :param mean: Location vector
    :param cov: Covariance of the underlying Gaussian
    :param size: Number of draws
    :return: size x len(mean) array
    """
    gauss = rng.multivariate_normal(np.zeros(mean.size), cov, size=size)
    scale = np.sqrt(rng.chisquare(2, size=size) / 2)
    return mean + gauss / scale[:, None]


def scenario1(seed: RngSeed) -> Generated:
    """Three spherical Gaussian clusters of 25, 25 and 50 points in 2-d,
    centred at (0, 0), (0, 5) and (5, -3)

    :param seed: Random stream
    :return: 100 x 2 data and the truth
    """
    rng = _as_generator(seed)
    sizes = (25, 25, 50)
    centres = np.array([[0.0, 0.0], [0.0, 5.0], [5.0, -3.0]])
    parts = [rng.normal(c, 1.0, size=(s, 2)) for c, s in zip(centres, sizes)]
    return DataMatrix(np.vstack(parts)), _labels(sizes)


def scenario2(seed: RngSeed) -> Generated:
    """Four spherical Gaussian clusters in 10-d with 25 or 50 points each
    and centres drawn from N(0, 1.9 I). Centre sets closer than 1 are
    redrawn.

    :param seed: Random stream
    :return: Data with 100 to 200 rows and the truth
    """
    rng = _as_generator(seed)
    sizes = rng.choice([25, 50], size=4)
    for _ in range(MAX_CENTRE_DRAWS):
        centres = rng.normal(0.0, np.sqrt(1.9), size=(4, 10))
        if pdist(centres).min() >= 1.0:
            break
    else:
        raise ResampleError(f"No centres at least 1 apart after "
                            f"{MAX_CENTRE_DRAWS} draws")
    parts = [rng.normal(c, 1.0, size=(s, 10)) for c, s in zip(centres, sizes)]
    return DataMatrix(np.vstack(parts)), _labels(sizes)


def scenario3(seed: RngSeed) -> Generated:
    """Four clusters of mixed shape plus two outlier groups in the first
    four dimensions, followed by a N(0, 1) and a t_2 noise variable

    :param seed: Random stream
    :return: 560 x 6 data and the six-group truth
    """
    rng = _as_generator(seed)
    sizes = (150, 250, 70, 70, 10, 10)
    cov2 = np.full((4, 4), 0.25) + np.eye(4) * 0.25
    parts = [
        rng.multivariate_normal([0, 2, 0, 2], np.eye(4) * 0.1, size=150),
        rng.multivariate_normal([3, 3, 3, 3], cov2, size=250),
        rng.exponential(1.0, size=(70, 4)) - 2.0,
        _multivariate_t2(rng, np.array([2.0, 0, 2, 0]), np.eye(4) * 0.1, 70),
        rng.uniform(-2.0, 5.0, size=(10, 4)),
        _multivariate_t2(rng, np.full(4, 1.5), np.eye(4) * 2.0, 10),
    ]
    informative = np.vstack(parts)
    noise = np.column_stack([rng.normal(size=sum(sizes)),
                             rng.standard_t(2, size=sum(sizes))])
    return DataMatrix(np.hstack([informative, noise])), _labels(sizes)


def scenario4(seed: RngSeed) -> Generated:
    """Two elongated clusters of 100 points along the diagonal of 3-d space

    :param seed: Random stream
    :return: 200 x 3 data and the truth
    """
    rng = _as_generator(seed)
    line = np.repeat(np.linspace(-0.5, 0.5, 100)[:, None], 3, axis=1)
    first = line + rng.normal(0.0, 0.1, size=line.shape)
    second = line + rng.normal(0.0, 0.1, size=line.shape) + 1.0
    return DataMatrix(np.vstack([first, second])), _labels((100, 100))


def _ring(rng: np.random.Generator, low: float, high: float,
          size: int) -> np.ndarray:
    radius = rng.uniform(low, high, size=size)
    angle = rng.uniform(0.0, 2 * np.pi, size=size)
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def scenario5(seed: RngSeed) -> Generated:
    """Two concentric rings of 180 points with radii in [0.75, 0.9] and
    [0.35, 0.5]

    :param seed: Random stream
    :return: 360 x 2 data and the truth, outer ring first
    """
    rng = _as_generator(seed)
    data = np.vstack([_ring(rng, 0.75, 0.9, 180), _ring(rng, 0.35, 0.5, 180)])
    return DataMatrix(data), _labels((180, 180))


def scenario6(seed: RngSeed, a: float = -0.4, b: float = 1.0) -> Generated:
    """Two interleaved half moons of 180 points each

    :param seed: Random stream
    :param a: Horizontal offset of the first moon
    :param b: Vertical offset of the second moon
    :return: 360 x 2 data and the truth
    """
    rng = _as_generator(seed)
    moons = []
    for _ in range(2):
        radius = rng.uniform(0.8, 1.2, size=180)
        angle = rng.uniform(0.0, 2 * np.pi, size=180)
        moons.append((np.abs(radius * np.cos(angle)), radius * np.sin(angle)))
    first = np.column_stack([a + moons[0][0], moons[0][1]])
    second = np.column_stack([-moons[1][0], moons[1][1] - b])
    return DataMatrix(np.vstack([first, second])), _labels((180, 180))


@dataclass(frozen=True)
class ScenarioSpec:
    """A registered scenario

    :param name: CLI name
    :param generate: The generator
    :param true_k: The numbers of clusters counted as correct
    :param description: One line description
    :param method: The clustering method the scenario is studied with
    :param stand_in: Note printed when the method replaces one that is
        not available here
    """
    name: str
    generate: Callable[[RngSeed], Generated]
    true_k: Tuple[int, ...]
    description: str
    method: MethodId = MethodId.PAM
    stand_in: Optional[str] = None


SCENARIOS: Dict[str, ScenarioSpec] = {s.name: s for s in (
    ScenarioSpec('scenario1', scenario1, (3,),
                 'Three clusters in 2-d', MethodId.PAM),
    ScenarioSpec('scenario2', scenario2, (4,),
                 'Four clusters in 10-d', MethodId.KMEANS,
                 'k-means stands in for Gaussian mixture clustering'),
    ScenarioSpec('scenario3', scenario3, (4, 6),
                 'Four or six clusters in 6-d with mixed distribution types',
                 MethodId.WARD,
                 'Ward stands in for Gaussian mixture clustering'),
    ScenarioSpec('scenario4', scenario4, (2,),
                 'Two elongated clusters in 3-d', MethodId.COMPLETE),
    ScenarioSpec('scenario5', scenario5, (2,),
                 'Two ring-shaped clusters in 2-d', MethodId.SINGLE),
    ScenarioSpec('scenario6', scenario6, (2,),
                 'Two moon-shaped clusters in 2-d', MethodId.SINGLE,
                 'single linkage stands in for spectral clustering'),
)}
