"""Result bundles and the artefacts written from them: results.csv,
summary.txt and one SVG plot per index or composite
"""
from typing import Dict, List, Optional, Sequence, Tuple
from dataclasses import dataclass, field
from logging import Logger
import math
import os
import pathlib
import numpy as np
import pandas as pd
from jinja2 import Environment, FileSystemLoader
from .calibrate import Calibration, ClusteringCollection, Ranked, \
    collection_to_frame
from .cluster_algos import MethodId
from .config import RunConfig
from .core import Partition
from .randclust import RandomMethodId
from .scenarios import ScenarioSpec

FLOAT_FORMAT = '%.12g'
TEMPLATES = os.path.join(os.path.dirname(os.path.dirname(__file__)),
                         'templates')
RESULT_COLUMNS = ['replicate', 'source', 'kind', 'K', 'draw', 'index_id',
                  'raw', 'calibrated', 'degenerate', 'composite', 'selected',
                  'ari']
LINE_COLOURS = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e',
                '#8c564b')
TOP = 3


@dataclass(frozen=True, eq=False)
class ReplicateResult:
    """Everything computed for one data set

    :param replicate: Replicate number, 0 for a single data set
    :param collection: Proper and random clusterings with raw values
    :param calibration: The calibrated values
    :param composite_scores: Score per entry for every composite
    :param rankings: Proper clusterings ranked by every composite and index
    :param ari: ARI against the truth per proper entry position
    :param truth: The true partition, if known
    """
    replicate: int
    collection: ClusteringCollection
    calibration: Calibration
    composite_scores: Dict[str, List[Optional[float]]]
    rankings: Dict[str, List[Ranked]]
    ari: Dict[int, float] = field(default_factory=dict)
    truth: Optional[Partition] = None


@dataclass(frozen=True, eq=False)
class ResultBundle:
    """The results of a run over one or more data sets

    :param config: The run configuration
    :param replicates: One result per data set
    :param scenario: The simulated scenario, if any
    """
    config: RunConfig
    replicates: List[ReplicateResult]
    scenario: Optional[ScenarioSpec] = None

    @property
    def composite_names(self) -> List[str]:
        return [c.name for c in self.config.composite_specs()]


@dataclass(frozen=True)
class SelectionRow:
    """How often one index or composite chose each K for one method

    :param selector: Index or composite name
    :param method: Clustering method
    :param counts: Replicates choosing each K
    :param mean_ari: Mean ARI of the chosen clusterings
    """
    selector: str
    method: str
    counts: Dict[int, int]
    mean_ari: Optional[float]


@dataclass(frozen=True, eq=False)
class SimulationSummary:
    """Selection tables of a simulation study

    :param bundle: The underlying results
    :param rows: One row per method and selector
    """
    bundle: ResultBundle
    rows: List[SelectionRow]

    def to_frame(self) -> pd.DataFrame:
        """The tables in long format

        :return: Columns method, selector, K, count, mean_ari
        """
        records = [(r.method, r.selector, k, c, r.mean_ari)
                   for r in self.rows for k, c in sorted(r.counts.items())]
        return pd.DataFrame(records, columns=['method', 'selector', 'K',
                                              'count', 'mean_ari'])


def _environment() -> Environment:
    loader = FileSystemLoader(TEMPLATES)
    return Environment(loader=loader, trim_blocks=True, lstrip_blocks=True,
                       keep_trailing_newline=True)


def _selected_positions(result: ReplicateResult) -> Dict[str, int]:
    return {name: ranked[0].position
            for name, ranked in result.rankings.items() if ranked}


def results_frame(bundle: ResultBundle) -> pd.DataFrame:
    """All raw, calibrated and composite values of a run in long format

    :param bundle: The results
    :return: The results table
    """
    frames = []
    for result in bundle.replicates:
        frame = collection_to_frame(result.collection, result.calibration)
        frame['composite'] = False
        positions = []
        for position, entry in enumerate(result.collection.entries):
            count = len(result.collection.index_ids) if entry.failed \
                else len(entry.raw)
            positions += [position] * count
        frame['position'] = positions
        extra = []
        for name, scores in result.composite_scores.items():
            for position, score in enumerate(scores):
                entry = result.collection.entries[position]
                extra.append({'source': entry.source, 'kind': entry.kind,
                              'K': entry.k, 'draw': entry.draw,
                              'index_id': name,
                              'raw': math.nan if score is None else score,
                              'calibrated': math.nan, 'degenerate': None,
                              'composite': True, 'position': position})
        if extra:
            frame = pd.concat([frame, pd.DataFrame(extra)],
                              ignore_index=True)
        selected = _selected_positions(result)
        frame['selected'] = [selected.get(i) == p for i, p in
                             zip(frame['index_id'], frame['position'])]
        frame['ari'] = [result.ari.get(p, math.nan)
                        for p in frame['position']]
        frame['replicate'] = result.replicate
        frames.append(frame.sort_values(['position', 'composite', 'index_id'],
                                        kind='mergesort'))
    if not frames:
        return pd.DataFrame(columns=RESULT_COLUMNS)
    return pd.concat(frames, ignore_index=True)[RESULT_COLUMNS]


def write_results(bundle: ResultBundle, out_dir: pathlib.Path,
                  logger: Logger) -> pathlib.Path:
    """Write results.csv

    :param bundle: The results
    :param out_dir: Output directory
    :param logger: A logger object
    :return: The path written
    """
    path = pathlib.Path(out_dir) / 'results.csv'
    logger.debug(f"report.py: Writing {path}")
    results_frame(bundle).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def _top(ranked: Sequence[Ranked], ari: Dict[int, float]) -> List[Dict]:
    return [{'rank': i + 1, 'method': r.source, 'k': r.k,
             'score': f"{r.score:.4g}",
             'ari': f"{ari[r.position]:.3f}" if r.position in ari else ''}
            for i, r in enumerate(ranked[:TOP])]


def _table_lines(summary: SimulationSummary, ks: List[int],
                 true_k: Tuple[int, ...]) -> List[Dict]:
    tables = []
    for method in dict.fromkeys(r.method for r in summary.rows):
        rows = []
        for row in (r for r in summary.rows if r.method == method):
            cells = [f"{row.counts.get(k, 0)}{'*' if k in true_k else ''}"
                     for k in ks]
            rows.append({'selector': row.selector, 'cells': cells,
                         'ari': '' if row.mean_ari is None
                         else f"{row.mean_ari:.3f}"})
        tables.append({'method': method, 'rows': rows})
    return tables


def write_summary(bundle: ResultBundle, out_dir: pathlib.Path,
                  logger: Logger,
                  summary: Optional[SimulationSummary] = None) \
        -> pathlib.Path:
    """Write summary.txt: the three best clusterings per composite and
    index for every data set, and the selection tables of a simulation

    :param bundle: The results
    :param out_dir: Output directory
    :param logger: A logger object
    :param summary: Selection tables to include
    :return: The path written
    """
    config = bundle.config
    replicates = []
    for result in bundle.replicates:
        listings = [{'name': name, 'top': _top(ranked, result.ari)}
                    for name, ranked in result.rankings.items()]
        replicates.append({'replicate': result.replicate,
                           'listings': listings,
                           'notes': list(result.calibration.notes)})
    ks = list(range(config.kmin, config.kmax + 1))
    scenario = bundle.scenario
    tables = _table_lines(summary, ks, scenario.true_k if scenario else ()) \
        if summary else []
    template = _environment().get_template('summary.txt.j2')
    text = template.render(config=config, scenario=scenario,
                           replicates=replicates, tables=tables, ks=ks,
                           show_listings=summary is None or
                           len(bundle.replicates) == 1)
    path = pathlib.Path(out_dir) / 'summary.txt'
    logger.debug(f"report.py: Writing {path}")
    path.write_text(text)
    return path


def _scale(values: Sequence[float], low: float, high: float):
    """Map values linearly onto [low, high]

    :param values: Finite values
    :param low: Output for the smallest value
    :param high: Output for the largest value
    :return: A function mapping one value
    """
    smallest, largest = min(values), max(values)
    if largest == smallest:
        smallest, largest = smallest - 1, largest + 1
    return lambda v: low + (v - smallest) * (high - low) / (largest - smallest)


def plot_series(result: ReplicateResult, selector: str,
                composite: bool) -> Tuple[Dict[str, List[Tuple[int, float]]],
                                          List[Tuple[str, int, int, float]],
                                          int]:
    """Values of one index or composite over K

    :param result: One replicate
    :param selector: Index id or composite name
    :param composite: If the selector is a composite
    :return: Points per method, random marks (generator, K, draw, value),
        and the number of values left out as degenerate
    """
    lines: Dict[str, List[Tuple[int, float]]] = {}
    marks = []
    omitted = 0
    scores = result.composite_scores.get(selector) if composite else None
    for position, entry in enumerate(result.collection.entries):
        if entry.failed:
            continue
        if composite:
            value = scores[position]
        else:
            raw = entry.raw.get(selector)
            if raw is None:
                continue
            if raw.degenerate:
                omitted += 1
                continue
            value = raw.value
        if value is None:
            continue
        if entry.is_proper:
            lines.setdefault(entry.source, []).append((entry.k, value))
        else:
            marks.append((entry.source, entry.k, entry.draw, value))
    for points in lines.values():
        points.sort()
    return lines, marks, omitted


def render_plot(result: ReplicateResult, selector: str, composite: bool,
                kmin: int, kmax: int) -> str:
    """Render the SVG plot of one index or composite

    :param result: One replicate
    :param selector: Index id or composite name
    :param composite: If the selector is a composite
    :param kmin: Smallest K on the axis
    :param kmax: Largest K on the axis
    :return: The SVG document
    """
    width, height, margin = 640, 400, 50
    lines, marks, omitted = plot_series(result, selector, composite)
    values = [v for pts in lines.values() for _, v in pts] + \
        [m[3] for m in marks]
    notes = []
    if omitted:
        notes.append(f"{omitted} degenerate values not shown")
    to_x = _scale([kmin, kmax], margin, width - margin)
    svg_lines, svg_marks, y_ticks = [], [], []
    if values:
        to_y = _scale(values, height - margin, margin)
        generators = list(RandomMethodId)
        for generator, k, _, value in marks:
            offset = (generators.index(RandomMethodId(generator)) - 1.5) * 6
            svg_marks.append({'x': f"{to_x(k) + offset:.2f}",
                              'y': f"{to_y(value):.2f}",
                              'letter': RandomMethodId(generator).letter})
        for i, method in enumerate(sorted(lines,
                                          key=lambda m: MethodId(m).order)):
            points = ' '.join(f"{to_x(k):.2f},{to_y(v):.2f}"
                              for k, v in lines[method])
            svg_lines.append({'method': method, 'points': points,
                              'colour': LINE_COLOURS[i % len(LINE_COLOURS)],
                              'legend_y': margin + 14 * i})
        for tick in np.linspace(min(values), max(values), 5):
            y_ticks.append({'y': f"{to_y(tick):.2f}", 'label': f"{tick:.3g}"})
    else:
        notes.append('no data')
    x_ticks = [{'x': f"{to_x(k):.2f}", 'label': k}
               for k in range(kmin, kmax + 1)]
    template = _environment().get_template('index_plot.svg.j2')
    return template.render(title=selector, width=width, height=height,
                           margin=margin, lines=svg_lines, marks=svg_marks,
                           x_ticks=x_ticks, y_ticks=y_ticks, notes=notes)


def emit_plots(bundle: ResultBundle, out_dir: pathlib.Path,
               logger: Logger) -> List[pathlib.Path]:
    """Write plots/<selector>.svg for every index and composite of the
    first data set

    :param bundle: The results
    :param out_dir: Output directory
    :param logger: A logger object
    :return: The paths written
    """
    plot_dir = pathlib.Path(out_dir) / 'plots'
    plot_dir.mkdir(parents=True, exist_ok=True)
    if not bundle.replicates:
        return []
    result = bundle.replicates[0]
    config = bundle.config
    selectors = [(i, False) for i in config.required_ids()] + \
        [(c, True) for c in bundle.composite_names]
    paths = []
    for selector, composite in selectors:
        path = plot_dir / f"{selector}.svg"
        logger.debug(f"report.py: Writing {path}")
        path.write_text(render_plot(result, selector, composite,
                                    config.kmin, config.kmax))
        paths.append(path)
    return paths
