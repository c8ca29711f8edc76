"""Figures module

Numeric series behind the published curves and tables, emitted as CSV with
a header row and 12 significant digits. Closed forms are cross-checked
against the stationary solver where a small table realizes them.
"""


import csv
import io
import logging
from typing import Callable, Sequence, TypedDict, Union

import numpy as np

from .analysis import (
    best_binary_redundancy, binary_source_redundancy, check_bound, delta_type1,
    delta_type1_unclamped, delta_type2, delta_type2_unclamped, huffman_right_weight,
    huffman_worst_redundancy, stationary_distribution, type1_worst_redundancy,
    type2_worst_redundancy, uniform_huffman_redundancy
)
from .constructors import build_large_n, build_type1, build_type2, optimal_uniform_split
from .errors import UnknownFigure
from .model import SourceDistribution, entropy, validate_distribution

logger = logging.getLogger(__name__)

Cell = Union[int, float, str, bool]

DELTA_STATE_COUNTS = (2, 3, 4, 8, 16)
UNIFORM_STATE_COUNTS = (2, 3, 4, 8)
UNIFORM_SIZES = tuple(range(2, 129))
TABLE1_SIZES = tuple(range(73, 110))
BINARY_MAX_STATES = 64
LARGE_N_SWEEP = tuple(1 << k for k in range(3, 13))
LARGE_N_WEIGHTS = (3.0, 3.0, 2.0)


class FigureData(TypedDict):
    """Column names and rows of one figure or table"""
    columns: list[str]
    rows: list[list[Cell]]


def _grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid rounded to the step so the CSV is stable"""
    count = int(round((stop - start) / step))
    return [round(start + i * step, 10) for i in range(count + 1)]


def _binary_source(r: float) -> SourceDistribution:
    return validate_distribution([('a', r), ('b', 1.0 - r)])


def delta_type1_series(grid: Sequence[float] = tuple(_grid(0.5, 0.995, 0.005))) -> FigureData:
    """Type-I reduction for several N, with the N = 2 solver value 1 - L"""
    columns = ['p_right'] + [f'delta_N{n}' for n in DELTA_STATE_COUNTS]
    columns += ['unclamped_N2', 'solver_N2']
    rows: list[list[Cell]] = []
    for p_right in grid:
        row: list[Cell] = [p_right]
        row += [delta_type1(p_right, n) for n in DELTA_STATE_COUNTS]
        p = _binary_source(p_right)
        solved = stationary_distribution(build_type1(None, p, 2), p).length
        row += [delta_type1_unclamped(p_right, 2), 1.0 - solved]
        rows.append(row)
    return {'columns': columns, 'rows': rows}


def delta_type2_series(grid: Sequence[float] = tuple(_grid(0.5, 0.995, 0.005))) -> FigureData:
    rows: list[list[Cell]] = []
    for p_right in grid:
        p = _binary_source(p_right)
        solved = stationary_distribution(build_type2(None, p), p).length
        rows.append([p_right, delta_type2(p_right), delta_type1(p_right, 2),
                     delta_type2_unclamped(p_right), 1.0 - solved])
    return {'columns': ['p_right', 'delta_type2', 'delta_type1_N2', 'unclamped', 'solver'],
            'rows': rows}


def worst_case_series(grid: Sequence[float] = tuple(_grid(0.5, 0.995, 0.005))) -> FigureData:
    rows: list[list[Cell]] = [
        [p1, huffman_worst_redundancy(p1), type1_worst_redundancy(p1, 2),
         type2_worst_redundancy(p1)]
        for p1 in grid
    ]
    return {'columns': ['p1', 'mu_huffman', 'mu_type1_N2', 'mu_type2'], 'rows': rows}


def uniform_series(state_counts: Sequence[int], variant: str = 'type1',
                   sizes: Sequence[int] = UNIFORM_SIZES) -> FigureData:
    """Optimal split of a uniform M-ary source for each N (ignored by Type-II)"""
    rows: list[list[Cell]] = []
    for size in sizes:
        base: list[Cell] = [size, uniform_huffman_redundancy(size), huffman_right_weight(size)]
        for num_states in state_counts:
            split = optimal_uniform_split(size, num_states, variant)
            rows.append(base + [num_states, split['m_right'], split['m_left'],
                                split['reduction'], split['redundancy']])
    return {
        'columns': ['M', 'mu_huffman', 'p_right_huffman', 'N', 'M_R', 'M_L', 'reduction',
                    'redundancy'],
        'rows': rows,
    }


def binary_series(grid: Sequence[float] = tuple(_grid(0.5, 0.999, 0.001))) -> FigureData:
    rows: list[list[Cell]] = []
    for r in grid:
        best, label = best_binary_redundancy(r, BINARY_MAX_STATES)
        rows.append([r, binary_source_redundancy(r, 'huffman'),
                     binary_source_redundancy(r, 'type1', 2),
                     binary_source_redundancy(r, 'type2'), best, label])
    return {'columns': ['r', 'mu_huffman', 'mu_type1_N2', 'mu_type2', 'mu_best', 'best'],
            'rows': rows}


def table1_series(sizes: Sequence[int] = TABLE1_SIZES) -> FigureData:
    rows: list[list[Cell]] = []
    for size in sizes:
        split = optimal_uniform_split(size, 2, 'type1')
        rows.append([size, split['m_right'], split['m_left']])
    return {'columns': ['M', 'M_R', 'M_L'], 'rows': rows}


def large_n_series(sizes: Sequence[int] = LARGE_N_SWEEP) -> FigureData:
    """Large-N rate against entropy for p = {3/8, 3/8, 1/4}, where q = p at every N"""
    p = validate_distribution(list(zip('abc', LARGE_N_WEIGHTS)))
    total = sum(LARGE_N_WEIGHTS)
    rows: list[list[Cell]] = []
    for num_states in sizes:
        counts = [int(num_states * w / total) for w in LARGE_N_WEIGHTS]
        table, _ = build_large_n(p, counts)
        report = stationary_distribution(table, p)
        gap = report.length - entropy(p)
        lemma3 = check_bound(table, p, 'lemma3')
        upper = check_bound(table, p, 'lemma4-upper', gamma=4)
        lower = check_bound(table, p, 'lemma4-lower', gamma=4)
        logger.info("Large-N sweep N=%d: (L - H) N = %.6f", num_states, gap * num_states)
        rows.append([num_states, report.length, entropy(p), gap, gap * num_states,
                     report.method, lemma3.slack, upper.slack, lower.slack])
    return {
        'columns': ['N', 'L', 'H', 'L_minus_H', 'scaled_gap', 'method', 'lemma3_slack',
                    'lemma4_upper_slack', 'lemma4_lower_slack'],
        'rows': rows,
    }


FIGURES: dict[str, Callable[[], FigureData]] = {
    'delta-type1': delta_type1_series,
    'delta-type2': delta_type2_series,
    'worst-case': worst_case_series,
    'uniform-n2': lambda: uniform_series((2,)),
    'uniform-nsweep': lambda: uniform_series(UNIFORM_STATE_COUNTS),
    'uniform-type2': lambda: uniform_series((5,), 'type2'),
    'binary': binary_series,
    'table1': table1_series,
    'largeN-sweep': large_n_series,
}


def figure_data(figure_id: str) -> FigureData:
    if figure_id not in FIGURES:
        raise UnknownFigure(f"unknown figure {figure_id!r}, expected one of {sorted(FIGURES)}")
    return FIGURES[figure_id]()


def _format_cell(value: Cell) -> str:
    if isinstance(value, (float, np.floating)):
        return f'{float(value):.12g}'
    return str(value)


def figure_csv(data: FigureData) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(data['columns'])
    for row in data['rows']:
        writer.writerow([_format_cell(v) for v in row])
    return buffer.getvalue()


def write_figure_csv(figure_id: str, path: str) -> int:
    """Write the CSV of a figure and return its row count"""
    data = figure_data(figure_id)
    with open(path, 'w', encoding='utf-8', newline='') as outfile:
        outfile.write(figure_csv(data))
    return len(data['rows'])
