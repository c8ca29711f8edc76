"""Test the figure series and their CSV output"""

import logging

import pytest

from aeds_compress.errors import UnknownFigure
from aeds_compress.figures import (
    FIGURES, LARGE_N_SWEEP, binary_series, delta_type1_series, delta_type2_series, figure_csv,
    figure_data, large_n_series, table1_series, uniform_series, worst_case_series,
    write_figure_csv
)

logger = logging.getLogger(__name__)


def column(data, name):
    index = data['columns'].index(name)
    return [row[index] for row in data['rows']]


def row_where(data, name, value):
    index = data['columns'].index(name)
    return dict(zip(data['columns'], next(r for r in data['rows'] if r[index] == value)))


def test_table1():
    data = table1_series()
    assert data['columns'] == ['M', 'M_R', 'M_L']
    assert len(data['rows']) == 37
    assert column(data, 'M') == list(range(73, 110))
    for size, m_right, m_left in data['rows']:
        if size <= 80:
            assert (m_right, m_left) == (size - 16, 16)
        elif size <= 96:
            assert (m_right, m_left) == (64, size - 64)
        else:
            assert (m_right, m_left) == (size - 32, 32)


def test_delta_type1_series():
    data = delta_type1_series()
    assert len(data['rows']) == 100
    assert data['rows'][0][0] == 0.5
    assert data['rows'][-1][0] == 0.995
    assert row_where(data, 'p_right', 0.8)['delta_N2'] == pytest.approx(0.244444, abs=1e-6)
    assert row_where(data, 'p_right', 0.65)['delta_N2'] == pytest.approx(0.0439394, abs=1e-7)
    assert column(data, 'solver_N2') == pytest.approx(column(data, 'unclamped_N2'), abs=1e-9)
    assert min(column(data, 'delta_N16')) >= 0.0


def test_delta_type2_series():
    data = delta_type2_series()
    assert row_where(data, 'p_right', 0.65)['delta_type2'] == pytest.approx(0.0543716, abs=1e-7)
    assert column(data, 'solver') == pytest.approx(column(data, 'unclamped'), abs=1e-9)


def test_worst_case_series():
    data = worst_case_series()
    first = row_where(data, 'p1', 0.5)
    assert first['mu_huffman'] == pytest.approx(0.5)
    for row in data['rows']:
        _, huffman, type1, type2 = row
        assert type1 <= huffman
        assert type2 <= huffman


def test_binary_series():
    data = binary_series()
    assert len(data['rows']) == 500
    start = row_where(data, 'r', 0.5)
    assert start['mu_huffman'] == pytest.approx(0.0, abs=1e-15)
    assert start['mu_best'] == pytest.approx(0.0, abs=1e-15)
    assert max(column(data, 'mu_best')) <= 0.0165
    for row in data['rows']:
        best = row[data['columns'].index('mu_best')]
        assert best <= row[data['columns'].index('mu_type2')]
        assert best <= row[data['columns'].index('mu_type1_N2')]


def test_uniform_series():
    data = uniform_series((2, 3), sizes=(80, 96))
    assert len(data['rows']) == 4
    first = dict(zip(data['columns'], data['rows'][0]))
    assert (first['M'], first['N'], first['M_R'], first['M_L']) == (80, 2, 64, 16)
    last = dict(zip(data['columns'], data['rows'][-1]))
    assert last['M'] == 96
    assert last['mu_huffman'] == pytest.approx(0.0817042, abs=1e-7)
    assert last['p_right_huffman'] == 2 / 3
    type2 = uniform_series((5,), 'type2', sizes=(96,))
    assert type2['rows'][0][3] == 5
    assert type2['rows'][0][6] >= 0.0


def test_large_n_series():
    data = large_n_series((8, 16))
    assert column(data, 'N') == [8, 16]
    assert set(column(data, 'method')) == {'direct-solve'}
    for row in data['rows']:
        values = dict(zip(data['columns'], row))
        assert values['L'] >= values['H'] - 1e-9
        assert values['L_minus_H'] < 1.0
        assert values['scaled_gap'] == pytest.approx(values['L_minus_H'] * values['N'])
        for slack in ('lemma3_slack', 'lemma4_upper_slack', 'lemma4_lower_slack'):
            assert values[slack] >= -1e-12


def check_gap_does_not_diverge(data):
    """(L - H) N is non-increasing and stays below the constant fitted on N <= 64"""
    sizes = column(data, 'N')
    scaled = column(data, 'scaled_gap')
    fitted = max(value for size, value in zip(sizes, scaled) if size <= 64)
    logger.info("Large-N sweep up to N=%d: (L - H) N <= %.6f", sizes[-1], fitted)
    assert all(later <= earlier for earlier, later in zip(scaled, scaled[1:])), scaled
    for row in data['rows']:
        values = dict(zip(data['columns'], row))
        assert values['L_minus_H'] <= fitted / values['N'] + 1e-12
        for slack in ('lemma3_slack', 'lemma4_upper_slack', 'lemma4_lower_slack'):
            assert values[slack] >= -1e-12, values
    return fitted


def test_large_n_gap_shrinks():
    fitted = check_gap_does_not_diverge(large_n_series((8, 16, 32, 64, 128, 256)))
    assert fitted == pytest.approx(0.036091, abs=1e-5)


@pytest.mark.slow
def test_large_n_gap_over_the_full_sweep():
    data = large_n_series()
    assert column(data, 'N') == list(LARGE_N_SWEEP)
    check_gap_does_not_diverge(data)
    assert column(data, 'scaled_gap')[-1] < 1e-4


def test_unknown_figure():
    with pytest.raises(UnknownFigure):
        figure_data('no-such-figure')
    assert 'table1' in FIGURES
    assert 'largeN-sweep' in FIGURES


def test_csv_output(tmp_path):
    text = figure_csv({'columns': ['a', 'b', 'c'], 'rows': [[1, 1 / 3, 'x'], [2, 0.5, True]]})
    assert text == 'a,b,c\n1,0.333333333333,x\n2,0.5,True\n'
    path = tmp_path / 'table1.csv'
    assert write_figure_csv('table1', str(path)) == 37
    lines = path.read_text(encoding='utf-8').splitlines()
    assert len(lines) == 38
    assert lines[0] == 'M,M_R,M_L'
    assert lines[1] == '73,57,16'
