"""Test Huffman trees, phased-in codes and tree metrics"""

import math

import pytest

from aeds_compress.model import validate_distribution
from aeds_compress.prefix_codes import (
    SIGMA, CodeTree, build_huffman, build_phased_in, canonical_phased_in, ceil_log2,
    huffman_codewords, is_prefix_free, kraft_sum, phased_in_stats, tree_metrics,
    uniform_huffman_length, uniform_split_tree
)

SIX = validate_distribution(list(zip('abcdef', [0.35, 0.15, 0.15, 0.15, 0.1, 0.1])))


def test_huffman_on_six_symbol_source():
    tree = build_huffman(SIX)
    assert sorted(len(c) for c in tree.codewords) == [2, 2, 3, 3, 3, 3]
    assert tree.average_length(SIX) == pytest.approx(2.5)
    assert is_prefix_free(list(tree.codewords))
    assert kraft_sum(list(tree.codewords)) == 1.0
    metrics = tree_metrics(tree, SIX)
    assert metrics['p_right'] == pytest.approx(0.65)
    assert metrics['p_left'] == pytest.approx(0.35)
    assert metrics['avg_length'] == pytest.approx(2.5)


def test_normalized_tree_puts_the_heavier_subtree_right():
    p = validate_distribution([('a', 0.7), ('b', 0.3)])
    tree = CodeTree(('a', 'b'), ('0', '1'))
    normalized = tree.normalized(p)
    assert normalized.codeword('a') == '1'
    assert normalized.swapped
    assert normalized.right == {'a': ''}
    assert normalized.left == {'b': ''}


def test_code_tree_rejects_incomplete_or_non_prefix_codes():
    with pytest.raises(ValueError):
        CodeTree(('a', 'b', 'c'), ('0', '01', '1'))
    with pytest.raises(ValueError):
        CodeTree(('a', 'b'), ('0', '10'))


def test_from_subtrees():
    tree = CodeTree.from_subtrees({'a': '0', 'b': '1'}, {'c': ''})
    assert tree.codeword('a') == '10'
    assert tree.codeword('c') == '0'
    assert tree.max_length == 2


def test_huffman_codewords_edge_cases():
    assert huffman_codewords([]) == []
    assert huffman_codewords([1.0]) == ['']
    codewords = huffman_codewords([0.5, 0.25, 0.25])
    assert sorted(len(c) for c in codewords) == [1, 2, 2]
    assert len(codewords[0]) == 1


@pytest.mark.parametrize('size, expected', [
    (1, ['']),
    (2, ['0', '1']),
    (3, ['0', '10', '11']),
    (4, ['00', '01', '10', '11']),
    (5, ['00', '01', '10', '110', '111']),
])
def test_canonical_phased_in(size, expected):
    assert canonical_phased_in(size) == expected


def test_phased_in_code_counts():
    for size in range(2, 70):
        code = build_phased_in(size)
        lengths = [len(c) for c in code.codewords]
        assert lengths.count(code.k - 1) == code.short_count
        assert lengths.count(code.k) == code.long_count
        assert kraft_sum(list(code.codewords)) == 1.0


def test_phased_in_ranks_by_weight():
    code = build_phased_in(3, [0.1, 0.6, 0.3])
    assert code.codewords == ('11', '0', '10')


def test_uniform_lengths():
    assert uniform_huffman_length(1) == 0.0
    assert uniform_huffman_length(64) == 6.0
    assert uniform_huffman_length(80) == pytest.approx(6.4)
    assert ceil_log2(1) == 0
    assert ceil_log2(80) == 7


def test_sigma_is_the_largest_phased_in_redundancy():
    assert SIGMA == pytest.approx(0.0860713, abs=1e-6)
    worst = max(phased_in_stats(size)['redundancy'] for size in range(1, 5000))
    assert worst <= SIGMA


def test_phased_in_stats_with_weights():
    uniform = phased_in_stats(3, [1 / 3] * 3)
    assert uniform['nu'] == pytest.approx(0.0)
    skewed = phased_in_stats(3, [0.6, 0.2, 0.2])
    assert skewed['nu'] == pytest.approx(0.6 - 1 / 3)
    assert skewed['length'] == pytest.approx(0.6 * 1 + 0.4 * 2)


def test_uniform_split_tree():
    tree, p = uniform_split_tree(80, 64)
    assert tree.average_length(p) == pytest.approx(6.6)
    assert tree_metrics(tree, p)['p_right'] == pytest.approx(0.8)
    assert math.isclose(p.probs[0], 1 / 80)
