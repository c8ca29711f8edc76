"""Test source distributions and the table representation"""

import math

import pytest

from aeds_compress.errors import (
    AlphabetMismatch, DegenerateAlphabet, InconsistentTables, InvalidPartition, InvalidWeight
)
from aeds_compress.model import (
    AedsTable, Codeword, SAedsPartition, SourceDistribution, binary_entropy, byte_alphabet,
    derive_partition, entropy, histogram_distribution, ratio_distribution, relative_entropy,
    validate_distribution
)


def test_validate_distribution_normalizes_in_order():
    p = validate_distribution([('a', 2.0), ('b', 1.0), ('c', 1.0)])
    assert p.symbols == ('a', 'b', 'c')
    assert p.probs == (0.5, 0.25, 0.25)
    assert p.prob('b') == 0.25
    assert p.index('c') == 2


def test_validate_distribution_absorbs_rounding():
    p = validate_distribution([(i, 1.0) for i in range(7)])
    assert math.isclose(math.fsum(p.probs), 1.0, abs_tol=1e-15)


@pytest.mark.parametrize('pairs, error', [
    ([('a', -0.1), ('b', 1.0)], InvalidWeight),
    ([('a', 0.0), ('b', 1.0)], DegenerateAlphabet),
    ([('a', 1.0)], DegenerateAlphabet),
    ([('a', 0.0), ('b', 1.0), ('c', 2.0)], InvalidWeight),
])
def test_validate_distribution_rejects(pairs, error):
    with pytest.raises(error):
        validate_distribution(pairs)


def test_source_distribution_requires_unique_symbols():
    with pytest.raises(AlphabetMismatch):
        SourceDistribution(('a', 'a'), (0.5, 0.5))
    with pytest.raises(InvalidWeight):
        SourceDistribution(('a', 'b'), (0.5, 0.4))


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        validate_distribution([('a', -1.0), ('b', 1.0)])


def test_histogram_distribution_skips_absent_symbols():
    p = histogram_distribution({3: 2, 1: 2, 9: 0})
    assert p.symbols == (1, 3)
    assert p.probs == (0.5, 0.5)
    assert len(byte_alphabet()) == 256


def test_entropy_and_relative_entropy():
    uniform = SourceDistribution.from_probs([0.25] * 4)
    assert entropy(uniform) == pytest.approx(2.0)
    p = SourceDistribution.from_probs([0.5, 0.25, 0.25])
    assert entropy(p) == pytest.approx(1.5)
    assert relative_entropy(p, p) == 0.0
    q = ratio_distribution([1, 1, 2], p.symbols)
    assert relative_entropy(p, q) == pytest.approx(0.5 * 1 + 0.25 * 0 + 0.25 * -1)
    with pytest.raises(AlphabetMismatch):
        relative_entropy(p, SourceDistribution.from_probs([0.5, 0.5]))


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.9) == pytest.approx(0.4689955936)


def test_codeword():
    assert Codeword('').length == 0
    assert str(Codeword('')) == 'λ'
    assert Codeword('101').length == 3
    with pytest.raises(ValueError):
        Codeword('012')


def test_from_encoder_inverts_the_encoder():
    table = AedsTable.from_encoder(['x', 'y'], [[('0', 1), ('1', 0)], [('', 0), ('1', 1)]])
    assert table.num_states == 2
    assert table.decoder[1]['0'].symbol == 'x'
    assert table.decoder[1]['0'].next_state == 0
    assert table.decoder[0][''].symbol == 'x'
    assert table.decoding_codewords(0) == ['', '1']
    assert table.encode_step(1, 'y').next_state == 1
    assert table.state_name(1) == 'α2'
    assert table.max_codeword_length() == 1


def test_from_encoder_rejects_collisions_and_bad_states():
    with pytest.raises(InconsistentTables):
        AedsTable.from_encoder(['x', 'y'], [[('0', 0), ('0', 0)]])
    with pytest.raises(InconsistentTables):
        AedsTable.from_encoder(['x', 'y'], [[('0', 0), ('1', 3)]])


def test_partition_validation():
    partition = SAedsPartition(((0,), (1,)), ((0, 1), (0, 1)))
    partition.validate(2)
    assert partition.counts == (1, 1)
    assert partition.owner() == [0, 1]
    with pytest.raises(InvalidPartition):
        SAedsPartition(((0,), (1,)), ((0,), (0, 1))).validate(2)
    with pytest.raises(InvalidPartition):
        SAedsPartition(((0, 1), (1,)), ((0, 1), (0, 1))).validate(2)


def test_derive_partition():
    # two one-state-per-symbol states, each decoding only its own symbol
    table = AedsTable.from_encoder(['x', 'y'], [[('0', 0), ('0', 1)], [('1', 0), ('1', 1)]])
    partition = derive_partition(table)
    assert partition is not None
    assert partition.counts == (1, 1)
    mixed = AedsTable.from_encoder(['x', 'y'], [[('0', 0), ('1', 0)]])
    assert derive_partition(mixed) is None
