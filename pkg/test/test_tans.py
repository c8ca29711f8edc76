"""Test the tANS instance and its table-driven form"""

import json

import numpy as np
import pytest

from aeds_compress.codec import encode, validate_aeds
from aeds_compress.constructors import build_saeds_case3
from aeds_compress.errors import MalformedTable, NotPowerOfTwo, TooFewStates, UnknownSymbol
from aeds_compress.model import validate_distribution
from aeds_compress.tans import (
    build_tans, deserialize_tans, is_power_of_two, quantize_counts, serialize_tans,
    spread_symbols, tans_decode, tans_encode, tans_to_aeds
)

SIX = validate_distribution(list(zip('abcdef', [0.35, 0.15, 0.15, 0.15, 0.1, 0.1])))


def test_quantize_counts():
    assert quantize_counts(SIX, 16) == [6, 2, 2, 2, 2, 2]
    assert sum(quantize_counts(SIX, 64)) == 64
    skewed = validate_distribution([('x', 0.98), ('y', 0.01), ('z', 0.01)])
    assert quantize_counts(skewed, 4) == [2, 1, 1]
    with pytest.raises(TooFewStates):
        quantize_counts(SIX, 4)


def test_power_of_two_is_required():
    assert is_power_of_two(1)
    assert is_power_of_two(64)
    assert not is_power_of_two(0)
    assert not is_power_of_two(12)
    with pytest.raises(NotPowerOfTwo):
        build_tans(SIX, 12)
    with pytest.raises(TooFewStates):
        build_tans(SIX, 16, counts=[6, 2, 2, 2, 2, 1])


def test_spread_policies():
    counts = [6, 2, 2, 2, 2, 2]
    interval = spread_symbols(counts)
    assert interval == [0] * 6 + [1, 1, 2, 2, 3, 3, 4, 4, 5, 5]
    stride = spread_symbols(counts, 'stride')
    assert sorted(stride) == interval
    with pytest.raises(ValueError):
        spread_symbols(counts, 'random')


def test_read_bits():
    table = build_tans(validate_distribution([('x', 0.5), ('y', 0.5)]), 8)
    assert table.read_bits(3) == 2
    assert table.read_bits(4) == 1
    assert table.read_bits(8) == 0


def test_correspondence_tables_are_inverse():
    table = build_tans(SIX, 32, 'stride')
    for sym_idx, count in enumerate(table.counts):
        for y in range(count, 2 * count):
            state = table.correspondence(sym_idx, y)
            assert table.decode_table[state - table.num_states] == (sym_idx, y)
        assert len(table.state_set(sym_idx)) == count


@pytest.mark.parametrize('policy', ['sorted-interval', 'stride'])
def test_roundtrip(policy):
    table = build_tans(SIX, 64, policy)
    rng = np.random.default_rng(11)
    for _ in range(50):
        symbols = list(rng.choice(list(SIX.symbols), size=int(rng.integers(0, 200)),
                                  p=SIX.probs))
        assert tans_decode(table, tans_encode(table, symbols)) == symbols


def test_unknown_symbol():
    table = build_tans(SIX, 16)
    with pytest.raises(UnknownSymbol):
        tans_encode(table, list('abz'))
    with pytest.raises(ValueError):
        tans_encode(table, list('ab'), initial_state=3)


@pytest.mark.parametrize('policy', ['sorted-interval', 'stride'])
def test_table_driven_form_gives_identical_streams(policy):
    table = build_tans(SIX, 32, policy)
    aeds = tans_to_aeds(table)
    assert aeds.kind == 'tans'
    assert validate_aeds(aeds).well_formed
    symbols = list('abcdefaabbaaccdd' * 4)
    native = tans_encode(table, symbols)
    driven = encode(aeds, symbols)
    assert driven == native
    assert driven.to_bytes() == native.to_bytes()


def test_case3_matches_interval_spread_tans():
    counts = quantize_counts(SIX, 32)
    case3 = build_saeds_case3(SIX, counts)
    tans = tans_to_aeds(build_tans(SIX, 32, 'sorted-interval', counts))
    assert case3.encoder == tans.encoder
    assert case3.partition == tans.partition


def test_serialization():
    table = build_tans(SIX, 16, 'stride')
    assert deserialize_tans(serialize_tans(table)) == table
    body = json.loads(serialize_tans(table))
    body['counts'][0] += 1
    with pytest.raises(MalformedTable):
        deserialize_tans(json.dumps(body).encode('utf-8'))
    with pytest.raises(MalformedTable):
        deserialize_tans(b'{"symbols": []}')
