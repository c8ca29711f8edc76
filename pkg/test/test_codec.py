"""Test encoding, decoding, the bitstream format and table serialization"""

import numpy as np
import pytest

from aeds_compress.codec import (
    BitReader, BitWriter, Bitstream, TrieDecoder, choose_initial_state, decode, deserialize_table,
    encode, encoded_lengths, ergodicity, serialize_table, table_digest, validate_aeds
)
from aeds_compress.errors import (
    HashMismatch, MalformedStream, MalformedTable, PrefixViolation, TrailingGarbage,
    TruncatedStream, UnknownSymbol, UnmatchedCodeword, VersionMismatch
)
from aeds_compress.model import AedsTable
from aeds_compress.resource_loader import ResourceLoader


def worked_example() -> AedsTable:
    return ResourceLoader.get_table('worked_example')


def test_worked_example_encodes_cbba():
    table = worked_example()
    stream = encode(table, list('cbba'))
    assert stream.initial_state == 0
    assert table.state_name(stream.initial_state) == 'α1'
    assert stream.payload == '111' + '10' + '0'
    assert stream.length == 4
    assert stream.total_bits == 3 + 6
    assert decode(table, stream) == list('cbba')


def test_worked_example_decoding_codewords():
    table = worked_example()
    assert table.decoding_codewords(0) == ['00', '01', '10', '110', '111']
    assert table.decoding_codewords(1) == ['0', '10', '110', '111']
    assert table.decoding_codewords(2) == ['']
    assert table.decoding_codewords(3) == ['0', '10', '110', '111']
    assert table.decoding_codewords(4) == ['']
    report = validate_aeds(table)
    assert report.well_formed
    assert report.ergodicity.ergodic


def test_roundtrip_random_sequences():
    table = worked_example()
    rng = np.random.default_rng(3)
    for _ in range(200):
        symbols = list(rng.choice(list('abc'), size=int(rng.integers(0, 60))))
        for policy in ('zero', 'minimize', 3):
            assert decode(table, encode(table, symbols, policy)) == symbols


def test_empty_sequence():
    table = worked_example()
    stream = encode(table, [])
    assert stream.payload == ''
    assert decode(table, stream.to_bytes()) == []


def test_minimize_policy_is_never_longer():
    table = worked_example()
    symbols = list('abcabccbaabbcc')
    zero = encode(table, symbols, 'zero')
    best = encode(table, symbols, 'minimize')
    assert len(best.payload) <= len(zero.payload)
    indices = [table.symbol_index(s) for s in symbols]
    start = choose_initial_state(table, indices, 'minimize')
    assert int(encoded_lengths(table, indices, start).sum()) == len(best.payload)
    with pytest.raises(ValueError):
        choose_initial_state(table, indices, 'largest')


def test_unknown_symbol_reports_position():
    with pytest.raises(UnknownSymbol) as info:
        encode(worked_example(), list('abdc'))
    assert info.value.position == 2
    assert info.value.symbol == 'd'


def test_trailing_bytes_are_rejected():
    data = encode(worked_example(), list('cbba')).to_bytes()
    with pytest.raises(TrailingGarbage):
        decode(worked_example(), data + b'\x00')


def test_truncated_stream():
    data = encode(worked_example(), list('cbba' * 10)).to_bytes()
    with pytest.raises(TruncatedStream):
        decode(worked_example(), data[:-2])


def test_unmatched_codeword():
    table = AedsTable.from_encoder(['x', 'y'], [[('0', 0), ('10', 0)]])
    with pytest.raises(UnmatchedCodeword) as info:
        decode(table, Bitstream(1, 0, 1, '11'))
    assert info.value.prefix == '11'


def test_bad_headers():
    data = encode(worked_example(), list('cbba')).to_bytes()
    with pytest.raises(MalformedStream):
        decode(worked_example(), b'XXXX' + data[4:])
    with pytest.raises(VersionMismatch):
        decode(worked_example(), data[:4] + b'\x09' + data[5:])
    one_state = AedsTable.from_encoder(list('abc'), [[('0', 0), ('10', 0), ('11', 0)]])
    with pytest.raises(HashMismatch):
        TrieDecoder(one_state).decode(data)


def test_validate_detects_prefix_violation():
    table = AedsTable.from_encoder(['x', 'y'], [[('0', 0), ('01', 0)]])
    with pytest.raises(PrefixViolation):
        validate_aeds(table)


def test_ergodicity_reports_period_and_reducibility():
    periodic = AedsTable.from_encoder(['x', 'y'], [[('0', 1), ('1', 1)], [('0', 0), ('1', 0)]])
    report = ergodicity(periodic)
    assert report.irreducible
    assert report.period == 2
    assert not report.ergodic
    reducible = AedsTable.from_encoder(['x', 'y'], [[('0', 0), ('1', 0)], [('00', 0), ('01', 0)]])
    assert not ergodicity(reducible).irreducible


def test_bit_writer_and_reader():
    writer = BitWriter()
    writer.write_bits('101')
    writer.write_leb128(300)
    writer.write_uint(5, 0b10011)
    reader = BitReader(writer.getvalue())
    assert reader.read_uint(3) == 0b101
    assert reader.read_leb128() == 300
    assert reader.read_uint(5) == 0b10011
    assert reader.remaining() == 0


def test_table_serialization_roundtrip():
    table = worked_example()
    data = serialize_table(table)
    restored = deserialize_table(data)
    assert restored.encoder == table.encoder
    assert restored.names == table.names
    assert table_digest(restored) == table_digest(table)
    assert serialize_table(restored) == data


def test_table_serialization_errors():
    data = serialize_table(worked_example())
    with pytest.raises(MalformedTable):
        deserialize_table(b'nonsense')
    with pytest.raises(VersionMismatch):
        deserialize_table(data[:4] + b'\x02' + data[5:])
    tampered = bytearray(data)
    tampered[10] ^= 0xFF
    with pytest.raises(HashMismatch):
        deserialize_table(bytes(tampered))
    with pytest.raises(MalformedTable):
        deserialize_table(data[:-3])
