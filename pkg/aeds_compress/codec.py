"""Codec module

The executable scheme: table validation, backward encoding, forward
decoding, the bitstream format and canonical table serialization.

Stream layout (bits are written MSB first):

    b"AEDS" | version (1 byte) | N (LEB128) | x_0 (ceil(lg N) bits)
    | n (LEB128, not byte aligned) | payload | zero padding to a byte boundary
"""


import hashlib
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    AedsError, HashMismatch, InconsistentTables, MalformedStream, MalformedTable,
    MissingSymbol, PrefixViolation, TrailingGarbage, TruncatedStream, UnknownSymbol,
    UnmatchedCodeword, VersionMismatch
)
from .model import AedsTable, DecoderEntry, SAedsPartition, Symbol
from .prefix_codes import ceil_log2

logger = logging.getLogger(__name__)

STREAM_MAGIC = b"AEDS"
STREAM_VERSION = 1
TABLE_MAGIC = b"AEDT"
TABLE_VERSION = 1
DIGEST_SIZE = 32

InitialStatePolicy = Union[str, int]


class BitWriter:
    """MSB-first bit sink collecting whole bytes"""

    def __init__(self) -> None:
        self.out = bytearray()
        self.bitbuffer = 0
        self.bitbufferlen = 0

    def write_uint(self, nbits: int, value: int) -> None:
        self.bitbuffer = (self.bitbuffer << nbits) | (value & ((1 << nbits) - 1))
        self.bitbufferlen += nbits
        while self.bitbufferlen >= 8:
            self.bitbufferlen -= 8
            self.out.append((self.bitbuffer >> self.bitbufferlen) & 0xFF)
        self.bitbuffer &= (1 << self.bitbufferlen) - 1

    def write_bits(self, bits: str) -> None:
        # long codeword runs are written in 32-bit slices
        for start in range(0, len(bits), 32):
            chunk = bits[start:start + 32]
            self.write_uint(len(chunk), int(chunk, 2))

    def write_leb128(self, value: int) -> None:
        for group in leb128_groups(value):
            self.write_uint(8, group)

    def align_to_byte(self) -> None:
        self.write_uint((-self.bitbufferlen) % 8, 0)

    def getvalue(self) -> bytes:
        self.align_to_byte()
        return bytes(self.out)


class BitReader:
    """MSB-first bit source over a byte string"""

    def __init__(self, data: bytes) -> None:
        self.bits = ''.join(f'{b:08b}' for b in data)
        self.pos = 0

    def remaining(self) -> int:
        return len(self.bits) - self.pos

    def read_bit(self) -> int:
        if self.pos >= len(self.bits):
            raise TruncatedStream("stream ended inside a codeword")
        bit = self.bits[self.pos]
        self.pos += 1
        return 1 if bit == '1' else 0

    def read_uint(self, nbits: int) -> int:
        if nbits == 0:
            return 0
        if self.pos + nbits > len(self.bits):
            raise TruncatedStream("stream ended inside the header")
        value = int(self.bits[self.pos:self.pos + nbits], 2)
        self.pos += nbits
        return value

    def read_leb128(self) -> int:
        value = 0
        shift = 0
        while True:
            group = self.read_uint(8)
            value |= (group & 0x7F) << shift
            shift += 7
            if not group & 0x80:
                return value


def leb128_groups(value: int) -> list[int]:
    if value < 0:
        raise ValueError("LEB128 encodes unsigned integers only")
    groups = []
    while True:
        group = value & 0x7F
        value >>= 7
        if value:
            groups.append(group | 0x80)
        else:
            groups.append(group)
            return groups


@dataclass(frozen=True)
class Bitstream:
    """Encoded sequence: initial decoder state, symbol count and payload bits"""
    num_states: int
    initial_state: int
    length: int
    payload: str

    @property
    def state_bits(self) -> int:
        return ceil_log2(self.num_states)

    @property
    def total_bits(self) -> int:
        """Code length ceil(lg N) + sum of codeword lengths, framing excluded"""
        return self.state_bits + len(self.payload)

    def to_bytes(self) -> bytes:
        writer = BitWriter()
        writer.out.extend(STREAM_MAGIC)
        writer.write_uint(8, STREAM_VERSION)
        writer.write_leb128(self.num_states)
        writer.write_uint(self.state_bits, self.initial_state)
        writer.write_leb128(self.length)
        writer.write_bits(self.payload)
        return writer.getvalue()


@dataclass(frozen=True)
class ErgodicityReport:
    """Irreducibility and period of the encoding chain"""
    irreducible: bool
    aperiodic: bool
    period: Optional[int] = None

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic


@dataclass(frozen=True)
class ValidationReport:
    well_formed: bool
    ergodicity: ErgodicityReport


def transition_graph(successors: Sequence[Sequence[int]]) -> csr_matrix:
    rows = [state for state, targets in enumerate(successors) for _ in targets]
    cols = [nxt for targets in successors for nxt in targets]
    data = np.ones(len(rows), dtype=np.int8)
    size = len(successors)
    return csr_matrix((data, (rows, cols)), shape=(size, size))


def chain_ergodicity(successors: Sequence[Sequence[int]]) -> ErgodicityReport:
    """Irreducibility and period of the chain with the given successor lists"""
    n_components, _ = connected_components(transition_graph(successors), directed=True,
                                           connection='strong')
    # period = gcd of level differences along edges of a BFS from state 0
    level = [-1] * len(successors)
    level[0] = 0
    queue = [0]
    for state in queue:
        for nxt in successors[state]:
            if level[nxt] < 0:
                level[nxt] = level[state] + 1
                queue.append(nxt)
    period = 0
    for state in queue:
        for nxt in successors[state]:
            period = math.gcd(period, level[state] + 1 - level[nxt])
    return ErgodicityReport(
        irreducible=n_components == 1,
        aperiodic=period == 1,
        period=period if period > 1 else None,
    )


def ergodicity(table: AedsTable) -> ErgodicityReport:
    report = chain_ergodicity(
        [sorted({e.next_state for e in entries}) for entries in table.encoder]
    )
    if not report.ergodic:
        logger.warning("Encoding chain of %s table is not ergodic: %s", table.kind, report)
    return report


def validate_aeds(table: AedsTable) -> ValidationReport:
    """Check encoder/decoder consistency, prefix-freeness and ergodicity"""
    width = len(table.symbols)
    for state, entries in enumerate(table.encoder):
        if len(entries) < width:
            raise MissingSymbol(state, table.symbols[len(entries)])
        for sym_idx, entry in enumerate(entries):
            symbol = table.symbols[sym_idx]
            if not 0 <= entry.next_state < table.num_states:
                raise InconsistentTables(state, symbol, "next state out of range")
            found = table.decoder[entry.next_state].get(entry.codeword.bits)
            if found != DecoderEntry(symbol, state):
                raise InconsistentTables(state, symbol)
    for state, entries in enumerate(table.decoder):
        for bits, dec in entries.items():
            if dec.symbol not in table.symbols or not 0 <= dec.next_state < table.num_states:
                raise InconsistentTables(dec.next_state, dec.symbol,
                                         "decoder entry without encoder counterpart")
            enc = table.encoder[dec.next_state][table.symbol_index(dec.symbol)]
            if enc.codeword.bits != bits or enc.next_state != state:
                raise InconsistentTables(dec.next_state, dec.symbol,
                                         "decoder entry without encoder counterpart")
        ordered = sorted(entries)
        for first, second in zip(ordered, ordered[1:]):
            if second.startswith(first):
                raise PrefixViolation(state, first, second)
    return ValidationReport(well_formed=True, ergodicity=ergodicity(table))


def _symbol_indices(table: AedsTable, symbols: Sequence[Symbol]) -> list[int]:
    lookup = {s: i for i, s in enumerate(table.symbols)}
    indices = []
    for position, symbol in enumerate(symbols):
        try:
            indices.append(lookup[symbol])
        except (KeyError, TypeError) as exc:
            raise UnknownSymbol(position, symbol) from exc
    return indices


def _trace_length(table: AedsTable, indices: Sequence[int], start: int) -> int:
    state = start
    total = 0
    for sym_idx in reversed(indices):
        entry = table.encoder[state][sym_idx]
        total += entry.codeword.length
        state = entry.next_state
    return total


def choose_initial_state(table: AedsTable, indices: Sequence[int],
                         policy: InitialStatePolicy) -> int:
    if isinstance(policy, int) and not isinstance(policy, bool):
        if not 0 <= policy < table.num_states:
            raise ValueError(f"initial state {policy} out of range")
        return policy
    if policy == 'zero':
        return 0
    if policy == 'minimize':
        lengths = [_trace_length(table, indices, x) for x in range(table.num_states)]
        return int(np.argmin(lengths))
    raise ValueError(f"unknown initial state policy {policy!r}")


def encode(table: AedsTable, symbols: Sequence[Symbol],
           initial_state: InitialStatePolicy = 'zero') -> Bitstream:
    """Encode s_n ... s_1 backward and emit the codewords in forward order"""
    indices = _symbol_indices(table, symbols)
    state = choose_initial_state(table, indices, initial_state)
    reversed_codewords = []
    for sym_idx in reversed(indices):
        entry = table.encoder[state][sym_idx]
        reversed_codewords.append(entry.codeword.bits)
        state = entry.next_state
    reversed_codewords.reverse()
    return Bitstream(table.num_states, state, len(indices), ''.join(reversed_codewords))


def encoded_lengths(table: AedsTable, indices: Sequence[int], start: int = 0) -> np.ndarray:
    """Per-symbol codeword lengths of an encoding, in forward order"""
    lengths = np.empty(len(indices), dtype=np.int64)
    state = start
    for t in range(len(indices) - 1, -1, -1):
        entry = table.encoder[state][indices[t]]
        lengths[t] = entry.codeword.length
        state = entry.next_state
    return lengths


class TrieDecoder:
    """Per-state binary tries over the decoding codewords of a table"""

    def __init__(self, table: AedsTable) -> None:
        self.table = table
        self.roots: list[list[Any]] = []
        for entries in table.decoder:
            root: list[Any] = [None, None, None]
            for bits, entry in entries.items():
                node = root
                for bit in bits:
                    child = int(bit)
                    if node[child] is None:
                        node[child] = [None, None, None]
                    node = node[child]
                node[2] = entry
            self.roots.append(root)

    def read_header(self, reader: BitReader) -> tuple[int, int]:
        num_states, initial, length = read_stream_header(reader)
        if num_states != self.table.num_states:
            raise HashMismatch(
                f"stream declares {num_states} states, table has {self.table.num_states}"
            )
        return initial, length

    def decode_symbols(self, reader: BitReader, state: int, length: int) -> list[Symbol]:
        out: list[Symbol] = []
        for _ in range(length):
            node = self.roots[state]
            prefix = []
            while node[2] is None:
                bit = reader.read_bit()
                prefix.append(str(bit))
                node = node[bit]
                if node is None:
                    raise UnmatchedCodeword(state, ''.join(prefix))
            entry: DecoderEntry = node[2]
            out.append(entry.symbol)
            state = entry.next_state
        return out

    def decode(self, data: bytes) -> list[Symbol]:
        reader = BitReader(data)
        state, length = self.read_header(reader)
        out = self.decode_symbols(reader, state, length)
        check_padding(reader, length)
        return out


def read_stream_header(reader: BitReader) -> tuple[int, int, int]:
    """Parse magic and version, return (N, initial state index, symbol count)"""
    if reader.remaining() < 8 * (len(STREAM_MAGIC) + 1):
        raise MalformedStream("stream is shorter than its header")
    magic = bytes(reader.read_uint(8) for _ in STREAM_MAGIC)
    if magic != STREAM_MAGIC:
        raise MalformedStream(f"bad stream magic {magic!r}")
    version = reader.read_uint(8)
    if version != STREAM_VERSION:
        raise VersionMismatch(f"stream version {version}, expected {STREAM_VERSION}")
    num_states = reader.read_leb128()
    if num_states < 1:
        raise MalformedStream("stream declares no states")
    initial = reader.read_uint(ceil_log2(num_states))
    if initial >= num_states:
        raise MalformedStream(f"initial state {initial} out of range")
    return num_states, initial, reader.read_leb128()


def check_padding(reader: BitReader, length: int) -> None:
    if reader.remaining() >= 8 or '1' in reader.bits[reader.pos:]:
        raise TrailingGarbage(f"{reader.remaining()} bits left after {length} symbols")


def decode(table: AedsTable, stream: Union[Bitstream, bytes]) -> list[Symbol]:
    """Decode s_1 ... s_n forward, consuming exactly the payload"""
    data = stream.to_bytes() if isinstance(stream, Bitstream) else stream
    return TrieDecoder(table).decode(data)


def _table_body(table: AedsTable) -> bytes:
    partition = None
    if table.partition is not None:
        partition = {
            'subsets': [list(s) for s in table.partition.subsets],
            'forward': [list(f) for f in table.partition.forward],
        }
    body = {
        'kind': table.kind,
        'symbols': list(table.symbols),
        'names': list(table.names),
        'encoder': [[[e.codeword.bits, e.next_state] for e in row] for row in table.encoder],
        'partition': partition,
    }
    return json.dumps(body, sort_keys=True, separators=(',', ':'),
                      ensure_ascii=False).encode('utf-8')


def table_digest(table: AedsTable) -> bytes:
    return hashlib.sha256(_table_body(table)).digest()


def serialize_table(table: AedsTable) -> bytes:
    body = _table_body(table)
    return TABLE_MAGIC + bytes([TABLE_VERSION]) + hashlib.sha256(body).digest() + body


def deserialize_table(data: bytes) -> AedsTable:
    header = len(TABLE_MAGIC) + 1 + DIGEST_SIZE
    if len(data) <= header or data[:len(TABLE_MAGIC)] != TABLE_MAGIC:
        raise MalformedTable("not a serialized table")
    version = data[len(TABLE_MAGIC)]
    if version != TABLE_VERSION:
        raise VersionMismatch(f"table version {version}, expected {TABLE_VERSION}")
    digest = data[len(TABLE_MAGIC) + 1:header]
    body = data[header:]
    try:
        fields = json.loads(body.decode('utf-8'))
        partition = None
        if fields['partition'] is not None:
            partition = SAedsPartition(
                tuple(tuple(s) for s in fields['partition']['subsets']),
                tuple(tuple(f) for f in fields['partition']['forward']),
            )
        rows = [[(str(bits), int(nxt)) for bits, nxt in row] for row in fields['encoder']]
        symbols = list(fields['symbols'])
        kind = str(fields['kind'])
        names = [str(n) for n in fields['names']]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedTable(f"cannot parse table body: {exc}") from exc
    if hashlib.sha256(body).digest() != digest:
        raise HashMismatch("table content hash does not match")
    try:
        table = AedsTable.from_encoder(symbols, rows, kind=kind, partition=partition,
                                       names=names)
        validate_aeds(table)
    except (AedsError, ValueError) as exc:
        raise MalformedTable(f"table does not validate: {exc}") from exc
    return table
