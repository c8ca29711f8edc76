"""Tabled ANS module

States are the integers N..2N-1 with N a power of two. Symbol s owns N_s
states; the table C maps (s, y), y in N_s..2N_s-1, onto the states of s and
D is its inverse. Encoding runs backward and shares the bitstream framing of
the codec module, the initial state being written as x - N.
"""


import json
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .codec import BitReader, Bitstream, check_padding, read_stream_header
from .errors import (
    HashMismatch, MalformedTable, NotPowerOfTwo, TooFewStates, UnknownSymbol
)
from .model import AedsTable, SAedsPartition, SourceDistribution, Symbol

logger = logging.getLogger(__name__)

SPREAD_POLICIES = ('sorted-interval', 'stride')


def is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


def quantize_counts(p: SourceDistribution, num_states: int) -> list[int]:
    """Largest-remainder apportionment of N states with N_s >= 1"""
    if num_states < len(p):
        raise TooFewStates(f"N = {num_states} is smaller than the alphabet ({len(p)})")
    raw = p.as_array() * num_states
    floors = np.floor(raw)
    counts = [max(1, int(f)) for f in floors]
    remainders = raw - floors
    missing = num_states - sum(counts)
    if missing > 0:
        order = sorted(range(len(counts)), key=lambda i: (-remainders[i], i))
        for i in order[:missing]:
            counts[i] += 1
    while missing < 0:
        # take a unit from the most over-allocated symbol that can spare one
        spare = [i for i, c in enumerate(counts) if c > 1]
        worst = max(spare, key=lambda i: (counts[i] - raw[i], -i))
        counts[worst] -= 1
        missing += 1
    return counts


def spread_symbols(counts: Sequence[int], policy: str = 'sorted-interval') -> list[int]:
    """Owner symbol index of every state offset 0..N-1"""
    num_states = sum(counts)
    if policy == 'sorted-interval':
        return [sym_idx for sym_idx, count in enumerate(counts) for _ in range(count)]
    if policy == 'stride':
        step = round(num_states * (math.sqrt(5) - 1) / 2) | 1
        owners = [-1] * num_states
        pos = 0
        for sym_idx, count in enumerate(counts):
            for _ in range(count):
                owners[pos] = sym_idx
                pos = (pos + step) % num_states
        return owners
    raise ValueError(f"unknown spread policy {policy!r}, expected one of {SPREAD_POLICIES}")


@dataclass(frozen=True)
class TansTable:
    """tANS instance with its correspondence tables.

    `encode_table[i][y - N_s]` is C[s_i, y] and `decode_table[x - N]` is D[x]
    as a (symbol index, y) pair.
    """
    symbols: tuple[Symbol, ...]
    num_states: int
    counts: tuple[int, ...]
    owners: tuple[int, ...]
    policy: str
    encode_table: tuple[tuple[int, ...], ...]
    decode_table: tuple[tuple[int, int], ...]

    def state_set(self, sym_idx: int) -> list[int]:
        return [self.num_states + i for i, owner in enumerate(self.owners) if owner == sym_idx]

    def correspondence(self, sym_idx: int, y: int) -> int:
        return self.encode_table[sym_idx][y - self.counts[sym_idx]]

    def emit_bits(self, state: int, sym_idx: int) -> int:
        """k = floor(lg(x / N_s)) for encoding symbol s from state x"""
        return (state // self.counts[sym_idx]).bit_length() - 1

    def read_bits(self, y: int) -> int:
        """Smallest k with 2^k y >= N"""
        return ((self.num_states + y - 1) // y - 1).bit_length()


def tans_from_spread(symbols: Sequence[Symbol], owners: Sequence[int],
                     policy: str) -> TansTable:
    num_states = len(owners)
    if not is_power_of_two(num_states):
        raise NotPowerOfTwo(f"tANS needs a power-of-two N, got {num_states}")
    counts = [0] * len(symbols)
    encode_rows: list[list[int]] = [[] for _ in symbols]
    decode_rows: list[tuple[int, int]] = []
    for offset, sym_idx in enumerate(owners):
        decode_rows.append((sym_idx, 0))
        encode_rows[sym_idx].append(num_states + offset)
        counts[sym_idx] += 1
    if min(counts) < 1:
        raise TooFewStates("every symbol needs at least one state")
    for sym_idx, row in enumerate(encode_rows):
        for rank, state in enumerate(row):
            decode_rows[state - num_states] = (sym_idx, counts[sym_idx] + rank)
    return TansTable(
        symbols=tuple(symbols),
        num_states=num_states,
        counts=tuple(counts),
        owners=tuple(owners),
        policy=policy,
        encode_table=tuple(tuple(row) for row in encode_rows),
        decode_table=tuple(decode_rows),
    )


def build_tans(p: SourceDistribution, num_states: int,
               spread_policy: str = 'sorted-interval',
               counts: Optional[Sequence[int]] = None) -> TansTable:
    if not is_power_of_two(num_states):
        raise NotPowerOfTwo(f"tANS needs a power-of-two N, got {num_states}")
    if counts is None:
        counts = quantize_counts(p, num_states)
    elif sum(counts) != num_states or min(counts) < 1:
        raise TooFewStates(f"state counts {list(counts)} must be >= 1 and sum to {num_states}")
    table = tans_from_spread(p.symbols, spread_symbols(counts, spread_policy), spread_policy)
    logger.debug("Built tANS table N=%d counts=%s spread=%s",
                 num_states, table.counts, spread_policy)
    return table


def tans_encode(table: TansTable, symbols: Sequence[Symbol],
                initial_state: Optional[int] = None) -> Bitstream:
    lookup = {s: i for i, s in enumerate(table.symbols)}
    state = table.num_states if initial_state is None else initial_state
    if not table.num_states <= state < 2 * table.num_states:
        raise ValueError(f"initial state {state} outside [N, 2N)")
    chunks = []
    for t in range(len(symbols) - 1, -1, -1):
        try:
            sym_idx = lookup[symbols[t]]
        except (KeyError, TypeError) as exc:
            raise UnknownSymbol(t, symbols[t]) from exc
        k = table.emit_bits(state, sym_idx)
        chunks.append(format(state & ((1 << k) - 1), f'0{k}b') if k else '')
        state = table.correspondence(sym_idx, state >> k)
    chunks.reverse()
    return Bitstream(table.num_states, state - table.num_states, len(symbols), ''.join(chunks))


def tans_decode(table: TansTable, stream: Union[Bitstream, bytes]) -> list[Symbol]:
    data = stream.to_bytes() if isinstance(stream, Bitstream) else stream
    reader = BitReader(data)
    num_states, initial, length = read_stream_header(reader)
    if num_states != table.num_states:
        raise HashMismatch(f"stream declares {num_states} states, table has {table.num_states}")
    state = table.num_states + initial
    out: list[Symbol] = []
    for _ in range(length):
        sym_idx, y = table.decode_table[state - table.num_states]
        out.append(table.symbols[sym_idx])
        k = table.read_bits(y)
        state = (y << k) + reader.read_uint(k)
    check_padding(reader, length)
    return out


def tans_to_aeds(table: TansTable) -> AedsTable:
    """Same machine as a table-driven scheme over state indices x - N"""
    size = table.num_states
    rows = []
    for offset in range(size):
        state = size + offset
        row = []
        for sym_idx in range(len(table.symbols)):
            k = table.emit_bits(state, sym_idx)
            bits = format(state & ((1 << k) - 1), f'0{k}b') if k else ''
            row.append((bits, table.correspondence(sym_idx, state >> k) - size))
        rows.append(row)
    forward = []
    for offset in range(size):
        _, y = table.decode_table[offset]
        k = table.read_bits(y)
        forward.append(tuple(range((y << k) - size, ((y + 1) << k) - size)))
    subsets = tuple(
        tuple(x - size for x in table.state_set(sym_idx)) for sym_idx in range(len(table.symbols))
    )
    return AedsTable.from_encoder(
        table.symbols, rows, kind='tans',
        partition=SAedsPartition(subsets, tuple(forward)),
        names=[str(size + offset) for offset in range(size)],
    )


def serialize_tans(table: TansTable) -> bytes:
    body = {
        'symbols': list(table.symbols),
        'num_states': table.num_states,
        'counts': list(table.counts),
        'policy': table.policy,
        'owners': list(table.owners),
    }
    return json.dumps(body, sort_keys=True, separators=(',', ':')).encode('utf-8')


def deserialize_tans(data: bytes) -> TansTable:
    try:
        body = json.loads(data.decode('utf-8'))
        table = tans_from_spread(body['symbols'], [int(o) for o in body['owners']],
                                 str(body['policy']))
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, IndexError) as exc:
        raise MalformedTable(f"cannot parse tANS table: {exc}") from exc
    if list(table.counts) != body['counts'] or table.num_states != body['num_states']:
        raise MalformedTable("tANS counts do not match the spread")
    return table
