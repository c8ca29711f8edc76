"""Main module for file compression"""


import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, TypedDict

import numpy as np

from .analysis import (
    DEFAULT_TOLERANCE, DIRECT_SOLVE_MAX_STATES, POWER_ITER_MAX, delta_type1, delta_type2,
    stationary_distribution
)
from .codec import (
    InitialStatePolicy, TrieDecoder, deserialize_table, encode, serialize_table, table_digest
)
from .constructors import (
    DEFAULT_STATE_BUDGET, build_large_n, build_prefix_code_table, build_saeds_case1,
    build_saeds_case2, build_saeds_case3, build_type1, build_type2, divisor_counts
)
from .container import read_container, write_container
from .errors import HashMismatch, MalformedStream, NotErgodic, StateBudgetExceeded
from .model import AedsTable, SourceDistribution, entropy, histogram_distribution
from .prefix_codes import CodeTree, build_huffman, tree_metrics
from .tans import build_tans, quantize_counts, tans_to_aeds

logger = logging.getLogger(__name__)

CODECS = ('huffman', 'type1', 'type2', 'saeds-case1', 'saeds-case2', 'saeds-case3',
          'large-n', 'tans')
DEFAULT_BLOCK_SIZE = 1 << 20


class CompressionReport(TypedDict):
    """Summary of one compression run, JSON-serializable"""
    requested_codec: str
    codec: str
    fallback: bool
    num_states: int
    symbols: int
    alphabet: int
    entropy: float
    huffman_rate: float
    analytic_rate: float
    payload_rate: float
    bits_per_byte: float
    blocks: int
    compressed_bytes: int


def new_report(codec: str) -> CompressionReport:
    return {
        'requested_codec': codec,
        'codec': codec,
        'fallback': False,
        'num_states': 0,
        'symbols': 0,
        'alphabet': 0,
        'entropy': 0.0,
        'huffman_rate': 0.0,
        'analytic_rate': 0.0,
        'payload_rate': 0.0,
        'bits_per_byte': 0.0,
        'blocks': 0,
        'compressed_bytes': 0,
    }


@dataclass(frozen=True)
class BuiltTable:
    """Table chosen for a source, after the Huffman fallback decision"""
    table: AedsTable
    codec: str
    fallback: bool
    analytic_rate: float
    huffman_rate: float


@dataclass(frozen=True)
class CompressionResult:
    container: bytes
    table: bytes
    report: CompressionReport


class Compressor:
    """A Compressor object is the entrypoint for the package.

    `compress` takes the byte histogram of the input, builds a table with the
    selected codec (falling back to the Huffman code when the scheme would not
    shorten it), encodes the input in blocks and wraps everything in a
    container. `decompress` reverses it.
    """

    def __init__(self, codec: str = 'huffman', num_states: int = 2, *,
                 block_size: int = DEFAULT_BLOCK_SIZE,
                 state_budget: int = DEFAULT_STATE_BUDGET,
                 tolerance: float = DEFAULT_TOLERANCE,
                 direct_max_states: int = DIRECT_SOLVE_MAX_STATES,
                 power_iter_max: int = POWER_ITER_MAX,
                 refine_passes: int = 0,
                 workers: int = 1,
                 initial_state: InitialStatePolicy = 'zero') -> None:
        if codec not in CODECS:
            raise ValueError(f"unknown codec {codec!r}, expected one of {CODECS}")
        if block_size < 1:
            raise ValueError("block size must be positive")
        self.codec = codec
        self.num_states = num_states
        self.block_size = block_size
        self.state_budget = state_budget
        self.tolerance = tolerance
        self.direct_max_states = direct_max_states
        self.power_iter_max = power_iter_max
        self.refine_passes = refine_passes
        self.workers = workers
        self.initial_state = initial_state

    @staticmethod
    def histogram(data: bytes) -> dict[int, int]:
        counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
        return {symbol: int(count) for symbol, count in enumerate(counts) if count}

    @staticmethod
    def distribution(data: bytes) -> Optional[SourceDistribution]:
        """Byte distribution of the data, padded to two symbols with the
        lowest absent byte values; None for empty data"""
        if not data:
            return None
        counts = Compressor.histogram(data)
        for symbol in range(256):
            if len(counts) >= 2:
                break
            counts.setdefault(symbol, 1)
        return histogram_distribution(counts)

    def _solved_rate(self, table: AedsTable, p: SourceDistribution) -> float:
        return stationary_distribution(table, p, self.direct_max_states,
                                       self.power_iter_max).length

    def _build_scheme(self, p: SourceDistribution, tree: CodeTree) -> tuple[AedsTable, float]:
        """Table of the requested codec and its analytic rate"""
        huffman_rate = tree.average_length(p)
        p_right = tree_metrics(tree, p)['p_right']
        if self.codec == 'type1':
            delta = delta_type1(p_right, self.num_states)
            if delta <= 0:
                return build_prefix_code_table(tree), huffman_rate
            return build_type1(tree, p, self.num_states), huffman_rate - delta
        if self.codec == 'type2':
            delta = delta_type2(p_right)
            if delta <= 0:
                return build_prefix_code_table(tree), huffman_rate
            return build_type2(tree, p), huffman_rate - delta
        if self.num_states > self.state_budget:
            raise StateBudgetExceeded(
                f"N = {self.num_states} exceeds the budget of {self.state_budget}"
            )
        if self.codec == 'saeds-case1':
            table = build_saeds_case1(p, divisor_counts(p, self.num_states))
        elif self.codec == 'saeds-case2':
            table = build_saeds_case2(p, quantize_counts(p, self.num_states))
        elif self.codec == 'saeds-case3':
            table = build_saeds_case3(p, quantize_counts(p, self.num_states))
        elif self.codec == 'large-n':
            table, _ = build_large_n(p, quantize_counts(p, self.num_states), self.refine_passes)
        else:
            table = tans_to_aeds(build_tans(p, self.num_states))
        return table, self._solved_rate(table, p)

    def build_table(self, p: SourceDistribution) -> BuiltTable:
        tree = build_huffman(p)
        huffman_rate = tree.average_length(p)
        if self.codec == 'huffman':
            return BuiltTable(build_prefix_code_table(tree), 'huffman', False,
                              huffman_rate, huffman_rate)
        try:
            table, rate = self._build_scheme(p, tree)
        except NotErgodic as exc:
            logger.warning("%s table is not ergodic (%s); using the Huffman code", self.codec, exc)
            table, rate = build_prefix_code_table(tree), huffman_rate
        if table.kind == 'huffman' or huffman_rate - rate <= self.tolerance:
            logger.info("No reduction from %s (L = %.6f, L_H = %.6f); using the Huffman code",
                        self.codec, rate, huffman_rate)
            return BuiltTable(build_prefix_code_table(tree), 'huffman', True,
                              huffman_rate, huffman_rate)
        logger.info("Built %s table with %d states, L = %.6f (L_H = %.6f)",
                    self.codec, table.num_states, rate, huffman_rate)
        return BuiltTable(table, self.codec, False, rate, huffman_rate)

    def _encode_block(self, table: AedsTable, block: bytes) -> tuple[bytes, int]:
        stream = encode(table, list(block), self.initial_state)
        return stream.to_bytes(), stream.total_bits

    def compress(self, data: bytes, embed_table: bool = True) -> CompressionResult:
        report = new_report(self.codec)
        p = Compressor.distribution(data)
        if p is None:
            container = write_container(b'', b'', 0, [])
            report['compressed_bytes'] = len(container)
            return CompressionResult(container, b'', report)
        built = self.build_table(p)
        table_bytes = serialize_table(built.table)
        blocks = [data[start:start + self.block_size]
                  for start in range(0, len(data), self.block_size)]
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                encoded = list(executor.map(lambda b: self._encode_block(built.table, b), blocks))
        else:
            encoded = [self._encode_block(built.table, block) for block in blocks]
        container = write_container(table_bytes, table_digest(built.table), len(data),
                                    [stream for stream, _ in encoded], embed_table)
        report.update({
            'codec': built.codec,
            'fallback': built.fallback,
            'num_states': built.table.num_states,
            'symbols': len(data),
            'alphabet': len(p),
            'entropy': entropy(p),
            'huffman_rate': built.huffman_rate,
            'analytic_rate': built.analytic_rate,
            'payload_rate': math.fsum(bits for _, bits in encoded) / len(data),
            'bits_per_byte': 8.0 * len(container) / len(data),
            'blocks': len(blocks),
            'compressed_bytes': len(container),
        })
        logger.info("Compressed %d bytes to %d (%.4f bits/byte, analytic %.4f)",
                    len(data), len(container), report['bits_per_byte'], built.analytic_rate)
        return CompressionResult(container, table_bytes, report)

    @staticmethod
    def decompress(data: bytes, table_bytes: Optional[bytes] = None) -> bytes:
        container = read_container(data)
        if container.length == 0:
            return b''
        if container.embedded:
            table = deserialize_table(container.table)
        else:
            if table_bytes is None:
                raise HashMismatch("container references a side table that was not given")
            table = deserialize_table(table_bytes)
            if table_digest(table) != container.digest:
                raise HashMismatch("side table does not match the container's table hash")
        decoder = TrieDecoder(table)
        out = bytearray()
        for block in container.blocks:
            out.extend(bytes(int(s) for s in decoder.decode(block)))
        if len(out) != container.length:
            raise MalformedStream(f"decoded {len(out)} symbols, container declares "
                                  f"{container.length}")
        return bytes(out)
