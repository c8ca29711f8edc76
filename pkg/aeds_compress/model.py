"""Model module

Core types shared by the whole package: memoryless source distributions,
codewords and the table representation of an encoding-decoding scheme.

States are dense indices 0..N-1. Symbols are opaque hashable tokens (ints for
the byte alphabet, short strings in examples). All types are immutable.
"""


import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    AlphabetMismatch, DegenerateAlphabet, InconsistentTables, InvalidPartition, InvalidWeight
)

Symbol = Union[int, str]

PROB_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SourceDistribution:
    """Finite alphabet with strictly positive probabilities summing to one"""
    symbols: tuple[Symbol, ...]
    probs: tuple[float, ...]
    _index: Mapping[Symbol, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.symbols) != len(self.probs):
            raise InvalidWeight("symbols and probabilities differ in length")
        if len(self.symbols) < 2:
            raise DegenerateAlphabet("at least two symbols are required")
        if len(set(self.symbols)) != len(self.symbols):
            raise AlphabetMismatch("symbol identifiers must be unique")
        if any(not p > 0.0 for p in self.probs):
            raise InvalidWeight("probabilities must be strictly positive")
        if abs(math.fsum(self.probs) - 1.0) > PROB_SUM_TOLERANCE:
            raise InvalidWeight(f"probabilities sum to {math.fsum(self.probs)!r}, not 1")
        object.__setattr__(
            self, '_index', MappingProxyType({s: i for i, s in enumerate(self.symbols)})
        )

    @classmethod
    def from_probs(cls, probs: Sequence[float],
                   symbols: Optional[Sequence[Symbol]] = None) -> 'SourceDistribution':
        if symbols is None:
            symbols = list(range(len(probs)))
        return validate_distribution(list(zip(symbols, probs)))

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol: Symbol) -> int:
        try:
            return self._index[symbol]
        except KeyError as exc:
            raise AlphabetMismatch(f"symbol {symbol!r} is not in the alphabet") from exc

    def prob(self, symbol: Symbol) -> float:
        return self.probs[self.index(symbol)]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)


@dataclass(frozen=True)
class Codeword:
    """Finite bit sequence; the empty codeword has length 0"""
    bits: str = ""

    def __post_init__(self) -> None:
        if self.bits.strip('01'):
            raise ValueError(f"codeword '{self.bits}' must only contain 0 and 1")

    @property
    def length(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return self.bits or "λ"


EMPTY = Codeword("")


@dataclass(frozen=True)
class EncoderEntry:
    """Encoder output for a (state, symbol) pair: E and F- of the scheme"""
    codeword: Codeword
    next_state: int


@dataclass(frozen=True)
class DecoderEntry:
    """Decoder output for a (state, codeword) pair: D and F+ of the scheme"""
    symbol: Symbol
    next_state: int


@dataclass(frozen=True)
class SAedsPartition:
    """State subsets per symbol and the forward set of every state.

    `subsets[i]` lists the states reached only by symbol i. `forward[x]` lists the
    states the decoder may move to from x, in the order their codewords are assigned.
    """
    subsets: tuple[tuple[int, ...], ...]
    forward: tuple[tuple[int, ...], ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(subset) for subset in self.subsets)

    def owner(self) -> list[int]:
        owners = [-1] * len(self.forward)
        for sym_idx, subset in enumerate(self.subsets):
            for state in subset:
                owners[state] = sym_idx
        return owners

    def validate(self, num_states: int) -> None:
        seen: set[int] = set()
        for sym_idx, subset in enumerate(self.subsets):
            if not subset:
                raise InvalidPartition(f"symbol {sym_idx} owns no state")
            if seen.intersection(subset):
                raise InvalidPartition(f"state subsets overlap at symbol {sym_idx}")
            seen.update(subset)
        if seen != set(range(num_states)) or len(self.forward) != num_states:
            raise InvalidPartition("state subsets do not cover the state set")
        for sym_idx, subset in enumerate(self.subsets):
            covered: list[int] = []
            for state in subset:
                if not self.forward[state]:
                    raise InvalidPartition(f"forward set of state {state} is empty")
                covered.extend(self.forward[state])
            if len(covered) != num_states or set(covered) != set(range(num_states)):
                raise InvalidPartition(
                    f"forward sets of symbol {sym_idx} do not partition the state set"
                )


@dataclass(frozen=True)
class AedsTable:
    """Full encoding-decoding scheme.

    `encoder[x][i]` is the entry of state x for the i-th alphabet symbol and
    `decoder[x]` maps each decoding codeword of x to its symbol and next state.
    """
    symbols: tuple[Symbol, ...]
    encoder: tuple[tuple[EncoderEntry, ...], ...]
    decoder: tuple[Mapping[str, DecoderEntry], ...]
    kind: str = "generic"
    partition: Optional[SAedsPartition] = None
    names: tuple[str, ...] = ()

    @property
    def num_states(self) -> int:
        return len(self.encoder)

    def state_name(self, state: int) -> str:
        if self.names:
            return self.names[state]
        return f"α{state + 1}"

    def symbol_index(self, symbol: Symbol) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError as exc:
            raise AlphabetMismatch(f"symbol {symbol!r} is not in the alphabet") from exc

    def encode_step(self, state: int, symbol: Symbol) -> EncoderEntry:
        return self.encoder[state][self.symbol_index(symbol)]

    def decoding_codewords(self, state: int) -> list[str]:
        return sorted(self.decoder[state], key=lambda bits: (len(bits), bits))

    def max_codeword_length(self) -> int:
        return max(entry.codeword.length for row in self.encoder for entry in row)

    @classmethod
    def from_encoder(cls, symbols: Sequence[Symbol],
                     rows: Iterable[Sequence[tuple[str, int]]],
                     kind: str = "generic",
                     partition: Optional[SAedsPartition] = None,
                     names: Sequence[str] = ()) -> 'AedsTable':
        """Build a table from encoder rows of (codeword bits, next state) pairs.

        The decoder maps are derived by inverting the encoder; a collision
        (two encoder entries landing on the same state and codeword) is an error.
        """
        encoder = tuple(
            tuple(EncoderEntry(Codeword(bits), next_state) for bits, next_state in row)
            for row in rows
        )
        decoder: list[dict[str, DecoderEntry]] = [{} for _ in encoder]
        for state, row in enumerate(encoder):
            for sym_idx, entry in enumerate(row):
                if not 0 <= entry.next_state < len(encoder):
                    raise InconsistentTables(state, symbols[sym_idx],
                                             f"next state {entry.next_state} out of range")
                target = decoder[entry.next_state]
                if entry.codeword.bits in target:
                    raise InconsistentTables(state, symbols[sym_idx],
                                             "codeword collides at the next state")
                target[entry.codeword.bits] = DecoderEntry(symbols[sym_idx], state)
        return cls(
            symbols=tuple(symbols),
            encoder=encoder,
            decoder=tuple(MappingProxyType(d) for d in decoder),
            kind=kind,
            partition=partition,
            names=tuple(names),
        )


def validate_distribution(raw_symbol_weights: Sequence[tuple[Symbol, float]]
                          ) -> SourceDistribution:
    """Normalize (symbol, weight) pairs into a distribution, preserving order"""
    for symbol, weight in raw_symbol_weights:
        if weight < 0 or math.isnan(weight):
            raise InvalidWeight(f"weight {weight!r} of symbol {symbol!r} is negative")
    zero = [symbol for symbol, weight in raw_symbol_weights if weight == 0]
    if zero:
        positive = len(raw_symbol_weights) - len(zero)
        if positive < 2:
            raise DegenerateAlphabet(f"only {positive} symbol(s) with positive weight")
        raise InvalidWeight(f"zero-weight symbols are not allowed: {zero!r}")
    if len(raw_symbol_weights) < 2:
        raise DegenerateAlphabet(f"only {len(raw_symbol_weights)} symbol(s) given")
    total = math.fsum(weight for _, weight in raw_symbol_weights)
    probs = [weight / total for _, weight in raw_symbol_weights]
    # absorb the rounding error into the largest probability
    largest = max(range(len(probs)), key=lambda i: probs[i])
    probs[largest] += 1.0 - math.fsum(probs)
    return SourceDistribution(tuple(s for s, _ in raw_symbol_weights), tuple(probs))


def histogram_distribution(counts: Mapping[Symbol, int]) -> SourceDistribution:
    """Distribution of the symbols that occur, in sorted symbol order"""
    present = [(symbol, float(count)) for symbol, count in sorted(counts.items()) if count > 0]
    return validate_distribution(present)


def byte_alphabet() -> tuple[int, ...]:
    return tuple(range(256))


def ratio_distribution(counts: Sequence[int],
                       symbols: Sequence[Symbol]) -> SourceDistribution:
    """The ratio distribution q(s) = N_s / N of a state partition"""
    return validate_distribution([(s, float(n)) for s, n in zip(symbols, counts)])


def entropy(p: SourceDistribution) -> float:
    probs = p.as_array()
    return float(-np.sum(probs * np.log2(probs)))


def relative_entropy(p: SourceDistribution, q: SourceDistribution) -> float:
    if p.symbols != q.symbols:
        raise AlphabetMismatch("relative entropy needs the same alphabet in the same order")
    p_arr = p.as_array()
    q_arr = q.as_array()
    return float(max(np.sum(p_arr * np.log2(p_arr / q_arr)), 0.0))


def binary_entropy(r: float) -> float:
    if r <= 0.0 or r >= 1.0:
        return 0.0
    return -r * math.log2(r) - (1.0 - r) * math.log2(1.0 - r)


def derive_partition(table: AedsTable) -> Optional[SAedsPartition]:
    """Recover the state-divided structure of a table, or None if it has none"""
    subsets: list[list[int]] = [[] for _ in table.symbols]
    forward: list[tuple[int, ...]] = []
    for state, entries in enumerate(table.decoder):
        owners = {table.symbol_index(entry.symbol) for entry in entries.values()}
        if len(owners) != 1:
            return None
        subsets[owners.pop()].append(state)
        ordered = sorted(entries.items(), key=lambda item: (len(item[0]), item[0]))
        forward.append(tuple(entry.next_state for _, entry in ordered))
    partition = SAedsPartition(tuple(tuple(s) for s in subsets), tuple(forward))
    try:
        partition.validate(table.num_states)
    except InvalidPartition:
        return None
    return partition
