"""Constructors module

Builders for every scheme of the package:

- the plain prefix code as a one-state table,
- the Type-I scheme with N states and the five-state Type-II scheme, both
  grafted onto a code tree,
- state-divided schemes (Huffman-matching, Case 1, Case 2, Case 3) and the
  large-N layout, assembled from per-symbol "slots" that each own an
  interval of the state set as forward set,
- the optimal split search for uniform sources and an experimental
  per-state Huffman re-optimization.
"""


import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, TypedDict

import numpy as np

from .analysis import (
    delta_type1, delta_type2, partition_transition_matrix, q_star, solve_stationary,
    stationary_distribution
)
from .codec import chain_ergodicity
from .errors import (
    DegenerateSingleSymbol, KindMismatch, NonIntegerRatio, NotErgodic, NotPowerOfTwo,
    StateBudgetExceeded, TooFewStates
)
from .model import AedsTable, SAedsPartition, SourceDistribution
from .prefix_codes import (
    CodeTree, build_huffman, build_phased_in, canonical_phased_in, ceil_log2, huffman_codewords,
    tree_metrics, uniform_huffman_length
)
from .tans import is_power_of_two

logger = logging.getLogger(__name__)

DEFAULT_STATE_BUDGET = 1 << 16


@dataclass(frozen=True)
class Slot:
    """A state of symbol `symbol` before it is given an index.

    `forward` lists the states the decoder may continue with, in codeword
    order, and `codewords` the matching decoding codewords. Empty codewords
    are filled in once the stationary distribution is known.
    """
    symbol: int
    forward: tuple[int, ...]
    codewords: tuple[str, ...] = ()


@dataclass(frozen=True)
class LargeNLayout:
    """Per-symbol group sizes of the large-N layout"""
    kappa: tuple[int, ...]
    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]
    d: tuple[int, ...]
    ab_size: tuple[int, ...]
    cd_size: tuple[int, ...]

    def check(self, counts: Sequence[int], num_states: int) -> None:
        for i, count in enumerate(counts):
            kappa = self.kappa[i]
            assert 2 * self.b[i] + self.d[i] == 1 << kappa
            assert count == self.a[i] + self.c[i] + 1
            assert (1 << kappa) * count - num_states == (1 << (kappa - 1)) * self.a[i] + self.b[i]
            assert 2 * num_states - (1 << kappa) * count == (1 << kappa) * self.c[i] + self.d[i]
            assert self.ab_size[i] + self.cd_size[i] == num_states


class SplitResult(TypedDict):
    """Best split of a uniform source between the two root subtrees"""
    m_right: int
    m_left: int
    length: float
    reduction: float
    redundancy: float


def build_prefix_code_table(tree: CodeTree, kind: str = 'huffman') -> AedsTable:
    """One-state table that emits the code tree's codewords"""
    return AedsTable.from_encoder(tree.symbols, [[(c, 0) for c in tree.codewords]], kind=kind)


def _tree_for(p: SourceDistribution, tree: Optional[CodeTree]) -> CodeTree:
    tree = tree if tree is not None else build_huffman(p)
    return tree.normalized(p)


def build_type1(tree: Optional[CodeTree], p: SourceDistribution, num_states: int) -> AedsTable:
    """Type-I scheme: right-subtree symbols walk a chain of N states.

    A left-subtree symbol returns to the first state and records, through a
    phased-in prefix, which state it left from; the N-th consecutive right
    symbol returns there as well, behind a '1'.
    """
    if num_states < 2:
        raise TooFewStates("Type-I needs N >= 2")
    tree = _tree_for(p, tree)
    right = tree.right
    left = tree.left
    contexts = canonical_phased_in(num_states)
    rows = []
    for state in range(num_states):
        row = []
        for symbol in p.symbols:
            if symbol in right:
                if state < num_states - 1:
                    row.append((right[symbol], state + 1))
                else:
                    row.append(('1' + right[symbol], 0))
            else:
                row.append(('0' + contexts[state] + left[symbol], 0))
        rows.append(row)
    logger.info("Built Type-I table with %d states", num_states)
    return AedsTable.from_encoder(p.symbols, rows, kind='type1')


# Type-II transitions: (prefix, next state) for a right and a left symbol
_TYPE2_RIGHT = (('0', 2), ('10', 2), ('', 3), ('', 4), ('11', 2))
_TYPE2_LEFT = (('', 1), ('110', 0), ('0', 0), ('10', 0), ('111', 0))


def build_type2(tree: Optional[CodeTree], p: SourceDistribution) -> AedsTable:
    """Five-state Type-II scheme on top of a code tree"""
    tree = _tree_for(p, tree)
    right = tree.right
    left = tree.left
    rows = []
    for state in range(5):
        row = []
        for symbol in p.symbols:
            prefix, nxt = _TYPE2_RIGHT[state] if symbol in right else _TYPE2_LEFT[state]
            row.append((prefix + (right[symbol] if symbol in right else left[symbol]), nxt))
        rows.append(row)
    return AedsTable.from_encoder(p.symbols, rows, kind='type2')


def assemble_saeds(p: SourceDistribution, slots: Sequence[Slot], kind: str) -> AedsTable:
    """Table whose state i is slots[i]"""
    num_states = len(slots)
    rows: list[list[tuple[str, int]]] = [[('', -1)] * len(p) for _ in range(num_states)]
    subsets: list[list[int]] = [[] for _ in p.symbols]
    for state, slot in enumerate(slots):
        subsets[slot.symbol].append(state)
        for previous, bits in zip(slot.forward, slot.codewords):
            rows[previous][slot.symbol] = (bits, state)
    partition = SAedsPartition(
        tuple(tuple(s) for s in subsets), tuple(slot.forward for slot in slots)
    )
    partition.validate(num_states)
    return AedsTable.from_encoder(p.symbols, rows, kind=kind, partition=partition)


def _slot_partition(slots: Sequence[Slot], width: int) -> SAedsPartition:
    subsets: list[list[int]] = [[] for _ in range(width)]
    for state, slot in enumerate(slots):
        subsets[slot.symbol].append(state)
    return SAedsPartition(tuple(tuple(s) for s in subsets), tuple(s.forward for s in slots))


def _check_counts(p: SourceDistribution, counts: Sequence[int]) -> int:
    if len(counts) != len(p) or min(counts) < 1:
        raise TooFewStates("every symbol needs at least one state")
    return sum(counts)


def _phased_in_slots(p: SourceDistribution, counts: Sequence[int]) -> list[Slot]:
    """Case-1/2 slots over ranks 0..N-1: the forward sets of each symbol are
    consecutive intervals with the r_s sets of size M_s + 1 on the lowest ranks"""
    num_states = sum(counts)
    slots = []
    for sym_idx, count in enumerate(counts):
        ratio, rest = divmod(num_states, count)
        start = 0
        for j in range(count):
            size = ratio + 1 if j >= count - rest else ratio
            slots.append(Slot(sym_idx, tuple(range(start, start + size))))
            start += size
    return slots


def _slot_successors(slots: Sequence[Slot]) -> list[list[int]]:
    successors: list[set[int]] = [set() for _ in slots]
    for state, slot in enumerate(slots):
        for previous in slot.forward:
            successors[previous].add(state)
    return [sorted(targets) for targets in successors]


def _is_ergodic(slots: Sequence[Slot]) -> bool:
    return chain_ergodicity(_slot_successors(slots)).ergodic


def _ergodic_numbering(slots: Sequence[Slot], p: SourceDistribution, kind: str,
                       ranked_first: bool = True) -> list[Slot]:
    """Order slots so that state i is slots[i] and the encoding chain is ergodic.

    The candidates are the ranked order of _rank_slots, the symbol-major order
    of `slots` and symbol-major with every symbol's slots reversed. When all
    three are reducible or periodic, neighbouring states of the ranked order
    are swapped one pair at a time, lowest ranks first.
    """
    ranked = _rank_slots(slots, p, q_star(len(slots)).tolist())
    symbol_major = list(slots)
    reversed_major = [slot for _, slot in
                      sorted(enumerate(slots), key=lambda item: (item[1].symbol, -item[0]))]
    candidates = [ranked, symbol_major] if ranked_first else [symbol_major, ranked]
    for position, candidate in enumerate(candidates + [reversed_major]):
        if _is_ergodic(candidate):
            if position:
                logger.debug("%s: using numbering candidate %d", kind, position)
            return candidate
    order = list(ranked)
    for i in range(len(order) - 1, 0, -1):
        order[i - 1], order[i] = order[i], order[i - 1]
        if _is_ergodic(order):
            logger.debug("%s: ergodic after swapping states %d and %d", kind, i - 1, i)
            return order
        order[i - 1], order[i] = order[i], order[i - 1]
    counts = [sum(1 for s in slots if s.symbol == sym) for sym in range(len(p))]
    raise NotErgodic(f"no ergodic numbering of the {kind} states for counts {counts}")


def _with_phased_in_codes(slots: Sequence[Slot], p: SourceDistribution) -> list[Slot]:
    """Give each slot a phased-in code, short codewords on the likeliest states"""
    partition = _slot_partition(slots, len(p))
    q, _, _ = solve_stationary(partition_transition_matrix(partition, p))
    weights = q.tolist()
    coded = []
    for slot in slots:
        code = build_phased_in(len(slot.forward), [weights[x] for x in slot.forward])
        coded.append(Slot(slot.symbol, slot.forward, code.codewords))
    return coded


def build_saeds_case2(p: SourceDistribution, counts: Sequence[int],
                      kind: str = 'saeds-case2') -> AedsTable:
    """Any counts: forward sets of size floor(N / N_s) and one more, phased-in coded.

    States are numbered in descending order of p(s) times the Q* mass of their
    forward set, unless that chain is not ergodic (see _ergodic_numbering).
    """
    num_states = _check_counts(p, counts)
    slots = _ergodic_numbering(_phased_in_slots(p, counts), p, kind)
    logger.info("Built %s table with N=%d, counts=%s", kind, num_states, list(counts))
    return assemble_saeds(p, _with_phased_in_codes(slots, p), kind)


def build_saeds_case1(p: SourceDistribution, counts: Sequence[int]) -> AedsTable:
    """Counts dividing N: every forward set of symbol s has N / N_s states"""
    num_states = _check_counts(p, counts)
    for symbol, count in zip(p.symbols, counts):
        if num_states % count:
            raise NonIntegerRatio(symbol, num_states, count)
    return build_saeds_case2(p, counts, kind='saeds-case1')


def divisor_counts(p: SourceDistribution, num_states: int) -> list[int]:
    """Counts dividing N, summing to N, that minimize D(p || N_s / N)"""
    if num_states < len(p):
        raise TooFewStates(f"N = {num_states} is smaller than the alphabet ({len(p)})")
    divisors = [d for d in range(1, num_states + 1) if num_states % d == 0]
    cost = np.full(num_states + 1, math.inf)
    cost[0] = 0.0
    choices = np.zeros((len(p), num_states + 1), dtype=np.int16)
    for sym_idx, prob in enumerate(p.probs):
        best = np.full(num_states + 1, math.inf)
        for position, divisor in enumerate(divisors):
            candidate = np.full(num_states + 1, math.inf)
            candidate[divisor:] = cost[:num_states + 1 - divisor] - prob * math.log2(divisor)
            better = candidate < best
            best[better] = candidate[better]
            choices[sym_idx][better] = position
        cost = best
    if not math.isfinite(cost[num_states]):
        raise TooFewStates(f"no counts dividing N = {num_states} sum to N for {len(p)} symbols")
    counts = [0] * len(p)
    remaining = num_states
    for sym_idx in range(len(p) - 1, -1, -1):
        counts[sym_idx] = divisors[int(choices[sym_idx][remaining])]
        remaining -= counts[sym_idx]
    return counts


def build_huffman_matching_saeds(p: SourceDistribution,
                                 state_budget: int = DEFAULT_STATE_BUDGET) -> AedsTable:
    """State-divided scheme whose rate equals the Huffman code's"""
    tree = build_huffman(p)
    longest = tree.max_length
    if (1 << longest) > state_budget:
        raise StateBudgetExceeded(f"N = 2^{longest} exceeds the budget of {state_budget}")
    counts = [1 << (longest - tree.length(s)) for s in p.symbols]
    return build_saeds_case2(p, counts, kind='huffman-matching')


def build_saeds_case3(p: SourceDistribution, counts: Sequence[int],
                      num_states: Optional[int] = None) -> AedsTable:
    """N = 2^k: the forward set of the y-th state of s is [2^k_y y - N, 2^k_y (y + 1) - N).

    States are numbered symbol by symbol, as the sorted-interval tANS spread
    does, when that chain is ergodic.
    """
    total = _check_counts(p, counts)
    if num_states is not None and num_states != total:
        raise TooFewStates(f"counts sum to {total}, not {num_states}")
    if not is_power_of_two(total):
        raise NotPowerOfTwo(f"Case 3 needs a power-of-two N, got {total}")
    slots = []
    for sym_idx, count in enumerate(counts):
        for y in range(count, 2 * count):
            k = ((total + y - 1) // y - 1).bit_length()
            base = (y << k) - total
            forward = tuple(range(base, base + (1 << k)))
            codes = tuple(format(b, f'0{k}b') if k else '' for b in range(1 << k))
            slots.append(Slot(sym_idx, forward, codes))
    slots = _ergodic_numbering(slots, p, 'saeds-case3', ranked_first=False)
    return assemble_saeds(p, slots, 'saeds-case3')


def large_n_layout(counts: Sequence[int]) -> LargeNLayout:
    num_states = sum(counts)
    fields: dict[str, list[int]] = {k: [] for k in ('kappa', 'a', 'b', 'c', 'd', 'ab', 'cd')}
    for count in counts:
        if count >= num_states:
            raise DegenerateSingleSymbol("one symbol owns every state")
        kappa = ceil_log2(-(-num_states // count))
        while (count << kappa) < num_states:
            kappa += 1
        excess = (count << kappa) - num_states
        half = 1 << (kappa - 1)
        a, b = divmod(excess, half)
        c = count - a - 1
        d = 2 * num_states - (count << kappa) - (c << kappa)
        for key, value in zip(('kappa', 'a', 'b', 'c', 'd', 'ab', 'cd'),
                              (kappa, a, b, c, d, excess, 2 * num_states - (count << kappa))):
            fields[key].append(value)
    layout = LargeNLayout(
        kappa=tuple(fields['kappa']), a=tuple(fields['a']), b=tuple(fields['b']),
        c=tuple(fields['c']), d=tuple(fields['d']),
        ab_size=tuple(fields['ab']), cd_size=tuple(fields['cd']),
    )
    layout.check(counts, num_states)
    return layout


def _large_n_slots(counts: Sequence[int], layout: LargeNLayout) -> list[Slot]:
    """Slots with forward sets over ranks 0..N-1: the special state's short part
    on top, then the A sets, the C sets and the special state's long tail"""
    num_states = sum(counts)
    slots = []
    for sym_idx in range(len(counts)):
        kappa = layout.kappa[sym_idx]
        b = layout.b[sym_idx]
        d = layout.d[sym_idx]
        half = 1 << (kappa - 1)
        start = b
        for _ in range(layout.a[sym_idx]):
            codes = tuple(format(v, f'0{kappa - 1}b') if kappa > 1 else '' for v in range(half))
            slots.append(Slot(sym_idx, tuple(range(start, start + half)), codes))
            start += half
        for _ in range(layout.c[sym_idx]):
            codes = tuple(format(v, f'0{kappa}b') for v in range(1 << kappa))
            slots.append(Slot(sym_idx, tuple(range(start, start + (1 << kappa))), codes))
            start += 1 << kappa
        forward = tuple(range(b)) + tuple(range(num_states - d, num_states))
        slots.append(Slot(sym_idx, forward, tuple(canonical_phased_in(b + d))))
    return slots


def _rank_slots(slots: Sequence[Slot], p: SourceDistribution,
                rank_mass: Sequence[float]) -> list[Slot]:
    """Order slots by descending target p(s) * sum of rank_mass over the forward set"""
    def target(item: tuple[int, Slot]) -> tuple[float, int]:
        position, slot = item
        mass = math.fsum(rank_mass[r] for r in slot.forward)
        return -p.probs[slot.symbol] * mass, position
    return [slot for _, slot in sorted(enumerate(slots), key=target)]


def build_large_n(p: SourceDistribution, counts: Sequence[int],
                  refine_passes: int = 0) -> tuple[AedsTable, LargeNLayout]:
    """Large-N layout; state index i is the i-th rank in descending target order.

    Slots are ranked by p(s) times the Q* mass of their forward set. Optional
    refinement passes re-rank by the solved stationary distribution and keep
    the shortest table. A reducible or periodic ranked chain is renumbered
    by _ergodic_numbering.
    """
    _check_counts(p, counts)
    layout = large_n_layout(counts)
    base_slots = _large_n_slots(counts, layout)
    table = assemble_saeds(p, _ergodic_numbering(base_slots, p, 'large-n'), 'large-n')
    best = table
    best_length = stationary_distribution(table, p).length if refine_passes else math.inf
    for iteration in range(refine_passes):
        q = stationary_distribution(best, p).q
        ranked = _rank_slots(base_slots, p, q)
        if not _is_ergodic(ranked):
            break
        candidate = assemble_saeds(p, ranked, 'large-n')
        length = stationary_distribution(candidate, p).length
        logger.debug("Refinement pass %d: L = %.12f", iteration + 1, length)
        if length >= best_length:
            break
        best, best_length = candidate, length
    return best, layout


def optimal_uniform_split(size: int, num_states: int = 2,
                          variant: str = 'type1') -> SplitResult:
    """Split of a uniform M-ary source minimizing L_T(M, M_R) - delta(M_R / M)"""
    if size < 2:
        raise TooFewStates("a uniform source needs M >= 2")
    if variant not in ('type1', 'type2'):
        raise KindMismatch(f"unknown split variant {variant!r}")
    best: Optional[tuple[float, int]] = None
    for m_right in range(-(-size // 2), size):
        weight = m_right / size
        tree_length = (1.0 + weight * uniform_huffman_length(m_right)
                       + (1.0 - weight) * uniform_huffman_length(size - m_right))
        delta = delta_type1(weight, num_states) if variant == 'type1' else delta_type2(weight)
        length = tree_length - delta
        if best is None or length < best[0] - 1e-12:
            best = (length, m_right)
    assert best is not None
    length, m_right = best
    return {
        'm_right': m_right,
        'm_left': size - m_right,
        'length': length,
        'reduction': uniform_huffman_length(size) - length,
        'redundancy': length - math.log2(size),
    }


def reoptimize_codes(table: AedsTable, p: SourceDistribution) -> AedsTable:
    """Replace the decoding code of every state by the Huffman code of p~(beta|x).

    Transitions stay the same, so the stationary distribution does too.
    """
    q = stationary_distribution(table, p).q
    rows = [[(e.codeword.bits, e.next_state) for e in row] for row in table.encoder]
    for state, entries in enumerate(table.decoder):
        ordered = sorted(entries.items(), key=lambda item: (len(item[0]), item[0]))
        weights = [p.prob(entry.symbol) * q[entry.next_state] for _, entry in ordered]
        for (_, entry), bits in zip(ordered, huffman_codewords(weights)):
            rows[entry.next_state][table.symbol_index(entry.symbol)] = (bits, state)
    return AedsTable.from_encoder(table.symbols, rows, kind=f'{table.kind}+huffman',
                                  partition=table.partition, names=table.names)


def tree_reduction(tree: CodeTree, p: SourceDistribution, kind: str,
                   num_states: int = 2) -> float:
    """Analytic reduction of a Type-I/Type-II scheme over its code tree"""
    p_right = tree_metrics(tree.normalized(p), p)['p_right']
    if kind == 'type1':
        return delta_type1(p_right, num_states)
    if kind == 'type2':
        return delta_type2(p_right)
    raise KindMismatch(f"no closed-form reduction for {kind!r}")
