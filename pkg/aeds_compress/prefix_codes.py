"""Prefix code module

Huffman code trees, phased-in codes and the code-tree metrics used by the
table constructors. A code tree is stored as one codeword per symbol; the
first bit selects the root subtree, '0' for the left subtree T_L and '1' for
the right subtree T_R.
"""


import heapq
import math
from dataclasses import dataclass
from typing import Optional, Sequence, TypedDict, Union

from .errors import AlphabetMismatch, InvalidWeight, TooFewStates
from .model import SourceDistribution, Symbol

LOG2_E = math.log2(math.e)
# maximum redundancy of a phased-in code for a uniform source
SIGMA = math.log2(LOG2_E) + 1.0 - LOG2_E

_Node = Union[int, tuple['_Node', '_Node']]


class TreeMetrics(TypedDict):
    """Subtree weights and (unnormalized) average lengths of a code tree"""
    p_right: float
    p_left: float
    avg_length: float
    avg_length_right: float
    avg_length_left: float


class PhasedInStats(TypedDict):
    """Average length, redundancy and short-codeword excess of a phased-in code"""
    length: float
    redundancy: float
    nu: float


def is_prefix_free(codewords: Sequence[str]) -> bool:
    ordered = sorted(codewords)
    return all(not b.startswith(a) for a, b in zip(ordered, ordered[1:]))


def kraft_sum(codewords: Sequence[str]) -> float:
    return math.fsum(2.0 ** -len(c) for c in codewords)


@dataclass(frozen=True)
class CodeTree:
    """Complete binary prefix code tree, as a codeword per symbol"""
    symbols: tuple[Symbol, ...]
    codewords: tuple[str, ...]
    swapped: bool = False

    def __post_init__(self) -> None:
        if len(self.symbols) != len(self.codewords) or len(self.symbols) < 2:
            raise AlphabetMismatch("a code tree needs one codeword for each of >= 2 symbols")
        if not is_prefix_free(self.codewords) or len(set(self.codewords)) != len(self.codewords):
            raise ValueError("code tree codewords must be prefix-free")
        if abs(kraft_sum(self.codewords) - 1.0) > 1e-12:
            raise ValueError("code tree must be complete (Kraft sum 1)")

    def codeword(self, symbol: Symbol) -> str:
        try:
            return self.codewords[self.symbols.index(symbol)]
        except ValueError as exc:
            raise AlphabetMismatch(f"symbol {symbol!r} not found in tree") from exc

    def length(self, symbol: Symbol) -> int:
        return len(self.codeword(symbol))

    @property
    def max_length(self) -> int:
        return max(len(c) for c in self.codewords)

    def subtree(self, side: str) -> dict[Symbol, str]:
        """Codewords of T_R (side '1') or T_L (side '0') with the root bit removed"""
        return {s: c[1:] for s, c in zip(self.symbols, self.codewords) if c[0] == side}

    @property
    def right(self) -> dict[Symbol, str]:
        return self.subtree('1')

    @property
    def left(self) -> dict[Symbol, str]:
        return self.subtree('0')

    def average_length(self, p: SourceDistribution) -> float:
        return math.fsum(p.prob(s) * len(c) for s, c in zip(self.symbols, self.codewords))

    def normalized(self, p: SourceDistribution) -> 'CodeTree':
        """Orient the tree so that the right subtree carries weight P_R >= 0.5"""
        p_right = math.fsum(p.prob(s) for s in self.right)
        if p_right >= 0.5:
            return self
        flipped = tuple(('1' if c[0] == '0' else '0') + c[1:] for c in self.codewords)
        return CodeTree(self.symbols, flipped, swapped=not self.swapped)

    @classmethod
    def from_subtrees(cls, right: dict[Symbol, str], left: dict[Symbol, str]) -> 'CodeTree':
        symbols = tuple(right) + tuple(left)
        codewords = tuple('1' + c for c in right.values()) + tuple('0' + c for c in left.values())
        return cls(symbols, codewords)


def _huffman_tree(weights: Sequence[float]) -> _Node:
    heap: list[tuple[float, int, _Node]] = [(w, i, i) for i, w in enumerate(weights)]
    heapq.heapify(heap)
    created = len(weights)
    while len(heap) > 1:
        w_left, _, left = heapq.heappop(heap)
        w_right, _, right = heapq.heappop(heap)
        heapq.heappush(heap, (w_left + w_right, created, (left, right)))
        created += 1
    return heap[0][2]


def huffman_codewords(weights: Sequence[float]) -> list[str]:
    """Huffman codewords for nonnegative weights; a single item gets the empty codeword.

    Ties are broken by (weight, creation index) and the lower-ordered node
    of each merge becomes the '0' child.
    """
    if not weights:
        return []
    codewords = [''] * len(weights)
    stack: list[tuple[_Node, str]] = [(_huffman_tree(weights), '')]
    while stack:
        node, prefix = stack.pop()
        if isinstance(node, int):
            codewords[node] = prefix
        else:
            stack.append((node[0], prefix + '0'))
            stack.append((node[1], prefix + '1'))
    return codewords


def build_huffman(p: SourceDistribution) -> CodeTree:
    tree = CodeTree(p.symbols, tuple(huffman_codewords(p.probs)))
    return tree.normalized(p)


def tree_metrics(tree: CodeTree, p: SourceDistribution) -> TreeMetrics:
    if set(tree.symbols) != set(p.symbols):
        raise AlphabetMismatch("code tree leaves and source alphabet differ")
    right = tree.right
    left = tree.left
    return {
        'p_right': math.fsum(p.prob(s) for s in right),
        'p_left': math.fsum(p.prob(s) for s in left),
        'avg_length': tree.average_length(p),
        'avg_length_right': math.fsum(p.prob(s) * len(c) for s, c in right.items()),
        'avg_length_left': math.fsum(p.prob(s) * len(c) for s, c in left.items()),
    }


@dataclass(frozen=True)
class PhasedInCode:
    """Optimal prefix code for M equiprobable items.

    `codewords[i]` is the codeword of item i. The 2^k - M short codewords
    have k - 1 bits and go to the items ranked first.
    """
    size: int
    codewords: tuple[str, ...]

    @property
    def k(self) -> int:
        return ceil_log2(self.size)

    @property
    def short_count(self) -> int:
        return (1 << self.k) - self.size

    @property
    def long_count(self) -> int:
        return 2 * self.size - (1 << self.k)


def ceil_log2(value: int) -> int:
    if value < 1:
        raise ValueError(f"ceil_log2 needs a positive integer, got {value}")
    return (value - 1).bit_length()


def canonical_phased_in(size: int) -> list[str]:
    """Canonical phased-in codewords in rank order: short ones first, then long ones"""
    if size < 1:
        raise TooFewStates("a phased-in code needs at least one item")
    k = ceil_log2(size)
    short = (1 << k) - size
    codewords = [format(v, f'0{k - 1}b') for v in range(short)] if k else []
    codewords += [format(v, f'0{k}b') if k else '' for v in range(2 * short, 1 << k)]
    return codewords


def build_phased_in(size: int, rank_weights: Optional[Sequence[float]] = None) -> PhasedInCode:
    """Phased-in code of `size` items; with rank_weights the heaviest items get short codes"""
    canonical = canonical_phased_in(size)
    if rank_weights is None:
        return PhasedInCode(size, tuple(canonical))
    if len(rank_weights) != size:
        raise InvalidWeight(f"expected {size} rank weights, got {len(rank_weights)}")
    order = sorted(range(size), key=lambda i: (-rank_weights[i], i))
    codewords = [''] * size
    for rank, item in enumerate(order):
        codewords[item] = canonical[rank]
    return PhasedInCode(size, tuple(codewords))


def uniform_huffman_length(size: int) -> float:
    """Average Huffman (phased-in) length for a uniform source of `size` items"""
    if size <= 1:
        return 0.0
    k = ceil_log2(size)
    return k + 1 - (1 << k) / size


def phased_in_stats(size: int, q: Optional[Sequence[float]] = None) -> PhasedInStats:
    """L_pi(M|Q) = lg M + mu_pi(M) - nu_{M,Q}, with nu = 0 for the uniform case"""
    if size < 1:
        raise TooFewStates("a phased-in code needs at least one item")
    k = ceil_log2(size)
    length = uniform_huffman_length(size)
    redundancy = max(length - math.log2(size), 0.0)
    nu = 0.0
    if q is not None:
        if len(q) != size or abs(math.fsum(q) - 1.0) > 1e-9 or min(q) < 0:
            raise InvalidWeight("Q must be a probability list over the M items")
        short = (1 << k) - size
        q_hat = math.fsum(sorted(q, reverse=True)[:short])
        nu = q_hat - short / size
        length = math.log2(size) + redundancy - nu
    return {'length': length, 'redundancy': redundancy, 'nu': nu}


def uniform_split_tree(size: int, right_size: int) -> tuple[CodeTree, SourceDistribution]:
    """Code tree for a uniform source with phased-in subtrees of sizes M_R and M - M_R"""
    if not 1 <= right_size < size:
        raise ValueError(f"M_R must lie in [1, {size - 1}]")
    p = SourceDistribution.from_probs([1.0] * size)
    right = dict(zip(range(right_size), canonical_phased_in(right_size)))
    left = dict(zip(range(right_size, size), canonical_phased_in(size - right_size)))
    return CodeTree.from_subtrees(right, left), p
