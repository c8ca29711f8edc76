"""Analysis module

Stationary distributions of the encoding chain, exact average code lengths,
the closed-form reductions and redundancies of the Type-I/Type-II schemes,
and numeric checks of the upper bounds of the state-divided constructions.

All closed-form evaluators are plain functions kept apart from the solvers so
each side can serve as the other's oracle.
"""


import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TypedDict

import numpy as np
from scipy import linalg
from scipy.optimize import bisect
from scipy.sparse import csr_matrix

from .codec import encode, encoded_lengths, ergodicity
from .errors import EmptySample, KindMismatch, NoConvergence, NotErgodic
from .model import (
    AedsTable, SAedsPartition, SourceDistribution, binary_entropy, derive_partition, entropy,
    ratio_distribution, relative_entropy
)
from .prefix_codes import LOG2_E, SIGMA, ceil_log2, phased_in_stats, uniform_huffman_length

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
DIRECT_SOLVE_MAX_STATES = 1024
POWER_ITER_MAX = 10 ** 6
POWER_ITER_RESIDUAL = 1e-12
CONDITION_WARNING = 1e12
NEGLIGIBLE_MASS = 1e-300
DOMINATION_GAMMAS = (3, 4, 8, 16)

OMEGA_TYPE1 = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class StationaryReport:
    """Stationary distribution of the encoding chain and the average code length"""
    q: tuple[float, ...]
    method: str
    residual: float
    length_encoder_view: float
    length_decoder_view: float
    skipped_states: tuple[int, ...] = ()

    @property
    def length(self) -> float:
        return self.length_encoder_view


@dataclass(frozen=True)
class BoundReport:
    """Both sides of a checked inequality; holds iff slack >= -tolerance"""
    name: str
    left: float
    right: float
    slack: float
    holds: bool
    parameters: str = ""
    premise: Optional[bool] = None
    note: str = ""


def make_report(name: str, left: float, right: float, tolerance: float = DEFAULT_TOLERANCE,
                parameters: str = "", premise: Optional[bool] = None,
                note: str = "") -> BoundReport:
    slack = right - left
    return BoundReport(name=name, left=left, right=right, slack=slack,
                       holds=slack >= -tolerance, parameters=parameters,
                       premise=premise, note=note)


class MonteCarloResult(TypedDict):
    """Empirical rate of a seeded simulation"""
    rate: float
    stderr: float
    symbols: int
    total_bits: int


def transition_matrix(table: AedsTable, p: SourceDistribution) -> csr_matrix:
    """P[x_hat, x] = total probability of the symbols moving x_hat to x"""
    probs = [p.prob(s) for s in table.symbols]
    rows, cols, data = [], [], []
    for state, entries in enumerate(table.encoder):
        for sym_idx, entry in enumerate(entries):
            rows.append(state)
            cols.append(entry.next_state)
            data.append(probs[sym_idx])
    size = table.num_states
    return csr_matrix((data, (rows, cols)), shape=(size, size))


def partition_transition_matrix(partition: SAedsPartition,
                                 p: SourceDistribution) -> csr_matrix:
    """Transition matrix implied by a state partition alone; codes do not matter"""
    rows, cols, data = [], [], []
    for sym_idx, subset in enumerate(partition.subsets):
        for state in subset:
            for previous in partition.forward[state]:
                rows.append(previous)
                cols.append(state)
                data.append(p.probs[sym_idx])
    size = len(partition.forward)
    return csr_matrix((data, (rows, cols)), shape=(size, size))


def solve_stationary(matrix: csr_matrix,
                     direct_max_states: int = DIRECT_SOLVE_MAX_STATES,
                     max_iter: int = POWER_ITER_MAX,
                     residual_target: float = POWER_ITER_RESIDUAL
                     ) -> tuple[np.ndarray, str, float]:
    """Solve Q = QP with sum(Q) = 1; returns (Q, method, residual)"""
    size = matrix.shape[0]
    if size <= direct_max_states:
        system = np.eye(size) - matrix.toarray().T
        system[-1, :] = 1.0
        rhs = np.zeros(size)
        rhs[-1] = 1.0
        condition = np.linalg.cond(system, 1)
        if condition > CONDITION_WARNING:
            logger.warning("Balance system is ill-conditioned (cond %.3e)", condition)
        q = linalg.solve(system, rhs)
        q = np.clip(q, 0.0, None)
        q /= q.sum()
        residual = float(np.max(np.abs(q - matrix.T @ q)))
        logger.debug("Direct stationary solve, N=%d, residual %.3e", size, residual)
        return q, 'direct-solve', residual
    transposed = matrix.T.tocsr()
    q = np.full(size, 1.0 / size)
    residual = math.inf
    for iteration in range(max_iter):
        nxt = transposed @ q
        nxt /= nxt.sum()
        residual = float(np.max(np.abs(nxt - q)))
        q = nxt
        if residual <= residual_target:
            logger.debug("Power iteration converged after %d steps, N=%d", iteration + 1, size)
            return q, 'power-iteration', residual
    raise NoConvergence(residual)


def encoder_view_length(table: AedsTable, p: SourceDistribution,
                        q: Sequence[float]) -> float:
    """L = sum over states and symbols of p(s) Q(x_hat) l(E_x_hat(s))"""
    probs = [p.prob(s) for s in table.symbols]
    return math.fsum(
        probs[sym_idx] * q[state] * entry.codeword.length
        for state, entries in enumerate(table.encoder)
        for sym_idx, entry in enumerate(entries)
    )


def decoder_view_length(table: AedsTable, p: SourceDistribution,
                        q: Sequence[float]) -> tuple[float, tuple[int, ...]]:
    """L = sum over states x of Q(x) sum over codewords of p~(beta|x) l(beta)"""
    total = []
    skipped = []
    for state, entries in enumerate(table.decoder):
        mass = q[state]
        if mass < NEGLIGIBLE_MASS:
            skipped.append(state)
            continue
        conditional = math.fsum(
            p.prob(entry.symbol) * q[entry.next_state] / mass * len(bits)
            for bits, entry in entries.items()
        )
        total.append(mass * conditional)
    if skipped:
        logger.warning("Skipped %d states with negligible stationary mass", len(skipped))
    return math.fsum(total), tuple(skipped)


def stationary_distribution(table: AedsTable, p: SourceDistribution,
                            direct_max_states: int = DIRECT_SOLVE_MAX_STATES,
                            max_iter: int = POWER_ITER_MAX) -> StationaryReport:
    report = ergodicity(table)
    if not report.ergodic:
        raise NotErgodic(f"{table.kind} table: {report}")
    q, method, residual = solve_stationary(transition_matrix(table, p),
                                           direct_max_states, max_iter)
    q_list = q.tolist()
    decoder_length, skipped = decoder_view_length(table, p, q_list)
    return StationaryReport(
        q=tuple(q_list),
        method=method,
        residual=residual,
        length_encoder_view=encoder_view_length(table, p, q_list),
        length_decoder_view=decoder_length,
        skipped_states=skipped,
    )


def closed_form_stationary(kind: str, p_right: float, num_states: int = 2) -> list[float]:
    if not 0.5 <= p_right < 1.0:
        raise ValueError(f"P_R = {p_right} must lie in [0.5, 1)")
    if kind == 'type1':
        if num_states < 2:
            raise ValueError("Type-I needs at least two states")
        norm = 1.0 - p_right ** num_states
        return [p_right ** j * (1.0 - p_right) / norm for j in range(num_states)]
    if kind == 'type2':
        first = 1.0 - p_right
        cubic = 1.0 + p_right + p_right ** 2
        return [
            first / (2.0 - p_right),
            first ** 2 / (2.0 - p_right),
            p_right / cubic,
            p_right ** 2 / cubic,
            p_right ** 3 / cubic,
        ]
    raise KindMismatch(f"no closed form for {kind!r}")


def delta_type1_unclamped(p_right: float, num_states: int) -> float:
    k = ceil_log2(num_states)
    norm = 1.0 - p_right ** num_states
    return ((1.0 - p_right ** (num_states - 1)) * p_right / norm
            + (1.0 - p_right ** ((1 << k) - num_states)) * (1.0 - p_right) / norm
            - k * (1.0 - p_right))


def delta_type1(p_right: float, num_states: int) -> float:
    """Reduction of the Type-I scheme with N states relative to its code tree"""
    return max(delta_type1_unclamped(p_right, num_states), 0.0)


def delta_type2_unclamped(p_right: float) -> float:
    return ((p_right ** 3 - p_right ** 2 + 2 * p_right - 1)
            / ((2 - p_right) * (1 + p_right + p_right ** 2)))


def delta_type2(p_right: float) -> float:
    """Reduction of the five-state Type-II scheme relative to its code tree"""
    return max(delta_type2_unclamped(p_right), 0.0)


def omega_type2() -> float:
    """Real root of P^3 - P^2 + 2P - 1, where the Type-II reduction turns positive"""
    return float(bisect(lambda x: x ** 3 - x ** 2 + 2 * x - 1, 0.5, 0.7, xtol=1e-12))


def huffman_worst_redundancy(p1: float) -> float:
    """Worst-case Huffman redundancy given the largest probability p1 >= 0.5"""
    return 2.0 - p1 - binary_entropy(p1)


def type1_worst_redundancy(p1: float, num_states: int) -> float:
    return huffman_worst_redundancy(p1) - delta_type1(p1, num_states)


def type2_worst_redundancy(p1: float) -> float:
    return huffman_worst_redundancy(p1) - delta_type2(p1)


def uniform_huffman_redundancy(size: int) -> float:
    return max(uniform_huffman_length(size) - math.log2(size), 0.0)


def huffman_right_weight(size: int) -> float:
    """P_R of the Huffman tree for a uniform source of `size` symbols"""
    kappa = ceil_log2(size)
    if size >= 3 * 2 ** (kappa - 2):
        return 2 ** (kappa - 1) / size
    return (size - 2 ** (kappa - 2)) / size


def binary_source_redundancy(r: float, kind: str, num_states: int = 2) -> float:
    """Redundancy on a binary source {r, 1 - r} with the one-bit code tree"""
    r = max(r, 1.0 - r)
    if kind == 'huffman':
        return 1.0 - binary_entropy(r)
    if kind == 'type1':
        return 1.0 - binary_entropy(r) - delta_type1(r, num_states)
    if kind == 'type2':
        return 1.0 - binary_entropy(r) - delta_type2(r)
    raise KindMismatch(f"unknown binary-source variant {kind!r}")


def best_binary_redundancy(r: float, max_states: int = 64) -> tuple[float, str]:
    """Smallest redundancy over Type-I with 2..max_states states and Type-II"""
    best = (binary_source_redundancy(r, 'type2'), 'type2')
    for num_states in range(2, max_states + 1):
        candidate = binary_source_redundancy(r, 'type1', num_states)
        if candidate < best[0]:
            best = (candidate, f'type1-{num_states}')
    return best


def redundancy_curves(kind: str, grid: Iterable[float],
                      num_states: int = 2) -> list[tuple[float, float]]:
    """Tabulate one of the closed-form redundancy curves over a grid"""
    curves = {
        'huffman': huffman_worst_redundancy,
        'type1': lambda x: type1_worst_redundancy(x, num_states),
        'type2': type2_worst_redundancy,
        'binary-source': lambda x: best_binary_redundancy(x)[0],
        'binary-huffman': lambda x: binary_source_redundancy(x, 'huffman'),
        'uniform-huffman': lambda x: uniform_huffman_redundancy(int(x)),
        'uniform-right-weight': lambda x: huffman_right_weight(int(x)),
    }
    if kind not in curves:
        raise KindMismatch(f"unknown curve {kind!r}")
    return [(x, curves[kind](x)) for x in grid]


def q_star(num_states: int) -> np.ndarray:
    i = np.arange(1, num_states + 1, dtype=np.float64)
    return np.log2((num_states + i) / (num_states + i - 1))


def q_circle(num_states: int) -> np.ndarray:
    i = np.arange(1, num_states + 1, dtype=np.float64)
    weights = 1.0 / (num_states + i - 1)
    return weights / weights.sum()


def q_star_gamma(num_states: int, gamma: float) -> np.ndarray:
    i = np.arange(1, num_states + 1, dtype=np.float64)
    shifted = np.maximum(i - gamma, 1.0)
    return np.log2((num_states + shifted) / (num_states + shifted - 1))


def smallest_dominating_gamma(q: Sequence[float],
                              gammas: Sequence[int] = DOMINATION_GAMMAS) -> Optional[int]:
    """Smallest gamma with sorted Q(alpha_i) <= Q*_gamma(alpha_i) at every rank"""
    ranked = np.sort(np.asarray(q))[::-1]
    for gamma in gammas:
        if np.all(ranked <= q_star_gamma(len(ranked), gamma) + 1e-15):
            return gamma
    return None


def _forward_mass(partition: SAedsPartition, q: Sequence[float]) -> list[float]:
    return [math.fsum(q[x] for x in forward) for forward in partition.forward]


LEMMA2_RATES = {
    # premise denominator, conclusion denominator
    'N2': (lambda n: n * n, lambda n: n),
    'NlgN': (lambda n: n * math.log2(n), lambda n: math.log2(n)),
    'N': (lambda n: n, lambda n: 1.0),
}

CHECK_KINDS = {
    'case1': ('saeds-case1', 'huffman-matching'),
    'case2': ('saeds-case1', 'saeds-case2', 'huffman-matching'),
    'case3': ('saeds-case3', 'tans'),
    'lemma1': ('large-n',),
    'lemma2': ('large-n',),
    'largeN': ('large-n',),
}


def check_bound(table: AedsTable, p: SourceDistribution, which: str, *,
                eta: float = 1.0, rate: str = 'N', gamma: Optional[int] = None,
                tolerance: float = DEFAULT_TOLERANCE,
                stationary: Optional[StationaryReport] = None) -> BoundReport:
    """Evaluate both sides of a named bound on a built table"""
    size = table.num_states
    if which == 'lemma3':
        left = float(np.max(q_circle(size) - q_star(size)))
        return make_report(which, left, LOG2_E / (2 * size * size), tolerance,
                           parameters=f"N={size}", note="max over i of Q° - Q*")
    if which == 'lemma4-upper':
        gamma = gamma or 4
        left = float(np.max(q_star_gamma(size, gamma) - q_star(size)))
        return make_report(which, left, (gamma + 0.5) * LOG2_E / (size * size), tolerance,
                           parameters=f"N={size} gamma={gamma}")
    if which == 'lemma4-lower':
        gamma = gamma or 4
        gap = (q_star_gamma(size, gamma) - q_star(size))[int(gamma):]
        bound = (gamma - 2) * LOG2_E / (4 * size * size)
        if gap.size == 0:
            return make_report(which, bound, bound, tolerance,
                               parameters=f"N={size} gamma={gamma}", note="no index i > gamma")
        return make_report(which, bound, float(np.min(gap)), tolerance,
                           parameters=f"N={size} gamma={gamma}", note="checked for i > gamma")
    if which not in CHECK_KINDS:
        raise KindMismatch(f"unknown bound {which!r}")
    if table.kind not in CHECK_KINDS[which]:
        raise KindMismatch(f"bound {which} does not apply to a {table.kind} table")
    partition = table.partition or derive_partition(table)
    if partition is None:
        raise KindMismatch(f"{table.kind} table has no state partition")
    report = stationary or stationary_distribution(table, p)
    length = report.length_encoder_view
    q = ratio_distribution(partition.counts, table.symbols)
    aligned = p if p.symbols == table.symbols else SourceDistribution(
        table.symbols, tuple(p.prob(s) for s in table.symbols))
    base = entropy(aligned) + relative_entropy(aligned, q)
    params = f"N={size}"
    if which == 'case1':
        return make_report(which, length, base + SIGMA, tolerance, parameters=params)
    forward_mass = _forward_mass(partition, report.q)
    if which == 'case2':
        extra = []
        for sym_idx, subset in enumerate(partition.subsets):
            ratio = size // len(subset)
            big = math.fsum(forward_mass[x] for x in subset
                            if len(partition.forward[x]) == ratio + 1)
            extra.append(aligned.probs[sym_idx]
                         * math.log2((ratio + big) / (size / len(subset))))
        return make_report(which, length, base + SIGMA + math.fsum(extra), tolerance,
                           parameters=params)
    if which == 'case3':
        extra = []
        for sym_idx, subset in enumerate(partition.subsets):
            stats = phased_in_stats(len(subset), [forward_mass[x] for x in subset])
            extra.append(aligned.probs[sym_idx] * (stats['nu'] - stats['redundancy']))
        return make_report(which, length, base + math.fsum(extra), tolerance,
                           parameters=params)
    if which == 'lemma1':
        left = encoder_view_length(table, aligned, q_star(size).tolist())
        return make_report(which, left, base, tolerance, parameters=params,
                           note=f"|L(Q*) - H - D| = {abs(left - base):.3e}")
    ranked = np.sort(np.asarray(report.q))[::-1]
    if which == 'lemma2':
        if rate not in LEMMA2_RATES:
            raise KindMismatch(f"unknown Lemma-2 rate {rate!r}")
        premise_den, conclusion_den = LEMMA2_RATES[rate]
        premise = bool(np.all(ranked < q_star(size) + eta / premise_den(size)))
        return make_report(which, length, base + eta / conclusion_den(size), tolerance,
                           parameters=f"{params} eta={eta} rate={rate}", premise=premise)
    found = smallest_dominating_gamma(report.q)
    gamma = gamma or found or DOMINATION_GAMMAS[-1]
    premise = bool(np.all(ranked <= q_star_gamma(size, gamma) + 1e-15))
    return make_report(which, length, base + (gamma + 0.5) * LOG2_E / size, tolerance,
                       parameters=f"{params} gamma={gamma}", premise=premise,
                       note=f"smallest dominating gamma: {found}")


def bound_reports_to_csv(reports: Iterable[BoundReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['bound', 'parameters', 'left', 'right', 'slack', 'pass'])
    for report in reports:
        writer.writerow([report.name, report.parameters, f'{report.left:.12g}',
                         f'{report.right:.12g}', f'{report.slack:.12g}', report.holds])
    return buffer.getvalue()


def monte_carlo_rate(table: AedsTable, p: SourceDistribution, n: int, seed: int,
                     batches: int = 20) -> MonteCarloResult:
    """Encode n seeded i.i.d. symbols and return bits/symbol with a batch-means stderr"""
    if n < 1:
        raise EmptySample(f"a Monte Carlo run needs at least one symbol, got {n}")
    if not ergodicity(table).ergodic:
        raise NotErgodic(f"{table.kind} table is not ergodic")
    rng = np.random.default_rng(seed)
    probs = np.asarray([p.prob(s) for s in table.symbols])
    drawn = rng.choice(len(probs), size=n, p=probs / probs.sum()).tolist()
    stream = encode(table, [table.symbols[i] for i in drawn])
    total = len(stream.payload)
    per_symbol = encoded_lengths(table, drawn)
    batches = max(1, min(batches, n))
    means = np.array([chunk.mean() for chunk in np.array_split(per_symbol, batches)])
    stderr = float(means.std(ddof=1) / math.sqrt(batches)) if batches > 1 else 0.0
    return {'rate': total / n, 'stderr': stderr, 'symbols': n, 'total_bits': total}


@dataclass(frozen=True)
class RateComparison:
    """Analytic against empirical rate of one table"""
    analytic: float
    empirical: float
    stderr: float
    within: bool


def compare_rates(table: AedsTable, p: SourceDistribution, n: int, seed: int,
                  sigmas: float = 3.0, batches: int = 20) -> RateComparison:
    analytic = stationary_distribution(table, p).length
    result = monte_carlo_rate(table, p, n, seed, batches)
    within = abs(result['rate'] - analytic) <= sigmas * max(result['stderr'], 1e-12)
    return RateComparison(analytic, result['rate'], result['stderr'], within)
