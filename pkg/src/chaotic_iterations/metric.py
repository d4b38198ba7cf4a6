"""Exact distance on the phase space of G_f and finite checks of chaos properties.

The distance between (S, E) and (T, F) is

    hamming(E, F) + 9/N * sum_k |S^k - T^k| / 10^k

truncated to the first L strategy terms.  Everything is kept as integers over
the common denominator N * 10^L, so no floating point enters the metric.
"""
from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from itertools import combinations, product
from typing import Optional

from .core import (
    StateVector,
    Strategy,
    SystemPoint,
    Unary,
    UpdateFunction,
    ff_step,
    gf_step,
    make_negation,
)
from .errors import ArityMismatch, ScaleLimitExceeded

DEFAULT_PRECISION = 16


@total_ordering
@dataclass(frozen=True)
class ExactDistance:
    n: int
    precision: int
    integer_part: int
    fractional_numerator: int

    @property
    def denominator(self) -> int:
        return self.n * 10 ** self.precision

    @property
    def numerator(self) -> int:
        """Whole distance over :attr:`denominator`."""
        return self.integer_part * self.denominator + self.fractional_numerator

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self):
        return float(self.as_fraction())

    def _key(self, other):
        if isinstance(other, ExactDistance):
            if (other.n, other.precision) != (self.n, self.precision):
                return self.as_fraction(), other.as_fraction()
            return self.numerator, other.numerator
        if isinstance(other, (int, Fraction)):
            return self.as_fraction(), Fraction(other)
        return NotImplemented

    def __eq__(self, other):
        key = self._key(other)
        if key is NotImplemented:
            return NotImplemented
        return key[0] == key[1]

    def __lt__(self, other):
        key = self._key(other)
        if key is NotImplemented:
            return NotImplemented
        return key[0] < key[1]

    def __hash__(self):
        return hash(self.as_fraction())

    def __add__(self, other: "ExactDistance") -> "ExactDistance":
        if (other.n, other.precision) != (self.n, self.precision):
            raise ArityMismatch("cannot add distances with different N or precision")
        total = self.numerator + other.numerator
        whole, frac = divmod(total, self.denominator)
        return ExactDistance(self.n, self.precision, whole, frac)

    def __str__(self):
        return str(self.as_fraction())


def hamming(e: StateVector, f: StateVector) -> int:
    if e.n_cells != f.n_cells:
        raise ArityMismatch(f"state lengths differ: {e.n_cells} != {f.n_cells}")
    return bin(e.code ^ f.code).count("1")


def _unary_indices(s: Strategy, count: int) -> list:
    out = []
    for t in s.take(count):
        if not isinstance(t, Unary):
            raise TypeError("the strategy distance is defined for unary strategies")
        out.append(t.index)
    return out


def strategy_distance(s: Strategy, t: Strategy, precision: int = DEFAULT_PRECISION) -> int:
    """Numerator of the strategy distance over N * 10^precision."""
    if s.n_cells != t.n_cells:
        raise ArityMismatch(f"strategies over {s.n_cells} and {t.n_cells} cells")
    a = _unary_indices(s, precision)
    b = _unary_indices(t, precision)
    total = 0
    for k, (x, y) in enumerate(zip(a, b), start=1):
        total += 9 * abs(x - y) * 10 ** (precision - k)
    return total


def distance(x: SystemPoint, y: SystemPoint, precision: int = DEFAULT_PRECISION) -> ExactDistance:
    n = x.state.n_cells
    if y.state.n_cells != n:
        raise ArityMismatch(f"points over {n} and {y.state.n_cells} cells")
    return ExactDistance(
        n, precision,
        hamming(x.state, y.state),
        strategy_distance(x.strategy, y.strategy, precision),
    )


def format_report(**fields) -> str:
    """Render a verifier result as ``key=value`` pairs, booleans as pass/fail."""
    parts = []
    for key, value in fields.items():
        if isinstance(value, bool):
            value = "pass" if value else "fail"
        parts.append(f"{key}={value}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Continuity
# ---------------------------------------------------------------------------

@dataclass
class ContinuityReport:
    trials: int
    depth: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def line(self, **extra) -> str:
        return format_report(check="continuity", trials=self.trials, k=self.depth,
                             violations=self.violations, **extra, result=self.passed)


def continuity_check(f: UpdateFunction, trials: int, k: int, seed: int = 0,
                     extra_terms: int = 4) -> ContinuityReport:
    """Close points (same state, strategies equal on k+1 terms) stay close after one step.

    Images must share their state and agree on the first k strategy terms,
    which puts them closer than 10^-k.
    """
    if k < 1:
        raise ValueError("depth k must be at least 1")
    n = f.arity
    rng = random.Random(seed)
    length = k + 1 + extra_terms
    violations = 0
    for _ in range(trials):
        state = StateVector(n, rng.getrandbits(n))
        common = [rng.randint(1, n) for _ in range(k + 1)]
        tail_a = [rng.randint(1, n) for _ in range(extra_terms)]
        tail_b = [rng.randint(1, n) for _ in range(extra_terms)]
        p = SystemPoint(Strategy.unary(n, common + tail_a), state)
        q = SystemPoint(Strategy.unary(n, common + tail_b), state)
        gp, gq = gf_step(p, f), gf_step(q, f)
        d = distance(gp, gq, length - 1)
        ok = (
            gp.state == gq.state
            and gp.strategy.take(k) == gq.strategy.take(k)
            and d.integer_part == 0
            and d.fractional_numerator * 10 ** k < d.denominator
        )
        if not ok:
            violations += 1
    return ContinuityReport(trials, k, violations)


# ---------------------------------------------------------------------------
# Sensitivity
# ---------------------------------------------------------------------------

def sensitivity_probe(f: UpdateFunction, p: SystemPoint, tail_depth: int, horizon: int,
                      precision: int = DEFAULT_PRECISION) -> ExactDistance:
    """Largest separation found from a point agreeing with p on the state and
    the first ``tail_depth`` strategy terms.

    The perturbed strategy is built greedily: from term ``tail_depth`` up to
    ``horizon`` it picks, step by step, the index (lowest first on ties) that
    maximises the Hamming distance between the two next states; afterwards it
    follows p's strategy again.  p's strategy must supply ``horizon +
    precision`` terms.
    """
    if horizon < tail_depth:
        raise ValueError("horizon must be at least tail_depth")
    n = f.arity
    base = p.strategy
    base.take(horizon + precision)

    chosen = list(_unary_indices(base, tail_depth))
    x = y = p.state
    for m in range(tail_depth):
        x = ff_step(f, chosen[m], x)
    y = x
    for m in range(tail_depth, horizon):
        a = base.term(m).index
        nx = ff_step(f, a, x)
        best_j, best_h, best_y = None, -1, None
        for j in range(1, n + 1):
            cand = ff_step(f, j, y)
            h = hamming(nx, cand)
            if h > best_h:
                best_j, best_h, best_y = j, h, cand
        chosen.append(best_j)
        x, y = nx, best_y

    tail = base.drop(horizon)
    q_strategy = Strategy.unary(n, chosen, source=lambda k: tail.term(k))
    q = SystemPoint(q_strategy, p.state)

    best = distance(p, q, precision)
    a, b = p, q
    for _ in range(horizon):
        a, b = gf_step(a, f), gf_step(b, f)
        d = distance(a, b, precision)
        if d > best:
            best = d
    return best


# ---------------------------------------------------------------------------
# Expansiveness of G_{f_0}
# ---------------------------------------------------------------------------

def periodic_words(n: int, max_period: int) -> list:
    """One representative word per distinct periodic sequence of period <= max_period."""
    span = math.lcm(*range(1, max_period + 1))
    seen = {}
    for period in range(1, max_period + 1):
        for word in product(range(1, n + 1), repeat=period):
            key = tuple(word[k % period] for k in range(span))
            seen.setdefault(key, word)
    return list(seen.values())


def expansiveness_check_f0(n: int, period_bound: int, horizon: int,
                           precision: int = DEFAULT_PRECISION) -> bool:
    """Every pair of distinct points with periodic strategies separates to distance >= 1."""
    if n > 3 or period_bound > 4:
        raise ScaleLimitExceeded("expansiveness is checked exhaustively only for N <= 3, P <= 4")
    f = make_negation(n)
    strategies = [Strategy.periodic(n, w) for w in periodic_words(n, period_bound)]
    points = [SystemPoint(s, StateVector(n, c))
              for s in strategies for c in range(1 << n)]
    for a, b in combinations(points, 2):
        for m in range(horizon + 1):
            if distance(a, b, precision) >= 1:
                break
            a, b = gf_step(a, f), gf_step(b, f)
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Entropy growth
# ---------------------------------------------------------------------------

def entropy_growth(n: int, n_max: int, f: Optional[UpdateFunction] = None) -> list:
    """Number of distinct state segments (x^0, ..., x^(k-1)), for k = 1..n_max.

    Segments range over all initial states and all unary strategy prefixes of
    length k-1.  ``f`` defaults to the vectorial negation.
    """
    if n > 3 or n_max > 10:
        raise ScaleLimitExceeded("orbit segments are enumerated only for N <= 3, n_max <= 10")
    f = f or make_negation(n)
    if f.arity != n:
        raise ArityMismatch(f"function arity {f.arity} != N={n}")
    succ = [sorted({ff_step(f, i, StateVector(n, c)).code for i in range(1, n + 1)})
            for c in range(1 << n)]
    # different indices reaching the same successor give the same segment
    segments = {(c,) for c in range(1 << n)}
    counts = [len(segments)]
    for _ in range(n_max - 1):
        segments = {seg + (nxt,) for seg in segments for nxt in succ[seg[-1]]}
        counts.append(len(segments))
    return counts


def entropy_slope(counts: list, start: int = 2) -> float:
    """Least-squares slope of log N(k) against k, using k >= start."""
    ks = list(range(start, len(counts) + 1))
    if len(ks) < 2:
        raise ValueError("need at least two segment lengths to fit a slope")
    logs = [math.log(counts[k - 1]) for k in ks]
    return statistics.linear_regression(ks, logs).slope
