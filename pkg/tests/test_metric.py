import itertools
import math
import random
from fractions import Fraction

import pytest

from chaotic_iterations import (
    StateVector,
    Strategy,
    SystemPoint,
    make_negation,
    trajectory,
)
from chaotic_iterations.errors import ScaleLimitExceeded
from chaotic_iterations.graph import function_from_index
from chaotic_iterations.metric import (
    ExactDistance,
    continuity_check,
    distance,
    entropy_growth,
    entropy_slope,
    expansiveness_check_f0,
    hamming,
    periodic_words,
    sensitivity_probe,
    strategy_distance,
)


def series(n, a, b):
    """The truncated strategy series evaluated term by term with Fractions."""
    return sum(Fraction(9, n) * abs(x - y) / Fraction(10) ** k
               for k, (x, y) in enumerate(zip(a, b), start=1))


def point(n, code, terms):
    return SystemPoint(Strategy.unary(n, terms), StateVector(n, code))


# ---------------------------------------------------------------- hamming

def test_hamming_examples():
    x = StateVector.from_cells([0, 1, 1])
    assert hamming(x, x) == 0
    assert hamming(x, StateVector.from_cells([0, 0, 1])) == 1
    assert hamming(x, x.complement()) == 3


# ---------------------------------------------------------------- strategy distance

def test_strategy_distance_equal():
    s = Strategy.unary(3, [1, 2, 3, 1])
    assert strategy_distance(s, s, 4) == 0


def test_strategy_distance_single_term():
    s = Strategy.unary(4, [1])
    t = Strategy.unary(4, [3])
    num = strategy_distance(s, t, 1)
    assert num == 18
    assert Fraction(num, 4 * 10) == Fraction(45, 100)


def test_distance_same_state_strategy_differs_at_term_one():
    x = point(2, 1, [1, 2, 2])
    y = point(2, 1, [2, 2, 2])
    d = distance(x, y, 3)
    assert d.integer_part == 0
    assert d.fractional_numerator == 900 and d.denominator == 2000
    assert d.as_fraction() == Fraction(45, 100)


def test_distance_pure_state():
    x = point(3, 0b000, [1, 2])
    y = point(3, 0b101, [1, 2])
    assert distance(x, y, 2) == ExactDistance(3, 2, 2, 0)
    assert distance(x, x, 2) == 0


def test_distance_matches_series_oracle_exhaustively():
    n, L = 3, 3
    words = list(itertools.product(range(1, n + 1), repeat=L))
    for a, b in itertools.product(words, repeat=2):
        num = strategy_distance(Strategy.unary(n, a), Strategy.unary(n, b), L)
        assert Fraction(num, n * 10 ** L) == series(n, a, b)


def test_tail_bounds_exhaustive_small():
    n, L = 3, 4
    words = list(itertools.product(range(1, n + 1), repeat=L))
    for a, b in itertools.product(words, repeat=2):
        frac = Fraction(strategy_distance(Strategy.unary(n, a), Strategy.unary(n, b), L),
                        n * 10 ** L)
        assert frac < 1
        first_diff = next((k for k in range(L) if a[k] != b[k]), None)
        if first_diff is None:
            assert frac == 0
            continue
        k = first_diff + 1
        # equal on the first k-1 terms, different at term k
        assert frac < Fraction(1, 10 ** (k - 1))
        assert frac >= Fraction(9, n * 10 ** k)


def test_metric_laws_exhaustive_n2_l3():
    n, L = 2, 3
    words = list(itertools.product(range(1, n + 1), repeat=L))
    pts = [point(n, c, w) for c in range(1 << n) for w in words]
    d = {(i, j): distance(pts[i], pts[j], L).numerator
         for i in range(len(pts)) for j in range(len(pts))}
    for i, j in itertools.product(range(len(pts)), repeat=2):
        assert d[i, j] == d[j, i]
        same = pts[i].state == pts[j].state and pts[i].strategy.prefix == pts[j].strategy.prefix
        assert (d[i, j] == 0) == same
    for i, j, k in itertools.product(range(len(pts)), repeat=3):
        assert d[i, k] <= d[i, j] + d[j, k]


def test_exact_distance_addition_and_ordering():
    a = ExactDistance(2, 1, 0, 15)
    b = ExactDistance(2, 1, 1, 9)
    assert a + b == ExactDistance(2, 1, 2, 4)
    assert a < b and b >= 1 and a < 1


# ---------------------------------------------------------------- continuity

def test_continuity_identical_points():
    f = make_negation(2)
    from chaotic_iterations import gf_step
    p = point(2, 3, [1, 2, 1])
    assert gf_step(p, f) == gf_step(point(2, 3, [1, 2, 1]), f)


def test_continuity_hand_example():
    from chaotic_iterations import gf_step
    f = make_negation(2)
    e = 0b01
    a = gf_step(point(2, e, [1, 1, 2]), f)
    b = gf_step(point(2, e, [1, 1, 1]), f)
    assert a.state == b.state == StateVector(2, 0b00)
    assert a.strategy.take(1) == b.strategy.take(1)
    assert distance(a, b, 2).as_fraction() < Fraction(1, 10)


def test_continuity_all_functions_n2():
    for idx in range(256):
        report = continuity_check(function_from_index(2, idx), 30, 4, seed=idx)
        assert report.violations == 0


def test_continuity_negation_many_trials():
    assert continuity_check(make_negation(3), 1000, 4).passed


def test_continuity_rejects_depth_zero():
    with pytest.raises(ValueError):
        continuity_check(make_negation(2), 1, 0)


# ---------------------------------------------------------------- sensitivity

def test_sensitivity_identical_when_no_room():
    # horizon == tail depth: the probe may not change anything
    p = point(2, 0, [1] * 30)
    assert sensitivity_probe(make_negation(2), p, 3, 3) == 0


def test_sensitivity_n2_reaches_two():
    p = point(2, 0, [1] * 30)
    d = sensitivity_probe(make_negation(2), p, 3, 4)
    assert d >= 2


def test_sensitivity_n4_random_probes():
    rng = random.Random(11)
    f = make_negation(4)
    for _ in range(100):
        p = point(4, rng.randrange(16), [rng.randint(1, 4) for _ in range(40)])
        assert sensitivity_probe(f, p, 3, 20) >= 3


# ---------------------------------------------------------------- expansiveness

def test_periodic_words_are_distinct_sequences():
    words = periodic_words(3, 3)
    assert len(words) == 3 + (9 - 3) + (27 - 3)
    words2 = periodic_words(2, 4)
    # sequences of period dividing 1, 2, 3 or 4: 2 + 2 + 6 + 12
    assert len(words2) == 22


def test_expansiveness_equal_states_split_in_two_bits():
    from chaotic_iterations import iterate_gf
    f = make_negation(3)
    a = SystemPoint(Strategy.periodic(3, [1, 2, 3]), StateVector(3, 5))
    b = SystemPoint(Strategy.periodic(3, [1, 2, 1]), StateVector(3, 5))
    assert hamming(iterate_gf(a, f, 2).state, iterate_gf(b, f, 2).state) == 0
    assert hamming(iterate_gf(a, f, 3).state, iterate_gf(b, f, 3).state) == 2


@pytest.mark.parametrize("n,p,h", [(1, 2, 4), (2, 3, 6), (3, 3, 8)])
def test_expansiveness_f0(n, p, h):
    assert expansiveness_check_f0(n, p, h)


def test_expansiveness_short_horizon_fails():
    # strategies (1,1,...) and (1,2,...) first differ at term 2
    assert not expansiveness_check_f0(2, 2, 0)


def test_expansiveness_scale_limit():
    with pytest.raises(ScaleLimitExceeded):
        expansiveness_check_f0(4, 3, 8)


# ---------------------------------------------------------------- entropy

def brute_segments(n, k):
    f = make_negation(n)
    segs = set()
    for code in range(1 << n):
        for word in itertools.product(range(1, n + 1), repeat=k - 1):
            states = trajectory(f, StateVector(n, code), Strategy.unary(n, word), k - 1)
            segs.add(tuple(s.code for s in states))
    return len(segs)


def test_entropy_first_terms():
    assert entropy_growth(2, 1) == [4]
    assert entropy_growth(2, 2) == [4, 8]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_entropy_matches_brute_force(n):
    counts = entropy_growth(n, 6)
    assert counts == [brute_segments(n, k) for k in range(1, 7)]


@pytest.mark.parametrize("n", [2, 3])
def test_entropy_closed_form_and_slope(n):
    counts = entropy_growth(n, 8)
    assert counts == [2 ** n * n ** (k - 1) for k in range(1, 9)]
    assert abs(entropy_slope(counts) - math.log(n)) <= 0.05 * math.log(n)


def test_entropy_scale_limit():
    with pytest.raises(ScaleLimitExceeded):
        entropy_growth(3, 11)
