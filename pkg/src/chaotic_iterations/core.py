"""States, update functions, strategies and the chaotic-iteration step rules.

Encoding convention used throughout the package: a state of N cells is
identified with the integer whose bit ``i - 1`` holds cell ``i`` (cell 1 is
the least-significant bit).  Truth tables, graph vertices and digests all
follow it.

Indexing convention: cells and strategy indices are 1-based, as in the
mathematical notation.  Strategy terms are consumed 0-based: term ``t`` of a
strategy produces iterate ``x^(t+1)`` from ``x^t``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .errors import ArityMismatch, IndexOutOfRange, ScaleLimitExceeded, StrategyExhausted

MAX_TABLE_ARITY = 24
MAX_IMPLICIT_ARITY = 4096


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StateVector:
    """A fixed-length vector of Boolean cells, stored as its canonical code."""

    n_cells: int
    code: int = 0

    def __post_init__(self):
        if not isinstance(self.n_cells, int) or self.n_cells < 1:
            raise ValueError(f"n_cells must be a positive integer, got {self.n_cells!r}")
        if not isinstance(self.code, int) or not 0 <= self.code < (1 << self.n_cells):
            raise ValueError(f"code {self.code!r} does not fit in {self.n_cells} cells")

    @classmethod
    def from_cells(cls, cells: Iterable[int]) -> "StateVector":
        cells = list(cells)
        code = 0
        for pos, bit in enumerate(cells):
            if bit not in (0, 1):
                raise ValueError(f"cell {pos + 1} is {bit!r}, expected 0 or 1")
            code |= bit << pos
        return cls(len(cells), code)

    @classmethod
    def from_hex(cls, n_cells: int, text: str) -> "StateVector":
        return cls(n_cells, int(text, 16))

    @classmethod
    def from_bytes(cls, data: bytes, n_cells: Optional[int] = None) -> "StateVector":
        """Big-endian: cell 1 is the least-significant bit of the last byte."""
        if n_cells is None:
            n_cells = 8 * len(data)
        return cls(n_cells, int.from_bytes(data, "big"))

    @property
    def cells(self) -> tuple:
        return tuple((self.code >> k) & 1 for k in range(self.n_cells))

    @property
    def mask(self) -> int:
        return (1 << self.n_cells) - 1

    def cell(self, i: int) -> int:
        _check_index(i, self.n_cells)
        return (self.code >> (i - 1)) & 1

    def complement(self) -> "StateVector":
        return StateVector(self.n_cells, self.code ^ self.mask)

    def hex(self) -> str:
        width = (self.n_cells + 3) // 4
        return format(self.code, f"0{width}x")

    def to_bytes(self) -> bytes:
        return self.code.to_bytes((self.n_cells + 7) // 8, "big")

    def __len__(self):
        return self.n_cells

    def __iter__(self) -> Iterator[int]:
        return iter(self.cells)

    def __xor__(self, other: "StateVector") -> "StateVector":
        _check_same_length(self, other)
        return StateVector(self.n_cells, self.code ^ other.code)


def _check_index(i, n):
    if not isinstance(i, int) or not 1 <= i <= n:
        raise IndexOutOfRange(f"index {i!r} outside [1, {n}]")


def _check_same_length(a: StateVector, b: StateVector):
    if a.n_cells != b.n_cells:
        raise ArityMismatch(f"state lengths differ: {a.n_cells} != {b.n_cells}")


# ---------------------------------------------------------------------------
# Update functions
# ---------------------------------------------------------------------------

class UpdateFunction:
    """A total map B^N -> B^N.

    Subclasses implement :meth:`image_code` on canonical codes.  Two update
    functions compare equal when they have the same arity and agree on every
    state (checked through the materialised truth table).
    """

    arity: int

    def image_code(self, code: int) -> int:
        raise NotImplementedError

    def __call__(self, x: StateVector) -> StateVector:
        if x.n_cells != self.arity:
            raise ArityMismatch(f"state has {x.n_cells} cells, function arity is {self.arity}")
        return StateVector(self.arity, self.image_code(x.code))

    @property
    def table(self) -> tuple:
        """Images of all 2^N states in canonical order, as codes."""
        if self.arity > MAX_TABLE_ARITY:
            raise ScaleLimitExceeded(
                f"explicit truth tables are limited to arity {MAX_TABLE_ARITY}")
        return tuple(self.image_code(e) for e in range(1 << self.arity))

    def table_states(self) -> list:
        return [StateVector(self.arity, c) for c in self.table]

    def __eq__(self, other):
        if not isinstance(other, UpdateFunction):
            return NotImplemented
        return self.arity == other.arity and self.table == other.table

    def __hash__(self):
        return hash((self.arity, self.table))


class TruthTable(UpdateFunction):
    """Update function given by an explicit table of image codes."""

    __slots__ = ("arity", "_table")

    def __init__(self, arity: int, table: Sequence[int]):
        if not isinstance(arity, int) or arity < 1:
            raise ValueError(f"arity must be a positive integer, got {arity!r}")
        if arity > MAX_TABLE_ARITY:
            raise ScaleLimitExceeded(f"arity {arity} exceeds {MAX_TABLE_ARITY}")
        table = tuple(int(c) for c in table)
        if len(table) != 1 << arity:
            raise ValueError(f"table needs {1 << arity} entries, got {len(table)}")
        top = 1 << arity
        for e, c in enumerate(table):
            if not 0 <= c < top:
                raise ValueError(f"entry {e} ({c}) does not fit in {arity} cells")
        self.arity = arity
        self._table = table

    @classmethod
    def from_states(cls, states: Sequence[StateVector]) -> "TruthTable":
        arity = states[0].n_cells if states else 0
        return cls(arity, [s.code for s in states])

    @classmethod
    def from_callable(cls, arity: int, fn: Callable[[int], int]) -> "TruthTable":
        return cls(arity, [fn(e) for e in range(1 << arity)])

    @property
    def table(self) -> tuple:
        return self._table

    def image_code(self, code: int) -> int:
        return self._table[code]

    def __repr__(self):
        return f"TruthTable({self.arity}, {list(self._table)!r})"


class Negation(UpdateFunction):
    """Vectorial negation: every cell is complemented."""

    __slots__ = ("arity", "_mask")

    def __init__(self, arity: int):
        if not isinstance(arity, int) or arity < 1:
            raise ValueError(f"arity must be a positive integer, got {arity!r}")
        if arity > MAX_IMPLICIT_ARITY:
            raise ScaleLimitExceeded(f"arity {arity} exceeds {MAX_IMPLICIT_ARITY}")
        self.arity = arity
        self._mask = (1 << arity) - 1

    def image_code(self, code: int) -> int:
        return code ^ self._mask

    def __repr__(self):
        return f"Negation({self.arity})"


class CallbackFunction(UpdateFunction):
    """Implicit update function backed by a callable on codes."""

    __slots__ = ("arity", "_fn")

    def __init__(self, arity: int, fn: Callable[[int], int]):
        if not isinstance(arity, int) or arity < 1:
            raise ValueError(f"arity must be a positive integer, got {arity!r}")
        if arity > MAX_IMPLICIT_ARITY:
            raise ScaleLimitExceeded(f"arity {arity} exceeds {MAX_IMPLICIT_ARITY}")
        self.arity = arity
        self._fn = fn

    def image_code(self, code: int) -> int:
        return self._fn(code) & ((1 << self.arity) - 1)

    def __repr__(self):
        return f"CallbackFunction({self.arity}, {self._fn!r})"


class ToggleFunction(CallbackFunction):
    """f(x) = x XOR t(x), where bit i of t(x) must not depend on cell i.

    Such functions make every unary step an involution, so the post-treatment
    built on them can be inverted at any arity.  The independence contract is
    checked exhaustively by :meth:`verify` for small arities only.
    """

    __slots__ = ("_toggles",)

    def __init__(self, arity: int, toggles: Callable[[int], int]):
        mask = (1 << arity) - 1
        super().__init__(arity, lambda c: c ^ (toggles(c) & mask))
        self._toggles = toggles

    def toggles(self, code: int) -> int:
        return self._toggles(code) & ((1 << self.arity) - 1)

    def verify(self) -> bool:
        if self.arity > 12:
            raise ScaleLimitExceeded("toggle independence is only checked up to arity 12")
        for code in range(1 << self.arity):
            t = self.toggles(code)
            for k in range(self.arity):
                bit = 1 << k
                if (t ^ self.toggles(code ^ bit)) & bit:
                    return False
        return True


def make_negation(n: int) -> Negation:
    """The vectorial negation f_0 on n cells."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"N must be a positive integer, got {n!r}")
    return Negation(n)


def make_identity(n: int) -> TruthTable:
    return TruthTable(n, range(1 << n))


def make_constant(n: int, value: int = 0) -> TruthTable:
    return TruthTable(n, [value] * (1 << n))


# ---------------------------------------------------------------------------
# Strategy terms and strategies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Unary:
    """Update a single cell."""

    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 1:
            raise IndexOutOfRange(f"unary index must be >= 1, got {self.index!r}")

    @property
    def mask(self) -> int:
        return 1 << (self.index - 1)

    def as_subset(self) -> "Subset":
        return Subset(self.mask)

    def check(self, n: int):
        _check_index(self.index, n)


@dataclass(frozen=True)
class Subset:
    """Update every cell in a (possibly empty) set, stored as an indicator mask."""

    mask: int = 0

    def __post_init__(self):
        if not isinstance(self.mask, int) or self.mask < 0:
            raise ValueError(f"subset mask must be a non-negative integer, got {self.mask!r}")

    @classmethod
    def of(cls, indices: Iterable[int]) -> "Subset":
        mask = 0
        for i in indices:
            if not isinstance(i, int) or i < 1:
                raise IndexOutOfRange(f"subset index must be >= 1, got {i!r}")
            mask |= 1 << (i - 1)
        return cls(mask)

    @property
    def indices(self) -> frozenset:
        return frozenset(k + 1 for k in range(self.mask.bit_length()) if self.mask >> k & 1)

    def as_unary(self) -> Unary:
        if self.mask == 0 or self.mask & (self.mask - 1):
            raise ValueError("only singleton subsets convert to unary terms")
        return Unary(self.mask.bit_length())

    def check(self, n: int):
        if self.mask >> n:
            raise IndexOutOfRange(
                f"subset {sorted(self.indices)} has indices outside [1, {n}]")


Term = Union[Unary, Subset]


def _coerce_term(term) -> Term:
    if isinstance(term, (Unary, Subset)):
        return term
    if isinstance(term, int):
        return Unary(term)
    if isinstance(term, (set, frozenset, list, tuple)):
        return Subset.of(term)
    raise TypeError(f"cannot interpret {term!r} as a strategy term")


class _MemoSource:
    """Random-access view of a (possibly infinite) iterable, filled lazily."""

    def __init__(self, iterable: Iterable):
        self._it = iter(iterable)
        self._seen: list = []
        self._done = False
        self._lock = threading.Lock()

    def __call__(self, k: int):
        with self._lock:
            while len(self._seen) <= k and not self._done:
                try:
                    self._seen.append(next(self._it))
                except StopIteration:
                    self._done = True
            if k < len(self._seen):
                return self._seen[k]
        raise StrategyExhausted(k)


@dataclass(frozen=True)
class Strategy:
    """An immutable sequence of update directives.

    ``prefix`` holds explicit terms; ``source``, when present, is a callable
    ``k -> term`` giving the k-th term of an unbounded tail that follows the
    prefix (``offset`` counts tail terms already shifted away).  A source may
    raise :class:`StrategyExhausted` to signal that it is finite after all.
    """

    n_cells: int
    prefix: tuple = ()
    source: Optional[Callable[[int], Term]] = None
    offset: int = 0

    def __post_init__(self):
        if not isinstance(self.n_cells, int) or self.n_cells < 1:
            raise ValueError(f"n_cells must be a positive integer, got {self.n_cells!r}")
        terms = tuple(_coerce_term(t) for t in self.prefix)
        for t in terms:
            t.check(self.n_cells)
        if len({type(t) for t in terms}) > 1:
            raise ValueError("strategy mixes unary and subset terms")
        object.__setattr__(self, "prefix", terms)

    @classmethod
    def unary(cls, n_cells: int, indices: Iterable[int] = (), source=None) -> "Strategy":
        return cls(n_cells, tuple(Unary(i) for i in indices), source)

    @classmethod
    def subsets(cls, n_cells: int, sets: Iterable[Iterable[int]] = (), source=None) -> "Strategy":
        return cls(n_cells, tuple(Subset.of(s) for s in sets), source)

    @classmethod
    def from_iterable(cls, n_cells: int, terms: Iterable) -> "Strategy":
        """Strategy whose terms are drawn lazily from an iterable (e.g. a PRNG)."""
        memo = _MemoSource(_coerce_term(t) for t in terms)
        return cls(n_cells, (), memo)

    @classmethod
    def periodic(cls, n_cells: int, word: Sequence) -> "Strategy":
        word = tuple(_coerce_term(t) for t in word)
        if not word:
            raise ValueError("periodic strategy needs a non-empty word")
        return cls(n_cells, (), lambda k: word[k % len(word)])

    @property
    def is_finite(self) -> bool:
        return self.source is None

    @property
    def kind(self) -> Optional[type]:
        if self.prefix:
            return type(self.prefix[0])
        return None

    def term(self, k: int) -> Term:
        """The k-th available term (0-based), without consuming anything."""
        if k < len(self.prefix):
            return self.prefix[k]
        if self.source is None:
            raise StrategyExhausted(k)
        try:
            t = _coerce_term(self.source(self.offset + k - len(self.prefix)))
        except StrategyExhausted:
            raise StrategyExhausted(k) from None
        t.check(self.n_cells)
        kind = self.kind
        if kind is not None and type(t) is not kind:
            raise ValueError("strategy source mixes unary and subset terms")
        return t

    def take(self, k: int) -> tuple:
        return tuple(self.term(j) for j in range(k))

    def has(self, k: int) -> bool:
        """True when at least k terms are available."""
        if k <= len(self.prefix):
            return True
        try:
            self.term(k - 1)
        except StrategyExhausted:
            return False
        return True

    def head(self) -> Term:
        return self.term(0)

    def shift(self) -> "Strategy":
        if self.prefix:
            return Strategy(self.n_cells, self.prefix[1:], self.source, self.offset)
        if self.source is None:
            raise StrategyExhausted(0, "cannot shift an empty strategy")
        self.term(0)
        return Strategy(self.n_cells, (), self.source, self.offset + 1)

    def drop(self, k: int) -> "Strategy":
        s = self
        for _ in range(k):
            s = s.shift()
        return s

    def __len__(self):
        if self.source is not None:
            raise TypeError("strategy with an unbounded source has no length")
        return len(self.prefix)


def head(s: Strategy) -> Term:
    """First term of a strategy (the initial function)."""
    return s.head()


def shift(s: Strategy) -> Strategy:
    """The strategy without its first term (the shift function)."""
    return s.shift()


# ---------------------------------------------------------------------------
# Step rules
# ---------------------------------------------------------------------------

def ff_step(f: UpdateFunction, i: int, x: StateVector) -> StateVector:
    """Replace cell i of x by cell i of f(x); all other cells are kept."""
    if x.n_cells != f.arity:
        raise ArityMismatch(f"state has {x.n_cells} cells, function arity is {f.arity}")
    _check_index(i, f.arity)
    bit = 1 << (i - 1)
    return StateVector(x.n_cells, x.code ^ ((x.code ^ f.image_code(x.code)) & bit))


def ci_step_subset(f: UpdateFunction, x: StateVector, s) -> StateVector:
    """Cells in the subset take f(x)'s value, the others keep x's."""
    if x.n_cells != f.arity:
        raise ArityMismatch(f"state has {x.n_cells} cells, function arity is {f.arity}")
    s = s if isinstance(s, Subset) else Subset.of(s)
    s.check(f.arity)
    if not s.mask:
        return x
    return StateVector(x.n_cells, x.code ^ ((x.code ^ f.image_code(x.code)) & s.mask))


def apply_term(f: UpdateFunction, x: StateVector, term: Term) -> StateVector:
    if isinstance(term, Unary):
        return ff_step(f, term.index, x)
    return ci_step_subset(f, x, term)


@dataclass(frozen=True)
class SystemPoint:
    """A point (S, E) of the phase space of G_f."""

    strategy: Strategy
    state: StateVector

    def __post_init__(self):
        if self.strategy.n_cells != self.state.n_cells:
            raise ArityMismatch(
                f"strategy is over {self.strategy.n_cells} cells, state has {self.state.n_cells}")


def gf_step(p: SystemPoint, f: UpdateFunction) -> SystemPoint:
    """G_f(S, E) = (shift(S), F_f(head(S), E)). Reads only the head term."""
    t = p.strategy.head()
    if not isinstance(t, Unary):
        raise TypeError("G_f needs a unary strategy")
    return SystemPoint(p.strategy.shift(), ff_step(f, t.index, p.state))


def iterate_gf(p: SystemPoint, f: UpdateFunction, m: int) -> SystemPoint:
    for _ in range(m):
        p = gf_step(p, f)
    return p


def trajectory(f: UpdateFunction, x0: StateVector, s: Strategy, k: int) -> list:
    """States x^0 .. x^k of the chaotic iterations (f, (x0, S))."""
    if x0.n_cells != f.arity or s.n_cells != f.arity:
        raise ArityMismatch("function, state and strategy must share N")
    out = [x0]
    x = x0
    for t in range(k):
        try:
            term = s.term(t)
        except StrategyExhausted:
            raise StrategyExhausted(t, f"strategy exhausted after {t} of {k} steps") from None
        x = apply_term(f, x, term)
        out.append(x)
    return out
