"""Keyed hash post-treatment by chaotic iterations.

The digest X = h(k1, m) of an inner keyed hash is fed through r chaotic
iteration steps whose strategy is drawn from a keyed generator (or, in
stream mode, from each incoming frame XOR a keyed block).  With a bijective
step map the post-treatment is a keyed permutation of the digest space, so
collisions of the result are exactly collisions of the inner hash.

Digests are :class:`~chaotic_iterations.core.StateVector` values rendered
most-significant byte first: cell 1 is the least-significant bit of the
last byte.
"""
from __future__ import annotations

import hashlib
import hmac
import random
import statistics
from dataclasses import dataclass, field
from itertools import islice
from typing import Iterable, Iterator, Optional, Sequence, Union

from .core import (
    Negation,
    StateVector,
    Subset,
    ToggleFunction,
    Unary,
    UpdateFunction,
    apply_term,
    make_negation,
)
from .errors import ArityMismatch, FrameError, NotCertified

Digest = StateVector
Frame = Union[StateVector, bytes]

MAX_EXHAUSTIVE_CERT_BITS = 12
SECURE_KEY_BYTES = 16


# ---------------------------------------------------------------------------
# Keys and inner hash
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HashKey:
    """Key triple (k1, k2, r): inner-hash key, strategy seed, round count.

    ``rounds=None`` means "as many rounds as digest bits".
    """

    k1: bytes
    k2: bytes
    rounds: Optional[int] = None

    def __post_init__(self):
        if self.rounds is not None and self.rounds < 0:
            raise ValueError("rounds must be non-negative")

    @classmethod
    def from_hex(cls, k1: str, k2: str, rounds: Optional[int] = None) -> "HashKey":
        return cls(bytes.fromhex(k1), bytes.fromhex(k2), rounds)

    @property
    def is_secure(self) -> bool:
        return len(self.k1) >= SECURE_KEY_BYTES and len(self.k2) >= SECURE_KEY_BYTES

    def rounds_for(self, n: int) -> int:
        return n if self.rounds is None else self.rounds


@dataclass(frozen=True)
class InnerHash:
    """HMAC over a hashlib digest, optionally truncated to its leftmost ``bits``."""

    algorithm: str = "sha256"
    bits: Optional[int] = None

    def __post_init__(self):
        full = hashlib.new(self.algorithm).digest_size * 8
        if self.bits is not None and not 1 <= self.bits <= full:
            raise ValueError(f"{self.algorithm} cannot be truncated to {self.bits} bits")

    @classmethod
    def for_bits(cls, n: int) -> "InnerHash":
        if n == 256:
            return cls("sha256")
        if n == 512:
            return cls("sha512")
        if 1 <= n < 256:
            return cls("sha256", n)
        if 256 < n < 512:
            return cls("sha512", n)
        raise ValueError(f"no inner hash configured for {n}-bit digests")

    @property
    def n(self) -> int:
        return self.bits or hashlib.new(self.algorithm).digest_size * 8

    def __call__(self, k1: bytes, message: bytes) -> Digest:
        mac = hmac.new(k1, message, self.algorithm).digest()
        full = 8 * len(mac)
        value = int.from_bytes(mac, "big")
        if self.bits is not None:
            value >>= full - self.bits
        return StateVector(self.n, value)


DEFAULT_INNER = InnerHash()


def inner_hash(k1: bytes, message: bytes, inner: InnerHash = DEFAULT_INNER) -> Digest:
    return inner(k1, message)


# ---------------------------------------------------------------------------
# Keyed generator and strategy sources
# ---------------------------------------------------------------------------

class KeyedGenerator:
    """Deterministic byte stream: HMAC-SHA256(seed, label || counter) blocks."""

    def __init__(self, seed: bytes, label: bytes = b"strategy"):
        self._seed = bytes(seed)
        self._label = bytes(label)
        self._counter = 0
        self._buffer = bytearray()

    def read(self, size: int) -> bytes:
        while len(self._buffer) < size:
            block = hmac.new(self._seed, self._label + self._counter.to_bytes(8, "big"),
                             hashlib.sha256).digest()
            self._buffer.extend(block)
            self._counter += 1
        out = bytes(self._buffer[:size])
        del self._buffer[:size]
        return out

    def getrandbits(self, bits: int) -> int:
        if bits == 0:
            return 0
        nbytes = (bits + 7) // 8
        return int.from_bytes(self.read(nbytes), "big") >> (8 * nbytes - bits)

    def index(self, n: int) -> int:
        """Uniform draw from 1..n by rejection on ceil(log2 n)-bit words."""
        bits = (n - 1).bit_length()
        while True:
            v = self.getrandbits(bits)
            if v < n:
                return v + 1


def _frame_code(frame: Frame, n: int) -> int:
    if isinstance(frame, StateVector):
        if frame.n_cells != n:
            raise FrameError(f"frame has {frame.n_cells} bits, expected {n}")
        return frame.code
    if isinstance(frame, (bytes, bytearray)):
        if 8 * len(frame) != n:
            raise FrameError(f"frame has {8 * len(frame)} bits, expected {n}")
        return int.from_bytes(frame, "big")
    raise TypeError(f"frames must be StateVector or bytes, got {type(frame).__name__}")


def frame_term(frame: Frame, block: int, n: int) -> Subset:
    """Update set whose indicator is ``frame XOR block``; bit j is index j+1."""
    return Subset(_frame_code(frame, n) ^ block)


@dataclass
class PrngSource:
    """Unary indices in 1..n drawn from a generator seeded by k2."""

    k2: bytes
    n: int

    def iter_terms(self) -> Iterator[Unary]:
        gen = KeyedGenerator(self.k2, b"strategy")
        while True:
            yield Unary(gen.index(self.n))


@dataclass
class StreamSource:
    """Subset terms whose indicator is frame XOR keyed block.

    With ``mask_with_prng=False`` the blocks are all zero and the frames are
    used as indicators directly (test profile only).
    """

    k2: bytes
    n: int
    frames: Iterable[Frame]
    mask_with_prng: bool = True

    def iter_terms(self) -> Iterator[Subset]:
        gen = KeyedGenerator(self.k2, b"stream")
        for frame in self.frames:
            block = gen.getrandbits(self.n) if self.mask_with_prng else 0
            yield frame_term(frame, block, self.n)


StrategySource = Union[PrngSource, StreamSource]


def strategy_terms(src: StrategySource, count: int) -> list:
    terms = list(islice(src.iter_terms(), count))
    if len(terms) < count:
        raise FrameError(f"stream supplied {len(terms)} frames, {count} needed")
    return terms


# ---------------------------------------------------------------------------
# Post-treatment and its inverse
# ---------------------------------------------------------------------------

def _resolve(f: Optional[UpdateFunction], n: int) -> UpdateFunction:
    f = f if f is not None else make_negation(n)
    if f.arity != n:
        raise ArityMismatch(f"update function arity {f.arity} != digest length {n}")
    return f


def post_treatment(x: Digest, terms: Sequence, f: Optional[UpdateFunction] = None,
                   require_invertible: bool = False) -> Digest:
    """Apply the terms in order: unary terms as F_f steps, subsets as parallel updates."""
    n = x.n_cells
    f = _resolve(f, n)
    if require_invertible:
        _inverse_steps(f, terms)
    if isinstance(f, Negation):
        code = x.code
        for t in terms:
            t.check(n)
            code ^= t.mask
        return StateVector(n, code)
    for t in terms:
        x = apply_term(f, x, t)
    return x


def _step_table(f: UpdateFunction, term) -> list:
    n = f.arity
    return [apply_term(f, StateVector(n, c), term).code for c in range(1 << n)]


def _inverse_steps(f: UpdateFunction, terms: Sequence) -> list:
    """One inverse map (code -> code) per term, or NotCertified.

    Negation and unary steps of toggle functions are involutions.  Below
    the exhaustive limit every distinct step map is tabulated and checked
    to be a permutation.
    """
    n = f.arity
    for t in terms:
        t.check(n)
    if isinstance(f, Negation):
        return [(lambda c, m=t.mask: c ^ m) for t in terms]
    if n <= MAX_EXHAUSTIVE_CERT_BITS:
        cache = {}
        out = []
        for t in terms:
            if t not in cache:
                forward = _step_table(f, t)
                inverse = [-1] * len(forward)
                for c, y in enumerate(forward):
                    if inverse[y] != -1:
                        raise NotCertified(f"step {t} maps two states to {y:#x}")
                    inverse[y] = c
                cache[t] = inverse.__getitem__
            out.append(cache[t])
        return out
    if isinstance(f, ToggleFunction) and all(isinstance(t, Unary) for t in terms):
        return [(lambda c, t=t: apply_term(f, StateVector(n, c), t).code) for t in terms]
    raise NotCertified(
        f"cannot certify {f!r} as invertible at n={n}; use negation, a toggle "
        f"function with unary terms, or n <= {MAX_EXHAUSTIVE_CERT_BITS}")


def certify(f: UpdateFunction, terms: Sequence) -> bool:
    try:
        _inverse_steps(f, terms)
    except NotCertified:
        return False
    return True


def invert_post_treatment(y: Digest, terms: Sequence, f: Optional[UpdateFunction] = None) -> Digest:
    """The unique X with post_treatment(X, terms, f) == y."""
    n = y.n_cells
    f = _resolve(f, n)
    code = y.code
    for inv in reversed(_inverse_steps(f, terms)):
        code = inv(code)
    return StateVector(n, code)


# ---------------------------------------------------------------------------
# The keyed hash
# ---------------------------------------------------------------------------

def chaotic_hash(key: HashKey, message: bytes, f: Optional[UpdateFunction] = None,
                 inner: InnerHash = DEFAULT_INNER) -> Digest:
    x = inner(key.k1, message)
    n = x.n_cells
    terms = strategy_terms(PrngSource(key.k2, n), key.rounds_for(n))
    return post_treatment(x, terms, f)


class StreamHasher:
    """Running hash of a frame stream.

    Frame 0 is hashed with the inner hash; every later frame becomes one
    subset step (frame XOR keyed block).  A session holds mutable state and
    must not be shared between threads.
    """

    def __init__(self, key: HashKey, n: int = 256, f: Optional[UpdateFunction] = None,
                 inner: Optional[InnerHash] = None, mask_with_prng: bool = True):
        self.key = key
        self.n = n
        self.inner = inner or InnerHash.for_bits(n)
        if self.inner.n != n:
            raise ArityMismatch(f"inner hash gives {self.inner.n} bits, frames have {n}")
        self.f = _resolve(f, n)
        self.mask_with_prng = mask_with_prng
        self._gen = KeyedGenerator(key.k2, b"stream")
        self._digest: Optional[Digest] = None
        self.frames = 0

    @property
    def digest(self) -> Digest:
        if self._digest is None:
            raise FrameError("no frame has been hashed yet")
        return self._digest

    def update(self, frame: Frame) -> Digest:
        if self._digest is None:
            code = _frame_code(frame, self.n)
            self._digest = self.inner(self.key.k1, StateVector(self.n, code).to_bytes())
        else:
            block = self._gen.getrandbits(self.n) if self.mask_with_prng else 0
            self._digest = post_treatment(self._digest, [frame_term(frame, block, self.n)], self.f)
        self.frames += 1
        return self._digest


def chaotic_hash_stream(key: HashKey, frames: Iterable[Frame], n: int = 256,
                        f: Optional[UpdateFunction] = None, inner: Optional[InnerHash] = None,
                        mask_with_prng: bool = True) -> Iterator[Digest]:
    """Yield the running digest after every frame."""
    session = StreamHasher(key, n, f, inner, mask_with_prng)
    for frame in frames:
        yield session.update(frame)
    if session.frames == 0:
        raise FrameError("empty stream")


# ---------------------------------------------------------------------------
# Avalanche statistics
# ---------------------------------------------------------------------------

@dataclass
class AvalancheStats:
    trials: int
    n: int
    distances: list = field(repr=False)
    flip_rates: list = field(repr=False)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.distances)

    @property
    def stdev(self) -> float:
        return statistics.pstdev(self.distances)

    @property
    def min_rate(self) -> float:
        return min(self.flip_rates)

    @property
    def max_rate(self) -> float:
        return max(self.flip_rates)

    def line(self) -> str:
        return (f"trials={self.trials} n={self.n} mean={self.mean:.4f} stdev={self.stdev:.4f} "
                f"min_rate={self.min_rate:.4f} max_rate={self.max_rate:.4f}")


def avalanche_stats(key: HashKey, trials: int, seed: int = 0, message_bytes: int = 32,
                    flip_bits: int = 1, f: Optional[UpdateFunction] = None,
                    inner: InnerHash = DEFAULT_INNER) -> AvalancheStats:
    """Digest differences caused by flipping ``flip_bits`` random message bits."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = random.Random(seed)
    n = inner.n
    distances = []
    flips = [0] * n
    for _ in range(trials):
        msg = bytearray(rng.randbytes(message_bytes))
        a = chaotic_hash(key, bytes(msg), f, inner)
        for pos in rng.sample(range(8 * message_bytes), flip_bits):
            msg[pos // 8] ^= 1 << (pos % 8)
        b = chaotic_hash(key, bytes(msg), f, inner)
        diff = a.code ^ b.code
        distances.append(bin(diff).count("1"))
        for k in range(n):
            flips[k] += (diff >> k) & 1
    return AvalancheStats(trials, n, distances, [c / trials for c in flips])
