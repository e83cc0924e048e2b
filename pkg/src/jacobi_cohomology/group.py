"""SL(2,Z), the Jacobi group SL(2,Z) x Z^2, words in S and T, coset enumeration."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class GroupElement:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.entries} is not 1")

    @classmethod
    def from_seq(cls, seq) -> "GroupElement":
        a, b, c, d = (int(x) for x in seq)
        return cls(a, b, c, d)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, o: "GroupElement") -> "GroupElement":
        return GroupElement(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                            self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    __mul__ = __matmul__

    def __neg__(self):
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> "GroupElement":
        base = self if n >= 0 else self.inverse()
        out = I
        for _ in range(abs(n)):
            out = out @ base
        return out

    def j(self, tau):
        """Automorphy factor ``c tau + d``."""
        return self.c * np.asarray(tau) + self.d

    def act(self, tau):
        tau = np.asarray(tau, dtype=complex)
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def cusp_preimage(self):
        """``gamma^{-1}(i inf)`` as a Fraction, or None for i*inf itself."""
        if self.c == 0:
            return None
        return Fraction(-self.d, self.c)

    def to_json(self):
        return list(self.entries)

    def __repr__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


I = GroupElement(1, 0, 0, 1)
S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)
MINUS_I = GroupElement(-1, 0, 0, -1)


def as_group_element(g) -> GroupElement:
    if isinstance(g, GroupElement):
        return g
    if isinstance(g, JacobiElement):
        return g.gamma
    return GroupElement.from_seq(np.asarray(g).ravel())


@dataclass(frozen=True)
class JacobiElement:
    """``(gamma, (lam, mu))`` in SL(2,Z) x Z^2."""

    gamma: GroupElement = I
    lam: int = 0
    mu: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gamma", as_group_element(self.gamma))
        object.__setattr__(self, "lam", int(self.lam))
        object.__setattr__(self, "mu", int(self.mu))

    def __matmul__(self, o: "JacobiElement") -> "JacobiElement":
        return jacobi_compose(self, o)

    __mul__ = __matmul__

    def to_json(self):
        return {"gamma": self.gamma.to_json(), "X": [self.lam, self.mu]}

    @classmethod
    def from_json(cls, obj) -> "JacobiElement":
        lam, mu = obj.get("X", [0, 0])
        return cls(GroupElement.from_seq(obj["gamma"]), lam, mu)


def jacobi_compose(g1: JacobiElement, g2: JacobiElement) -> JacobiElement:
    """``(g1 g2, X1 . g2 + X2)`` with ``X`` a row vector."""
    a, b, c, d = g2.gamma.entries
    lam = g1.lam * a + g1.mu * c + g2.lam
    mu = g1.lam * b + g1.mu * d + g2.mu
    return JacobiElement(g1.gamma @ g2.gamma, lam, mu)


def jacobi_act(g: JacobiElement, tau, z):
    """Action on H x C: ``(gamma tau, (z + lam tau + mu)/(c tau + d))``."""
    tau = np.asarray(tau, dtype=complex)
    z = np.asarray(z, dtype=complex)
    gam = g.gamma
    return gam.act(tau), (z + g.lam * tau + g.mu) / gam.j(tau)


# ----------------------------------------------------------------------------
# words
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """Product of blocks ``(letter, power)`` with letter in {"S", "T"}.

    Blocks are stored compressed (``("T", 7)`` is seven T's) so that words for
    matrices with huge entries stay short.  ``tokens()`` expands to the
    elementary alphabet {S, S^-1, T, T^-1}.
    """

    blocks: tuple[tuple[str, int], ...] = ()

    def product(self) -> GroupElement:
        g = I
        for letter, p in self.blocks:
            g = g @ _block_matrix(letter, p)
        return g

    def tokens(self) -> list[str]:
        out = []
        for letter, p in self.blocks:
            out.extend([letter if p > 0 else letter + "^-1"] * abs(p))
        return out

    def __len__(self):
        return len(self.blocks)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.blocks + other.blocks)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse e.g. ``"S T^-1 S^-1"`` or ``"T^5 S"``."""
        blocks = []
        for tok in text.split():
            letter, _, p = tok.partition("^")
            if letter not in ("S", "T"):
                raise ValueError(f"unknown generator {letter!r}")
            blocks.append((letter, int(p) if p else 1))
        return cls(tuple(blocks))


def _block_matrix(letter: str, p: int) -> GroupElement:
    if letter == "T":
        return GroupElement(1, p, 0, 1)
    r = p % 4
    return (I, S, MINUS_I, -S)[r]


def _nearest_quotient(a: int, c: int) -> int:
    # floor(a/c + 1/2) in exact integer arithmetic
    return (2 * a + c) // (2 * c)


def word_decompose(gamma) -> Word:
    """Express ``gamma`` as a word in S and T (continued-fraction descent on columns).

    Each step peels off ``T^q S`` with ``q`` the nearest integer to ``a/c``,
    which at least halves ``|c|``; the word therefore has O(log max|entry|) blocks.
    """
    a, b, c, d = as_group_element(gamma).entries
    blocks: list[tuple[str, int]] = []
    while c != 0:
        q = _nearest_quotient(a, c)
        if q:
            blocks.append(("T", q))
            a, b = a - q * c, b - q * d
        blocks.append(("S", 1))
        a, b, c, d = c, d, -a, -b
    if a == 1:
        if b:
            blocks.append(("T", b))
    else:
        blocks.append(("S", 2))
        if b:
            blocks.append(("T", -b))
    return Word(tuple(blocks))


# ----------------------------------------------------------------------------
# cusps and cosets
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CuspData:
    """The single cusp class of SL(2,Z): representative i*inf, width 1, generator T."""

    width: Fraction = Fraction(1)

    @property
    def generator(self) -> GroupElement:
        return GroupElement(1, int(self.width), 0, 1)


SL2Z_CUSP = CuspData()


@lru_cache(maxsize=32)
def _coset_reps_cached(C: int) -> tuple[GroupElement, ...]:
    reps = [I]
    for c in range(1, C + 1):
        for d in range(c):
            if math.gcd(c, d) != 1:
                continue
            a = pow(d, -1, c) if c > 1 else 0
            b = (a * d - 1) // c
            reps.append(GroupElement(a, b, c, d))
    return tuple(reps)


def coset_reps(C: int) -> list[GroupElement]:
    """Representatives ordered by ``(c, d mod c)``: the identity, then one matrix
    per coprime pair ``0 < c <= C``, ``0 <= d < c``.

    Each representative stands for the lower rows ``(c, d + t c)``; sums over
    the full coset space expand every representative ``g`` into the translates
    ``g T^t`` (see :func:`lower_row_window`).
    """
    if C < 1:
        raise ValueError("C must be >= 1")
    return list(_coset_reps_cached(int(C)))


def lower_row_window(g: GroupElement, C: int) -> np.ndarray:
    """Integers t with ``|d + t c| <= C`` for the translates ``g T^t`` (c > 0)."""
    c, d = g.c, g.d
    if c == 0:
        return np.array([0])
    lo = math.ceil((-C - d) / c)
    hi = math.floor((C - d) / c)
    return np.arange(lo, hi + 1)


def reduce_to_fundamental(tau: complex, max_steps: int = 10_000):
    """Return ``(gamma, w)`` with ``w = gamma tau`` in the standard fundamental domain."""
    z = complex(tau)
    if z.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    g = I
    for _ in range(max_steps):
        n = round(z.real)
        if n:
            z -= n
            g = GroupElement(1, -n, 0, 1) @ g
        if abs(z) < 1 - 1e-14:
            z = -1 / z
            g = S @ g
        else:
            return g, z
    raise RuntimeError("fundamental domain reduction did not terminate")
