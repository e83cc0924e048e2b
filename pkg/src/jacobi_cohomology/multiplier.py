"""Multiplier systems, unitary representations, the theta-type representation and
cusp offsets.

Multipliers and representations are stored by their values on the generators
S and T and evaluated on arbitrary matrices through :func:`word_decompose`.
Half-integral powers ``(c tau + d)^w`` always use the principal branch,
``arg`` in (-pi, pi].
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .group import (I, MINUS_I, S, T, GroupElement, Word, as_group_element,
                    word_decompose)
from .numeric import e, fraction_str, parse_fraction

_TEST_POINT = complex(0.2, 1.3)


def principal_power(z, w):
    """``z^w = exp(w Log z)`` with the principal logarithm."""
    return np.exp(float(w) * np.log(np.asarray(z, dtype=complex)))


# ----------------------------------------------------------------------------
# eta
# ----------------------------------------------------------------------------


def log_eta(tau):
    """``log eta(tau)`` (some branch), vectorised; terms dropped once ``|q^n| < 1e-17``."""
    tau = np.atleast_1d(np.asarray(tau, dtype=complex))
    if np.any(tau.imag <= 0):
        raise ValueError("eta needs Im(tau) > 0")
    ymin = tau.imag.min()
    n_max = int(math.ceil(17 * math.log(10) / (2 * math.pi * ymin))) + 1
    n = np.arange(1, n_max + 1)
    out = np.empty(tau.shape, dtype=complex)
    # chunk to bound memory when Im(tau) is small
    step = max(1, 2_000_000 // max(n_max, 1))
    for s in range(0, len(tau), step):
        t = tau[s:s + step]
        qn = np.exp(2j * np.pi * np.multiply.outer(t, n))
        out[s:s + step] = 1j * np.pi * t / 12 + np.log1p(-qn).sum(axis=1)
    return out


def eta_eval(tau):
    """Dedekind eta ``q^(1/24) prod (1 - q^n)``."""
    scalar = np.ndim(tau) == 0
    val = np.exp(log_eta(tau))
    return complex(val[0]) if scalar else val.reshape(np.shape(tau))


def dedekind_sum(h: int, k: int) -> Fraction:
    """``s(h, k)`` for ``k > 0``, ``gcd(h, k) = 1``, by the reciprocity law."""
    if k <= 0:
        raise ValueError("k must be positive")
    sign, total = 1, Fraction(0)
    h %= k
    while h:
        # s(h,k) = (h/k + k/h + 1/(hk))/12 - 1/4 - s(k,h)
        total += sign * (Fraction(h * h + k * k + 1, 12 * h * k) - Fraction(1, 4))
        sign = -sign
        h, k = k % h, h
    return total


def eta_multiplier_phase(gamma) -> Fraction:
    """``x`` in [0, 2) with ``eta(gamma tau) = exp(pi i x) (c tau + d)^(1/2) eta(tau)``,
    principal square root."""
    g = as_group_element(gamma)
    a, b, c, d = g.entries
    shift = Fraction(0)
    if c < 0 or (c == 0 and d < 0):
        # negating gamma flips the principal root of (c tau + d) by -i (c != 0)
        # or by +i (c = 0, since then c tau + d = -1)
        shift = Fraction(1, 2) if c else Fraction(3, 2)
        a, b, c, d = -a, -b, -c, -d
    if c == 0:
        x = Fraction(b, 12)
    else:
        x = Fraction(a + d, 12 * c) - dedekind_sum(d, c) - Fraction(1, 4)
    return (x + shift) % 2


def eta_multiplier(gamma, check: bool = False) -> complex:
    """Weight-1/2 eta multiplier ``eta(gamma tau)/((c tau + d)^(1/2) eta(tau))``, exact
    up to the final exponential.

    With ``check`` the value is compared against a direct evaluation of eta at a
    point where both ``tau`` and ``gamma tau`` sit at height ``1/|c|``.
    """
    g = as_group_element(gamma)
    v = cmath.exp(1j * math.pi * float(eta_multiplier_phase(g)))
    if check:
        tau = complex(-g.d / g.c, 1 / abs(g.c)) if g.c else 2j
        num = log_eta(g.act(tau))[0] - log_eta(tau)[0]
        direct = complex(np.exp(num) / principal_power(g.j(tau), 0.5))
        if abs(v - direct) > 1e-8:
            raise ValueError(f"eta multiplier disagrees with direct evaluation "
                             f"({abs(v - direct):.2e})")
    return v


# ----------------------------------------------------------------------------
# multiplier systems
# ----------------------------------------------------------------------------


def _arg(z: complex) -> float:
    return cmath.phase(z)


def automorphy_sigma(w, g1: GroupElement, g2: GroupElement, tau0=_TEST_POINT) -> complex:
    """``j(g1, g2 tau)^w j(g2, tau)^w / j(g1 g2, tau)^w``, a root of unity independent of tau."""
    w = parse_fraction(w)
    if w.denominator == 1:
        return 1.0 + 0j
    j1 = complex(g1.j(g2.act(tau0)))
    j2 = complex(g2.j(tau0))
    j3 = complex((g1 @ g2).j(tau0))
    n = round((_arg(j1) + _arg(j2) - _arg(j3)) / (2 * math.pi))
    if n == 0:
        return 1.0 + 0j
    return complex(e(float(parse_fraction(w)) * n))


@dataclass
class MultiplierSystem:
    """Unitary multiplier system of (real) weight ``weight`` on SL(2,Z).

    Determined by ``s_value = chi(S)`` and ``t_value = chi(T)``; the value on a
    general matrix is accumulated along a word using the consistency condition.
    """

    weight: Fraction
    s_value: complex
    t_value: complex
    eta_power: int | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.weight = parse_fraction(self.weight)
        self.s_value = complex(self.s_value)
        self.t_value = complex(self.t_value)
        if abs(abs(self.s_value) - 1) > 1e-12 or abs(abs(self.t_value) - 1) > 1e-12:
            raise ValueError("multiplier values must have modulus 1")

    # constructors -----------------------------------------------------------
    @classmethod
    def trivial(cls, weight=0) -> "MultiplierSystem":
        return cls(weight, 1, 1, eta_power=0)

    @classmethod
    def eta(cls, r: int = 1) -> "MultiplierSystem":
        """The multiplier of ``eta^r``: weight r/2, ``chi(T) = e(r/24)``, ``chi(S) = e(-r/8)``."""
        return cls(Fraction(r, 2), complex(e(-r / 8)), complex(e(r / 24)), eta_power=r)

    def at_weight(self, w) -> "MultiplierSystem":
        """Same generator values, reinterpreted at weight ``w`` (requires ``w = weight mod 1``)."""
        w = parse_fraction(w)
        if (w - self.weight).denominator != 1:
            raise ValueError("weights must agree modulo 1")
        return MultiplierSystem(w, self.s_value, self.t_value, self.eta_power)

    def conjugate(self) -> "MultiplierSystem":
        return MultiplierSystem(-self.weight, self.s_value.conjugate(), self.t_value.conjugate(),
                                None if self.eta_power is None else -self.eta_power)

    def __mul__(self, other: "MultiplierSystem") -> "MultiplierSystem":
        ep = None
        if self.eta_power is not None and other.eta_power is not None:
            ep = self.eta_power + other.eta_power
        return MultiplierSystem(self.weight + other.weight, self.s_value * other.s_value,
                                self.t_value * other.t_value, ep)

    # evaluation -------------------------------------------------------------
    def sigma(self, g1, g2) -> complex:
        return automorphy_sigma(self.weight, g1, g2)

    def _generator(self, letter: str, sign: int) -> complex:
        if letter == "T":
            return self.t_value if sign > 0 else self.t_value.conjugate()
        if sign > 0:
            return self.s_value
        # chi(I) = chi(S) chi(S^-1) sigma(S, S^-1)
        return 1 / (self.s_value * self.sigma(S, S.inverse()))

    def evaluate_word(self, word: Word) -> complex:
        g = I
        val = 1.0 + 0j
        for letter, p in word.blocks:
            if letter == "T":
                # sigma(g, T^p) = 1 since j(T^p, tau) = 1
                val *= self.t_value ** p
                g = g @ GroupElement(1, p, 0, 1)
                continue
            sign = 1 if p > 0 else -1
            step = S if sign > 0 else S.inverse()
            for _ in range(abs(p)):
                val *= self._generator("S", sign) * self.sigma(g, step)
                g = g @ step
        return val

    def __call__(self, gamma) -> complex:
        g = as_group_element(gamma)
        key = g.entries
        v = self._cache.get(key)
        if v is None:
            v = self.evaluate_word(word_decompose(g))
            self._cache[key] = v
        return v

    # checks -----------------------------------------------------------------
    def relation_residual(self) -> float:
        """Max deviation from 1 on the relation words S^4 and (ST)^3 S^-2."""
        r1 = self.evaluate_word(Word.parse("S S S S"))
        r2 = self.evaluate_word(Word.parse("S T S T S T S^-1 S^-1"))
        return max(abs(r1 - 1), abs(r2 - 1))

    def consistency_residual(self, g1, g2, tau=_TEST_POINT) -> float:
        """``|chi(g1 g2) j3^w - chi(g1) chi(g2) j(g1, g2 tau)^w j(g2, tau)^w|``."""
        g1, g2 = as_group_element(g1), as_group_element(g2)
        w = self.weight
        lhs = self(g1 @ g2) * principal_power((g1 @ g2).j(tau), w)
        rhs = (self(g1) * self(g2) * principal_power(g1.j(g2.act(tau)), w)
               * principal_power(g2.j(tau), w))
        return float(abs(lhs - rhs))

    def to_json(self) -> dict:
        if self.eta_power is not None and (self.weight - Fraction(self.eta_power, 2)).denominator == 1:
            return {"weight": fraction_str(self.weight), "etaPower": self.eta_power}
        return {"weight": fraction_str(self.weight),
                "S": [self.s_value.real, self.s_value.imag],
                "T": [self.t_value.real, self.t_value.imag]}

    @classmethod
    def from_json(cls, obj) -> "MultiplierSystem":
        w = parse_fraction(obj["weight"])
        if "etaPower" in obj:
            return cls.eta(int(obj["etaPower"])).at_weight(w)
        return cls(w, complex(*obj["S"]), complex(*obj["T"]))

    def __eq__(self, other):
        if not isinstance(other, MultiplierSystem):
            return NotImplemented
        return (self.weight == other.weight and abs(self.s_value - other.s_value) < 1e-12
                and abs(self.t_value - other.t_value) < 1e-12)


def multiplier_eval(chi: MultiplierSystem, gamma) -> complex:
    return chi(gamma)


# ----------------------------------------------------------------------------
# representations
# ----------------------------------------------------------------------------


class RelationError(ValueError):
    """A representation or cocycle violates the SL(2,Z) relations."""


@dataclass
class UnitaryRep:
    """Unitary representation of SL(2,Z) given on S and T."""

    s_matrix: np.ndarray
    t_matrix: np.ndarray
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.s_matrix = np.asarray(self.s_matrix, dtype=complex)
        self.t_matrix = np.asarray(self.t_matrix, dtype=complex)
        p = self.s_matrix.shape[0]
        if self.s_matrix.shape != (p, p) or self.t_matrix.shape != (p, p):
            raise ValueError("generator matrices must be square of equal size")
        eye = np.eye(p)
        for m in (self.s_matrix, self.t_matrix):
            if np.abs(m.conj().T @ m - eye).max() > 1e-12:
                raise ValueError("generator matrix is not unitary")
        self._t_entries = np.diag(self.t_matrix).copy()
        self._t_diag = np.allclose(self.t_matrix, np.diag(np.diag(self.t_matrix)), atol=1e-14)

    @property
    def dim(self) -> int:
        return self.s_matrix.shape[0]

    @classmethod
    def trivial(cls, p: int = 1) -> "UnitaryRep":
        return cls(np.eye(p), np.eye(p), name="trivial")

    def conjugate(self) -> "UnitaryRep":
        return UnitaryRep(self.s_matrix.conj(), self.t_matrix.conj(), name=f"conj({self.name})")

    def t_power(self, p: int) -> np.ndarray:
        if self._t_diag:
            return np.diag(self._t_entries ** p)
        if p >= 0:
            return np.linalg.matrix_power(self.t_matrix, p)
        return np.linalg.matrix_power(self.t_matrix.conj().T, -p)

    def evaluate_word(self, word: Word) -> np.ndarray:
        out = np.eye(self.dim, dtype=complex)
        for letter, p in word.blocks:
            if letter == "T":
                out = out @ self.t_power(p)
            else:
                m = self.s_matrix if p > 0 else self.s_matrix.conj().T
                for _ in range(abs(p)):
                    out = out @ m
        return out

    def __call__(self, gamma) -> np.ndarray:
        g = as_group_element(gamma)
        v = self._cache.get(g.entries)
        if v is None:
            v = self.evaluate_word(word_decompose(g))
            self._cache[g.entries] = v
        return v

    def relation_residuals(self) -> tuple[float, float]:
        """``||rho(S)^4 - 1||`` and ``||rho(ST)^3 - rho(S)^2||`` (max-abs norms)."""
        s, t = self.s_matrix, self.t_matrix
        st = s @ t
        r1 = np.abs(np.linalg.matrix_power(s, 4) - np.eye(self.dim)).max()
        r2 = np.abs(np.linalg.matrix_power(st, 3) - s @ s).max()
        return float(r1), float(r2)

    def is_representation(self, tol: float = 1e-9) -> bool:
        return max(self.relation_residuals()) < tol

    def to_json(self) -> dict:
        def enc(m):
            return [[[z.real, z.imag] for z in row] for row in m]
        return {"S": enc(self.s_matrix), "T": enc(self.t_matrix), "name": self.name}

    @classmethod
    def from_json(cls, obj) -> "UnitaryRep":
        def dec(rows):
            return np.array([[complex(*z) for z in row] for row in rows])
        return cls(dec(obj["S"]), dec(obj["T"]), obj.get("name", ""))


def weil_rep(m: int, chi2: MultiplierSystem | None = None, check: bool = True) -> UnitaryRep:
    """The 2m-dimensional representation attached to the theta expansion of index m.

    Index ``j`` stands for the characteristic ``a = j/(2m)``;
    ``rho(T) e_a = chi2(T) e(-m a^2) e_a`` and
    ``rho(S) e_a = chi2(S) i^(1/2) (2m)^(-1/2) sum_b e(2m a b) e_b``.
    Raises :class:`RelationError` when ``check`` is set and the relations fail.
    """
    if m < 1:
        raise ValueError("index must be positive")
    chi2 = chi2 or MultiplierSystem.eta(1)
    p = 2 * m
    j = np.arange(p)
    t = chi2.t_value * e(-(j ** 2) / (4 * m))
    kern = e(np.multiply.outer(j, j) / (2 * m))
    s = chi2.s_value * cmath.exp(1j * math.pi / 4) / math.sqrt(p) * kern
    rep = UnitaryRep(s, np.diag(t), name=f"weil(m={m})")
    if check:
        r = max(rep.relation_residuals())
        if r > 1e-9:
            raise RelationError(f"theta representation for m={m} is projective: residual {r:.2e}")
    return rep


@dataclass(frozen=True)
class KappaDiagonal:
    kappas: tuple[Fraction, ...]

    def __len__(self):
        return len(self.kappas)

    def __getitem__(self, j):
        return self.kappas[j]

    def as_floats(self) -> np.ndarray:
        return np.array([float(k) for k in self.kappas])


def _phase_fraction(z: complex, max_den: int = 10_000) -> Fraction:
    x = (cmath.phase(z) / (2 * math.pi)) % 1.0
    q = Fraction(x).limit_denominator(max_den)
    if abs(float(q) - x) > 1e-9:
        raise ValueError(f"phase {x} is not a rational with denominator <= {max_den}")
    return q % 1


def kappa_diag(chi: MultiplierSystem, rho: UnitaryRep, Q=T) -> KappaDiagonal:
    """Offsets kappa_j in [0,1) with ``chi(Q) rho(Q) = diag(e(kappa_j))``."""
    M = chi(Q) * rho(Q)
    off = M - np.diag(np.diag(M))
    if np.abs(off).max() > 1e-10:
        raise ValueError("chi(Q) rho(Q) is not diagonal")
    return KappaDiagonal(tuple(_phase_fraction(z) for z in np.diag(M)))
