"""Polynomial coefficient modules, cocycles on the generators S and T,
coboundary solving, parabolicity, and the theta lift to the Jacobi group.

A slash context is a :class:`VVType` of weight ``-k``.  Polynomials are stored
as coefficient arrays of shape ``(p, k+1)`` in ascending powers; the weight
``-k`` slash acts on the flattened array (component-major) by
``kron((chi rho)(gamma)^-1, M(gamma))`` with ``M`` from :func:`mobius_matrix`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .group import (I, S, T, GroupElement, JacobiElement, Word, as_group_element,
                    word_decompose)
from .multiplier import MultiplierSystem, RelationError, weil_rep
from .numeric import mobius_matrix, polyfit_exact_degree, polyval_rows
from .theta import ConditioningError, theta_decompose, theta_expand_eval
from .vvforms import VVType

RELATION_WORDS = (Word.parse("S S S S"), Word.parse("S T S T S T S^-1 S^-1"))


def _k_of(ctx: VVType) -> int:
    w = ctx.weight
    if w.denominator != 1 or w > 0:
        raise ValueError("polynomial modules need weight -k with k a non-negative integer")
    return int(-w)


def slash_matrix(ctx: VVType, gamma) -> np.ndarray:
    """Matrix of the weight ``-k`` slash by ``gamma`` on flattened coefficients."""
    g = as_group_element(gamma)
    k = _k_of(ctx)
    inv = np.linalg.inv(ctx.factor(g))
    return np.kron(inv, mobius_matrix(g, k))


# ----------------------------------------------------------------------------
# P_k and P^e_{k,m}
# ----------------------------------------------------------------------------


@dataclass
class PolyVector:
    """Element of ``P_k``: ``p`` polynomials of degree ``<= k``."""

    ctx: VVType
    coeffs: np.ndarray

    def __post_init__(self):
        k = _k_of(self.ctx)
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c.reshape(self.ctx.dim, -1)
        if c.shape[0] != self.ctx.dim:
            raise ValueError("wrong number of components")
        if c.shape[1] > k + 1:
            if np.abs(c[:, k + 1:]).max() > 0:
                raise ValueError(f"degree exceeds k = {k}")
            c = c[:, :k + 1]
        elif c.shape[1] < k + 1:
            c = np.pad(c, ((0, 0), (0, k + 1 - c.shape[1])))
        self.coeffs = c

    @property
    def k(self) -> int:
        return _k_of(self.ctx)

    @classmethod
    def zero(cls, ctx: VVType) -> "PolyVector":
        return cls(ctx, np.zeros((ctx.dim, _k_of(ctx) + 1), dtype=complex))

    @classmethod
    def from_flat(cls, ctx: VVType, v) -> "PolyVector":
        return cls(ctx, np.asarray(v, dtype=complex).reshape(ctx.dim, _k_of(ctx) + 1))

    def flat(self) -> np.ndarray:
        return self.coeffs.ravel().copy()

    def __call__(self, tau) -> np.ndarray:
        return polyval_rows(self.coeffs, tau)

    def slash(self, gamma) -> "PolyVector":
        return PolyVector.from_flat(self.ctx, slash_matrix(self.ctx, gamma) @ self.flat())

    def __add__(self, o: "PolyVector") -> "PolyVector":
        return PolyVector(self.ctx, self.coeffs + o.coeffs)

    def __sub__(self, o: "PolyVector") -> "PolyVector":
        return PolyVector(self.ctx, self.coeffs - o.coeffs)

    def __neg__(self):
        return PolyVector(self.ctx, -self.coeffs)

    def __mul__(self, s) -> "PolyVector":
        return PolyVector(self.ctx, self.coeffs * complex(s))

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.abs(self.coeffs).max()) if self.coeffs.size else 0.0

    def conj_coefficients(self, ctx: VVType | None = None) -> "PolyVector":
        """``conj(p(conj tau))``: conjugate every coefficient (context defaults to the conjugate type)."""
        return PolyVector(ctx or self.ctx.conjugate(), self.coeffs.conj())

    def to_json(self) -> list:
        return [[[z.real, z.imag] for z in row] for row in self.coeffs]

    @classmethod
    def from_json(cls, ctx: VVType, rows) -> "PolyVector":
        return cls(ctx, np.array([[complex(*z) for z in row] for row in rows], dtype=complex))


@dataclass(frozen=True)
class JacobiContext:
    """Index ``m``, degree bound ``k`` and Jacobi multiplier ``chi`` for ``P^e_{k,m}``.

    ``chi`` may be given at any weight congruent to ``1/2`` mod 1; the slash
    weight is ``-k + 1/2``.
    """

    k: int
    m: int
    chi: MultiplierSystem
    chi2: MultiplierSystem = field(default_factory=lambda: MultiplierSystem.eta(1))

    @cached_property
    def vv(self) -> VVType:
        """``(-k, chi', rho')`` governing the theta components."""
        w = Fraction(-self.k)
        chi_p = (self.chi.at_weight(self.weight) * self.chi2.conjugate()).at_weight(w)
        return VVType(w, chi_p, weil_rep(self.m, self.chi2))

    @property
    def weight(self) -> Fraction:
        return Fraction(-self.k) + Fraction(1, 2)


@dataclass
class JacobiPolyVector:
    """Element ``sum_a g_a(tau) theta_{2m,a,0}(tau, z)`` of ``P^e_{k,m}``."""

    jctx: JacobiContext
    poly: PolyVector

    @classmethod
    def zero(cls, jctx: JacobiContext) -> "JacobiPolyVector":
        return cls(jctx, PolyVector.zero(jctx.vv))

    @property
    def coeffs(self) -> np.ndarray:
        return self.poly.coeffs

    def flat(self) -> np.ndarray:
        return self.poly.flat()

    def __call__(self, tau, z):
        tau = np.asarray(tau, dtype=complex)
        return theta_expand_eval(self.jctx.m, tau, z, values=self.poly(tau))

    def slash(self, g) -> "JacobiPolyVector":
        """Slash by ``(gamma, X)``: lattice translations act trivially on ``P^e``."""
        gam = g.gamma if isinstance(g, JacobiElement) else as_group_element(g)
        return JacobiPolyVector(self.jctx, self.poly.slash(gam))

    def heat_power(self, order: int) -> "JacobiPolyVector":
        """``L_m^order`` via ``(8 pi i m)^order (d/dtau)^order`` on components."""
        k = self.poly.k
        c = self.coeffs.copy()
        for _ in range(order):
            c = np.concatenate([c[:, 1:] * np.arange(1, k + 1), np.zeros((len(c), 1))], axis=1)
        c = c * (8j * np.pi * self.jctx.m) ** order
        return JacobiPolyVector(self.jctx, PolyVector(self.poly.ctx, c))

    def __add__(self, o):
        return JacobiPolyVector(self.jctx, self.poly + o.poly)

    def __sub__(self, o):
        return JacobiPolyVector(self.jctx, self.poly - o.poly)

    def __mul__(self, s):
        return JacobiPolyVector(self.jctx, self.poly * s)

    __rmul__ = __mul__

    def norm(self) -> float:
        return self.poly.norm()


# ----------------------------------------------------------------------------
# cocycles
# ----------------------------------------------------------------------------


def _as_flat(v) -> np.ndarray:
    if isinstance(v, (PolyVector, JacobiPolyVector)):
        return v.flat()
    return np.asarray(v, dtype=complex).ravel().copy()


@dataclass
class Cocycle:
    """A 1-cocycle given by its values on S and T.

    ``kind`` is ``"vv"`` (values in ``P_k``) or ``"jacobi"`` (values in
    ``P^e_{k,m}``; lattice translations carry the value 0).
    """

    ctx: VVType
    s_value: np.ndarray
    t_value: np.ndarray
    kind: str = "vv"
    jctx: JacobiContext | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = self.ctx.dim * (_k_of(self.ctx) + 1)
        self.s_value = _as_flat(self.s_value)
        self.t_value = _as_flat(self.t_value)
        if self.s_value.shape != (n,) or self.t_value.shape != (n,):
            raise ValueError("cocycle values have the wrong size")
        if self.kind not in ("vv", "jacobi"):
            raise ValueError("kind must be 'vv' or 'jacobi'")
        if self.kind == "jacobi" and self.jctx is None:
            raise ValueError("jacobi cocycles need a JacobiContext")

    @property
    def k(self) -> int:
        return _k_of(self.ctx)

    @classmethod
    def zero(cls, ctx: VVType, kind="vv", jctx=None) -> "Cocycle":
        n = ctx.dim * (_k_of(ctx) + 1)
        return cls(ctx, np.zeros(n), np.zeros(n), kind, jctx)

    @classmethod
    def coboundary(cls, p: PolyVector) -> "Cocycle":
        """``gamma -> p|gamma - p``."""
        return cls(p.ctx, (p.slash(S) - p).flat(), (p.slash(T) - p).flat())

    @cached_property
    def _mats(self):
        A_S = slash_matrix(self.ctx, S)
        A_Si = slash_matrix(self.ctx, S.inverse())
        return A_S, A_Si

    def _t_block(self, p: int):
        """``(value on T^p, slash matrix of T^p)``."""
        hit = self._cache.get(("T", p))
        if hit is not None:
            return hit
        A = slash_matrix(self.ctx, GroupElement(1, p, 0, 1))
        if p == 0:
            v = np.zeros_like(self.t_value)
        elif p > 0:
            v, B = np.zeros_like(self.t_value), np.eye(len(self.t_value))
            A1 = slash_matrix(self.ctx, T)
            for _ in range(p):  # c(T^p) = sum_i c_T | T^i
                v = v + B @ self.t_value
                B = A1 @ B
        else:
            vp, _ = self._t_block(-p)
            v = -(A @ vp)  # c(T^-p) = -c(T^p)|T^-p
        self._cache[("T", p)] = (v, A)
        return v, A

    def evaluate_word(self, word: Word) -> np.ndarray:
        """Accumulate ``c(g t) = c(t) + c(g)|t`` along the word."""
        A_S, A_Si = self._mats
        s_inv = -(A_Si @ self.s_value)  # c(S^-1) = -c(S)|S^-1
        v = np.zeros_like(self.s_value)
        for letter, p in word.blocks:
            if letter == "T":
                ct, A = self._t_block(p)
                v = ct + A @ v
                continue
            ct, A = (self.s_value, A_S) if p > 0 else (s_inv, A_Si)
            for _ in range(abs(p)):
                v = ct + A @ v
        return v

    def evaluate(self, g):
        """Value on ``gamma`` or ``(gamma, X)`` as a PolyVector / JacobiPolyVector."""
        gam = g.gamma if isinstance(g, JacobiElement) else as_group_element(g)
        key = gam.entries
        v = self._cache.get(key)
        if v is None:
            v = self.evaluate_word(word_decompose(gam))
            self._cache[key] = v
        pv = PolyVector.from_flat(self.ctx, v)
        return JacobiPolyVector(self.jctx, pv) if self.kind == "jacobi" else pv

    def relation_residual(self) -> float:
        """Max-abs value on the relation words relative to the generator values."""
        scale = max(np.abs(self.s_value).max(initial=0), np.abs(self.t_value).max(initial=0))
        scale = scale if scale > 0 else 1.0
        return max(float(np.abs(self.evaluate_word(w)).max()) for w in RELATION_WORDS) / scale

    def check_relations(self, tol: float = 1e-8) -> None:
        r = self.relation_residual()
        if r > tol:
            raise RelationError(f"cocycle violates the group relations: residual {r:.2e}")

    def __add__(self, o: "Cocycle") -> "Cocycle":
        return Cocycle(self.ctx, self.s_value + o.s_value, self.t_value + o.t_value,
                       self.kind, self.jctx)

    def __mul__(self, s) -> "Cocycle":
        return Cocycle(self.ctx, self.s_value * s, self.t_value * s, self.kind, self.jctx)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        ctx = {"k": self.k, "type": self.ctx.to_json()}
        if self.jctx is not None:
            ctx.update({"m": self.jctx.m, "multiplier": self.jctx.chi.to_json()})
        return {"kind": self.kind, "context": ctx,
                "S": PolyVector.from_flat(self.ctx, self.s_value).to_json(),
                "T": PolyVector.from_flat(self.ctx, self.t_value).to_json()}

    @classmethod
    def from_json(cls, obj) -> "Cocycle":
        if isinstance(obj, str):
            obj = json.loads(obj)
        c = obj["context"]
        ctx = VVType.from_json(c["type"])
        jctx = None
        if obj.get("kind", "vv") == "jacobi":
            jctx = JacobiContext(int(c["k"]), int(c["m"]), MultiplierSystem.from_json(c["multiplier"]))
        return cls(ctx, PolyVector.from_json(ctx, obj["S"]).flat(),
                   PolyVector.from_json(ctx, obj["T"]).flat(), obj.get("kind", "vv"), jctx)


def cocycle_extend(c: Cocycle, g):
    return c.evaluate(g)


# ----------------------------------------------------------------------------
# coboundaries and parabolicity
# ----------------------------------------------------------------------------


@dataclass
class CohomologyClassReport:
    is_coboundary: bool
    witness: PolyVector | None
    residual: float
    kernel_dim: int
    is_parabolic: bool
    parabolic_witness: PolyVector | None
    parabolic_residual: float

    def to_json(self) -> dict:
        return {"is_coboundary": self.is_coboundary, "residual": self.residual,
                "kernel_dim": self.kernel_dim, "is_parabolic": self.is_parabolic,
                "parabolic_residual": self.parabolic_residual,
                "witness": None if self.witness is None else self.witness.to_json(),
                "parabolic_witness": None if self.parabolic_witness is None
                else self.parabolic_witness.to_json()}


def _lstsq(A, b, rcond=1e-10):
    nb = float(np.linalg.norm(b))
    if nb == 0:
        return np.zeros(A.shape[1], dtype=complex), 0.0, A
    x, *_ = np.linalg.lstsq(A, b, rcond=rcond)
    return x, float(np.linalg.norm(A @ x - b) / nb), A


def parabolic_check(c: Cocycle, tol: float = 1e-6):
    """Solve ``Q|T - Q = c_T``; returns ``(is_parabolic, witness, relative residual)``."""
    n = len(c.t_value)
    A = slash_matrix(c.ctx, T) - np.eye(n)
    x, res, _ = _lstsq(A, c.t_value)
    return res < tol, PolyVector.from_flat(c.ctx, x), res


def coboundary_solve(c: Cocycle, tol: float = 1e-6) -> CohomologyClassReport:
    """Least-squares solve of ``p|S - p = c_S``, ``p|T - p = c_T``.

    The residual is relative to the size of ``(c_S, c_T)``; ``kernel_dim``
    counts slash-invariant polynomial vectors (singular values below 1e-10 of
    the largest), which make the witness non-unique.
    """
    n = len(c.s_value)
    A = np.vstack([slash_matrix(c.ctx, S) - np.eye(n), slash_matrix(c.ctx, T) - np.eye(n)])
    b = np.concatenate([c.s_value, c.t_value])
    x, res, _ = _lstsq(A, b)
    sv = np.linalg.svd(A, compute_uv=False)
    kernel = int(np.sum(sv < 1e-10 * max(sv.max(), 1e-300))) + max(0, n - len(sv))
    par, Q, pres = parabolic_check(c, tol)
    ok = res < tol
    return CohomologyClassReport(ok, PolyVector.from_flat(c.ctx, x) if ok else None, res, kernel,
                                 par, Q if par else None, pres)


# ----------------------------------------------------------------------------
# Jacobi side
# ----------------------------------------------------------------------------


def _same_type(a: VVType, b: VVType, tol=1e-12) -> bool:
    return (a.weight == b.weight and a.dim == b.dim
            and abs(a.chi.s_value - b.chi.s_value) < tol and abs(a.chi.t_value - b.chi.t_value) < tol
            and np.abs(a.rho.s_matrix - b.rho.s_matrix).max() < tol
            and np.abs(a.rho.t_matrix - b.rho.t_matrix).max() < tol)


def lift_vv_cocycle(c: Cocycle, jctx: JacobiContext) -> Cocycle:
    """Jacobi cocycle whose theta components are the components of ``c``."""
    if c.kind != "vv":
        raise ValueError("expected a vector-valued cocycle")
    if c.k != jctx.k or not _same_type(c.ctx, jctx.vv):
        raise ValueError("cocycle context does not match (-k, chi', rho') for this index")
    return Cocycle(jctx.vv, c.s_value.copy(), c.t_value.copy(), "jacobi", jctx)


def pe_membership(g, jctx: JacobiContext, taus=None, tol: float = 1e-6):
    """Decide whether ``g(tau, z)`` lies in ``P^e_{k,m}``.

    Theta components are extracted at ``k+2`` values of tau and fitted by
    polynomials of degree ``<= k`` through the first ``k+1``; the last one is
    held out.  Returns ``(member, JacobiPolyVector or None, residual)``.
    """
    k, m = jctx.k, jctx.m
    if taus is None:
        taus = -1 + 2 * np.arange(k + 2) / (k + 1) + 1j
    taus = np.asarray(taus, dtype=complex)
    vals = []
    for t in taus:
        f, _ = theta_decompose(g, m, t)
        vals.append(f)
    coeffs, res = polyfit_exact_degree(taus, np.array(vals), k)
    if res >= tol:
        return False, None, res
    return True, JacobiPolyVector(jctx, PolyVector(jctx.vv, coeffs)), res



# ----------------------------------------------------------------------------
# the map from (Jacobi cusp form, skew cusp form) pairs to cocycles
# ----------------------------------------------------------------------------


def _jctx_of(J) -> JacobiContext:
    k = J.weight - Fraction(5, 2)
    if k.denominator != 1 or k < 0:
        raise ValueError("Jacobi data must have weight k + 2 + 1/2 with integer k >= 0")
    return JacobiContext(int(k), J.m, J.chi, J.chi2)


def beta_cocycle(Phi, jctx: JacobiContext | None = None) -> Cocycle:
    """Period cocycle of the vector-valued form attached to a holomorphic Jacobi cusp form."""
    from .periods import period_cocycle

    if Phi.skew:
        raise ValueError("beta needs holomorphic Jacobi data")
    jctx = jctx or _jctx_of(Phi)
    return lift_vv_cocycle(period_cocycle(Phi.vv_form("cusp"), jctx.k), jctx)


def alpha_cocycle(Psi, jctx: JacobiContext | None = None, conjugate_alpha: bool = False,
                  n_max: int = 12) -> Cocycle:
    """Holomorphic period cocycle of ``g*`` for a skew cusp form built from Poincare data.

    The components ``g`` of ``Psi`` have the conjugate type, so ``g*`` and its
    periods already have type ``(-k, chi', rho')``.  ``conjugate_alpha=True``
    additionally conjugates the polynomial coefficients, which lands in the
    conjugate type; it is kept to exhibit that the relations then fail.
    """
    from .periods import period_hol_from_eichler
    from .vvforms import cf_constant, poincare_fourier, supplementary_data

    if not Psi.skew:
        raise ValueError("alpha needs skew-holomorphic Jacobi data")
    if not Psi.poincare:
        raise ValueError("the skew form must be given as a Poincare combination to build g*")
    jctx = jctx or _jctx_of(Psi)
    gtype = Psi.vv_type()
    star = supplementary_data(Psi.poincare, gtype.kappa)
    fstar = poincare_fourier(star, gtype.conjugate(), C=Psi.poincare_C, n_max=n_max)
    cf = cf_constant(fstar, C=Psi.poincare_C)
    rs = period_hol_from_eichler(fstar, S, jctx.k, cf)
    rt = period_hol_from_eichler(fstar, T, jctx.k, cf)
    sv, tv = rs.coeffs, rt.coeffs
    if conjugate_alpha:
        sv, tv = sv.conj(), tv.conj()
    return Cocycle(jctx.vv, sv, tv, "jacobi", jctx)


def eta_map(Phi=None, Psi=None, conjugate_alpha: bool = False, jctx: JacobiContext | None = None,
            n_max: int = 12) -> Cocycle:
    """Sum of the beta cocycle of ``Phi`` and the alpha cocycle of ``Psi`` (either may be None)."""
    if jctx is None:
        if Phi is None and Psi is None:
            raise ValueError("need a JacobiContext when both inputs are absent")
        jctx = _jctx_of(Phi if Phi is not None else Psi)
    out = Cocycle.zero(jctx.vv, "jacobi", jctx)
    if Phi is not None:
        out = out + beta_cocycle(Phi, jctx)
    if Psi is not None:
        out = out + alpha_cocycle(Psi, jctx, conjugate_alpha, n_max)
    return out


__all__ = ["PolyVector", "JacobiPolyVector", "JacobiContext", "Cocycle", "CohomologyClassReport",
           "slash_matrix", "cocycle_extend", "coboundary_solve", "parabolic_check",
           "lift_vv_cocycle", "pe_membership", "ConditioningError", "RELATION_WORDS",
           "beta_cocycle", "alpha_cocycle", "eta_map"]
