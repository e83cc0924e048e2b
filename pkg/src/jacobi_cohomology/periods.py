"""Eichler integrals and period polynomials of vector-valued forms.

With ``c_{k+2} = -k! / (2 pi i)^(k+1)`` the holomorphic Eichler integral of a
cusp form ``f`` of weight ``k+2`` satisfies

    c_{k+2} E^H_f(tau) = int_tau^{i inf} f(z) (tau - z)^k dz,

and the period polynomial is ``r^H(f, gamma) = c_{k+2} (E^H - E^H|_{-k} gamma)``,
equivalently the integral of ``f(z) (tau - z)^k`` from ``gamma^-1 inf`` to
``i inf``.  Polynomials are recovered by interpolation through ``k+1`` nodes
``-1 + 2j/(k+1) + i`` and checked at one more.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cohomology import Cocycle, PolyVector
from .group import I, S, T, GroupElement, as_group_element, coset_reps, lower_row_window
from .multiplier import principal_power
from .numeric import (FourierSeries, contour_integrate, e, polyfit_exact_degree,
                      polyval_rows)
from .vvforms import TruncationWarning, VVForm, VVType


def c_const(k: int) -> complex:
    """``c_{k+2} = -k! / (2 pi i)^(k+1)``."""
    return -math.factorial(k) / (2j * math.pi) ** (k + 1)


def period_nodes(k: int, extra: int = 1) -> np.ndarray:
    """``k + 1 + extra`` interpolation nodes on the line Im = 1."""
    j = np.arange(k + 1 + extra)
    return -1 + 2 * j / (k + 1) + 1j


def _k_for(f: VVForm, k: int | None) -> int:
    kk = f.vtype.weight - 2
    if kk.denominator != 1 or kk < 0:
        raise ValueError("forms need integral weight k + 2 with k >= 0")
    if k is not None and k != int(kk):
        raise ValueError(f"k = {k} does not match weight {f.vtype.weight}")
    return int(kk)


def weight_minus_k(vtype: VVType, k: int) -> VVType:
    """Type ``(-k, chi, rho)`` in which period polynomials live."""
    return VVType(Fraction(-k), vtype.chi.at_weight(Fraction(-k)), vtype.rho)


@dataclass
class PeriodPolynomial:
    gamma: GroupElement
    coeffs: np.ndarray
    residual: float = 0.0
    ctx: VVType | None = field(default=None, compare=False)

    def __call__(self, tau):
        return polyval_rows(self.coeffs, tau)

    def poly_vector(self, ctx: VVType | None = None) -> PolyVector:
        return PolyVector(ctx or self.ctx, self.coeffs)

    def conj_coefficients(self) -> "PeriodPolynomial":
        ctx = None if self.ctx is None else self.ctx.conjugate()
        return PeriodPolynomial(self.gamma, self.coeffs.conj(), self.residual, ctx)

    def to_json(self) -> dict:
        return {"gamma": list(self.gamma.entries),
                "polys": [[[z.real, z.imag] for z in row] for row in self.coeffs],
                "residual": self.residual}

    @classmethod
    def from_json(cls, obj, ctx=None) -> "PeriodPolynomial":
        coeffs = np.array([[complex(*z) for z in row] for row in obj["polys"]], dtype=complex)
        return cls(GroupElement.from_seq(obj["gamma"]), coeffs, float(obj.get("residual", 0.0)), ctx)


# ----------------------------------------------------------------------------
# Eichler integrals
# ----------------------------------------------------------------------------


@dataclass
class EichlerIntegralSeries:
    """``E^H(tau) = sum a(n) (n+kappa)^-(k+1) e((n+kappa) tau) + c_f`` (zero frequencies dropped).

    ``min_height`` is the height at which the source coefficients were
    extracted; evaluating lower amplifies their noise.
    """

    vtype: VVType
    components: list[FourierSeries]
    cf: np.ndarray
    k: int
    min_height: float = 0.0

    def __call__(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=complex)
        if np.any(tau.imag < self.min_height - 1e-12):
            warnings.warn(f"Eichler series evaluated below its extraction height {self.min_height}",
                          TruncationWarning, stacklevel=2)
        out = np.stack([c(tau) for c in self.components], axis=-1)
        return out + self.cf

    def slash(self, gamma, tau) -> np.ndarray:
        """``(E^H|_{-k} gamma)(tau)`` for the weight ``-k`` slash of the same type."""
        g = as_group_element(gamma)
        tau = np.asarray(tau, dtype=complex)
        inv = np.linalg.inv(self.vtype.factor(g))
        jw = principal_power(g.j(tau), self.k)
        return jw[..., None] * (self(g.act(tau)) @ inv.T)


def eichler_holo(f: VVForm, k: int | None = None, c_f=None) -> EichlerIntegralSeries:
    """Termwise holomorphic Eichler integral of ``f``.

    A nonzero coefficient at frequency zero has no termwise antiderivative and
    raises ``ValueError``; its role is played by the constant ``c_f``.
    """
    k = _k_for(f, k)
    comps = []
    for comp in f.components:
        mu = (comp.ns + float(comp.kappa)) / float(comp.width)
        zero = mu == 0
        if zero.any() and np.abs(comp.coeffs[zero]).max() > 1e-12:
            raise ValueError("f has a nonzero constant term; its Eichler integral is not a q-series")
        keep = ~zero
        comps.append(FourierSeries(comp.width, comp.kappa, comp.ns[keep],
                                   comp.coeffs[keep] * mu[keep] ** (-(k + 1))))
    cf = np.zeros(f.dim, dtype=complex) if c_f is None else np.asarray(c_f, dtype=complex)
    ctx = weight_minus_k(f.vtype, k)
    return EichlerIntegralSeries(ctx, comps, cf, k, float(f.diagnostics.get("height", 0.0)))


def _coeff_bound(f: VVForm, principal: bool):
    """``(A, mu_min)`` with ``|f(z)| <= A exp(-2 pi mu_min Im z)`` above the fundamental domain."""
    A, mu_min = 0.0, math.inf
    for comp in f.components:
        mu = (comp.ns + float(comp.kappa)) / float(comp.width)
        keep = (mu > 0) if not principal else np.ones(len(mu), bool)
        keep &= comp.coeffs != 0
        if keep.any():
            A += float(np.abs(comp.coeffs[keep]).sum())
            mu_min = min(mu_min, float(mu[keep].min()))
    return max(A, 1e-300), mu_min


def _envelope(f: VVForm, gamma: GroupElement, kernel_at, principal=True):
    """Bound for ``|f(z) kernel(z)|`` near the cusp ``gamma^-1 inf``."""
    A, mu_min = _coeff_bound(f, principal)
    if not mu_min > 0:
        raise ValueError("integrand does not decay at the cusp")
    w = float(f.vtype.weight)

    def env(z):
        j = abs(gamma.c * z + gamma.d)
        Y = z.imag / j ** 2
        return A * math.exp(-2 * math.pi * mu_min * Y) * j ** (-w) * kernel_at(z)

    return env


def _abs_tol(integrand, a: complex, rtol: float) -> float:
    """Absolute tolerance ``rtol * max |integrand|`` probed on the vertical ray above ``a``."""
    probe = a.real + 1j * (max(a.imag, 0.05) + np.geomspace(1e-3, 300, 24))
    return rtol * max(float(np.abs(integrand(probe)).max()), 1e-300)


def eichler_holo_integral(f: VVForm, tau, k: int | None = None, tol: float = 1e-10) -> np.ndarray:
    """``c_{k+2} E^H(tau)`` as the vertical integral of ``(f - principal part)(z) (tau - z)^k``
    plus the principal part integrated termwise.  Frequency-zero terms must vanish."""
    k = _k_for(f, k)
    tau = np.atleast_1d(np.asarray(tau, dtype=complex))
    pp = f.principal_part()
    out = np.zeros((len(tau), f.dim), dtype=complex)
    ck = c_const(k)
    for i, t in enumerate(tau):
        env = _envelope(f, I, lambda z, t=t: (abs(t) + abs(z)) ** k, principal=False)
        integrand = lambda z, t=t: f(z, principal=False) * ((t - z) ** k)[:, None]
        out[i] = contour_integrate(integrand, [t, complex(t.real, math.inf)],
                                   tol=_abs_tol(integrand, t, tol), envelope=env)
        for j, terms in enumerate(pp):
            kap = float(f.components[j].kappa)
            for n, a in terms.items():
                mu = n + kap
                out[i, j] += ck * a * mu ** (-(k + 1)) * e(mu * t)
    return out


def eichler_nonholo(f: VVForm, tau, k: int | None = None, tol: float = 1e-10) -> np.ndarray:
    """``c_{k+2} E^N(tau) = conj( int_tau^{i inf} f(z) (conj(tau) - z)^k dz )`` for cusp ``f``."""
    k = _k_for(f, k)
    tau = np.atleast_1d(np.asarray(tau, dtype=complex))
    out = np.zeros((len(tau), f.dim), dtype=complex)
    for i, t in enumerate(tau):
        tb = t.conjugate()
        env = _envelope(f, I, lambda z: (abs(tb) + abs(z)) ** k)
        integrand = lambda z: f(z) * ((tb - z) ** k)[:, None]
        out[i] = contour_integrate(integrand, [t, complex(t.real, math.inf)],
                                   tol=_abs_tol(integrand, t, tol), envelope=env).conj()
    return out


# ----------------------------------------------------------------------------
# period polynomials
# ----------------------------------------------------------------------------


def _fit(gamma, values, nodes, k, ctx) -> PeriodPolynomial:
    coeffs, res = polyfit_exact_degree(nodes, values, k)
    return PeriodPolynomial(gamma, coeffs, float(res), ctx)


def period_hol(f: VVForm, gamma, k: int | None = None, tol: float = 1e-10) -> PeriodPolynomial:
    """``r^H(f, gamma)`` for a cusp form: integral from the cusp ``gamma^-1 inf`` to ``i inf``."""
    k = _k_for(f, k)
    g = as_group_element(gamma)
    ctx = weight_minus_k(f.vtype, k)
    if g.c == 0:
        return PeriodPolynomial(g, np.zeros((f.dim, k + 1), dtype=complex), 0.0, ctx)
    if f.principal_part() and any(f.principal_part()):
        raise ValueError("period_hol integrates cusp forms only; use period_hol_from_eichler")
    nodes = period_nodes(k)
    q = -g.d / g.c
    R = float(np.abs(nodes).max())
    # the two ends decay through different cusps; split the path at q + i
    env_cusp = _envelope(f, g, lambda z: (R + abs(z)) ** k)
    env_inf = _envelope(f, I, lambda z: (R + abs(z)) ** k)

    def integrand(z):
        return f(z)[:, None, :] * ((nodes[None, :] - z[:, None]) ** k)[:, :, None]

    atol = _abs_tol(integrand, complex(q, 0), tol)
    low = contour_integrate(integrand, [complex(q, 0), complex(q, 1)], tol=atol, envelope=env_cusp)
    high = contour_integrate(integrand, [complex(q, 1), complex(q, math.inf)], tol=atol,
                             envelope=env_inf)
    return _fit(g, low + high, nodes, k, ctx)


def period_hol_from_eichler(f: VVForm, gamma, k: int | None = None, c_f=None,
                            method: str = "auto", tol: float = 1e-10) -> PeriodPolynomial:
    """``c_{k+2} (E^H - E^H|_{-k} gamma)`` at the nodes, fitted.

    Works for weakly holomorphic ``f``.  ``method="series"`` uses the termwise
    integral (needs coefficients extracted at height <= 1/2 for the S-images
    of the nodes); ``"integral"`` uses :func:`eichler_holo_integral`;
    ``"auto"`` picks the series only when the extraction height allows it.
    """
    k = _k_for(f, k)
    g = as_group_element(gamma)
    ctx = weight_minus_k(f.vtype, k)
    nodes = period_nodes(k)
    gn = g.act(nodes)
    inv = np.linalg.inv(ctx.factor(g))
    jw = principal_power(g.j(nodes), k)
    ck = c_const(k)
    if method == "auto":
        low = float(np.min(gn.imag))
        method = "series" if f.diagnostics.get("height", 0.0) <= low else "integral"
    if method == "series":
        E = eichler_holo(f, k, c_f)
        here, there = ck * E(nodes), ck * E(gn)
    elif method == "integral":
        cf = 0 if c_f is None else ck * np.asarray(c_f)
        here = eichler_holo_integral(f, nodes, k, tol) + cf
        there = eichler_holo_integral(f, gn, k, tol) + cf
    else:
        raise ValueError("method must be 'series' or 'integral'")
    vals = here - jw[:, None] * (there @ inv.T)
    return _fit(g, vals, nodes, k, ctx)


def period_nonhol(f: VVForm, gamma, k: int | None = None, tol: float = 1e-10) -> PeriodPolynomial:
    """``r^N(f, gamma) = c_{k+2} (E^N - E^N|_{-k, conj chi, conj rho} gamma)``."""
    k = _k_for(f, k)
    g = as_group_element(gamma)
    ctx = weight_minus_k(f.vtype, k).conjugate()
    if g.c == 0:
        return PeriodPolynomial(g, np.zeros((f.dim, k + 1), dtype=complex), 0.0, ctx)
    nodes = period_nodes(k)
    gn = g.act(nodes)
    inv = np.linalg.inv(ctx.factor(g))
    jw = principal_power(g.j(nodes), k)
    vals = eichler_nonholo(f, nodes, k, tol) - jw[:, None] * (eichler_nonholo(f, gn, k, tol) @ inv.T)
    return _fit(g, vals, nodes, k, ctx)


def period_cocycle(f: VVForm, k: int | None = None, via: str = "integral", c_f=None,
                   tol: float = 1e-10) -> Cocycle:
    """Cocycle ``gamma -> r^H(f, gamma)`` from its values on S and T."""
    k = _k_for(f, k)
    if via == "integral":
        rs, rt = period_hol(f, S, k, tol), period_hol(f, T, k, tol)
    else:
        rs = period_hol_from_eichler(f, S, k, c_f, method=via, tol=tol)
        rt = period_hol_from_eichler(f, T, k, c_f, method=via, tol=tol)
    return Cocycle(weight_minus_k(f.vtype, k), rs.coeffs, rt.coeffs)


# ----------------------------------------------------------------------------
# Poincare series attached to a cocycle
# ----------------------------------------------------------------------------


def gen_poincare_eval(cocycle: Cocycle, r: int, tau, C: int = 100) -> np.ndarray:
    """``sum_V g_V(tau) (c tau + d)^-r`` over lower rows ``V = (c, d)``, ``|c|, |d| <= C``.

    Needs ``g_T = 0``; then ``g_{h T^t}(tau) = (chi rho)(T)^-t g_h(tau + t)``,
    so one cocycle value per coset representative and sign suffices.
    """
    if np.abs(cocycle.t_value).max(initial=0) > 1e-12 * max(1.0, np.abs(cocycle.s_value).max()):
        raise ValueError("the cocycle must vanish on T")
    tau = np.atleast_1d(np.asarray(tau, dtype=complex))
    tdiag = np.diag(cocycle.ctx.factor(T))
    if np.abs(cocycle.ctx.factor(T) - np.diag(tdiag)).max() > 1e-12:
        raise ValueError("chi rho(T) must be diagonal")
    log_t = np.angle(tdiag) / (2 * np.pi)
    out = np.zeros(tau.shape + (cocycle.ctx.dim,), dtype=complex)
    # V = (0, +-1): g_I = 0
    out += cocycle.evaluate(-I)(tau) * (-1.0) ** r
    for h in coset_reps(C)[1:]:
        ts = lower_row_window(h, C)
        x = tau[..., None] + ts  # (..., nt)
        for hh in (h, -h):
            G = cocycle.evaluate(hh).coeffs
            vals = polyval_rows(G, x)  # (..., nt, p)
            vals = vals * e(-np.outer(ts, log_t))
            den = (hh.c * x + hh.d) ** (-r)
            out += np.einsum("...t,...tp->...p", den, vals)
    return out


__all__ = ["c_const", "period_nodes", "PeriodPolynomial", "EichlerIntegralSeries", "eichler_holo",
           "eichler_holo_integral", "eichler_nonholo", "period_hol", "period_hol_from_eichler",
           "period_nonhol", "period_cocycle", "gen_poincare_eval", "weight_minus_k"]
