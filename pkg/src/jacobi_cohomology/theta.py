"""Theta series, the heat operator, Jacobi and skew-holomorphic slash operators,
and the theta expansion.

Index ``j`` of a theta component stands for the characteristic ``a = j/(2m)``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .group import JacobiElement, as_group_element, jacobi_act
from .multiplier import MultiplierSystem, principal_power, weil_rep
from .numeric import FourierSeries, e, fraction_str, parse_fraction
from .vvforms import PoincareSpec, VVForm, VVType, poincare_fourier

_LOG_EPS = 37.0  # -log(1e-16)


@dataclass(frozen=True)
class ThetaSeries:
    """``theta_{S,a,b}(tau, z) = sum_l e(S((l+a)^2 tau + 2 (l+a)(z+b)) / 2)``."""

    S: int
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        if int(self.S) < 1:
            raise ValueError("S must be a positive integer")
        object.__setattr__(self, "S", int(self.S))
        object.__setattr__(self, "a", parse_fraction(self.a))
        object.__setattr__(self, "b", parse_fraction(self.b))

    @classmethod
    def component(cls, m: int, j: int) -> "ThetaSeries":
        """``theta_{2m, j/(2m), 0}``."""
        return cls(2 * m, Fraction(j % (2 * m), 2 * m), Fraction(0))

    def __call__(self, tau, z):
        return theta_eval(self, tau, z)


def theta_eval(th: ThetaSeries, tau, z, derivs: tuple[int, int] = (0, 0)):
    """Truncated theta sum; terms below 1e-16 of the largest are dropped.

    ``derivs = (p, q)`` returns ``d^p/dtau^p d^q/dz^q`` of the series instead
    (termwise).
    """
    tau, z = np.broadcast_arrays(np.asarray(tau, dtype=complex), np.asarray(z, dtype=complex))
    shape = tau.shape
    tau, z = tau.ravel(), z.ravel()
    y = tau.imag
    if np.any(y <= 0):
        raise ValueError("theta needs Im(tau) > 0")
    S, a, b = th.S, float(th.a), float(th.b)
    center = np.rint(-z.imag / y - a)
    L = int(math.ceil(math.sqrt(_LOG_EPS / (math.pi * S * y.min())))) + 1
    ks = np.arange(-L, L + 1)
    x = center[:, None] + ks[None, :] + a  # lambda + a
    arg = 1j * math.pi * S * (x ** 2 * tau[:, None] + 2 * x * (z[:, None] + b))
    terms = np.exp(arg)
    p, q = derivs
    if p or q:
        terms = terms * (1j * math.pi * S * x ** 2) ** p * (2j * math.pi * S * x) ** q
    return terms.sum(axis=1).reshape(shape)


def theta_vector(m: int, tau, z) -> np.ndarray:
    """All ``2m`` components ``theta_{2m, a, 0}(tau, z)`` stacked on the last axis."""
    return np.stack([theta_eval(ThetaSeries.component(m, j), tau, z) for j in range(2 * m)],
                    axis=-1)


# ----------------------------------------------------------------------------
# heat operator
# ----------------------------------------------------------------------------


class StepSizeWarning(UserWarning):
    """Richardson comparison indicates an unreliable finite-difference step."""


@dataclass(frozen=True)
class HeatResult:
    value: complex
    tau_part: complex  # 8 pi i m d/dtau
    z_part: complex  # d^2/dz^2
    error: float  # Richardson error estimate

    @property
    def scale(self) -> float:
        return abs(self.tau_part) + abs(self.z_part)


def _heat_fd(phi, m, tau, z, h):
    dt = (phi(tau + h, z) - phi(tau - h, z)) / (2 * h)
    dzz = (phi(tau, z + h) - 2 * phi(tau, z) + phi(tau, z - h)) / h ** 2
    return 8j * math.pi * m * dt, dzz


def heat_apply_fd(phi, m: int, tau: complex, z: complex, h: float = 1e-3,
                  rtol: float = 1e-6) -> HeatResult:
    """Finite-difference ``(8 pi i m d/dtau - d^2/dz^2) phi`` with one Richardson step.

    Central differences at ``h`` and ``h/2`` are combined to cancel the
    ``h^2`` term; their discrepancy estimates the error.  A
    :class:`StepSizeWarning` is issued when it exceeds ``rtol`` times the scale
    ``|8 pi i m phi_tau| + |phi_zz|``.
    """
    t1, z1 = _heat_fd(phi, m, tau, z, h)
    t2, z2 = _heat_fd(phi, m, tau, z, h / 2)
    tr = (4 * t2 - t1) / 3
    zr = (4 * z2 - z1) / 3
    err = abs((t2 - z2) - (tr - zr)) / 15  # error of the extrapolant, O(h^4)
    res = HeatResult(complex(tr - zr), complex(tr), complex(zr), float(err))
    if res.error > rtol * max(res.scale, 1e-300):
        warnings.warn(f"heat operator: Richardson error {res.error:.2e} vs scale {res.scale:.2e}",
                      StepSizeWarning, stacklevel=2)
    return res


def heat_power_components(g, order: int):
    """Apply ``L_m^order`` through the theta components: ``(8 pi i m)^order (d/dtau)^order``.

    Works on :class:`JacobiFormData` (termwise on Fourier series) and on any
    object providing ``heat_power(order)`` (e.g. polynomial theta vectors).
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    if isinstance(g, JacobiFormData):
        if g.skew:
            # theta components of skew forms are antiholomorphic in tau
            raise ValueError("heat powers are taken on holomorphic theta data")
        fac = (8j * math.pi * g.m) ** order
        comps = [c.derivative(order).scale(fac) for c in g.components]
        return JacobiFormData(g.weight + 2 * order, g.m, g.chi, False, comps, g.chi2)
    if hasattr(g, "heat_power"):
        return g.heat_power(order)
    raise TypeError(f"cannot apply the heat operator to {type(g).__name__}")


# ----------------------------------------------------------------------------
# slash operators
# ----------------------------------------------------------------------------


def _as_jacobi(g) -> JacobiElement:
    if isinstance(g, JacobiElement):
        return g
    return JacobiElement(as_group_element(g))


def _chi_at(chi: MultiplierSystem, k) -> MultiplierSystem:
    k = parse_fraction(k)
    return chi if chi.weight == k else chi.at_weight(k)


def _index_factor(m, g: JacobiElement, tau, z):
    gam = g.gamma
    lam, mu = g.lam, g.mu
    zz = z + lam * tau + mu
    return e(m * (-gam.c * zz ** 2 / gam.j(tau) + lam ** 2 * tau + 2 * lam * z + mu * lam))


def jacobi_slash_eval(Phi, g, k, m: int, chi: MultiplierSystem, tau, z):
    """``(Phi |_{k,m,chi} gamma |_m X)(tau, z)``."""
    g = _as_jacobi(g)
    chi = _chi_at(chi, k)
    tau, z = np.asarray(tau, dtype=complex), np.asarray(z, dtype=complex)
    t2, z2 = jacobi_act(g, tau, z)
    fac = principal_power(g.gamma.j(tau), -parse_fraction(k)) * np.conj(chi(g.gamma))
    return fac * _index_factor(m, g, tau, z) * Phi(t2, z2)


def skew_slash_eval(phi, g, k, m: int, chi: MultiplierSystem, tau, z):
    """Skew-holomorphic slash with automorphy factor ``(c conj(tau) + d)^(1-k) |c tau + d|^-1``.

    The power of ``c conj(tau) + d`` is taken as the conjugate of the
    principal power of ``c tau + d``; the two agree unless ``c tau + d`` is a
    negative real, where only the former gives a group action.
    """
    g = _as_jacobi(g)
    chi = _chi_at(chi, k)
    tau, z = np.asarray(tau, dtype=complex), np.asarray(z, dtype=complex)
    t2, z2 = jacobi_act(g, tau, z)
    j = g.gamma.j(tau)
    fac = np.conj(principal_power(j, 1 - parse_fraction(k))) / np.abs(j) * np.conj(chi(g.gamma))
    return fac * _index_factor(m, g, tau, z) * phi(t2, z2)


# ----------------------------------------------------------------------------
# theta expansion
# ----------------------------------------------------------------------------


@dataclass
class JacobiFormData:
    """A (skew-)holomorphic Jacobi form through its ``2m`` theta components.

    For skew forms the components are stored conjugated, so in both cases they
    form a vector-valued form (see :meth:`vv_type`).
    """

    weight: Fraction
    m: int
    chi: MultiplierSystem
    skew: bool
    components: list[FourierSeries]
    chi2: MultiplierSystem = field(default_factory=lambda: MultiplierSystem.eta(1))
    poincare: tuple | None = None  # PoincareSpec data the components were built from
    poincare_C: int = 200

    def __post_init__(self):
        self.weight = parse_fraction(self.weight)
        if self.m < 1:
            raise ValueError("index must be positive")
        if len(self.components) != 2 * self.m:
            raise ValueError("need exactly 2m theta components")
        self.chi = _chi_at(self.chi, self.weight)

    def vv_type(self) -> VVType:
        """``(weight - 1/2, chi', rho')`` or its conjugate for skew forms."""
        w = self.weight - Fraction(1, 2)
        chi_p = (self.chi * self.chi2.conjugate()).at_weight(w)
        vt = VVType(w, chi_p, weil_rep(self.m, self.chi2))
        return vt.conjugate() if self.skew else vt

    def vv_form(self, kind: str = "cusp") -> VVForm:
        return VVForm(self.vv_type(), list(self.components), kind)

    @classmethod
    def from_poincare(cls, weight, m: int, chi: MultiplierSystem, specs, skew: bool = False,
                      C: int = 200, n_max: int = 12) -> "JacobiFormData":
        """Cusp data whose theta components (conjugated if skew) are ``sum b P_{n, alpha}``."""
        specs = tuple([specs] if isinstance(specs, PoincareSpec) else specs)
        proto = cls(weight, m, chi, skew, [FourierSeries() for _ in range(2 * m)])
        vt = proto.vv_type()
        comps = poincare_fourier(specs, vt, C=C, n_max=n_max).components
        return cls(proto.weight, m, proto.chi, skew, comps, proto.chi2, specs, C)

    @classmethod
    def from_vv(cls, f: VVForm, weight, m: int, chi: MultiplierSystem, skew: bool = False,
                chi2: MultiplierSystem | None = None) -> "JacobiFormData":
        return cls(weight, m, chi, skew, list(f.components), chi2 or MultiplierSystem.eta(1))

    def component_values(self, tau) -> np.ndarray:
        """``f_a(tau)`` (un-conjugated for skew forms), shape ``(..., 2m)``."""
        vals = self.vv_form()(tau)
        return np.conj(vals) if self.skew else vals

    def __call__(self, tau, z):
        return theta_expand_eval(self, tau, z)

    def to_json(self) -> dict:
        return {"weight": fraction_str(self.weight), "m": self.m, "skew": self.skew,
                "multiplier": self.chi.to_json(),
                "components": [c.to_json() for c in self.components],
                **({"poincare": [sp.to_json() for sp in self.poincare], "C": self.poincare_C}
                   if self.poincare else {})}

    @classmethod
    def from_json(cls, obj) -> "JacobiFormData":
        if isinstance(obj, str):
            obj = json.loads(obj)
        chi = MultiplierSystem.from_json(obj["multiplier"]) if "multiplier" in obj \
            else MultiplierSystem.eta(1).at_weight(parse_fraction(obj["weight"]))
        specs = obj.get("poincare")
        return cls(obj["weight"], int(obj["m"]), chi, bool(obj.get("skew", False)),
                   [FourierSeries.from_json(c) for c in obj["components"]],
                   poincare=tuple(PoincareSpec.from_json(sp) for sp in specs) if specs else None,
                   poincare_C=int(obj.get("C", 200)))


def theta_expand_eval(J, tau, z, values=None):
    """``sum_a f_a(tau) theta_{2m,a,0}(tau, z)``.

    ``J`` is a :class:`JacobiFormData` or an index ``m`` together with
    precomputed component ``values`` of shape ``(..., 2m)``.
    """
    if isinstance(J, JacobiFormData):
        m = J.m
        values = J.component_values(tau)
    else:
        m = int(J)
        if values is None:
            raise ValueError("component values required when only m is given")
    tau, z = np.broadcast_arrays(np.asarray(tau, dtype=complex), np.asarray(z, dtype=complex))
    th = theta_vector(m, tau, z)
    return (np.asarray(values) * th).sum(axis=-1)


class ConditioningError(ValueError):
    """The theta sampling matrix is too ill-conditioned; resample."""


def decomposition_points(m: int, tau: complex) -> np.ndarray:
    eps = complex(tau).imag / (8 * m)
    return np.arange(2 * m) / (4 * m) + 1j * eps


def theta_decompose(Phi, m: int, tau: complex, zs=None, max_cond: float = 1e8):
    """Recover ``f_a(tau)`` from values of ``Phi(tau, .)`` at ``2m`` points.

    Returns ``(f, cond)`` with ``cond`` the condition number of the column
    equilibrated sampling matrix.
    """
    tau = complex(tau)
    zs = decomposition_points(m, tau) if zs is None else np.asarray(zs, dtype=complex)
    if len(zs) != 2 * m:
        raise ValueError("need exactly 2m sample points")
    A = theta_vector(m, np.full(len(zs), tau), zs)
    scale = np.abs(A).max(axis=0)
    As = A / scale
    cond = float(np.linalg.cond(As))
    if not np.isfinite(cond) or cond > max_cond:
        raise ConditioningError(f"sampling matrix condition number {cond:.2e}")
    rhs = np.asarray(Phi(np.full(len(zs), tau), zs), dtype=complex)
    f = np.linalg.solve(As, rhs) / scale
    return f, cond


def fourier_jacobi_coefficients(J: JacobiFormData, r_max: int) -> dict:
    """Coefficients ``c(l, r)`` of ``q^l zeta^r`` (holomorphic forms only), ``|r| <= r_max``.

    ``l`` is returned as a Fraction; ``4 m l - r^2 = 4 m (n + kappa_a)``.
    """
    if J.skew:
        raise ValueError("only holomorphic theta data are expanded")
    m = J.m
    out = {}
    for j, comp in enumerate(J.components):
        for r in range(-r_max, r_max + 1):
            if (r - j) % (2 * m):
                continue
            for n, c in comp.as_dict().items():
                l = n + comp.kappa + Fraction(r * r, 4 * m)
                out[(l, r)] = out.get((l, r), 0j) + c
    return out
