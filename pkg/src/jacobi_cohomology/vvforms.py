"""Vector-valued modular forms: slash action, Poincare series, Fourier data,
supplementary functions and the constant ``c_f``.

Component indices are 0-based in arrays; :class:`PoincareSpec` keeps the
1-based ``alpha`` used when writing down a basis ``P_{n, alpha}``.

Frequencies.  ``P_{n, alpha}`` has seed ``exp(2 pi i nu tau)`` in component
``alpha`` with ``nu = -n + kappa_alpha``.  Cusp forms need ``nu > 0``; use
:func:`cusp_spec` to build them from the (non-negative) index ``l`` of the
leading exponent ``l + kappa_alpha``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .group import MINUS_I, GroupElement, as_group_element, coset_reps, lower_row_window
from .group import reduce_to_fundamental
from .multiplier import KappaDiagonal, MultiplierSystem, UnitaryRep, kappa_diag, principal_power
from .numeric import FourierSeries, e, fourier_extract, fraction_str, parse_fraction

FD_HEIGHT = 0.8  # points below this height are pulled into the fundamental domain


class TruncationWarning(UserWarning):
    """Partial sums at truncation C and C/2 disagree by more than requested."""


# ----------------------------------------------------------------------------
# types and slash action
# ----------------------------------------------------------------------------


@dataclass
class VVType:
    """Weight, multiplier and representation of a vector-valued form."""

    weight: Fraction
    chi: MultiplierSystem
    rho: UnitaryRep

    def __post_init__(self):
        self.weight = parse_fraction(self.weight)
        if self.chi.weight != self.weight:
            self.chi = self.chi.at_weight(self.weight)
        self._kappa = kappa_diag(self.chi, self.rho)

    @property
    def dim(self) -> int:
        return self.rho.dim

    @property
    def kappa(self) -> KappaDiagonal:
        return self._kappa

    def factor(self, gamma) -> np.ndarray:
        """``chi(gamma) rho(gamma)``."""
        return self.chi(gamma) * self.rho(gamma)

    def conjugate(self) -> "VVType":
        """Same weight with ``conj(chi)``, ``conj(rho)`` (valid since 2*weight is an integer)."""
        return VVType(self.weight, self.chi.conjugate().at_weight(self.weight),
                      self.rho.conjugate())

    def key(self) -> tuple:
        return (self.weight, self.chi.s_value, self.chi.t_value,
                self.rho.s_matrix.tobytes(), self.rho.t_matrix.tobytes())

    def to_json(self) -> dict:
        return {"weight": fraction_str(self.weight), "multiplier": self.chi.to_json(),
                "rep": self.rho.to_json()}

    @classmethod
    def from_json(cls, obj) -> "VVType":
        return cls(obj["weight"], MultiplierSystem.from_json(obj["multiplier"]),
                   UnitaryRep.from_json(obj["rep"]))


def vv_slash_eval(f, gamma, vtype: VVType, tau, weight=None) -> np.ndarray:
    """``chi(gamma)^-1 (c tau + d)^-w rho(gamma)^-1 f(gamma tau)``.

    ``f`` maps an array of points to an array of shape ``(..., p)``.  ``weight``
    overrides the weight of ``vtype`` (e.g. ``-k`` for Eichler integrals of a
    weight ``k+2`` type; the generator values of ``chi`` are reused).
    """
    g = as_group_element(gamma)
    w = vtype.weight if weight is None else parse_fraction(weight)
    chi = vtype.chi if w == vtype.weight else vtype.chi.at_weight(w)
    tau = np.asarray(tau, dtype=complex)
    vals = np.asarray(f(g.act(tau)), dtype=complex)
    inv = np.linalg.inv(chi(g) * vtype.rho(g))
    jw = principal_power(g.j(tau), -w)
    return jw[..., None] * (vals @ inv.T)


# ----------------------------------------------------------------------------
# forms given by Fourier data
# ----------------------------------------------------------------------------

KINDS = ("cusp", "holomorphic", "weakly-holomorphic")


@dataclass
class VVForm:
    """A modular form of type ``vtype`` stored through its expansions at i*inf."""

    vtype: VVType
    components: list[FourierSeries]
    kind: str = "cusp"
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if len(self.components) != self.vtype.dim:
            raise ValueError("number of components differs from the representation dimension")
        for j, comp in enumerate(self.components):
            if comp.kappa != self.vtype.kappa[j]:
                raise ValueError(f"component {j} has offset {comp.kappa}, "
                                 f"expected {self.vtype.kappa[j]}")

    @property
    def dim(self) -> int:
        return self.vtype.dim

    def coefficient(self, n: int, j: int) -> complex:
        return self.components[j].get(n)

    def principal_part(self) -> list[dict[int, complex]]:
        """Per component, the coefficients with ``n + kappa_j < 0``."""
        out = []
        for comp in self.components:
            out.append({n: c for n, c in comp.as_dict().items()
                        if n + comp.kappa < 0 and c != 0})
        return out

    def q_eval(self, tau, principal: bool = True) -> np.ndarray:
        """Sum of the stored expansions (no modular reduction)."""
        tau = np.asarray(tau, dtype=complex)
        cols = []
        for comp in self.components:
            if not principal:
                keep = comp.ns + comp.kappa >= 0
                comp = FourierSeries(comp.width, comp.kappa, comp.ns[keep], comp.coeffs[keep])
            cols.append(comp(tau))
        return np.stack(cols, axis=-1)

    def __call__(self, tau, principal: bool = True) -> np.ndarray:
        """Evaluate anywhere in H using ``f = f|gamma`` with ``gamma tau`` in the
        fundamental domain.  ``principal=False`` subtracts the principal part."""
        tau = np.atleast_1d(np.asarray(tau, dtype=complex))
        shape = tau.shape
        tau = tau.ravel()
        out = np.empty((len(tau), self.dim), dtype=complex)
        high = tau.imag >= FD_HEIGHT
        if high.any():
            out[high] = self.q_eval(tau[high], principal=principal)
        for i in np.flatnonzero(~high):
            g, w = reduce_to_fundamental(tau[i])
            inv = np.linalg.inv(self.vtype.factor(g))
            val = principal_power(g.j(tau[i]), -self.vtype.weight) * (inv @ self.q_eval(w))
            if not principal:
                val = val - self._principal_eval(tau[i])
            out[i] = val
        return out.reshape(shape + (self.dim,))

    def _principal_eval(self, tau) -> np.ndarray:
        pp = self.principal_part()
        out = np.zeros(self.dim, dtype=complex)
        for j, terms in enumerate(pp):
            kap = float(self.components[j].kappa)
            for n, c in terms.items():
                out[j] += c * e((n + kap) * tau)
        return out

    def to_json(self) -> dict:
        out = {"type": self.vtype.to_json(), "kind": self.kind,
               "components": [c.to_json() for c in self.components]}
        if self.diagnostics:
            out["diagnostics"] = dict(self.diagnostics)
        return out

    @classmethod
    def from_json(cls, obj) -> "VVForm":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(VVType.from_json(obj["type"]),
                   [FourierSeries.from_json(c) for c in obj["components"]], obj.get("kind", "cusp"),
                   dict(obj.get("diagnostics", {})))


# ----------------------------------------------------------------------------
# Poincare series
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class PoincareSpec:
    """Index ``n``, 1-based component ``alpha`` and coefficient ``b`` of ``b P_{n, alpha}``."""

    n: int
    alpha: int
    b: complex = 1.0

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha is 1-based")
        object.__setattr__(self, "b", complex(self.b))

    def frequency(self, kappa: KappaDiagonal) -> Fraction:
        """Seed frequency ``nu = -n + kappa_alpha``."""
        if self.alpha > len(kappa):
            raise ValueError("alpha exceeds the representation dimension")
        return -self.n + kappa[self.alpha - 1]

    def to_json(self) -> dict:
        return {"n": self.n, "alpha": self.alpha, "b": [self.b.real, self.b.imag]}

    @classmethod
    def from_json(cls, obj) -> "PoincareSpec":
        b = obj.get("b", [1.0, 0.0])
        return cls(int(obj["n"]), int(obj["alpha"]), complex(*b) if isinstance(b, list) else b)


def cusp_spec(l: int, alpha: int, b=1.0) -> PoincareSpec:
    """Spec whose seed is ``exp(2 pi i (l + kappa_alpha) tau)``."""
    return PoincareSpec(-l, alpha, b)


@dataclass
class _TermTable:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    inv: np.ndarray  # (rows, p, p): (chi(gamma) rho(gamma))^-1
    inner: np.ndarray  # rows with |c|, |d| <= C // 2


_TABLES: dict = {}


def _term_table(vtype: VVType, C: int) -> _TermTable:
    key = (vtype.key(), C)
    tab = _TABLES.get(key)
    if tab is not None:
        return tab
    kap = vtype.kappa.as_floats()
    rows_g, rows_inv = [], []
    tinv = e(-kap)  # diagonal of (chi rho)(T)^-1
    chi, rho = vtype.chi, vtype.rho
    chi_m, rho_m = chi(MINUS_I), rho(MINUS_I)
    for g in coset_reps(C):
        fac = vtype.factor(g)
        # (-I) g: chi(-g) = chi(-I) chi(g) sigma(-I, g)
        fac_m = chi_m * chi.sigma(MINUS_I, g) * (rho_m @ fac)
        for h, f_h in ((g, fac), (-g, fac_m)):
            inv_h = np.linalg.inv(f_h)
            if h.c == 0:
                rows_g.append(np.array([[h.a, h.b, h.c, h.d]]))
                rows_inv.append(inv_h[None])
                continue
            ts = lower_row_window(g, C)
            a, b, c, d = h.entries
            rows_g.append(np.stack([np.full(len(ts), a), b + ts * a, np.full(len(ts), c),
                                    d + ts * c], axis=1))
            # (chi rho)(h T^t)^-1 = diag(e(-kappa t)) (chi rho)(h)^-1
            rows_inv.append((tinv[None, :] ** ts[:, None])[:, :, None] * inv_h[None])
    G = np.concatenate(rows_g).astype(float)
    inv = np.concatenate(rows_inv)
    half = C // 2
    inner = (np.abs(G[:, 2]) <= half) & (np.abs(G[:, 3]) <= half)
    tab = _TermTable(G[:, 0], G[:, 1], G[:, 2], G[:, 3], inv, inner)
    _TABLES[key] = tab
    return tab


def _poincare_raw(specs, vtype: VVType, tau: np.ndarray, C: int, chunk_elems=3_000_000):
    tab = _term_table(vtype, C)
    p = vtype.dim
    w = float(vtype.weight)
    R = len(tab.a)
    full = np.zeros((len(tau), p), dtype=complex)
    inner = np.zeros((len(tau), p), dtype=complex)
    step = max(1, chunk_elems // R)
    for s in range(0, len(tau), step):
        t = tau[s:s + step, None]
        J = tab.c * t + tab.d
        gt = (tab.a * t + tab.b) / J
        jw = np.exp(-w * np.log(J))
        for sp in specs:
            nu = float(sp.frequency(vtype.kappa))
            M = sp.b * jw * np.exp(2j * np.pi * nu * gt)
            U = tab.inv[:, :, sp.alpha - 1]
            full[s:s + step] += M @ U
            inner[s:s + step] += M @ (U * tab.inner[:, None])
    return 0.5 * full, 0.5 * inner


def poincare_eval(specs, vtype: VVType, tau, C: int = 200, tol: float | None = None,
                  return_error: bool = False):
    """Truncated ``sum_i b_i P_{n_i, alpha_i}`` at the points ``tau``.

    The sum runs over lower rows ``(c, d)`` with ``|c|, |d| <= C``, both signs
    included, and is halved.  The difference with the ``C/2`` partial sum is
    the error estimate; a :class:`TruncationWarning` is raised when it exceeds
    ``10 * tol``.
    """
    if isinstance(specs, PoincareSpec):
        specs = [specs]
    if vtype.weight <= 2:
        warnings.warn("Poincare series need weight > 2 to converge absolutely",
                      TruncationWarning, stacklevel=2)
    tau = np.atleast_1d(np.asarray(tau, dtype=complex))
    shape = tau.shape
    if np.any(tau.imag <= 0):
        raise ValueError("points must lie in the upper half plane")
    full, inner = _poincare_raw(specs, vtype, tau.ravel(), C)
    err = float(np.abs(full - inner).max())
    if tol is not None and err > 10 * tol:
        warnings.warn(f"C={C} and C/2 partial sums differ by {err:.2e}", TruncationWarning,
                      stacklevel=2)
    out = full.reshape(shape + (vtype.dim,))
    return (out, err) if return_error else out


def poincare_fourier(specs, vtype: VVType, C: int = 200, n_max: int = 12,
                     y: float = FD_HEIGHT, n_min: int | None = None) -> VVForm:
    """Fourier data of a Poincare combination, extracted at height ``y``.

    Coefficients of index ``n`` come with absolute error about
    ``truncation error * exp(2 pi (n + kappa) y)``, so ``y`` should not exceed
    the lowest height at which the result will be evaluated.
    """
    if isinstance(specs, PoincareSpec):
        specs = [specs]
    kap = vtype.kappa
    nus = [sp.frequency(kap) for sp in specs]
    seeds = [-sp.n for sp in specs]
    cusp = all(nu > 0 for nu in nus)
    lo = min([-1] + seeds) if n_min is None else n_min
    ns_range = range(lo, n_max + 1)
    span = n_max - lo + 1
    N = max(4 * span, 64)
    x = np.arange(N) / N
    vals, err = poincare_eval(specs, vtype, x + 1j * y, C=C, return_error=True)
    comps, dropped = [], 0.0
    for j in range(vtype.dim):
        ns, cs = fourier_extract(lambda _t, j=j: vals[:, j], y, 1, kap[j], ns_range, n_samples=N)
        if cusp:
            bad = ns + kap[j] <= 0
            dropped = max(dropped, float(np.abs(cs[bad]).max()) if bad.any() else 0.0)
            ns, cs = ns[~bad], cs[~bad]
        comps.append(FourierSeries(1, kap[j], ns, cs))
    kind = "cusp" if cusp else "weakly-holomorphic"
    return VVForm(vtype, comps, kind,
                  diagnostics={"truncation_error": err, "dropped_nonpositive": dropped,
                               "height": y, "C": C})


def supplementary_data(specs, kappa: KappaDiagonal) -> list[PoincareSpec]:
    """Data ``(n', alpha, conj b)`` of the supplementary function, to be summed
    against the conjugate type: ``n' = -n`` if ``kappa_alpha = 0`` else ``1 - n``."""
    out = []
    for sp in specs:
        k = kappa[sp.alpha - 1]
        n_new = -sp.n if k == 0 else 1 - sp.n
        out.append(PoincareSpec(n_new, sp.alpha, sp.b.conjugate()))
    return out


def principal_part_of_specs(specs, vtype: VVType) -> list[dict[int, complex]]:
    """Expected principal part of ``sum b_i P_{n_i, alpha_i}`` of type ``vtype``."""
    pp = [dict() for _ in range(vtype.dim)]
    for sp in specs:
        if sp.frequency(vtype.kappa) < 0:
            j = sp.alpha - 1
            pp[j][-sp.n] = pp[j].get(-sp.n, 0j) + sp.b
    return pp


# ----------------------------------------------------------------------------
# the constant c_f
# ----------------------------------------------------------------------------


def c_plus(C: int):
    """Matrices ``[[a, b], [c, d]]`` with ``0 < c <= C``, ``0 <= a < c`` coprime."""
    for c in range(1, C + 1):
        for a in range(c):
            if math.gcd(a, c) != 1:
                continue
            if c == 1:
                yield GroupElement(0, -1, 1, 0)
                continue
            d = pow(a, -1, c)
            yield GroupElement(a, (a * d - 1) // c, c, d)


def _cf_sum(fstar: VVForm, C: int) -> np.ndarray:
    vt = fstar.vtype
    k = vt.weight - 2
    if k.denominator != 1 or k < 0:
        raise ValueError("c_f needs integer k = weight - 2 >= 0")
    k = int(k)
    kap = vt.kappa.as_floats()
    pp = fstar.principal_part()
    out = np.zeros(vt.dim, dtype=complex)
    zero_rows = [j for j in range(vt.dim) if vt.kappa[j] == 0]
    if not zero_rows or not any(pp):
        return out
    for g in c_plus(C):
        inv = np.linalg.inv(vt.rho(g))
        chi_inv = 1 / vt.chi(g)
        base = (-2j * math.pi / g.c) ** (k + 2) * chi_inv
        for t, terms in enumerate(pp):
            for l, a_lt in terms.items():
                ph = e((l + kap[t]) * g.a / g.c)
                for j in zero_rows:
                    out[j] += a_lt * base * inv[j, t] * ph
    return out / math.factorial(k + 1)


def cf_constant(fstar: VVForm, C: int = 200, tol: float | None = None) -> np.ndarray:
    """Constant term of the holomorphic Eichler integral of ``fstar`` (pole at i*inf only).

    Only components with ``kappa_j = 0`` can be nonzero.
    """
    full = _cf_sum(fstar, C)
    if tol is not None:
        half = _cf_sum(fstar, max(1, C // 2))
        diff = float(np.abs(full - half).max())
        if diff > 10 * tol:
            warnings.warn(f"c_f partial sums at C and C/2 differ by {diff:.2e}",
                          TruncationWarning, stacklevel=2)
    return full
