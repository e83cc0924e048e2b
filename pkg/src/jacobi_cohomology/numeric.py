"""Scalar, polynomial and series plumbing shared by every other module.

Exact arithmetic lives in :class:`GaussianRational` and
:class:`RationalPolynomial`; everything else is double precision.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

TWO_PI_I = 2j * np.pi


def e(x):
    """``exp(2 pi i x)``, vectorised."""
    return np.exp(TWO_PI_I * x)


def parse_fraction(s) -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, (int, np.integer)):
        return Fraction(int(s))
    return Fraction(str(s))


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_complex(s) -> complex:
    """Parse ``"re+imi"`` style strings (``i`` or ``j`` suffix) or numbers."""
    if isinstance(s, (int, float, complex)):
        return complex(s)
    t = str(s).strip().replace(" ", "").replace("I", "i").replace("i", "j")
    if t in ("j", "+j"):
        return 1j
    if t == "-j":
        return -1j
    if t.endswith("j") and (t[:-1] == "" or t[:-1][-1] in "+-"):
        t = t[:-1] + "1j"
    return complex(t)


# ----------------------------------------------------------------------------
# exact scalars and polynomials
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianRational:
    """An element of Q(i) with exact rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(Fraction(x))

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * GaussianRational(o.re / n, -o.im / n)

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial in tau with Gaussian-rational coefficients (ascending order).

    ``bound`` is the degree bound k of the module P_k the polynomial lives in.
    """

    coeffs: tuple = ()
    bound: int | None = None

    def __post_init__(self):
        c = _trim(GaussianRational.coerce(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if self.bound is not None and self.degree > self.bound:
            raise ValueError(f"degree {self.degree} exceeds bound {self.bound}")

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial having degree -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, j: int) -> GaussianRational:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else GaussianRational()

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(
            tuple(self.coefficient(j) + other.coefficient(j) for j in range(n)),
            _max_bound(self.bound, other.bound))

    def __neg__(self):
        return RationalPolynomial(tuple(-c for c in self.coeffs), self.bound)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalPolynomial):
            if self.is_zero() or other.is_zero():
                return RationalPolynomial((), None)
            out = [GaussianRational()] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return RationalPolynomial(tuple(out), None)
        s = GaussianRational.coerce(other)
        return RationalPolynomial(tuple(c * s for c in self.coeffs), self.bound)

    __rmul__ = __mul__

    def derivative(self, order: int = 1) -> "RationalPolynomial":
        c = list(self.coeffs)
        for _ in range(order):
            c = [c[j] * j for j in range(1, len(c))]
        return RationalPolynomial(tuple(c), self.bound)

    def __call__(self, tau):
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * tau + complex(c)
        return acc

    def to_complex(self, length: int | None = None) -> np.ndarray:
        n = len(self.coeffs) if length is None else length
        out = np.zeros(n, dtype=complex)
        for j, c in enumerate(self.coeffs[:n]):
            out[j] = complex(c)
        return out


def _max_bound(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _int_poly_pow(lin: tuple[int, int], n: int) -> list[int]:
    # (u + v tau)^n, ascending
    u, v = lin
    return [math.comb(n, j) * u ** (n - j) * v ** j for j in range(n + 1)]


def _int_poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def mobius_columns(gamma, k: int) -> list[list[int]]:
    """Integer coefficient lists of ``(a tau + b)^j (c tau + d)^(k-j)``, j = 0..k."""
    a, b, c, d = _entries(gamma)
    return [_int_poly_mul(_int_poly_pow((b, a), j), _int_poly_pow((d, c), k - j))
            for j in range(k + 1)]


def mobius_matrix(gamma, k: int) -> np.ndarray:
    """Matrix M with ``coeffs(p|gamma) = M @ coeffs(p)`` for weight -k (no multiplier)."""
    cols = mobius_columns(gamma, k)
    return np.array(cols, dtype=float).T


def mobius_substitute(p: RationalPolynomial, gamma, k: int) -> RationalPolynomial:
    """Return ``(c tau + d)^k p((a tau + b)/(c tau + d))`` exactly.

    Raises ``ValueError`` if ``deg p > k``.
    """
    if p.degree > k:
        raise ValueError(f"deg p = {p.degree} exceeds k = {k}")
    cols = mobius_columns(gamma, k)
    out = [GaussianRational()] * (k + 1)
    for j, cj in enumerate(p.coeffs):
        for i, m in enumerate(cols[j]):
            if m:
                out[i] = out[i] + cj * m
    return RationalPolynomial(tuple(out), k)


def _entries(gamma):
    if hasattr(gamma, "entries"):
        return gamma.entries
    a, b, c, d = gamma
    return int(a), int(b), int(c), int(d)


# ----------------------------------------------------------------------------
# Fourier series
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierSeries:
    """Truncated expansion ``sum_n a(n) exp(2 pi i (n + kappa) tau / width)``."""

    width: Fraction = Fraction(1)
    kappa: Fraction = Fraction(0)
    ns: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        w = parse_fraction(self.width)
        kap = parse_fraction(self.kappa)
        if w <= 0:
            raise ValueError("width must be positive")
        if not 0 <= kap < 1:
            raise ValueError(f"kappa must lie in [0,1), got {kap}")
        ns = np.asarray(self.ns, dtype=np.int64)
        cs = np.asarray(self.coeffs, dtype=complex)
        if ns.shape != cs.shape:
            raise ValueError("ns and coeffs differ in length")
        order = np.argsort(ns, kind="stable")
        ns, cs = ns[order], cs[order]
        if len(ns) > 1 and np.any(np.diff(ns) == 0):
            raise ValueError("duplicate frequency index")
        object.__setattr__(self, "width", w)
        object.__setattr__(self, "kappa", kap)
        object.__setattr__(self, "ns", ns)
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_dict(cls, coeffs: dict, width=1, kappa=0):
        ns = sorted(coeffs)
        return cls(width, kappa, np.array(ns, dtype=np.int64),
                   np.array([coeffs[n] for n in ns], dtype=complex))

    @classmethod
    def zero(cls, width=1, kappa=0):
        return cls(width, kappa)

    def as_dict(self) -> dict[int, complex]:
        return {int(n): complex(c) for n, c in zip(self.ns, self.coeffs)}

    def get(self, n: int) -> complex:
        idx = np.searchsorted(self.ns, n)
        if idx < len(self.ns) and self.ns[idx] == n:
            return complex(self.coeffs[idx])
        return 0j

    @property
    def frequencies(self) -> np.ndarray:
        """The exponents ``(n + kappa)/width`` as floats."""
        return (self.ns + float(self.kappa)) / float(self.width)

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=complex)
        if len(self.ns) == 0:
            return np.zeros(tau.shape, dtype=complex)
        ph = e(np.multiply.outer(tau, self.frequencies))
        return ph @ self.coeffs

    def derivative(self, order: int = 1) -> "FourierSeries":
        """Termwise ``(d/d tau)^order``."""
        fac = (TWO_PI_I * self.frequencies) ** order
        return self.with_coeffs(self.coeffs * fac)

    def with_coeffs(self, coeffs) -> "FourierSeries":
        return FourierSeries(self.width, self.kappa, self.ns, coeffs)

    def scale(self, s) -> "FourierSeries":
        return self.with_coeffs(self.coeffs * s)

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        if (self.width, self.kappa) != (other.width, other.kappa):
            raise ValueError("cannot add series with different width/offset")
        d = self.as_dict()
        for n, c in other.as_dict().items():
            d[n] = d.get(n, 0j) + c
        return FourierSeries.from_dict(d, self.width, self.kappa)

    def truncate(self, n_max: int) -> "FourierSeries":
        keep = self.ns <= n_max
        return FourierSeries(self.width, self.kappa, self.ns[keep], self.coeffs[keep])

    @property
    def n_min(self):
        nz = self.ns[np.abs(self.coeffs) > 0]
        return int(nz[0]) if len(nz) else None

    def to_json(self) -> dict:
        return {"width": fraction_str(self.width), "kappa": fraction_str(self.kappa),
                "coeffs": [[int(n), float(c.real), float(c.imag)]
                           for n, c in zip(self.ns, self.coeffs)]}

    @classmethod
    def from_json(cls, obj) -> "FourierSeries":
        if isinstance(obj, str):
            obj = json.loads(obj)
        rows = obj.get("coeffs", [])
        ns = [int(r[0]) for r in rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("coefficient indices must be strictly ascending")
        return cls(obj.get("width", "1/1"), obj.get("kappa", "0/1"),
                   np.array(ns, dtype=np.int64),
                   np.array([complex(r[1], r[2]) for r in rows], dtype=complex))


class AliasingWarning(UserWarning):
    pass


def fourier_extract(f: Callable, y: float, width=1, kappa=0,
                    n_range: Iterable[int] = range(0, 10), n_samples: int | None = None,
                    alias_ratio: float = 1e-8):
    """Recover ``a(n)`` of ``f(tau) = sum a(n) e((n+kappa) tau/width)`` by DFT at height ``y``.

    ``f`` is evaluated on an array of ``n_samples`` points and may return shape
    ``(N,)`` or ``(N, p)``.  Returns ``(ns, coeffs)`` with coeffs of shape
    ``(len(ns),)`` or ``(len(ns), p)``.
    """
    ns = np.array(sorted(n_range), dtype=np.int64)
    if len(ns) == 0:
        raise ValueError("empty n_range")
    w = float(parse_fraction(width))
    kap = float(parse_fraction(kappa))
    span = int(ns.max() - ns.min() + 1)
    N = n_samples or max(4 * span, 4 * int(np.abs(ns).max()) + 4, 16)
    if N < 4 * span:
        raise ValueError("need at least 4 samples per extracted mode")
    x = w * np.arange(N) / N
    vals = np.asarray(f(x + 1j * y), dtype=complex)
    vec = vals.ndim == 2
    g = vals * (e(-kap * x / w)[:, None] if vec else e(-kap * x / w))
    G = np.fft.fft(g, axis=0) / N
    heights = np.exp(2 * np.pi * (ns + kap) * y / w)
    raw = G[np.mod(ns, N)]
    out = raw * (heights[:, None] if vec else heights)
    # modes at the edge of the window should be negligible at the sampling height
    mag = np.abs(raw) if not vec else np.abs(raw).max(axis=1)
    top = mag.max()
    if top > 0:
        edge = max(mag[0], mag[-1]) if len(mag) > 2 else 0.0
        if edge > alias_ratio * top and edge > 1e-300:
            warnings.warn(f"edge Fourier mode is {edge / top:.2e} of the largest; "
                          "possible aliasing/truncation", AliasingWarning, stacklevel=2)
    return ns, out


# ----------------------------------------------------------------------------
# quadrature
# ----------------------------------------------------------------------------


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge; carries the partial estimate."""

    def __init__(self, msg, estimate, error):
        super().__init__(msg)
        self.estimate = estimate
        self.error = error


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _is_infinite(z: complex) -> bool:
    return math.isinf(z.imag)


def _truncate_endpoint(anchor: complex, end: complex, envelope, thresh) -> complex:
    """Move a cusp/infinite endpoint toward ``anchor`` until ``envelope < thresh``."""
    if envelope is None:
        raise ValueError("an envelope is required for cusp or infinite endpoints")
    if _is_infinite(end):
        x = end.real
        h = max(anchor.imag, 1.0)
        for _ in range(200):
            z = complex(x, h)
            if envelope(z) < thresh:
                return z
            h *= 1.5
        raise QuadratureError("envelope never fell below threshold toward i*inf", 0, math.inf)
    s = 0.5
    for _ in range(2000):
        z = end + s * (anchor - end)
        if envelope(z) < thresh:
            return z
        s *= 0.8
    raise QuadratureError("envelope never fell below threshold toward cusp", 0, math.inf)


def contour_integrate(f: Callable, path: Sequence[complex], tol: float = 1e-10,
                      envelope: Callable | None = None, order: int = 15,
                      max_subdivisions: int = 4000):
    """Adaptive Gauss-Legendre integral of ``f`` along a polygonal path.

    ``f`` receives a 1-d array of points and returns shape ``(n,)`` or
    ``(n, ...)``.  A first or last vertex on the real axis (a cusp) or with
    infinite imaginary part (``complex(x, inf)``) is truncated where the
    caller-supplied ``envelope(z)`` (a bound on ``|f(z)|``) drops below tol/10.
    """
    pts = [complex(z) for z in path]
    if len(pts) < 2:
        raise ValueError("path needs at least two vertices")
    thresh = tol / 10
    if _is_infinite(pts[-1]) or pts[-1].imag == 0:
        pts[-1] = _truncate_endpoint(pts[-2], pts[-1], envelope, thresh)
    if _is_infinite(pts[0]) or pts[0].imag == 0:
        pts[0] = _truncate_endpoint(pts[1], pts[0], envelope, thresh)

    x, w = _gauss_legendre(order)
    total_len = sum(abs(b - a) for a, b in zip(pts, pts[1:]))

    def rule(a, b):
        mid, half = (a + b) / 2, (b - a) / 2
        vals = np.asarray(f(mid + half * x))
        return half * np.tensordot(w, vals, axes=(0, 0))

    estimate = 0
    err_total = 0.0
    n_intervals = 0
    stack = [(a, b, rule(a, b)) for a, b in zip(pts, pts[1:]) if a != b]
    while stack:
        a, b, whole = stack.pop()
        m = (a + b) / 2
        left, right = rule(a, m), rule(m, b)
        err = float(np.max(np.abs(left + right - whole)))
        n_intervals += 1
        allowed = tol * abs(b - a) / total_len
        if err <= allowed or abs(b - a) < 1e-13 * total_len:
            estimate = estimate + left + right
            err_total += err
            continue
        if n_intervals > max_subdivisions:
            rest = sum((s[2] for s in stack), 0)
            raise QuadratureError(f"no convergence after {max_subdivisions} subdivisions",
                                  estimate + left + right + rest, err_total + err)
        stack.append((m, b, right))
        stack.append((a, m, left))
    if np.ndim(estimate) == 0:
        return complex(estimate)
    return estimate


# ----------------------------------------------------------------------------
# small linear-algebra helpers
# ----------------------------------------------------------------------------


def polyfit_exact_degree(nodes, values, k: int):
    """Interpolate degree-<=k polynomials through the first k+1 nodes.

    ``values`` has shape ``(len(nodes), p)``.  Returns ``(coeffs, residual)``
    where coeffs has shape ``(p, k+1)`` (ascending) and residual is the max
    relative misfit at the held-out nodes.
    """
    nodes = np.asarray(nodes, dtype=complex)
    values = np.asarray(values, dtype=complex)
    if values.ndim == 1:
        values = values[:, None]
    V = np.vander(nodes, k + 1, increasing=True)
    coeffs = np.linalg.solve(V[:k + 1], values[:k + 1])
    pred = V[k + 1:] @ coeffs
    scale = max(np.abs(values).max(), 1e-300)
    residual = float(np.abs(pred - values[k + 1:]).max() / scale) if len(nodes) > k + 1 else 0.0
    return coeffs.T.copy(), residual


def polyval_rows(coeffs: np.ndarray, tau) -> np.ndarray:
    """Evaluate each row of ascending coefficient array at tau (scalar or array)."""
    tau = np.asarray(tau, dtype=complex)
    V = np.power.outer(tau, np.arange(coeffs.shape[-1]))
    return V @ coeffs.T
