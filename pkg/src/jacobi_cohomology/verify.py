"""Acceptance battery: one function per criterion, each returning a
:class:`CriterionResult` with the measured residual and its tolerance."""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cohomology import (Cocycle, JacobiContext, JacobiPolyVector, PolyVector, RELATION_WORDS,
                         coboundary_solve, eta_map, parabolic_check, pe_membership)
from .group import S, T, GroupElement, JacobiElement, Word, jacobi_compose
from .multiplier import MultiplierSystem, UnitaryRep
from .numeric import (FourierSeries, GaussianRational, RationalPolynomial, mobius_substitute)
from .periods import (gen_poincare_eval, period_cocycle, period_hol, period_hol_from_eichler,
                      period_nodes, period_nonhol)
from .theta import (JacobiFormData, ThetaSeries, heat_apply_fd, jacobi_slash_eval,
                    skew_slash_eval, theta_decompose, theta_expand_eval)
from .vvforms import (VVType, cusp_spec, poincare_fourier, supplementary_data)


@dataclass
class CriterionResult:
    """``measurements`` maps a label to ``(value, tolerance, sense)``; sense ``"<"``
    requires value < tolerance and ``">"`` requires value > tolerance."""

    number: int
    name: str
    measurements: dict
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(bool(v < t) if sense == "<" else bool(v > t)
                   for v, t, sense in self.measurements.values())

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k} {v:.2e} {sense} {t:.0e}"
                          for k, (v, t, sense) in self.measurements.items())
        return f"[{status}] {self.number:2d} {self.name}: {parts}"

    def to_json(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


@dataclass(frozen=True)
class SuiteConfig:
    m: int = 1
    k: int = 2
    seed: int = 20240601
    C: int = 200


# ----------------------------------------------------------------------------
# shared fixtures
# ----------------------------------------------------------------------------


def delta_coefficients(n_max: int) -> list[int]:
    """``tau(1..n_max)`` from ``q prod (1 - q^n)^24`` in integer arithmetic."""
    c = [0] * n_max
    c[0] = 1
    for n in range(1, n_max):
        for _ in range(24):
            for i in range(n_max - 1, n - 1, -1):
                c[i] -= c[i - n]
    return c


def scalar_type(weight: int) -> VVType:
    return VVType(Fraction(weight), MultiplierSystem.trivial(weight), UnitaryRep.trivial(1))


@lru_cache(maxsize=None)
def delta_form(n_max: int = 60):
    from .vvforms import VVForm

    coeffs = np.array(delta_coefficients(n_max), dtype=complex)
    return VVForm(scalar_type(12), [FourierSeries(1, 0, np.arange(1, n_max + 1), coeffs)])


def jacobi_multiplier() -> MultiplierSystem:
    return MultiplierSystem.eta(1)


def random_sl2(rng, bound: int) -> GroupElement:
    """Random matrix with entries bounded by ``bound``."""
    while True:
        c, d = (int(x) for x in rng.integers(-bound, bound + 1, size=2))
        if math.gcd(c, d) != 1:
            continue
        if c == 0:
            return GroupElement(d, int(rng.integers(-bound, bound + 1)), 0, d)
        # a d - b c = 1; shift (a, b) by multiples of (c, d) toward small entries
        a = pow(d, -1, abs(c)) if abs(c) > 1 else 0
        b = (a * d - 1) // c
        shifts = [t for t in range(-2 * bound, 2 * bound + 1)
                  if abs(a + t * c) <= bound and abs(b + t * d) <= bound]
        if shifts:
            t = shifts[int(rng.integers(len(shifts)))]
            return GroupElement(a + t * c, b + t * d, c, d)


def random_jacobi(rng, bound: int = 4, lat: int = 3) -> JacobiElement:
    lam, mu = (int(x) for x in rng.integers(-lat, lat + 1, size=2))
    return JacobiElement(random_sl2(rng, bound), lam, mu)


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


# ----------------------------------------------------------------------------
# criteria
# ----------------------------------------------------------------------------


def check_bol_exact(cfg: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(cfg.seed)
    worst = 0
    for _ in range(200):
        k = int(rng.integers(0, 9))
        deg = int(rng.integers(0, k + 1))
        coeffs = [GaussianRational(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))),
                                   Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))))
                  for _ in range(deg + 1)]
        p = RationalPolynomial(tuple(coeffs), k)
        g = random_sl2(rng, 50)
        q = mobius_substitute(p, g, k)
        # independent route: sum_j c_j (a tau + b)^j (c tau + d)^(k - j)
        top = RationalPolynomial((g.b, g.a))
        bot = RationalPolynomial((g.d, g.c))
        ref = RationalPolynomial(())
        for j, cj in enumerate(p.coeffs):
            term = RationalPolynomial((cj,))
            for _ in range(j):
                term = term * top
            for _ in range(k - j):
                term = term * bot
            ref = ref + term
        bad = (q.degree > k) + (not q.derivative(k + 1).is_zero()) + (q.coeffs != ref.coeffs)
        worst = max(worst, int(bad))
    return CriterionResult(1, "exact Bol closure", {"failures": (worst, 0.5, "<")},
                           {"samples": 200})


def _theta0_nonconstant(m: int):
    """``theta_{2m,0,0} - 1`` summed without the constant term.

    The constant is annihilated exactly; leaving it in would make the finite
    differences resolve derivatives of size ``exp(-2 pi m Im tau)`` against
    values of size 1.
    """
    ls = np.array([l for l in range(-12, 13) if l])

    def phi(tau, z):
        return np.exp(2j * np.pi * m * (ls ** 2 * tau + 2 * ls * z)).sum()

    return phi


def check_heat(cfg: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(cfg.seed + 1)
    worst, fd_err = 0.0, 0.0
    for _ in range(20):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 1.6))
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3))
        for m in (1, 2, 3):
            for a in range(2 * m):
                phi = ThetaSeries.component(m, a) if a else _theta0_nonconstant(m)
                res = heat_apply_fd(phi, m, tau, z)
                worst = max(worst, abs(res.value) / res.scale)
                fd_err = max(fd_err, res.error / res.scale)
    return CriterionResult(2, "heat operator kills theta", {"relative": (worst, 1e-6, "<")},
                           {"richardson_error": fd_err})


def _test_function(tau, z):
    return np.exp(0.7j * tau + 0.3 * z * z - 0.2j * z) / (tau + 2j) ** 2


def check_slash_composition(cfg: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(cfg.seed + 2)
    chi = jacobi_multiplier()
    k, m = Fraction(9, 2), 2
    worst = 0.0
    for _ in range(50):
        g1, g2 = random_jacobi(rng), random_jacobi(rng)
        tau = np.array([complex(rng.uniform(-1, 1), rng.uniform(0.5, 2))])
        z = np.array([complex(rng.normal(), rng.normal() * 0.3)])
        g12 = jacobi_compose(g1, g2)
        for slash in (jacobi_slash_eval, skew_slash_eval):
            inner = lambda t, w: slash(_test_function, g1, k, m, chi, t, w)
            lhs = slash(inner, g2, k, m, chi, tau, z)
            rhs = slash(_test_function, g12, k, m, chi, tau, z)
            worst = max(worst, _rel(lhs, rhs))
    return CriterionResult(3, "Jacobi slash composition", {"relative": (worst, 1e-9, "<")})


def check_theta_bridge(cfg: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(cfg.seed + 3)
    chi = jacobi_multiplier()
    round_trip, compat = 0.0, 0.0
    for m in (1, 2):
        for _ in range(10):
            tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.5))
            f = rng.normal(size=2 * m) + 1j * rng.normal(size=2 * m)
            Phi = lambda t, w, f=f: theta_expand_eval(m, t, w, values=np.broadcast_to(
                f, np.shape(t) + f.shape))
            back, _ = theta_decompose(Phi, m, tau)
            round_trip = max(round_trip, _rel(back, f))
        jctx = JacobiContext(2, m, chi)
        coeffs = rng.normal(size=(2 * m, 3)) + 1j * rng.normal(size=(2 * m, 3))
        G = JacobiPolyVector(jctx, PolyVector(jctx.vv, coeffs))
        for _ in range(10):
            g = random_jacobi(rng)
            tau = np.array([complex(rng.uniform(-1, 1), rng.uniform(0.5, 2))])
            z = np.array([complex(rng.normal() * 0.5, rng.normal() * 0.2)])
            direct = jacobi_slash_eval(G, g, jctx.weight, m, chi, tau, z)
            compat = max(compat, _rel(G.slash(g)(tau, z), direct))
    return CriterionResult(4, "theta expansion bridge", {"round_trip": (round_trip, 1e-8, "<"),
                                                         "slash": (compat, 1e-7, "<")})


def check_poincare_delta(cfg: SuiteConfig) -> CriterionResult:
    f = poincare_fourier([cusp_spec(1, 1)], scalar_type(12), C=200, n_max=4)
    a = [f.coefficient(n, 0) for n in (1, 2, 3)]
    tau = delta_coefficients(4)
    r2 = abs(a[1] / a[0] - tau[1] / tau[0])
    r3 = abs(a[2] / a[0] - tau[2] / tau[0])
    return CriterionResult(5, "Poincare series reproduces Delta",
                           {"a2/a1": (r2, 1e-3, "<"), "a3/a1": (r3, 1e-2, "<")},
                           {"a1": complex(a[0]).real})


def check_delta_periods(cfg: SuiteConfig) -> CriterionResult:
    D = delta_form()
    c = period_cocycle(D)
    s2 = float(np.abs(c.evaluate_word(Word.parse("S S"))).max())
    st = float(np.abs(c.evaluate_word(Word.parse("S T S T S T"))).max())
    r_int = period_hol(D, S)
    r_eich = period_hol_from_eichler(D, S)
    r_ts = period_hol(D, T @ S)
    r_ts_e = period_hol_from_eichler(D, T @ S)
    fit = max(r_int.residual, r_eich.residual, r_ts.residual, r_ts_e.residual)
    nodes = np.linspace(-1, 1, 5) + 1.3j
    agree = max(float(np.abs(r_int(nodes) - r_eich(nodes)).max()),
                float(np.abs(r_ts(nodes) - r_ts_e(nodes)).max()))
    return CriterionResult(6, "period cocycle of Delta",
                           {"S-relation": (s2, 1e-5, "<"), "ST-relation": (st, 1e-5, "<"),
                            "fit": (fit, 1e-6, "<"), "integral-vs-Eichler": (agree, 1e-5, "<")})


def _criterion7_case(k: int, C: int):
    vt = VVType(Fraction(k + 2), MultiplierSystem.trivial(k + 2),
                JacobiFormData(Fraction(5, 2), 1, jacobi_multiplier(), False,
                               [FourierSeries()] * 2).vv_type().rho)
    specs = [cusp_spec(0, 1), cusp_spec(1, 2, 0.5 - 0.3j)]
    f = poincare_fourier(specs, vt, C=C, n_max=12)
    star = supplementary_data(specs, vt.kappa)
    fstar = poincare_fourier(star, vt.conjugate(), C=C, n_max=12)
    return specs, f, fstar


@lru_cache(maxsize=None)
def _case7(k: int, C: int):
    return _criterion7_case(k, C)


def check_conjugation(cfg: SuiteConfig) -> CriterionResult:
    worst_n, worst_s, scales = 0.0, 0.0, {}
    for k in (2, 10):
        _, f, fstar = _case7(k, cfg.C)
        for g in (S, T @ S):
            rh = period_hol(f, g)
            rn = period_nonhol(f, g)
            rs = period_hol_from_eichler(fstar, g)
            scale = float(np.abs(rh.coeffs).max())
            scales[f"k={k} {g.entries}"] = scale
            worst_n = max(worst_n, float(np.abs(rh.coeffs - rn.coeffs.conj()).max()) / scale)
            worst_s = max(worst_s, float(np.abs(rh.coeffs - rs.coeffs.conj()).max()) / scale)
    return CriterionResult(7, "conjugation relations for periods",
                           {"rH-vs-rN": (worst_n, 1e-4, "<"), "rH-vs-rH*": (worst_s, 1e-3, "<")},
                           {"coefficient_scale": scales})


def check_supplementary(cfg: SuiteConfig) -> CriterionResult:
    specs, f, fstar = _case7(2, cfg.C)
    kap = f.vtype.kappa
    kap_star = fstar.vtype.kappa
    expected = [dict() for _ in range(f.dim)]
    for sp in specs:
        j = sp.alpha - 1
        freq = Fraction(sp.n) - kap[j]  # conjugate of the seed frequency
        n_star = freq - kap_star[j]
        expected[j][int(n_star)] = expected[j].get(int(n_star), 0) + np.conj(sp.b)
    worst = 0.0
    got = fstar.principal_part()
    for j in range(f.dim):
        keys = set(expected[j]) | set(got[j])
        for n in keys:
            worst = max(worst, abs(got[j].get(n, 0) - expected[j].get(n, 0)))
    return CriterionResult(8, "supplementary principal part", {"abs": (worst, 1e-4, "<")})


@lru_cache(maxsize=None)
def _eta_inputs(m: int, k: int, C: int):
    chi = jacobi_multiplier()
    w = Fraction(2 * k + 5, 2)
    Phi = JacobiFormData.from_poincare(w, m, chi, [cusp_spec(0, 1)], C=C)
    Psi = None
    if m > 1:
        Psi = JacobiFormData.from_poincare(w, m, chi, [cusp_spec(0, 1, 1j)], skew=True, C=C)
    return Phi, Psi


def check_cohomology_round_trips(cfg: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(cfg.seed + 9)
    chi = jacobi_multiplier()
    planted = 0.0
    for m in (1, 2):
        jctx = JacobiContext(cfg.k, m, chi)
        for _ in range(5):
            p = PolyVector(jctx.vv, rng.normal(size=(2 * m, cfg.k + 1))
                           + 1j * rng.normal(size=(2 * m, cfg.k + 1)))
            planted = max(planted, coboundary_solve(Cocycle.coboundary(p)).residual)
    m = 2
    jctx = JacobiContext(cfg.k, m, chi)
    zero = eta_map(None, None, jctx=jctx)
    zero_rep = coboundary_solve(zero)
    Phi, Psi = _eta_inputs(m, cfg.k, cfg.C)
    c = eta_map(Phi, Psi)
    par, _, par_res = parabolic_check(c)
    member_res = 0.0
    for g in (S, T @ S, GroupElement(2, 1, 1, 1)):
        v = c.evaluate(g)
        _, _, res = pe_membership(lambda t, z: v(t, z), jctx)
        member_res = max(member_res, res)
    return CriterionResult(9, "cohomology round trips",
                           {"planted": (planted, 1e-10, "<"),
                            "zero-class": (zero_rep.residual, 1e-6, "<"),
                            "parabolic": (par_res, 1e-6, "<"),
                            "membership": (member_res, 1e-6, "<")},
                           {"relation_residual": c.relation_residual()})


def check_injectivity(cfg: SuiteConfig) -> CriterionResult:
    rng = np.random.default_rng(cfg.seed + 10)
    Phi, _ = _eta_inputs(cfg.m, cfg.k, cfg.C)
    c = eta_map(Phi, None)
    image = coboundary_solve(c).residual
    planted = 0.0
    for _ in range(10):
        p = PolyVector(c.ctx, rng.normal(size=c.ctx.dim * (cfg.k + 1))
                       + 1j * rng.normal(size=c.ctx.dim * (cfg.k + 1)))
        planted = max(planted, coboundary_solve(Cocycle.coboundary(p)).residual)
    return CriterionResult(10, "image class is not a coboundary",
                           {"image": (image, 1e-3, ">"), "planted": (planted, 1e-8, "<")})


def check_generalized_poincare(cfg: SuiteConfig) -> CriterionResult:
    c = period_cocycle(delta_form())
    taus = np.array([0.1 + 1.1j, -0.3 + 0.9j, 0.45 + 2.0j])
    v1 = gen_poincare_eval(c, 20, taus, C=100)
    v2 = gen_poincare_eval(c, 20, taus, C=200)
    diff = float(np.abs(v1 - v2).max())
    return CriterionResult(11, "generalized Poincare series converges",
                           {"C=100 vs 200": (diff, 1e-4, "<")},
                           {"max_abs_value": float(np.abs(v2).max())})


CHECKS = (check_bol_exact, check_heat, check_slash_composition, check_theta_bridge,
          check_poincare_delta, check_delta_periods, check_conjugation, check_supplementary,
          check_cohomology_round_trips, check_injectivity, check_generalized_poincare)


def run_check(number: int, cfg: SuiteConfig | None = None) -> CriterionResult:
    cfg = cfg or SuiteConfig()
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = CHECKS[number - 1](cfg)
    res.seconds = time.perf_counter() - t0
    return res


def run_suite(cfg: SuiteConfig | None = None, numbers=None) -> list[CriterionResult]:
    numbers = numbers or range(1, len(CHECKS) + 1)
    return [run_check(n, cfg) for n in numbers]
