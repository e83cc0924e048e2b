"""Coboundary residuals of beta-cocycles of Poincare-built Jacobi cusp forms versus
planted coboundaries.  A clear gap between the two populations is the numerical
witness that the images are nonzero classes.  When the cusp space has rank one all
images are proportional and share the same relative residual."""
import argparse
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from jacobi_cohomology import (Cocycle, JacobiContext, JacobiFormData, MultiplierSystem,
                               PolyVector, beta_cocycle, coboundary_solve, cusp_spec)


@dataclass(frozen=True)
class ScanConfig:
    m: int = 1
    k: int = 2
    C: int = 200
    planted: int = 20
    seed: int = 7


def run(cfg: ScanConfig):
    chi = MultiplierSystem.eta(1)
    jctx = JacobiContext(cfg.k, cfg.m, chi)
    w = Fraction(2 * cfg.k + 5, 2)
    rows = []
    for l in range(3):
        for alpha in range(1, 2 * cfg.m + 1):
            Phi = JacobiFormData.from_poincare(w, cfg.m, chi, [cusp_spec(l, alpha)], C=cfg.C)
            rep = coboundary_solve(beta_cocycle(Phi, jctx))
            rows.append((f"P(l={l}, alpha={alpha})", rep.residual))
    rng = np.random.default_rng(cfg.seed)
    shape = (2 * cfg.m, cfg.k + 1)
    planted = [coboundary_solve(Cocycle.coboundary(
        PolyVector(jctx.vv, rng.normal(size=shape) + 1j * rng.normal(size=shape)))).residual
        for _ in range(cfg.planted)]
    return rows, planted


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--C", type=int, default=200)
    a = ap.parse_args()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows, planted = run(ScanConfig(a.m, a.k, a.C))
    for name, res in rows:
        print(f"{name:24s} coboundary residual {res:.3e}")
    print(f"planted coboundaries: max residual {max(planted):.3e} over {len(planted)}")


if __name__ == "__main__":
    main()
