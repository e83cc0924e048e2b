"""Truncation behaviour: Fourier coefficients of the weight-12 Poincare series and the
generalized Poincare series of the period cocycle of Delta as C grows."""
import argparse
import warnings
from dataclasses import dataclass, field

import numpy as np

from jacobi_cohomology import cusp_spec, gen_poincare_eval, period_cocycle, poincare_fourier
from jacobi_cohomology.verify import delta_coefficients, delta_form, scalar_type


@dataclass(frozen=True)
class ConvConfig:
    cs: tuple = (25, 50, 100, 200)
    r: int = 20
    taus: tuple = field(default=(0.1 + 1.0j, -0.3 + 0.7j))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=int, default=20)
    cfg = ConvConfig(r=ap.parse_args().r)
    tau = delta_coefficients(4)
    print("C     a2/a1 + 24     a3/a1 - 252")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for C in cfg.cs:
            f = poincare_fourier([cusp_spec(1, 1)], scalar_type(12), C=C, n_max=4)
            a1 = f.coefficient(1, 0)
            print(f"{C:<5d} {abs(f.coefficient(2, 0) / a1 - tau[1]):.3e}      "
                  f"{abs(f.coefficient(3, 0) / a1 - tau[2]):.3e}")
        c = period_cocycle(delta_form())
        prev = None
        print(f"\ngeneralized series, r = {cfg.r}")
        for C in cfg.cs:
            vals = gen_poincare_eval(c, cfg.r, list(cfg.taus), C=C)
            if prev is not None:
                print(f"C {C // 2:>4d} -> {C:<4d} max change {np.abs(vals - prev).max():.3e}")
            prev = vals


if __name__ == "__main__":
    main()
