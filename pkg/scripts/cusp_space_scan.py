"""Which (index, weight, eta power) give nonzero holomorphic and skew Poincare cusp data?
The alpha-part of the eta map is only informative when the skew side is nonzero."""
import argparse
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from jacobi_cohomology import JacobiFormData, MultiplierSystem, cusp_spec


@dataclass(frozen=True)
class CuspScanConfig:
    ms: tuple = (1, 2)
    ks: tuple = (2, 4)
    etas: tuple = (1, 3, 5, 9)
    C: int = 120


def size(J) -> float:
    # value at tau = i, above the extraction height; high coefficients carry amplified noise
    return float(np.abs(J.component_values(np.array([1j]))).max())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--C", type=int, default=120)
    cfg = CuspScanConfig(C=ap.parse_args().C)
    print("m  k  eta   holomorphic  skew")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for m in cfg.ms:
            for k in cfg.ks:
                w = Fraction(2 * k + 5, 2)
                for r in cfg.etas:
                    chi = MultiplierSystem.eta(r)
                    sizes = []
                    for skew in (False, True):
                        best = max(size(JacobiFormData.from_poincare(
                            w, m, chi, [cusp_spec(0, a)], skew=skew, C=cfg.C))
                            for a in range(1, 2 * m + 1))
                        sizes.append(best)
                    print(f"{m}  {k}  {r:<4d}  {sizes[0]:.2e}     {sizes[1]:.2e}")


if __name__ == "__main__":
    main()
