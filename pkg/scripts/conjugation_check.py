"""Compare holomorphic periods, coefficient-conjugated nonholomorphic periods and the
periods of the supplementary function for a Poincare cusp combination."""
import argparse
import warnings
from dataclasses import dataclass

import numpy as np

from jacobi_cohomology.group import S, T
from jacobi_cohomology.verify import SuiteConfig, check_conjugation


@dataclass(frozen=True)
class ConjConfig:
    C: int = 200


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--C", type=int, default=200)
    cfg = ConjConfig(ap.parse_args().C)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = check_conjugation(SuiteConfig(C=cfg.C))
    print(res.line())
    for key, val in sorted(res.detail.items()):
        print(f"  {key}: {val}")


if __name__ == "__main__":
    main()
