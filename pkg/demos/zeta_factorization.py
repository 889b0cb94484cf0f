"""Truncated Selberg products for the index-two pair and their factorization.

    python3 demos/zeta_factorization.py --s 3 --nmax 100 200 400
"""
import argparse

from orbizeta.groups import builtin
from orbizeta.spectra import factorization_check, length_spectrum, selberg_zeta_truncated


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--s", type=float, default=3.0)
    p.add_argument("--nmax", type=float, nargs="+", default=[100.0, 200.0, 400.0])
    args = p.parse_args()

    group = builtin("builtin:orbifold-0-1-222")
    torus = group.subgroup
    print(f"{'N_max':>7} {'classes':>8} {'Z(s, torus)':>14} {'discrepancy':>12} {'tail':>10} {'control':>10}")
    for n in args.nmax:
        spectrum = length_spectrum(torus, n)
        z = selberg_zeta_truncated(spectrum, args.s)
        rep = factorization_check(torus, group, args.s, n)
        print(f"{n:7g} {spectrum.class_count:8d} {z.value:14.10f} {rep.discrepancy:12.3e} "
              f"{rep.max_tail:10.3e} {rep.control_discrepancy:10.3e}")


if __name__ == "__main__":
    main()
