"""Chern coefficients, cusp form dimensions and the index-two relation.

    python3 demos/index_tables.py --sig 0,1,2,2,2 --kmax 6
"""
import argparse

from orbizeta.groups import Signature
from orbizeta.index import area, chern_coefficients, dim_omega_k, example_0_1_222_relations


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sig", default="0,1,2,2,2")
    p.add_argument("--kmax", type=int, default=6)
    args = p.parse_args()
    sig = Signature.parse(args.sig)

    print(f"signature {sig}, area {area(sig):.6f}")
    print(f"{'k':>3} {'dim':>4} {'wp * pi^2':>10} {'cusp':>6} {'ell * pi':>20}")
    for k in range(1, args.kmax + 1):
        c = chern_coefficients(sig, k)
        ell = ", ".join(str(e) for e in c.ell_over_pi)
        print(f"{k:3d} {dim_omega_k(sig, k):4d} {str(c.wp_over_pi2):>10} {str(c.cusp):>6} {ell:>20}")

    if sig == Signature(0, 1, (2, 2, 2)):
        print("index-two relation, elliptic coefficient per cone point times pi:")
        for k in range(1, args.kmax + 1):
            r = example_0_1_222_relations(k)
            print(f"  k = {k}: {r.ell_per_cone_over_pi[0]}  residuals {r.wp_residual_over_pi2}, {r.cusp_residual}")


if __name__ == "__main__":
    main()
