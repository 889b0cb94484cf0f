"""Eisenstein series, Green's function and the cusp asymptotics of the latter.

    python3 demos/kernels_tour.py
"""
import argparse

from orbizeta.groups import builtin
from orbizeta.kernels import (
    eisenstein,
    eisenstein_fd_residual,
    fay_ratio,
    green_fd_residual,
    green_function,
)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--group", default="builtin:orbifold-0-1-222")
    p.add_argument("--z", type=complex, default=0.1 + 0.9j)
    p.add_argument("--zp", type=complex, default=0.3 + 1.1j)
    args = p.parse_args()
    g = builtin(args.group)

    e = eisenstein(g, args.z, 2.0)
    print(f"E(z, 2) = {e.value:.10f}  tail {e.tail:.1e}  terms {e.terms}")
    print(f"  finite-difference eigen residual {eisenstein_fd_residual(g, args.z):.1e}")

    gr = green_function(g, args.z, args.zp)
    print(f"G(z, z') = {gr.value:.10f}  tail {gr.tail:.1e}")
    print(f"  finite-difference resolvent residual {green_fd_residual(g, args.z, args.zp):.1e}")

    print("cusp asymptotics, z' = 0.2 + 3.5i in the width-one frame")
    for y in (6.0, 9.0, 12.0):
        r = fay_ratio(g, 0.2 + 3.5j, y)
        print(f"  Y = {y:4g}  ratio {r.ratio:.15f}  deviation {r.deviation:.1e}")


if __name__ == "__main__":
    main()
