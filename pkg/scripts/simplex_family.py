#!/usr/bin/env python3
"""Closed forms over the uniform simplex family.

Prints the exact Gromov-Monge distances for the 2-to-1 family and the sizes
against the one-point space, next to their closed forms, for a range of n
and p.
"""

import argparse

from gromon import gm_exact, one_point_network, simplex_network, size_p


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=5)
    args = parser.parse_args()

    print(f"{'n':>3} {'p':>3} {'gm(D2n,Dn)':>14} {'(2n)^(-1/p)':>14} "
          f"{'size_p(Dn)':>14} {'(1-1/n)^(1/p)':>14}")
    point = one_point_network()
    for n in range(1, args.max_n + 1):
        for p in (1, 2):
            gm = gm_exact(simplex_network(2 * n), simplex_network(n), p).value
            sz = size_p(simplex_network(n), p)
            gm_pt = gm_exact(simplex_network(n), point, p).value
            assert abs(sz - gm_pt) < 1e-12
            print(f"{n:>3} {p:>3} {gm:>14.10f} {(2 * n) ** (-1 / p):>14.10f} "
                  f"{sz:>14.10f} {(1 - 1 / n) ** (1 / p):>14.10f}")


if __name__ == "__main__":
    main()
