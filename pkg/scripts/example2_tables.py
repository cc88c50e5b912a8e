"""Residual tables for the Rademacher net: plain hull of N members vs per-block averages."""

import argparse
from fractions import Fraction

from randconvex.condnorm import BlockElement
from randconvex.mazur import dyadic_epsilon, mazur_search, net_members
from randconvex.scenarios import example2_space


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--blocks", type=int, default=6)
    ap.add_argument("--max-n", type=int, default=4)
    args = ap.parse_args()
    m = args.blocks
    space = example2_space(m)
    zero = BlockElement.zero(space)
    eps = dyadic_epsilon(space.coarse)
    print("squared residual ||Z|F||^2 per block k; target eps_k = 2^-k")
    print("row".ljust(14) + "".join(f"k={k}".rjust(10) for k in range(1, m + 1)))
    print("eps".ljust(14) + "".join(str(Fraction(1, 2**k)).rjust(10) for k in range(1, m + 1)))
    for N in range(1, args.max_n + 1):
        r = mazur_search(net_members(space, range(1, N + 1)), zero, eps, "plain", N, squared=True, force=True)
        cells = ["*" + str(v) if lab in r.failing_cells else str(v)
                 for lab, v in zip(space.coarse.labels, r.residual_sq.values)]
        print(f"plain N={N}".ljust(14) + "".join(c.rjust(10) for c in cells))
    gens = net_members(space, range(1, 2 ** (m + 1) + 1))
    support = [range(2 ** (k + 1)) for k in range(1, m + 1)]
    r = mazur_search(gens, zero, eps, "cc", support=support, squared=True, force=True)
    print("cc averages".ljust(14) + "".join(str(v).rjust(10) for v in r.residual_sq.values))
    print("* = exceeds eps_k")


if __name__ == "__main__":
    main()
