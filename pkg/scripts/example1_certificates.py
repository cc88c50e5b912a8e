"""Print the witness families certifying p_U(X) <= delta for X = 2."""

import argparse
from fractions import Fraction

from randconvex.convexity import gauge_degenerate_scenario
from randconvex.l0core import build_dyadic_space, fmt
from randconvex.scenarios import example1_variables


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--blocks", type=int, default=4)
    ap.add_argument("--sweep", type=int, default=10)
    args = ap.parse_args()
    space = build_dyadic_space(args.blocks, (1,) * args.blocks)
    for name, X in example1_variables(space).items():
        cert = gauge_degenerate_scenario(X, [Fraction(1, 2**j) for j in range(args.sweep + 1)])
        print(f"{name}: in U = {cert.x_in_U}, all deltas verified = {cert.valid} ({cert.scope})")
        for delta, fam in zip(cert.deltas[:2], cert.families):
            print(f"  delta = {fmt(delta)}")
            for n, Y, exc in fam:
                print(f"    Y_{n} = {[fmt(v) for v in Y.values]} tail {fmt(Y.tail.value(0))}  exceptional {exc}")


if __name__ == "__main__":
    main()
