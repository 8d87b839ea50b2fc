#!/usr/bin/env python3
"""Print canonically-encoded target polynomials.  Long displays of these
forms are easy to garble by hand; recomputing them here is the
authoritative way to obtain or cross-check them."""

import argparse

from heatsos.diffform import encode_poly
from heatsos.symmetry import pair_blocks, symmetrized_triple
from heatsos.targets import target_E, target_E0, target_E1


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--target", choices=("E0", "E1", "E2", "E3"),
                    default="E2")
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--triple", action="store_true",
                    help="print the symmetrized three-axis summand instead")
    ap.add_argument("--pair-blocks", action="store_true",
                    help="print the three generic pair block targets")
    args = ap.parse_args(argv)

    if args.triple:
        print(encode_poly(symmetrized_triple(args.n)))
        return 0
    if args.pair_blocks:
        for pb in pair_blocks():
            print(f"{pb.name}: prefactor {pb.prefactor.encode()}")
            print(f"  base: {encode_poly(pb.base)}")
            for i, sh in enumerate(pb.shared, 1):
                print(f"  shared {i}: {encode_poly(sh)}")
        return 0
    if args.target == "E0":
        poly = target_E0(args.m, args.n)
    elif args.target == "E1":
        poly = target_E1(args.m, args.n)
    else:
        poly = target_E(2 if args.target == "E2" else 3, args.m, args.n)
    print(encode_poly(poly))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
