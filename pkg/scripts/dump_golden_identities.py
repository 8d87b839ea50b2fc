#!/usr/bin/env python3
"""Print the two golden certificates as human-readable identities:
multiplier times generator per line, then each square of the sum."""

import argparse

from heatsos.certify import verify_certificate
from heatsos.diffform import Q, encode_poly, parse_monomial
from heatsos.prover import prove
from heatsos.sdp import SquareTerm


def show_block(block):
    print(f"  block {block['name']}:")
    for idx, lam in sorted(block["lambdas"].items(), key=lambda kv:
                           int(kv[0])):
        print(f"    + ({lam}) * R[{idx}]")
    basis = block["basis"]
    for sq in block["sos"]:
        combo = " + ".join(f"({e})*{b}" for e, b in zip(sq["e"], basis)
                           if Q(e))
        print(f"    + ({sq['c']}) * [{combo}]^2")
    for fam in block["families"]:
        for sq in fam["sos"]:
            combo = " + ".join(f"({e})*{y}" for e, y in
                               zip(sq["e"], fam["y_basis"]) if Q(e))
            print(f"    + weight{fam['subsets']} * ({sq['c']}) "
                  f"* [{combo}]^2")
    if not (block["lambdas"] or block["sos"] or block["families"]):
        print("    (identically zero)")


def show(cert, title):
    print(f"== {title} ==")
    print(f"kind={cert['kind']} family={cert['family']} m={cert['m']} "
          f"n={cert['n']}")
    for i, g in enumerate(cert["generators"]):
        print(f"  R[{i}] from generator {g['g']} on axis {g['axis']}")
    if "shared" in cert:
        print(f"  shared scalars: {cert['shared']}")
    for block in cert.get("blocks", []):
        show_block(block)
    if "block" in cert:
        show_block(cert["block"])
    res = verify_certificate(cert)
    print(f"  verifier: {'valid' if res.ok else 'INVALID'} "
          f"({len(res.checks)} checks)")
    print()


def main(argv=None):
    argparse.ArgumentParser(description=__doc__).parse_args(argv)
    uni = prove("C2", 3, 1)
    show(uni.certificate, "order 3, dimension 1")
    pair = prove("C2", 2, None)
    show(pair.certificate, "order 2, every dimension")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
