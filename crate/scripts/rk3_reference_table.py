#!/usr/bin/env python3
"""Reference 3-ranks of class groups of cyclic cubic fields, computed with PARI/GP.

Writes `conductor,field_index,rk3_class_group` for every cyclic cubic field
with conductor below the bound. Fields of a given conductor are the cubic
subfields of Q(zeta_f) whose discriminant is f^2; `field_index` follows the
order PARI returns them in and carries no meaning across tools.

Requires cypari2 (`pip install cypari2`).
"""
import argparse
import sys

import cypari2


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bound", type=int, default=4000, help="exclusive conductor bound")
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    pari = cypari2.Pari()
    pari.allocatemem(4 * 10**8)
    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8")
    out.write("conductor,field_index,rk3_class_group\n")
    for f in range(7, args.bound):
        polys = pari.polsubcyclo(f, 3)
        if not polys:
            continue
        if str(pari.type(polys)) != "t_VEC":
            polys = [polys]
        idx = 0
        for pol in polys:
            pol = pari.polredabs(pol)
            if pari.nfdisc(pol) != f * f:
                continue
            cyc = pari.bnfinit(pol, 1).bnf_get_cyc()
            rk3 = sum(1 for c in cyc if int(c) % 3 == 0)
            out.write(f"{f},{idx},{rk3}\n")
            idx += 1
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
