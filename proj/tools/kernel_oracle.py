#!/usr/bin/env python3
"""Reference values of the AFE kernel F_s(x) for the Gamma factor
(2 pi)^{-2s} Gamma(s) Gamma(s + 1 - k).

F_s(x) = int_x^oo phi(y) y^{s-1} dy with
phi(y) = 2 (2 pi)^{-nu} y^{-nu/2} K_nu(4 pi sqrt y), nu = k - 1,
evaluated by mpmath quadrature (no contour integral involved).
"""
import argparse
import json

import mpmath as mp


def kernel(x, s, k):
    nu = k - 1
    phi = lambda y: 2 * (2 * mp.pi) ** (-nu) * y ** (mp.mpf(-nu) / 2) * mp.besselk(nu, 4 * mp.pi * mp.sqrt(y))
    # substitute y = x + t^2 to smooth the endpoint
    f = lambda t: phi(x + t * t) * (x + t * t) ** (s - 1) * 2 * t
    return mp.quad(f, [0, 1, 4, 16, mp.inf])


def gamma_factor(s, k):
    return (2 * mp.pi) ** (-2 * s) * mp.gamma(s) * mp.gamma(s + 1 - k)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--dps", type=int, default=45)
    a = ap.parse_args()
    mp.mp.dps = a.dps
    rows = []
    for k, s, x in [(13, 13, "0.001"), (13, 13, "0.3"), (13, 19, "0.3"), (13, 25, "1"), (13, 19, "4"),
                    (13, 25, "16"), (13, 13, "64"), (12, 15, "0.5"), (12, 14, "9")]:
        v = kernel(mp.mpf(x), s, k)
        rows.append({"k": k, "s": s, "x": x, "F": mp.nstr(v, 40), "gamma": mp.nstr(gamma_factor(s, k), 40)})
    with open(a.out, "w") as fh:
        json.dump({"digits": 40, "rows": rows}, fh, indent=1, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
