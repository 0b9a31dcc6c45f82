#!/usr/bin/env python3
"""Generate q-expansion fixtures for the newforms in S_13(Gamma_0(3), chi_-3).

The space is spanned by a*B^i*C^(4-i), i = 1..3, where a is the theta series of
the A2 lattice (weight 1) and B, C are the weight-3 eta quotients
  B = eta(z)^9 / eta(3z)^3,   C = eta(3z)^9 / eta(z)^3.
The Hecke operator T_2 is diagonalised exactly; its eigenvalues are 0 and
+-18*sqrt(-26).  Coefficients are written in the fixture JSON schema used by
the ingest module, with large integers stored as decimal strings.
"""
import argparse
import json
import sys

import flint
from sympy import Matrix, Rational, symbols, sqrt, nsimplify


def chi3(n):
    r = n % 3
    return 0 if r == 0 else (1 if r == 1 else -1)


def euler_product(n_max, step):
    """prod_{n>=1} (1 - q^(step n)) via the pentagonal number theorem."""
    flint.ctx.cap = max(flint.ctx.cap, n_max)
    c = [0] * n_max
    j = 0
    while True:
        hit = False
        for g in {j * (3 * j - 1) // 2, j * (3 * j + 1) // 2}:
            if step * g < n_max:
                c[step * g] = -1 if j % 2 else 1
                hit = True
        if not hit:
            break
        j += 1
    return flint.fmpz_series(c, prec=n_max)


def eta_quotient(n_max, factors, shift=0):
    """q^shift * prod (1 - q^(step n))^e over n >= 1, truncated at n_max."""
    s = flint.fmpz_series([1], prec=n_max)
    for step, e in factors:
        p = euler_product(n_max, step)
        s = s * (p ** e if e > 0 else (1 / p) ** (-e))
    c = [int(s[i]) for i in range(n_max)]
    return ([0] * shift + c)[:n_max]


def mul(a, b, n_max):
    r = (flint.fmpz_poly(a) * flint.fmpz_poly(b)).coeffs()[:n_max]
    r = [int(x) for x in r]
    return r + [0] * (n_max - len(r))


def basis(n_max):
    theta = [1] + [6 * sum(chi3(d) for d in divisors(n)) for n in range(1, n_max)]
    B = eta_quotient(n_max, [(1, 9), (3, -3)])
    C = eta_quotient(n_max, [(3, 9), (1, -3)], shift=1)
    a3 = mul(mul(theta, theta, n_max), theta, n_max)
    assert all(a3[i] == B[i] + 27 * C[i] for i in range(n_max))
    out = []
    for i in (1, 2, 3):
        f = theta
        for _ in range(i):
            f = mul(f, B, n_max)
        for _ in range(4 - i):
            f = mul(f, C, n_max)
        out.append(f)
    return out


def divisors(n):
    ds = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            ds.append(d)
            if d * d != n:
                ds.append(n // d)
        d += 1
    return ds


def eigenforms(n_max):
    bas = basis(n_max)
    M = Matrix([[f[n] for n in range(1, 4)] for f in bas])
    k = 13

    def t2(f, n):
        v = f[2 * n]
        if n % 2 == 0:
            v += chi3(2) * 2 ** (k - 1) * f[n // 2]
        return v

    T = Matrix([[t2(f, n) for n in range(1, 4)] for f in bas])
    A = T * M.inv()
    forms = []
    for val, _, vecs in A.T.eigenvects():
        v = vecs[0]
        # coefficients in Q(sqrt(-26)): v = v0 + v1*sqrt(-26)
        s = sqrt(-26)
        row = [nsimplify((v[i].expand())) for i in range(3)]
        lead = sum(row[i] * bas[i][1] for i in range(3))
        row = [(x / lead).expand() for x in row]
        parts = []
        for x in row:
            x0 = x.subs(s, 0)
            x1 = ((x - x0) / s).expand()
            parts.append((Rational(x0), Rational(x1)))
        forms.append((val, parts))
    return bas, forms


def series(bas, parts, n_max):
    den0 = 1
    for p0, p1 in parts:
        den0 = den0 * p0.q // __import__("math").gcd(den0, p0.q)
        den0 = den0 * p1.q // __import__("math").gcd(den0, p1.q)
    c0 = [int(p0 * den0) for p0, _ in parts]
    c1 = [int(p1 * den0) for _, p1 in parts]
    out = []
    for n in range(n_max):
        a = sum(c0[i] * bas[i][n] for i in range(3))
        b = sum(c1[i] * bas[i][n] for i in range(3))
        assert a % den0 == 0 and b % den0 == 0
        out.append((a // den0, b // den0))
    return out


def enc(x):
    return x if abs(x) < 2 ** 53 else str(x)


def record(label, field_disc, coeffs):
    return {
        "label": label,
        "level": 3,
        "weight": 13,
        "char": {"modulus": 3, "values": [[1, [1, 1, 0, 1]], [2, [-1, 1, 0, 1]]]},
        "field_disc": field_disc,
        "an": [[enc(a), 1, enc(b), 1] for a, b in coeffs[1:]],
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=8000)
    ap.add_argument("--out-dir", default="fixtures")
    args = ap.parse_args()
    n_max = args.n_max + 1
    bas, forms = eigenforms(n_max)
    for val, parts in forms:
        coeffs = series(bas, parts, n_max)
        assert coeffs[1] == (1, 0)
        if val == 0:
            assert all(b == 0 for _, b in coeffs)
            rec = record("3.13.b.a", 0, coeffs)
            name = "3.13.b.a.json"
        elif coeffs[2][1] > 0:
            rec = record("3.13.b.b", -104, coeffs)
            name = "3.13.b.b.json"
        else:
            continue
        with open(f"{args.out_dir}/{name}", "w") as fh:
            json.dump(rec, fh, separators=(",", ":"), sort_keys=True)
            fh.write("\n")
        print(name, coeffs[1:6], file=sys.stderr)


if __name__ == "__main__":
    main()
