"""Regenerate src/dhecke/data/hilbert.json.

H_D(X) = prod (X - j(tau)) over reduced forms (a, b, c) of discriminant D,
tau = (-b + sqrt(D)) / (2a).  Evaluated with mpmath at a working precision
sized from the largest coefficient, then rounded; a second run at higher
precision must give the same integers.
"""
import json
import math
import sys
from pathlib import Path

import mpmath as mp

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from dhecke.quad import is_fundamental_odd, reduced_forms  # noqa: E402

FORMAT_VERSION = 1
MAX_ABS_D = 1000
MAX_H = 24


def _j(tau):
    q = mp.exp(2j * mp.pi * tau)
    # j = 1728 E4^3 / (E4^3 - E6^2) via Klein's formula with the eta quotient
    f = (mp.qp(q ** 2, q ** 2) / mp.qp(q, q)) ** 24  # (eta(2t)/eta(t))^24 / q
    f = f * q
    return (256 * f + 1) ** 3 / f


def hilbert(D, extra=0):
    forms = reduced_forms(D)
    digits = int(math.pi * math.sqrt(-D) * sum(1 / a for a, _, _ in forms) / math.log(10)) + 30 + extra
    mp.mp.dps = digits
    poly = [mp.mpc(1)]
    for a, b, _ in forms:
        tau = (-b + mp.sqrt(mp.mpf(D))) / (2 * a)
        r = _j(tau)
        new = [mp.mpc(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] += c
            new[i] -= c * r
        poly = new
    out = []
    for c in poly:
        n = int(mp.nint(c.real))
        if abs(c.real - n) > mp.mpf("1e-6") or abs(c.imag) > mp.mpf("1e-6"):
            raise RuntimeError("D=%d: coefficient not integral" % D)
        out.append(n)
    return out


def main():
    records = []
    for D in range(-3, -MAX_ABS_D - 1, -4):
        if not is_fundamental_odd(D):
            continue
        h = len(reduced_forms(D))
        if h > MAX_H:
            continue
        c = hilbert(D)
        if hilbert(D, extra=20) != c:
            raise RuntimeError("D=%d unstable" % D)
        records.append({"D": D, "h": h, "coeffs": [str(x) for x in c]})
    path = Path(__file__).resolve().parents[1] / "src" / "dhecke" / "data" / "hilbert.json"
    lines = ",\n".join(json.dumps(r) for r in records)
    path.write_text('{"version": %d,\n "description": "Hilbert class polynomials, constant term first",\n'
                    ' "records": [\n%s\n]}\n' % (FORMAT_VERSION, lines))
    print(len(records), "records")


if __name__ == "__main__":
    main()
