"""Independent high-precision evaluator for the benchmark functions.

Writes tests/data/golden_functions.csv: 25 probe points per function, values at
40 significant digits rounded to 17. Run from the repository root:

    python3 tests/oracle/golden_functions.py
"""

import csv
import pathlib
import random

import mpmath as mp

mp.mp.dps = 40
pi = mp.pi


def f1(x):
    return mp.fsum(x)


def f2(x):
    x1, x2 = x[0], x[1]
    a = (4 * x1 + 4 * x2 - 3) ** 2 * (
        75 - 56 * (x1 + x2) + 3 * (4 * x1 - 2) ** 2 + 6 * (4 * x1 - 2) * (4 * x2 - 2) + 3 * (4 * x2 - 2) ** 2
    )
    b = (8 * x1 - 12 * x2 + 2) ** 2 * (
        -14 - 128 * x1 + 12 * (4 * x1 - 2) ** 2 + 192 * x2 - 36 * (4 * x1 - 2) * (4 * x2 - 2) + 27 * (4 * x2 - 2) ** 2
    )
    return (mp.log((1 + a) * (30 + b)) - mp.mpf("8.69")) / mp.mpf("2.43")


def c1(x):
    x1, x2 = x[0], x[1]
    return mp.mpf("0.5") * mp.sin(2 * pi * (x1**2 - 2 * x2)) + x1 + 2 * x2 - mp.mpf("1.5")


def c2(x):
    return -x[0] ** 2 - x[1] ** 2 + mp.mpf("1.5")


def c3(x):
    u = 15 * x[0] - 5
    inner = 15 * x[1] - 5 / (4 * pi**2) * u**2 + 5 / pi * u - 6
    return 15 - inner**2 - 10 * (1 - 1 / (8 * pi)) * mp.cos(u)


def c4(x):
    u = 2 * x[0] - 1
    v = 2 * x[1] - 1
    return (
        4
        - (4 - mp.mpf("2.1") * u**2 + u**4 / 3) * u**2
        - u * v
        - 16 * (x[1] ** 2 - x[1]) * v**2
        - 3 * mp.sin(12 * (1 - x[0]))
        - 3 * mp.sin(12 * (1 - x[1]))
    )


def c5(x):
    z = [3 * xi - 1 for xi in x]
    s2 = mp.fsum(zi**2 for zi in z) / 4
    sc = mp.fsum(mp.cos(2 * pi * zi) for zi in z) / 4
    return 3 + 20 * mp.exp(-mp.mpf("0.2") * mp.sqrt(s2)) + mp.exp(sc) - 20 - mp.e


C = [mp.mpf(s) for s in ("1.0", "1.2", "3.0", "3.2")]
# Rows j (input coordinate), columns i (term), as displayed.
A = [
    ["10.00", "0.05", "3.00", "17.00"],
    ["3.00", "10.00", "3.50", "8.00"],
    ["17.00", "17.00", "1.70", "0.05"],
    ["3.50", "0.10", "10.00", "10.00"],
]
P = [
    ["0.131", "0.232", "0.234", "0.404"],
    ["0.169", "0.413", "0.145", "0.882"],
    ["0.556", "0.830", "0.352", "0.873"],
    ["0.012", "0.373", "0.288", "0.574"],
]


def c6(x):
    total = mp.mpf(0)
    for i in range(4):
        e = mp.fsum(mp.mpf(A[j][i]) * (x[j] - mp.mpf(P[j][i])) ** 2 for j in range(4))
        total += C[i] * mp.exp(-e)
    return (mp.mpf("-1.1") + total) / mp.mpf("0.8387")


FUNCTIONS = [("f1", f1, 4), ("f2", f2, 2), ("c1", c1, 2), ("c2", c2, 2), ("c3", c3, 2), ("c4", c4, 2), ("c5", c5, 4), ("c6", c6, 4)]


def probes(dim, rng):
    pts = [[0.0] * dim, [1.0] * dim, [0.5] * dim]
    if dim == 4:
        pts.append([0.131, 0.169, 0.556, 0.012])
    while len(pts) < 25:
        pts.append([round(rng.random(), 6) for _ in range(dim)])
    return pts


def main():
    rng = random.Random(20240517)
    out = pathlib.Path(__file__).resolve().parents[1] / "data" / "golden_functions.csv"
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["function", "x1", "x2", "x3", "x4", "value"])
        for name, fn, dim in FUNCTIONS:
            for p in probes(dim, rng):
                xs = [mp.mpf(repr(v)) for v in p]
                val = fn(xs)
                row = [name] + [repr(v) for v in p] + [""] * (4 - dim) + [mp.nstr(val, 17, min_fixed=-1, max_fixed=-1)]
                w.writerow(row)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
