#!/usr/bin/env python3
# Copyright 2026 The PhantomForge Authors
# SPDX-License-Identifier: Apache-2.0
"""Brute-force dip oracle.

The dip of an ascending sample x_1 < ... < x_n is the smallest eps such that
some unimodal CDF F stays within eps of the ECDF. It suffices to search CDFs
that are piecewise linear with knots at the data points and a possible jump at
the mode knot. For every candidate mode index m this is a linear program in
(F(x_1), ..., F(x_n), F(x_m^-), eps); the dip is the minimum over m.

Independent of the hull-walking implementation in src/stats/dip.cpp.
Prints C++ initializer lines for tests/unit/test_dip.cpp.
"""
import numpy as np
from scipy.optimize import linprog


def dip_lp(x):
    x = np.asarray(sorted(x), dtype=float)
    n = len(x)
    best = np.inf
    for m in range(n):
        # variables: y_0..y_{n-1}, z (left limit at mode), eps
        nv = n + 2
        zi, ei = n, n + 1
        A, b = [], []

        def row():
            return np.zeros(nv)

        def left(i):  # index of F(x_i^-)
            return zi if i == m else i

        for i in range(n):
            # |F(x_i) - (i+1)/n| <= eps
            r = row(); r[i] = 1; r[ei] = -1; A.append(r); b.append((i + 1) / n)
            r = row(); r[i] = -1; r[ei] = -1; A.append(r); b.append(-(i + 1) / n)
            # |F(x_i^-) - i/n| <= eps
            r = row(); r[left(i)] = 1; r[ei] = -1; A.append(r); b.append(i / n)
            r = row(); r[left(i)] = -1; r[ei] = -1; A.append(r); b.append(-i / n)
        # jump at the mode is non-negative
        r = row(); r[zi] = 1; r[m] = -1; A.append(r); b.append(0.0)
        # monotone: F(x_{i+1}^-) >= F(x_i)
        for i in range(n - 1):
            r = row(); r[i] = 1; r[left(i + 1)] = -1; A.append(r); b.append(0.0)

        # slope of segment i (between x_i and x_{i+1}) as a linear form
        def slope(i):
            r = row(); h = x[i + 1] - x[i]
            r[left(i + 1)] += 1 / h; r[i] -= 1 / h
            return r

        # convex left of the mode: slope(i) <= slope(i+1) for segments ending at or before m
        for i in range(0, m - 1):
            A.append(slope(i) - slope(i + 1)); b.append(0.0)
        # concave right of the mode
        for i in range(m, n - 2):
            A.append(slope(i + 1) - slope(i)); b.append(0.0)
        c = row(); c[ei] = 1
        bounds = [(0, 1)] * (n + 1) + [(0, None)]
        res = linprog(c, A_ub=np.array(A), b_ub=np.array(b), bounds=bounds, method="highs")
        if res.status == 0:
            best = min(best, res.fun)
    return best


if __name__ == "__main__":
    import sys
    rng = np.random.default_rng(20261017)
    cases = []
    for n in range(4, 13):
        cases.append(("equally spaced", [i / n for i in range(1, n + 1)]))
    for n in (5, 7, 9, 12):
        cases.append(("normal", sorted(np.round(rng.normal(size=n), 4).tolist())))
    for n in (6, 10, 12):
        a = rng.normal(0, 0.3, n // 2); bb = rng.normal(5, 0.3, n - n // 2)
        cases.append(("two clusters", sorted(np.round(np.r_[a, bb], 4).tolist())))
    for n in (8, 11):
        cases.append(("uniform", sorted(np.round(rng.uniform(size=n), 4).tolist())))
    check = "--check" in sys.argv
    if check:
        import diptest
    for label, xs in cases:
        d = dip_lp(xs)
        extra = ""
        if check:
            extra = f"  // diptest pkg: {diptest.dipstat(np.array(xs)):.12f}"
        print(f"    {{{{{', '.join(repr(v) for v in xs)}}}, {d:.12f}}},  // {label}{extra}")
