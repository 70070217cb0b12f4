#!/usr/bin/env python3
"""Optional cross-validation of the CLI against scipy.

Recomputes W_p (flat LP), AW_p (nested stage LPs and the flat bicausal LP),
and AV (flat bicausal LP with the mismatch indicator) with scipy's HiGHS
solver on random instances and compares against `aot dist`. Not wired into
ctest; run manually when touching the solvers:

    python3 tests/crosscheck.py build/tools/aot
"""

import json
import subprocess
import sys
import tempfile

import numpy as np
from scipy.optimize import linprog

AOT = sys.argv[1] if len(sys.argv) > 1 else "build/tools/aot"
rng = np.random.default_rng(12345)


def rand_measure(d, T, kmax):
    k = rng.integers(2, kmax + 1)
    w = rng.dirichlet(np.ones(k))
    paths = rng.uniform(-2, 2, size=(k, T, d))
    return {
        "d": int(d),
        "T": int(T),
        "atoms": [{"path": paths[i].tolist(), "weight": float(w[i])} for i in range(k)],
    }


def cli(*args):
    out = subprocess.run([AOT, *args], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    return float(out.stdout.split()[0])


def marginal_rows(n, m):
    rows, rhs_idx = [], []
    for i in range(n):
        row = np.zeros((n, m))
        row[i, :] = 1
        rows.append(row.ravel())
        rhs_idx.append(("a", i))
    for j in range(m):
        row = np.zeros((n, m))
        row[:, j] = 1
        rows.append(row.ravel())
        rhs_idx.append(("b", j))
    return rows, rhs_idx


def solve(cost, rows, rhs):
    r = linprog(cost.ravel(), A_eq=np.array(rows), b_eq=np.array(rhs), bounds=(0, None),
                method="highs")
    assert r.status == 0, r.message
    return r.fun


def w_lp(mu, nu, p):
    X = np.array([np.array(a["path"]).ravel() for a in mu["atoms"]])
    Y = np.array([np.array(a["path"]).ravel() for a in nu["atoms"]])
    wa = [a["weight"] for a in mu["atoms"]]
    wb = [a["weight"] for a in nu["atoms"]]
    C = np.linalg.norm(X[:, None, :] - Y[None, :, :], axis=2) ** p
    rows, idx = marginal_rows(len(wa), len(wb))
    rhs = [wa[i] if side == "a" else wb[i] for side, i in idx]
    return solve(C, rows, rhs) ** (1 / p)


def nested_aw(mu, nu, p):
    X = [np.array(a["path"]) for a in mu["atoms"]]
    Y = [np.array(a["path"]) for a in nu["atoms"]]
    wa = [a["weight"] for a in mu["atoms"]]
    wb = [a["weight"] for a in nu["atoms"]]
    T = mu["T"]

    def levels(paths, w):
        out = []
        for t in range(T + 1):
            lv = {}
            for pth, wt in zip(paths, w):
                key = tuple(map(tuple, pth[:t]))
                lv[key] = lv.get(key, 0.0) + wt
            out.append(lv)
        return out

    LA, LB = levels(X, wa), levels(Y, wb)

    def children(lv, prefix, t):
        return {k[t]: m for k, m in lv[t + 1].items() if k[:t] == prefix}

    memo = {}

    def V(pa, pb, t):
        if t == T:
            return 0.0
        key = (pa, pb, t)
        if key in memo:
            return memo[key]
        ca, cb = children(LA, pa, t), children(LB, pb, t)
        xs, ys = list(ca), list(cb)
        wx = np.array([ca[x] for x in xs])
        wy = np.array([cb[y] for y in ys])
        wx, wy = wx / wx.sum(), wy / wy.sum()
        C = np.array([[np.linalg.norm(np.array(x) - np.array(y)) ** p + V(pa + (x,), pb + (y,), t + 1)
                       for y in ys] for x in xs])
        rows, idx = marginal_rows(len(xs), len(ys))
        rhs = [wx[i] if side == "a" else wy[i] for side, i in idx]
        memo[key] = solve(C, rows, rhs)
        return memo[key]

    return V((), (), 0) ** (1 / p)


def bicausal_lp(mu, nu, cost):
    X = [np.array(a["path"]) for a in mu["atoms"]]
    Y = [np.array(a["path"]) for a in nu["atoms"]]
    wa = [a["weight"] for a in mu["atoms"]]
    wb = [a["weight"] for a in nu["atoms"]]
    n, m, T = len(X), len(Y), mu["T"]
    rows, idx = marginal_rows(n, m)
    rows = list(rows)
    rhs = [wa[i] if side == "a" else wb[i] for side, i in idx]

    def classes(paths, t):
        cls = {}
        for i, pth in enumerate(paths):
            cls.setdefault(tuple(map(tuple, pth[:t])), []).append(i)
        return cls

    def add_causality(paths, w, other_paths, left_side):
        for t in range(1, T):
            for _, members in classes(paths, t).items():
                if len(members) < 2:
                    continue
                pa = sum(w[i] for i in members)
                for _, omembers in classes(other_paths, t).items():
                    for i0 in members:
                        row = np.zeros((n, m))
                        for j in omembers:
                            if left_side:
                                row[i0, j] += pa
                            else:
                                row[j, i0] += pa
                        for i in members:
                            for j in omembers:
                                if left_side:
                                    row[i, j] -= w[i0]
                                else:
                                    row[j, i] -= w[i0]
                        rows.append(row.ravel())
                        rhs.append(0.0)

    add_causality(X, wa, Y, True)
    add_causality(Y, wb, X, False)
    return solve(cost, rows, rhs)


def main():
    worst = {"w": 0.0, "aw_nested": 0.0, "aw_flat": 0.0, "av": 0.0}
    with tempfile.TemporaryDirectory() as tmp:
        fa, fb = tmp + "/a.json", tmp + "/b.json"
        for trial in range(30):
            d = 1 + trial % 2
            T = 2 + (trial // 2) % 2
            p = 1.0 + trial % 2
            mu, nu = rand_measure(d, T, 3), rand_measure(d, T, 3)
            json.dump(mu, open(fa, "w"))
            json.dump(nu, open(fb, "w"))
            X = [np.array(a["path"]) for a in mu["atoms"]]
            Y = [np.array(a["path"]) for a in nu["atoms"]]

            w_cli = cli("dist", "w", fa, fb, "--p", str(p))
            worst["w"] = max(worst["w"], abs(w_cli - w_lp(mu, nu, p)))

            aw_cli = cli("dist", "aw", fa, fb, "--p", str(p))
            worst["aw_nested"] = max(worst["aw_nested"], abs(aw_cli - nested_aw(mu, nu, p)))
            stage = np.array([[sum(np.linalg.norm(x[t] - y[t]) ** p for t in range(T))
                               for y in Y] for x in X])
            worst["aw_flat"] = max(worst["aw_flat"],
                                   abs(aw_cli ** p - bicausal_lp(mu, nu, stage)))

            av_cli = cli("dist", "av", fa, fb)
            ind = np.array([[0.0 if np.array_equal(x, y) else 1.0 for y in Y] for x in X])
            worst["av"] = max(worst["av"], abs(av_cli - bicausal_lp(mu, nu, ind)))

    for k, v in worst.items():
        print(f"worst |{k}| deviation: {v:.3e}")
    assert all(v < 1e-7 for v in worst.values()), "cross-check mismatch"
    print("cross-check OK")


if __name__ == "__main__":
    main()
