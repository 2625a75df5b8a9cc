"""Slow, direct reference implementations used only by the tests."""

import itertools
import math

import numpy as np


def naive_anova(X, y):
    """F = MS_B / MS_W, written out with explicit loops over groups and observations."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    groups = sorted(set(int(v) for v in y))
    m = len(groups)
    out = []
    for j in range(d):
        col = [float(X[r, j]) for r in range(n)]
        grand = sum(col) / n
        between = 0.0
        within = 0.0
        for g in groups:
            xs = [col[r] for r in range(n) if int(y[r]) == g]
            mean_g = sum(xs) / len(xs)
            between += len(xs) * (mean_g - grand) ** 2
            for x in xs:
                within += (x - mean_g) ** 2
        ms_b = between / (m - 1)
        ms_w = within / (n - m)
        out.append(ms_b / ms_w if ms_w > 0 else (math.inf if ms_b > 0 else 0.0))
    return np.array(out)


def mann_whitney_auc(scores, truth):
    """(concordant + 1/2 tied) positive/negative pairs over P * N."""
    pos = [s for s, t in zip(scores, truth) if t == 1]
    neg = [s for s, t in zip(scores, truth) if t == 0]
    twice = 0
    for p in pos:
        for q in neg:
            twice += 2 if p > q else (1 if p == q else 0)
    return twice / (2 * len(pos) * len(neg))


def covariance_eigenvalues(X):
    """Eigenvalues of the explicitly formed sample covariance, descending."""
    X = np.asarray(X, dtype=float)
    C = np.cov(X, rowvar=False, ddof=1).reshape(X.shape[1], X.shape[1])
    return np.sort(np.linalg.eigvalsh(C))[::-1]


def dual_objective(alpha, Q):
    return float(alpha.sum() - 0.5 * alpha @ Q @ alpha)


def kkt_violation(model, X, y):
    """Largest violation of the per-sample KKT conditions of a fitted SVM."""
    ys = np.where(np.asarray(y) == 1, 1.0, -1.0)
    m = ys * model.decision_score(X)
    a, C = model.alpha, model.C
    viol = np.where(a <= 0, np.maximum(0, 1 - m),
                    np.where(a >= C, np.maximum(0, m - 1), np.abs(m - 1)))
    return float(viol.max())


def brute_force_svm_dual(K, y, C):
    """Maximum of the soft-margin SVM dual by enumerating every active set.

    Each variable is pinned at 0, pinned at C, or free; the free ones solve
    the stationarity system of the face with the equality constraint.
    Feasible stationary points are compared and the best value returned.
    """
    n = len(y)
    y = np.asarray(y, dtype=float)
    Q = np.outer(y, y) * K
    best = -np.inf
    best_alpha = None
    for state in itertools.product((0, 1, 2), repeat=n):
        free = [i for i in range(n) if state[i] == 2]
        alpha = np.array([C if s == 1 else 0.0 for s in state])
        if not free:
            if abs(y @ alpha) > 1e-9 * max(1.0, C):
                continue
        else:
            fixed = [i for i in range(n) if state[i] != 2]
            f = len(free)
            A = np.zeros((f + 1, f + 1))
            A[:f, :f] = Q[np.ix_(free, free)]
            A[:f, f] = y[free]
            A[f, :f] = y[free]
            rhs = np.zeros(f + 1)
            rhs[:f] = 1.0 - Q[np.ix_(free, fixed)] @ alpha[fixed]
            rhs[f] = -y[fixed] @ alpha[fixed]
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            if np.linalg.norm(A @ sol - rhs) > 1e-7 * max(1.0, np.abs(rhs).max()):
                continue
            af = sol[:f]
            if np.any(af < -1e-9 * C) or np.any(af > C * (1 + 1e-9)):
                continue
            alpha[free] = np.clip(af, 0.0, C)
        val = dual_objective(alpha, Q)
        if val > best:
            best, best_alpha = val, alpha
    return best, best_alpha


def gini_node(labels):
    n = len(labels)
    p = sum(labels) / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def exhaustive_tree(X, y, rows=None):
    """Nested-dict CART tree: try every feature and every midpoint, keep the best Gini gain.

    Ties keep the lower feature index, then the lower threshold.
    """
    if rows is None:
        rows = list(range(len(y)))
    labels = [int(y[r]) for r in rows]
    frac = sum(labels) / len(labels)
    if len(rows) < 2 or frac in (0.0, 1.0):
        return {"leaf": frac}
    parent = gini_node(labels)
    n = len(rows)
    best = None
    for f in range(X.shape[1]):
        values = sorted(set(float(X[r, f]) for r in rows))
        for lo, hi in zip(values, values[1:]):
            thr = 0.5 * (lo + hi)
            if not lo <= thr < hi:
                thr = lo
            left = [int(y[r]) for r in rows if X[r, f] <= thr]
            right = [int(y[r]) for r in rows if X[r, f] > thr]
            nl, nr = len(left), len(right)
            gain = parent - (nl * gini_node(left) + nr * gini_node(right)) / n
            if best is None or gain > best[0]:
                best = (gain, f, thr)
    if best is None:
        return {"leaf": frac}
    _, f, thr = best
    return {
        "feature": f, "threshold": thr,
        "left": exhaustive_tree(X, y, [r for r in rows if X[r, f] <= thr]),
        "right": exhaustive_tree(X, y, [r for r in rows if X[r, f] > thr]),
    }


def tree_fraction(tree, x):
    while "leaf" not in tree:
        tree = tree["left"] if x[tree["feature"]] <= tree["threshold"] else tree["right"]
    return tree["leaf"]


def gaussian_pdf(x, mu, var):
    return math.exp(-((x - mu) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
