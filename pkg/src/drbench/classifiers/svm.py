"""Soft-margin SVM trained by sequential minimal optimization.

The dual

    max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0

is solved two variables at a time. The pair is picked with the
second-order working-set rule of Fan, Chen & Lin (2005): the first index
maximally violates the KKT conditions, the second maximizes the guaranteed
objective decrease. Iteration stops when the maximal violation gap falls
below `tol` or after `max_iter` pair updates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numba
import numpy as np

from .base import FittedClassifier, check_training_data

log = logging.getLogger(__name__)

KKT_TOL = 1e-3
MAX_ITER = 10**6
_TAU = 1e-12


@numba.njit(cache=True)
def _bound_masks(y, a, C):
    # additive penalties: 0 where the index may move that way, +-inf otherwise
    up = 0.0 if (y > 0 and a < C) or (y < 0 and a > 0) else -np.inf
    low = 0.0 if (y > 0 and a > 0) or (y < 0 and a < C) else np.inf
    return up, low


@numba.njit(cache=True)
def _smo(K, y, C, tol, max_iter):
    n = y.shape[0]
    alpha = np.zeros(n)
    # F = -y * G, where G is the gradient of 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij
    F = y.copy()
    pen_up = np.empty(n)
    pen_low = np.empty(n)
    diag = np.empty(n)
    for t in range(n):
        pen_up[t], pen_low[t] = _bound_masks(y[t], 0.0, C)
        diag[t] = K[t, t]
    it = 0
    converged = False

    g_up = -np.inf
    i = -1
    for t in range(n):
        v = F[t] + pen_up[t]
        if v > g_up:
            g_up = v
            i = t
    while True:
        g_low = np.inf
        j = -1
        # best decrease b^2/a, kept as a fraction to avoid a division per element
        best_num = 0.0
        best_den = 1.0
        if i >= 0:
            Ki = K[i]
            Kii = diag[i]
            for t in range(n):
                v = F[t] + pen_low[t]
                if v < g_low:
                    g_low = v
                b = g_up - v
                if b > 0:
                    a = Kii + diag[t] - 2.0 * Ki[t]
                    if a <= 0:
                        a = _TAU
                    if b * b * best_den > best_num * a:
                        best_num = b * b
                        best_den = a
                        j = t
        if i < 0 or j < 0 or g_up - g_low < tol:
            converged = True
            break
        if it >= max_iter:
            break

        Gi = -y[i] * F[i]
        Gj = -y[j] * F[j]
        ai_old = alpha[i]
        aj_old = alpha[j]
        quad = diag[i] + diag[j] - 2.0 * K[i, j]
        if quad <= 0:
            quad = _TAU
        if y[i] != y[j]:
            delta = (-Gi - Gj) / quad
            diff = ai_old - aj_old
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            delta = (Gi - Gj) / quad
            total = ai_old + aj_old
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        pen_up[i], pen_low[i] = _bound_masks(y[i], alpha[i], C)
        pen_up[j], pen_low[j] = _bound_masks(y[j], alpha[j], C)

        ci = y[i] * (alpha[i] - ai_old)
        cj = y[j] * (alpha[j] - aj_old)
        Ki = K[i]
        Kj = K[j]
        g_up = -np.inf
        i = -1
        for t in range(n):
            F[t] -= Ki[t] * ci + Kj[t] * cj
            v = F[t] + pen_up[t]
            if v > g_up:
                g_up = v
                i = t
        it += 1

    # intercept: average over free vectors, else midpoint of the feasible interval
    ub = np.inf
    lb = -np.inf
    free_sum = 0.0
    n_free = 0
    for t in range(n):
        yg = -F[t]
        if alpha[t] >= C:
            if y[t] < 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[t] <= 0:
            if y[t] > 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            n_free += 1
            free_sum += yg
    if n_free > 0:
        rho = free_sum / n_free
    else:
        rho = 0.5 * (ub + lb)
    return alpha, -rho, it, converged


def linear_kernel(A, B):
    return A @ B.T


def rbf_kernel(A, B, gamma):
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


@dataclass(frozen=True, eq=False)
class SvmModel(FittedClassifier):
    kernel: str
    C: float
    gamma: float
    alpha: np.ndarray  # one per training sample
    dual_coef: np.ndarray  # alpha_i * y_i for the support vectors
    support_vectors: np.ndarray
    support: np.ndarray  # training-row indices of the support vectors
    bias: float
    n_iter: int
    converged: bool
    dual_objective: float

    @property
    def n_features(self):
        return self.support_vectors.shape[1]

    @property
    def status(self) -> str:
        return "converged" if self.converged else "max_iter"

    def kernel_matrix(self, A, B):
        if self.kernel == "linear":
            return linear_kernel(A, B)
        return rbf_kernel(A, B, self.gamma)

    def decision_score(self, X):
        X = self._check(X)
        if self.support.size == 0:
            return np.full(X.shape[0], self.bias)
        return self.kernel_matrix(X, self.support_vectors) @ self.dual_coef + self.bias

    def describe(self):
        out = {"n_features": self.n_features, "kernel": self.kernel, "C": self.C,
               "n_support": int(self.support.size), "n_iter": self.n_iter,
               "status": self.status}
        if self.kernel == "rbf":
            out["gamma"] = self.gamma
        return out


def svm_fit(X, y, C: float = 1.0, kernel: str = "rbf", gamma: float = 1.0,
            tol: float = KKT_TOL, max_iter: int = MAX_ITER) -> SvmModel:
    X, y01 = check_training_data(X, y)
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    if kernel == "linear":
        K = linear_kernel(X, X)
    elif kernel == "rbf":
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        K = rbf_kernel(X, X, gamma)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    ys = np.where(y01 == 1, 1.0, -1.0)
    alpha, b, n_iter, converged = _smo(np.ascontiguousarray(K), ys, float(C), float(tol),
                                       int(max_iter))
    if not converged:
        log.debug("SMO stopped at the iteration cap (%d) before reaching KKT tolerance %g"
                  " (kernel=%s, C=%g, gamma=%g)", max_iter, tol, kernel, C, gamma)
    ay = alpha * ys
    dual = float(alpha.sum() - 0.5 * ay @ K @ ay)
    sv = np.flatnonzero(alpha > 0)
    arrays = (alpha, ay[sv], X[sv].copy(), sv)
    for a in arrays:
        a.flags.writeable = False
    return SvmModel(kernel, float(C), float(gamma) if kernel == "rbf" else 0.0, *arrays,
                    float(b), int(n_iter), bool(converged), dual)
