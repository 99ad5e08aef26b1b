"""Pure-Python reference implementation of the SVM inner loops.

Kept in lockstep with the Cython extension ``_svm.pyx``: same update order,
same tie-breaking (first index wins), same stopping rules. Used when the
extension is unavailable or when ``FAIRPCA_PURE_PYTHON=1``.
"""

from __future__ import annotations

import numpy as np


def dcd_fit(X, y, cost, max_epochs, tol):
    """Dual coordinate descent for the L1-loss linear SVM.

    Minimizes 0.5*||w||^2 + sum_i cost_i * hinge(y_i, w.x_i) over the dual
    box, sweeping coordinates cyclically. ``X`` already carries the bias
    column if one is wanted.

    Returns (w, alpha, epochs_run, last_max_violation).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    cost = np.asarray(cost, dtype=np.float64)
    n, q = X.shape
    alpha = np.zeros(n)
    w = np.zeros(q)
    qdiag = np.einsum("ij,ij->i", X, X)

    epochs_run = 0
    max_pg = 0.0
    for _ in range(max_epochs):
        epochs_run += 1
        max_pg = 0.0
        for i in range(n):
            if qdiag[i] <= 0.0:
                continue
            g = y[i] * float(np.dot(w, X[i])) - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= cost[i]:
                pg = max(g, 0.0)
            else:
                pg = g
            apg = abs(pg)
            if apg > max_pg:
                max_pg = apg
            if apg > 1e-12:
                a_new = min(max(a - g / qdiag[i], 0.0), cost[i])
                d = (a_new - a) * y[i]
                if d != 0.0:
                    w += d * X[i]
                alpha[i] = a_new
        if max_pg < tol:
            break
    return w, alpha, epochs_run, max_pg


def smo_fit(K, y, cost, tol, max_iter):
    """SMO on a precomputed Gram matrix, max-violating-pair selection.

    Solves the standard C-SVM dual with per-sample costs. Stops when the
    KKT violation m(alpha) - M(alpha) drops to ``tol`` or the iteration
    budget runs out.

    Returns (alpha, bias, iterations, last_violation).
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    cost = np.asarray(cost, dtype=np.float64)
    n = K.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)

    up_mask = np.empty(n, dtype=bool)
    low_mask = np.empty(n, dtype=bool)
    m_val = 0.0
    big_m_val = 0.0
    iters = 0
    while iters < max_iter:
        pos = y > 0.0
        np.less(alpha, cost, out=up_mask)
        up_mask &= pos
        up_mask |= (~pos) & (alpha > 0.0)
        np.greater(alpha, 0.0, out=low_mask)
        low_mask &= pos
        low_mask |= (~pos) & (alpha < cost)

        viol = -y * grad
        if not up_mask.any() or not low_mask.any():
            break
        up_vals = np.where(up_mask, viol, -np.inf)
        low_vals = np.where(low_mask, viol, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        m_val = float(up_vals[i])
        big_m_val = float(low_vals[j])
        if m_val - big_m_val <= tol:
            break
        iters += 1

        old_i = alpha[i]
        old_j = alpha[j]
        ci = cost[i]
        cj = cost[j]
        if y[i] != y[j]:
            # curvature along the feasible direction is |phi_i - phi_j|^2
            # in both branches
            quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
            if quad <= 0.0:
                quad = 1e-12
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            ai = old_i + delta
            aj = old_j + delta
            if diff > 0.0:
                if aj < 0.0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0.0:
                    ai = 0.0
                    aj = -diff
            if diff > ci - cj:
                if ai > ci:
                    ai = ci
                    aj = ci - diff
            else:
                if aj > cj:
                    aj = cj
                    ai = cj + diff
        else:
            quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
            if quad <= 0.0:
                quad = 1e-12
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            ai = old_i - delta
            aj = old_j + delta
            if total > ci:
                if ai > ci:
                    ai = ci
                    aj = total - ci
            else:
                if aj < 0.0:
                    aj = 0.0
                    ai = total
            if total > cj:
                if aj > cj:
                    aj = cj
                    ai = total - cj
            else:
                if ai < 0.0:
                    ai = 0.0
                    aj = total
        alpha[i] = ai
        alpha[j] = aj
        coef_i = (ai - old_i) * y[i]
        coef_j = (aj - old_j) * y[j]
        if coef_i != 0.0:
            grad += (coef_i * y) * K[i]
        if coef_j != 0.0:
            grad += (coef_j * y) * K[j]

    bias = 0.5 * (m_val + big_m_val)
    return alpha, bias, iters, max(0.0, m_val - big_m_val)
