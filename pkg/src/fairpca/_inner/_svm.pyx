# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops for the SVM trainers.

Mirrors ``_svm_py`` exactly: same update order, same first-index tie
breaking, same stopping rules. See that module for the algorithm notes.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def dcd_fit(object X_in, object y_in, object cost_in, long max_epochs, double tol):
    """Dual coordinate descent for the L1-loss linear SVM.

    Returns (w, alpha, epochs_run, last_max_violation).
    """
    cdef double[:, ::1] X = np.ascontiguousarray(X_in, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef double[::1] cost = np.ascontiguousarray(cost_in, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t q = X.shape[1]

    alpha_arr = np.zeros(n, dtype=np.float64)
    w_arr = np.zeros(q, dtype=np.float64)
    qdiag_arr = np.einsum("ij,ij->i", np.asarray(X), np.asarray(X))
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] w = w_arr
    cdef double[::1] qdiag = np.ascontiguousarray(qdiag_arr, dtype=np.float64)

    cdef Py_ssize_t i, k, epoch
    cdef long epochs_run = 0
    cdef double g, pg, apg, a, a_new, d, max_pg
    max_pg = 0.0
    for epoch in range(max_epochs):
        epochs_run += 1
        max_pg = 0.0
        for i in range(n):
            if qdiag[i] <= 0.0:
                continue
            g = 0.0
            for k in range(q):
                g += w[k] * X[i, k]
            g = y[i] * g - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = g if g < 0.0 else 0.0
            elif a >= cost[i]:
                pg = g if g > 0.0 else 0.0
            else:
                pg = g
            apg = -pg if pg < 0.0 else pg
            if apg > max_pg:
                max_pg = apg
            if apg > 1e-12:
                a_new = a - g / qdiag[i]
                if a_new < 0.0:
                    a_new = 0.0
                elif a_new > cost[i]:
                    a_new = cost[i]
                d = (a_new - a) * y[i]
                if d != 0.0:
                    for k in range(q):
                        w[k] += d * X[i, k]
                alpha[i] = a_new
        if max_pg < tol:
            break
    return w_arr, alpha_arr, epochs_run, max_pg


def smo_fit(object K_in, object y_in, object cost_in, double tol, long max_iter):
    """SMO on a precomputed Gram matrix, max-violating-pair selection.

    Returns (alpha, bias, iterations, last_violation).
    """
    cdef double[:, ::1] K = np.ascontiguousarray(K_in, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef double[::1] cost = np.ascontiguousarray(cost_in, dtype=np.float64)
    cdef Py_ssize_t n = K.shape[0]

    alpha_arr = np.zeros(n, dtype=np.float64)
    grad_arr = -np.ones(n, dtype=np.float64)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] grad = grad_arr

    cdef Py_ssize_t i, j, t
    cdef long iters = 0
    cdef double m_val = 0.0
    cdef double big_m_val = 0.0
    cdef double cur_m = 0.0
    cdef double cur_M = 0.0
    cdef double v, quad, delta, diff, total
    cdef double old_i, old_j, ai, aj, ci, cj, coef_i, coef_j
    cdef bint up_found, low_found

    while iters < max_iter:
        # max-violating-pair selection; ascending scan keeps ties on the
        # first index, matching numpy argmax/argmin in the fallback
        i = -1
        j = -1
        up_found = False
        low_found = False
        cur_m = 0.0
        cur_M = 0.0
        for t in range(n):
            v = -y[t] * grad[t]
            if (y[t] > 0.0 and alpha[t] < cost[t]) or (y[t] < 0.0 and alpha[t] > 0.0):
                if not up_found or v > cur_m:
                    cur_m = v
                    i = t
                    up_found = True
            if (y[t] > 0.0 and alpha[t] > 0.0) or (y[t] < 0.0 and alpha[t] < cost[t]):
                if not low_found or v < cur_M:
                    cur_M = v
                    j = t
                    low_found = True
        if not up_found or not low_found:
            break
        m_val = cur_m
        big_m_val = cur_M
        if m_val - big_m_val <= tol:
            break
        iters += 1

        old_i = alpha[i]
        old_j = alpha[j]
        ci = cost[i]
        cj = cost[j]
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0.0:
            quad = 1e-12
        if y[i] != y[j]:
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
            for t in range(n):
                grad[t] += (coef_i * y[t]) * K[i, t]
        if coef_j != 0.0:
            for t in range(n):
                grad[t] += (coef_j * y[t]) * K[j, t]

    bias = 0.5 * (m_val + big_m_val)
    violation = m_val - big_m_val
    if violation < 0.0:
        violation = 0.0
    return alpha_arr, bias, iters, violation
