"""SMO solver for the soft-margin kernel SVM dual.

Minimizes 0.5*a'Qa - e'a subject to y'a = 0 and 0 <= a <= C, where
Q[i,j] = y[i]*y[j]*K(x_i, x_j). Working-set selection is the maximal
violating pair with first-index tie-breaking, so runs are deterministic
for a fixed input order.

This is the package's hot loop: model selection evaluates hundreds of
candidates, each with several small fits. The same function below is
either compiled with numba or executed as plain Python, per the
``VOWELSPELL_BACKEND`` flag (see backend.py).
"""

import numpy as np

from .backend import active_backend

_TAU = 1e-12


def _smo_kernel(Q, y, C, tol, max_iter):
    n = Q.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    iterations = 0
    for _ in range(max_iter):
        # Maximal violating pair over the feasible ascent/descent sets.
        i = -1
        gmax = -1e308
        for k in range(n):
            if (y[k] > 0 and alpha[k] < C) or (y[k] < 0 and alpha[k] > 0):
                v = -y[k] * grad[k]
                if v > gmax:
                    gmax = v
                    i = k
        j = -1
        gmin = 1e308
        for k in range(n):
            if (y[k] > 0 and alpha[k] > 0) or (y[k] < 0 and alpha[k] < C):
                v = -y[k] * grad[k]
                if v < gmin:
                    gmin = v
                    j = k
        if i < 0 or j < 0 or gmax - gmin <= tol:
            break
        iterations += 1

        quad = Q[i, i] + Q[j, j] - 2.0 * y[i] * y[j] * Q[i, j]
        if quad <= 0.0:
            quad = _TAU
        step = (gmax - gmin) / quad

        old_ai = alpha[i]
        old_aj = alpha[j]
        # The equality constraint fixes s; clip both ends of the segment.
        s = y[i] * old_ai + y[j] * old_aj
        ai = old_ai + y[i] * step
        if ai > C:
            ai = C
        elif ai < 0.0:
            ai = 0.0
        aj = y[j] * (s - y[i] * ai)
        if aj > C:
            aj = C
        elif aj < 0.0:
            aj = 0.0
        ai = y[i] * (s - y[j] * aj)
        if ai > C:
            ai = C
        elif ai < 0.0:
            ai = 0.0
        alpha[i] = ai
        alpha[j] = aj

        dai = ai - old_ai
        daj = aj - old_aj
        for k in range(n):
            grad[k] += Q[k, i] * dai + Q[k, j] * daj

    # Bias from the KKT conditions: average over free vectors when any
    # exist, else the midpoint of the active bounds.
    n_free = 0
    sum_free = 0.0
    ub = 1e308
    lb = -1e308
    for k in range(n):
        yg = y[k] * grad[k]
        if alpha[k] >= C:
            if y[k] < 0:
                if yg < ub:
                    ub = yg
            else:
                if yg > lb:
                    lb = yg
        elif alpha[k] <= 0.0:
            if y[k] > 0:
                if yg < ub:
                    ub = yg
            else:
                if yg > lb:
                    lb = yg
        else:
            n_free += 1
            sum_free += yg
    if n_free > 0:
        rho = sum_free / n_free
    else:
        rho = (ub + lb) / 2.0
    return alpha, -rho, iterations


_COMPILED = None


def _numba_kernel():
    global _COMPILED
    if _COMPILED is None:
        from numba import njit

        _COMPILED = njit(cache=True)(_smo_kernel)
    return _COMPILED


def solve(Q, y, C, tol=1e-6, max_iter=10000, backend=None):
    """Run the SMO kernel on the selected backend.

    Returns (alpha, bias, iterations).
    """
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    name = backend or active_backend()
    if name == "numba":
        fn = _numba_kernel()
    else:
        fn = _smo_kernel
    return fn(Q, y, float(C), float(tol), int(max_iter))
