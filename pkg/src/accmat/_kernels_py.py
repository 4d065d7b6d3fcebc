"""Pure-Python implementations of the numerical kernels.

These mirror ``_kernels.pyx`` line for line and are used whenever the
compiled extension is unavailable (or ``ACCMAT_PURE_PYTHON=1`` is set).
"""
import math

import numpy as np

_JACOBI_SWEEPS = 60


def accuracy_matrix(r, v):
    """Return sum_k r_k v_k v_k^T for weights ``r`` (m,) and vectors ``v`` (m, 3)."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    return (v.T * r) @ v


def fisher_matrix(r, v, s):
    """Return sum_k (r_k^2 / q_k) v_k v_k^T with q_k = r_k (1 + v_k . s).

    Elements with ``v_k = 0`` are skipped, so their probability may vanish.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    q = r * (1.0 + v @ np.asarray(s, dtype=float))
    active = np.any(v != 0.0, axis=1)
    w = np.zeros_like(r)
    w[active] = r[active] ** 2 / q[active]
    return (v.T * w) @ v


def eigh3(a):
    """Cyclic Jacobi eigendecomposition of a real symmetric 3x3 matrix.

    Returns ``(w, vecs)`` with eigenvalues in descending order and
    eigenvectors as columns; each eigenvector is signed so that its first
    component with magnitude above 1e-12 is positive.
    """
    m = [[float(a[i][j]) for j in range(3)] for i in range(3)]
    vec = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    scale = sum(m[i][j] ** 2 for i in range(3) for j in range(3))
    for _ in range(_JACOBI_SWEEPS):
        off = m[0][1] ** 2 + m[0][2] ** 2 + m[1][2] ** 2
        if off <= 1e-36 * scale or off == 0.0:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = m[p][q]
            if apq == 0.0:
                continue
            theta = (m[q][q] - m[p][p]) / (2.0 * apq)
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            for k in range(3):
                akp = m[k][p]
                akq = m[k][q]
                m[k][p] = c * akp - s * akq
                m[k][q] = s * akp + c * akq
            for k in range(3):
                apk = m[p][k]
                aqk = m[q][k]
                m[p][k] = c * apk - s * aqk
                m[q][k] = s * apk + c * aqk
            for k in range(3):
                vkp = vec[k][p]
                vkq = vec[k][q]
                vec[k][p] = c * vkp - s * vkq
                vec[k][q] = s * vkp + c * vkq
    order = sorted(range(3), key=lambda i: -m[i][i])
    w = np.array([m[i][i] for i in order])
    vecs = np.array([[vec[k][i] for i in order] for k in range(3)])
    for j in range(3):
        for k in range(3):
            if abs(vecs[k, j]) > 1e-12:
                if vecs[k, j] < 0.0:
                    vecs[:, j] = -vecs[:, j]
                break
    return w, vecs


def log_likelihood(r, v, counts, s):
    """Multinomial log-likelihood sum_k c_k ln(r_k (1 + v_k . s)).

    Returns ``-inf`` when an observed outcome has non-positive probability.
    """
    total = 0.0
    for rk, vk, ck in zip(r, v, counts):
        if ck == 0:
            continue
        qk = rk * (1.0 + vk[0] * s[0] + vk[1] * s[1] + vk[2] * s[2])
        if qk <= 0.0:
            return -math.inf
        total += ck * math.log(qk)
    return total


def log_likelihood_grad(r, v, counts, s):
    """Gradient sum_k c_k v_k / (1 + v_k . s) of :func:`log_likelihood`."""
    g = np.zeros(3)
    for vk, ck in zip(v, counts):
        if ck == 0:
            continue
        g += ck * np.asarray(vk) / (1.0 + vk[0] * s[0] + vk[1] * s[1] + vk[2] * s[2])
    return g


def _project_ball(t):
    norm = math.sqrt(sum(x * x for x in t))
    if norm > 1.0:
        return [x / norm for x in t]
    return list(t)


SPHERE_TOL = 1e-12


def _step(t, g, step):
    """Displacement ``P(t + step g) - t`` for the projection ``P`` onto the unit ball.

    When ``t`` sits on the sphere and the gradient points outward the
    projected point is a rotation of ``t`` towards the tangential gradient,
    so the displacement is built from the rotation angle rather than by
    subtracting two nearly equal unit vectors.
    """
    k = len(t)
    tt = sum(x * x for x in t)
    gr = sum(g[i] * t[i] for i in range(k))
    if tt >= 1.0 - SPHERE_TOL and gr > 0.0:
        tn = math.sqrt(tt)
        u = [x / tn for x in t]
        gr = sum(g[i] * u[i] for i in range(k))
        gt = [g[i] - gr * u[i] for i in range(k)]
        # second Gram-Schmidt pass: when gt is tiny its leftover radial part
        # would otherwise dominate the slope through the large g . u
        back = sum(gt[i] * u[i] for i in range(k))
        gt = [gt[i] - back * u[i] for i in range(k)]
        gt_norm = math.sqrt(sum(x * x for x in gt))
        if gt_norm == 0.0:
            return [0.0] * k
        phi = math.atan2(step * gt_norm, 1.0 + step * gr)
        half = math.sin(0.5 * phi)
        sin_phi = math.sin(phi)
        # (cos phi - 1) u + sin phi e; the rounding gap between t and u is left
        # out so it cannot swamp the tiny gains near convergence
        return [(-2.0 * half * half) * u[i] + sin_phi * gt[i] / gt_norm for i in range(k)]
    trial = _project_ball([t[i] + step * g[i] for i in range(k)])
    return [trial[i] - t[i] for i in range(k)]


def _grad(w, c, t):
    k = len(t)
    g = [0.0] * k
    for wj, cj in zip(w, c):
        den = 1.0
        for i in range(k):
            den += wj[i] * t[i]
        for i in range(k):
            g[i] += cj * wj[i] / den
    return g


def _delta_f(w, c, t, d):
    # f(t + d) - f(t) summed through log1p so tiny steps are not lost to rounding
    k = len(t)
    total = 0.0
    for wj, cj in zip(w, c):
        den = 1.0
        num = 0.0
        for i in range(k):
            den += wj[i] * t[i]
            num += wj[i] * d[i]
        ratio = num / den
        if ratio <= -1.0:
            return -math.inf
        total += cj * math.log1p(ratio)
    return total


def mle_ascent(w, c, tol=1e-10, max_iter=100000, armijo=1e-4, shrink=0.5):
    """Maximise the normalised log-likelihood over the unit ball in support coordinates.

    Parameters
    ----------
    w : (m, k) array
        Element vectors expressed in an orthonormal basis of the support,
        restricted to outcomes with nonzero counts.
    c : (m,) array
        Observed frequencies (counts divided by their total).

    Returns
    -------
    t : list of float
        Maximiser in support coordinates.
    iterations : int
    converged : bool
    """
    w = [list(map(float, row)) for row in w]
    c = [float(x) for x in c]
    k = len(w[0]) if w else 0
    t = [0.0] * k
    if k == 0:
        return t, 0, True
    g = _grad(w, c, t)
    alpha = 1.0
    for it in range(max_iter):
        pg = math.sqrt(sum(x * x for x in _step(t, g, 1.0)))
        if pg <= tol:
            return t, it, True
        step = alpha
        while True:
            d = _step(t, g, step)
            slope = sum(g[i] * d[i] for i in range(k))
            gain = _delta_f(w, c, t, d)
            if gain >= armijo * slope:
                break
            step *= shrink
            if step < 1e-300:
                return t, it, False
        trial = _project_ball([t[i] + d[i] for i in range(k)])
        g_new = _grad(w, c, trial)
        sy = sum(d[i] * (g_new[i] - g[i]) for i in range(k))
        ss = sum(d[i] * d[i] for i in range(k))
        if sy < 0.0:
            alpha = min(max(ss / -sy, 1e-10), 1e10)
        else:
            alpha = 1e10
        t = trial
        g = g_new
    return t, max_iter, False
