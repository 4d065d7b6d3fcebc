# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels; see ``_kernels_py`` for the reference versions."""
import numpy as np

from libc.math cimport sqrt, fabs, log, log1p, INFINITY, copysign, atan2, sin

DEF JACOBI_SWEEPS = 60


def accuracy_matrix(r, v):
    cdef const double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef const double[:, ::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    out = np.zeros((3, 3))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t k, i, j
    for k in range(rv.shape[0]):
        for i in range(3):
            for j in range(3):
                o[i, j] += rv[k] * vv[k, i] * vv[k, j]
    return out


def fisher_matrix(r, v, s):
    cdef const double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef const double[:, ::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    out = np.zeros((3, 3))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t k, i, j
    cdef double q, wk
    for k in range(rv.shape[0]):
        if vv[k, 0] == 0.0 and vv[k, 1] == 0.0 and vv[k, 2] == 0.0:
            continue
        q = rv[k] * (1.0 + vv[k, 0] * sv[0] + vv[k, 1] * sv[1] + vv[k, 2] * sv[2])
        wk = rv[k] * rv[k] / q
        for i in range(3):
            for j in range(3):
                o[i, j] += wk * vv[k, i] * vv[k, j]
    return out


def eigh3(a):
    cdef double m[3][3]
    cdef double vec[3][3]
    cdef Py_ssize_t i, j, k, p, q, sweep, pair
    cdef double scale = 0.0, off, apq, theta, t, c, s, x, y
    cdef int pp[3]
    cdef int qq[3]
    pp[0] = 0; qq[0] = 1
    pp[1] = 0; qq[1] = 2
    pp[2] = 1; qq[2] = 2
    arr = np.asarray(a, dtype=np.float64)
    for i in range(3):
        for j in range(3):
            m[i][j] = arr[i, j]
            vec[i][j] = 1.0 if i == j else 0.0
            scale += m[i][j] * m[i][j]
    for sweep in range(JACOBI_SWEEPS):
        off = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]
        if off <= 1e-36 * scale or off == 0.0:
            break
        for pair in range(3):
            p = pp[pair]
            q = qq[pair]
            apq = m[p][q]
            if apq == 0.0:
                continue
            theta = (m[q][q] - m[p][p]) / (2.0 * apq)
            t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
            c = 1.0 / sqrt(t * t + 1.0)
            s = t * c
            for k in range(3):
                x = m[k][p]
                y = m[k][q]
                m[k][p] = c * x - s * y
                m[k][q] = s * x + c * y
            for k in range(3):
                x = m[p][k]
                y = m[q][k]
                m[p][k] = c * x - s * y
                m[q][k] = s * x + c * y
            for k in range(3):
                x = vec[k][p]
                y = vec[k][q]
                vec[k][p] = c * x - s * y
                vec[k][q] = s * x + c * y
    order = sorted(range(3), key=lambda ii: -m[ii][ii])
    w = np.array([m[ii][ii] for ii in order])
    vecs = np.array([[vec[kk][ii] for ii in order] for kk in range(3)])
    for j in range(3):
        for k in range(3):
            if fabs(vecs[k, j]) > 1e-12:
                if vecs[k, j] < 0.0:
                    vecs[:, j] = -vecs[:, j]
                break
    return w, vecs


def log_likelihood(r, v, counts, s):
    cdef const double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef const double[:, ::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(counts, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef double total = 0.0, qk
    cdef Py_ssize_t k
    for k in range(rv.shape[0]):
        if cv[k] == 0.0:
            continue
        qk = rv[k] * (1.0 + vv[k, 0] * sv[0] + vv[k, 1] * sv[1] + vv[k, 2] * sv[2])
        if qk <= 0.0:
            return -INFINITY
        total += cv[k] * log(qk)
    return total


def log_likelihood_grad(r, v, counts, s):
    cdef const double[:, ::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(counts, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    out = np.zeros(3)
    cdef double[::1] g = out
    cdef double den
    cdef Py_ssize_t k, i
    for k in range(vv.shape[0]):
        if cv[k] == 0.0:
            continue
        den = 1.0 + vv[k, 0] * sv[0] + vv[k, 1] * sv[1] + vv[k, 2] * sv[2]
        for i in range(3):
            g[i] += cv[k] * vv[k, i] / den
    return out


cdef inline void _project_ball(double* t, Py_ssize_t k):
    cdef double norm = 0.0
    cdef Py_ssize_t i
    for i in range(k):
        norm += t[i] * t[i]
    norm = sqrt(norm)
    if norm > 1.0:
        for i in range(k):
            t[i] /= norm


cdef void _step(double* t, double* g, double step, Py_ssize_t k, double* d):
    # mirrors _kernels_py._step
    cdef double tt = 0.0, gr = 0.0, tn, gt_norm = 0.0, phi, half, sin_phi, back
    cdef double u[3]
    cdef double gt[3]
    cdef Py_ssize_t i
    for i in range(k):
        tt += t[i] * t[i]
        gr += g[i] * t[i]
    if tt >= 1.0 - 1e-12 and gr > 0.0:
        tn = sqrt(tt)
        gr = 0.0
        for i in range(k):
            u[i] = t[i] / tn
            gr += g[i] * u[i]
        back = 0.0
        for i in range(k):
            gt[i] = g[i] - gr * u[i]
            back += gt[i] * u[i]
        for i in range(k):
            gt[i] -= back * u[i]
            gt_norm += gt[i] * gt[i]
        gt_norm = sqrt(gt_norm)
        if gt_norm == 0.0:
            for i in range(k):
                d[i] = 0.0
            return
        phi = atan2(step * gt_norm, 1.0 + step * gr)
        half = sin(0.5 * phi)
        sin_phi = sin(phi)
        for i in range(k):
            d[i] = (-2.0 * half * half) * u[i] + sin_phi * gt[i] / gt_norm
        return
    for i in range(k):
        d[i] = t[i] + step * g[i]
    _project_ball(d, k)
    for i in range(k):
        d[i] -= t[i]


cdef void _grad(const double[:, ::1] w, const double[::1] c, double* t, Py_ssize_t k, double* g):
    cdef Py_ssize_t j, i
    cdef double den
    for i in range(k):
        g[i] = 0.0
    for j in range(w.shape[0]):
        den = 1.0
        for i in range(k):
            den += w[j, i] * t[i]
        for i in range(k):
            g[i] += c[j] * w[j, i] / den


cdef double _delta_f(const double[:, ::1] w, const double[::1] c, double* t, double* d, Py_ssize_t k):
    cdef Py_ssize_t j, i
    cdef double den, num, ratio, total = 0.0
    for j in range(w.shape[0]):
        den = 1.0
        num = 0.0
        for i in range(k):
            den += w[j, i] * t[i]
            num += w[j, i] * d[i]
        ratio = num / den
        if ratio <= -1.0:
            return -INFINITY
        total += c[j] * log1p(ratio)
    return total


def mle_ascent(w, c, double tol=1e-10, long max_iter=100000,
               double armijo=1e-4, double shrink=0.5):
    warr = np.ascontiguousarray(w, dtype=np.float64)
    if warr.ndim != 2:
        warr = warr.reshape(0, 0)
    cdef Py_ssize_t k = warr.shape[1] if warr.shape[0] else 0
    cdef const double[:, ::1] wv = warr
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double t[3]
    cdef double g[3]
    cdef double g_new[3]
    cdef double trial[3]
    cdef double d[3]
    cdef double alpha = 1.0, step, pg, slope, gain, sy, ss
    cdef long it
    cdef Py_ssize_t i
    for i in range(3):
        t[i] = 0.0
    if k == 0:
        return [], 0, True
    _grad(wv, cv, t, k, g)
    for it in range(max_iter):
        _step(t, g, 1.0, k, d)
        pg = 0.0
        for i in range(k):
            pg += d[i] * d[i]
        if sqrt(pg) <= tol:
            return [t[i] for i in range(k)], it, True
        step = alpha
        while True:
            _step(t, g, step, k, d)
            slope = 0.0
            for i in range(k):
                slope += g[i] * d[i]
            gain = _delta_f(wv, cv, t, d, k)
            if gain >= armijo * slope:
                break
            step *= shrink
            if step < 1e-300:
                return [t[i] for i in range(k)], it, False
        for i in range(k):
            trial[i] = t[i] + d[i]
        _project_ball(trial, k)
        _grad(wv, cv, trial, k, g_new)
        sy = 0.0
        ss = 0.0
        for i in range(k):
            sy += d[i] * (g_new[i] - g[i])
            ss += d[i] * d[i]
        if sy < 0.0:
            alpha = min(max(ss / -sy, 1e-10), 1e10)
        else:
            alpha = 1e10
        for i in range(k):
            t[i] = trial[i]
            g[i] = g_new[i]
    return [t[i] for i in range(k)], max_iter, False
