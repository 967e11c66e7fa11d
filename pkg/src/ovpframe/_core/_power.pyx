# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled power iteration for induced mixed-norm gains (real scalars).

Same contract and norm encoding as ``_power_py.power_gain``; starts are
iterated one at a time in C.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline double conj_exp(double r) nogil:
    if r == 1.0:
        return INFINITY
    if r == INFINITY:
        return 1.0
    return r / (r - 1.0)


cdef inline double sgn(double v) nogil:
    if v > 0:
        return 1.0
    if v < 0:
        return -1.0
    return 0.0


cdef double plain_norm(const double* v, Py_ssize_t n, Py_ssize_t stride, double r) nogil:
    cdef Py_ssize_t i
    cdef double m = 0.0, s = 0.0, a
    for i in range(n):
        a = fabs(v[i * stride])
        if a > m:
            m = a
    if r == INFINITY or m == 0.0:
        return m
    if r == 1.0:
        for i in range(n):
            s += fabs(v[i * stride])
        return s
    if r == 2.0:
        for i in range(n):
            a = v[i * stride] / m
            s += a * a
        return m * sqrt(s)
    for i in range(n):
        s += pow(fabs(v[i * stride]) / m, r)
    return m * pow(s, 1.0 / r)


cdef double mixed_norm(const double* v, Py_ssize_t nb, Py_ssize_t bs,
                       double outer, double inner, double* work) nogil:
    cdef Py_ssize_t b
    for b in range(nb):
        work[b] = plain_norm(v + b * bs, bs, 1, inner)
    return plain_norm(work, nb, 1, outer)


cdef void plain_dual(const double* z, double* out, Py_ssize_t n, double r) nogil:
    cdef Py_ssize_t i, best = 0
    cdef double m = 0.0, q, nrm, a, u
    if r == INFINITY:
        for i in range(n):
            out[i] = sgn(z[i])
        return
    for i in range(n):
        a = fabs(z[i])
        out[i] = 0.0
        if a > m:
            m = a
            best = i
    if m == 0.0:
        return
    if r == 1.0:
        out[best] = sgn(z[best])
        return
    # u_i = (|z_i|/m)^(q-1) has u_i^r = u_i |z_i| / m, so the norm of u
    # needs no further powers
    q = conj_exp(r)
    nrm = 0.0
    for i in range(n):
        a = fabs(z[i]) / m
        u = a if r == 2.0 else pow(a, q - 1.0)
        nrm += u * a
        out[i] = sgn(z[i]) * u
    nrm = sqrt(nrm) if r == 2.0 else pow(nrm, 1.0 / r)
    if nrm > 0:
        for i in range(n):
            out[i] /= nrm


cdef void mixed_dual(const double* z, double* out, Py_ssize_t nb, Py_ssize_t bs,
                     double outer, double inner, double* zeta, double* t) nogil:
    cdef Py_ssize_t b, i
    cdef double rs = conj_exp(inner)
    for b in range(nb):
        zeta[b] = plain_norm(z + b * bs, bs, 1, rs)
    plain_dual(zeta, t, nb, outer)
    for b in range(nb):
        plain_dual(z + b * bs, out + b * bs, bs, inner)
        for i in range(bs):
            out[b * bs + i] *= t[b]


cdef void matvec(const double* T, const double* x, double* y, Py_ssize_t m, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef double s
    for i in range(m):
        s = 0.0
        for j in range(n):
            s += T[i * n + j] * x[j]
        y[i] = s


cdef void rmatvec(const double* T, const double* w, double* z, Py_ssize_t m, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    for j in range(n):
        z[j] = 0.0
    for i in range(m):
        for j in range(n):
            z[j] += T[i * n + j] * w[i]


def power_gain(T, starts, dom, cod, int max_steps, double rtol):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Tc = np.ascontiguousarray(T, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Sc = np.ascontiguousarray(np.asarray(starts, dtype=np.float64).T)
    cdef Py_ssize_t m = Tc.shape[0], n = Tc.shape[1], k = Sc.shape[0]
    cdef Py_ssize_t dnb = dom[0], dbs = dom[1], cnb = cod[0], cbs = cod[1]
    cdef double dout = dom[2], dinn = dom[3], cout = cod[2], cinn = cod[3]
    cdef double cdout = conj_exp(cout), cdinn = conj_exp(cinn)
    cdef Py_ssize_t s, i, step, wsize
    cdef double g, gn, nrm, best = -1.0
    cdef bint all_conv = True, conv, nonzero
    cdef cnp.ndarray[cnp.float64_t, ndim=1] best_x = np.zeros(n)
    wsize = max(max(m, n), max(dnb, cnb)) + 1
    cdef double* x = <double*> malloc(n * sizeof(double))
    cdef double* xn = <double*> malloc(n * sizeof(double))
    cdef double* y = <double*> malloc(m * sizeof(double))
    cdef double* w = <double*> malloc(m * sizeof(double))
    cdef double* z = <double*> malloc(n * sizeof(double))
    cdef double* wa = <double*> malloc(wsize * sizeof(double))
    cdef double* wb = <double*> malloc(wsize * sizeof(double))
    cdef const double* Tp = &Tc[0, 0] if m > 0 and n > 0 else NULL
    try:
        if Tp == NULL:
            return 0.0, best_x, True
        with nogil:
            for s in range(k):
                for i in range(n):
                    x[i] = Sc[s, i]
                nrm = mixed_norm(x, dnb, dbs, dout, dinn, wa)
                if nrm == 0.0:
                    continue
                for i in range(n):
                    x[i] /= nrm
                matvec(Tp, x, y, m, n)
                g = mixed_norm(y, cnb, cbs, cout, cinn, wa)
                conv = False
                for step in range(max_steps):
                    mixed_dual(y, w, cnb, cbs, cdout, cdinn, wa, wb)
                    rmatvec(Tp, w, z, m, n)
                    mixed_dual(z, xn, dnb, dbs, dout, dinn, wa, wb)
                    nonzero = False
                    for i in range(n):
                        if xn[i] != 0.0:
                            nonzero = True
                            break
                    if not nonzero:
                        conv = True
                        break
                    matvec(Tp, xn, w, m, n)
                    gn = mixed_norm(w, cnb, cbs, cout, cinn, wa)
                    if gn > g:
                        for i in range(n):
                            x[i] = xn[i]
                        for i in range(m):
                            y[i] = w[i]
                        if gn - g <= rtol * gn:
                            g = gn
                            conv = True
                            break
                        g = gn
                    else:
                        conv = True
                        break
                if not conv:
                    all_conv = False
                if g > best:
                    best = g
                    with gil:
                        for i in range(n):
                            best_x[i] = x[i]
        if best < 0:
            return 0.0, best_x, True
        return best, best_x, bool(all_conv)
    finally:
        free(x); free(xn); free(y); free(w); free(z); free(wa); free(wb)
