# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: harmonic series evaluation and sign-component labelling."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log

cnp.import_array()


def harmonic_series(x, y, double c_one, double c_log, alpha, beta,
                    double scale_out, double scale_in, bint gradient=False):
    cdef const double[::1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] ys = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double complex[::1] a = np.ascontiguousarray(alpha, dtype=np.complex128)
    cdef const double complex[::1] b = np.ascontiguousarray(beta, dtype=np.complex128)
    cdef Py_ssize_t P = xs.shape[0], N = a.shape[0], Nn = b.shape[0]
    cdef Py_ssize_t p, k
    cdef bint use_neg = Nn > 0 or c_log != 0.0
    val_arr = np.empty(P)
    gx_arr = np.empty(P if gradient else 0)
    gy_arr = np.empty(P if gradient else 0)
    cdef double[::1] val = val_arr
    cdef double[::1] gx = gx_arr
    cdef double[::1] gy = gy_arr
    cdef double complex z, w, v, F, dF, G, dG, H
    cdef double r2, u
    with nogil:
        for p in range(P):
            z = xs[p] + 1j * ys[p]
            w = z / scale_out
            F = 0
            dF = 0
            for k in range(N, 0, -1):
                F = F * w + a[k - 1]
                dF = dF * w + k * a[k - 1]
            F = F * w
            H = dF / scale_out
            u = c_one + F.real
            if use_neg:
                v = scale_in / z
                G = 0
                dG = 0
                for k in range(Nn, 0, -1):
                    G = G * v + b[k - 1]
                    dG = dG * v + k * b[k - 1]
                G = G * v
                H = H - dG * v / z
                r2 = xs[p] * xs[p] + ys[p] * ys[p]
                u = u + G.real + c_log * 0.5 * log(r2 / (scale_in * scale_in))
            val[p] = u
            if gradient:
                gx[p] = H.real
                gy[p] = -H.imag
                if use_neg and c_log != 0.0:
                    gx[p] = gx[p] + c_log * xs[p] / r2
                    gy[p] = gy[p] + c_log * ys[p] / r2
    if gradient:
        return val_arr, gx_arr, gy_arr
    return val_arr


cdef inline int _find(int[::1] parent, int i) noexcept nogil:
    cdef int root = i, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


def label_components(sign):
    cdef const signed char[:, ::1] s = np.ascontiguousarray(sign, dtype=np.int8)
    cdef Py_ssize_t ny = s.shape[0], nx = s.shape[1], i, j
    labels_arr = np.zeros((ny, nx), dtype=np.int32)
    cdef int[:, ::1] lab = labels_arr
    # worst case one provisional label per cell
    parent_arr = np.zeros(ny * nx + 1, dtype=np.int32)
    cdef int[::1] parent = parent_arr
    final_arr = np.zeros(ny * nx + 1, dtype=np.int32)
    cdef int[::1] final = final_arr
    cdef int nlab = 0, left, up, ra, rb, count = 0, t, r
    cdef signed char v
    with nogil:
        for i in range(ny):
            for j in range(nx):
                v = s[i, j]
                if v == 0:
                    continue
                left = lab[i, j - 1] if (j > 0 and s[i, j - 1] == v) else 0
                up = lab[i - 1, j] if (i > 0 and s[i - 1, j] == v) else 0
                if left and up:
                    ra = _find(parent, left)
                    rb = _find(parent, up)
                    if ra != rb:
                        if ra < rb:
                            parent[rb] = ra
                        else:
                            parent[ra] = rb
                    lab[i, j] = left
                elif left:
                    lab[i, j] = left
                elif up:
                    lab[i, j] = up
                else:
                    nlab += 1
                    parent[nlab] = nlab
                    lab[i, j] = nlab
        for i in range(ny):
            for j in range(nx):
                t = lab[i, j]
                if t:
                    r = _find(parent, t)
                    if final[r] == 0:
                        count += 1
                        final[r] = count
                    lab[i, j] = final[r]
    return labels_arr, count
