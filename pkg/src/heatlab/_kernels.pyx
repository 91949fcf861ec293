# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: the Crank-Nicolson time loop and the adaptive
Dormand-Prince 5(4) integrator with dense output.

heatlab._kernels_py is the pure fallback with identical semantics; keep the
two in lockstep when changing anything here.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, isfinite, sqrt

cnp.import_array()

COMPILED = True

MODE_DIRICHLET = 0
MODE_FLUX = 1
MODE_SCHRO = 2

cdef int _MAX_STEPS = 2_000_000

# Dormand-Prince 5(4) tableau (same constants as the fallback).
cdef double C2 = 0.2, C3 = 0.3, C4 = 0.8, C5 = 8.0 / 9.0
cdef double A21 = 0.2
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double[7][4] P_TAB
P_TAB[0][0] = 1.0
P_TAB[0][1] = -8048581381.0 / 2820520608.0
P_TAB[0][2] = 8663915743.0 / 2820520608.0
P_TAB[0][3] = -12715105075.0 / 11282082432.0
P_TAB[1][0] = 0.0
P_TAB[1][1] = 0.0
P_TAB[1][2] = 0.0
P_TAB[1][3] = 0.0
P_TAB[2][0] = 0.0
P_TAB[2][1] = 131558114200.0 / 32700410799.0
P_TAB[2][2] = -68118460800.0 / 10900136933.0
P_TAB[2][3] = 87487479700.0 / 32700410799.0
P_TAB[3][0] = 0.0
P_TAB[3][1] = -1754552775.0 / 470086768.0
P_TAB[3][2] = 14199869525.0 / 1410260304.0
P_TAB[3][3] = -10690763975.0 / 1880347072.0
P_TAB[4][0] = 0.0
P_TAB[4][1] = 127303824393.0 / 49829197408.0
P_TAB[4][2] = -318862633887.0 / 49829197408.0
P_TAB[4][3] = 701980252875.0 / 199316789632.0
P_TAB[5][0] = 0.0
P_TAB[5][1] = -282668133.0 / 205662961.0
P_TAB[5][2] = 2019193451.0 / 616988883.0
P_TAB[5][3] = -1453857185.0 / 822651844.0
P_TAB[6][0] = 0.0
P_TAB[6][1] = 40617522.0 / 29380423.0
P_TAB[6][2] = -110615467.0 / 29380423.0
P_TAB[6][3] = 69997945.0 / 29380423.0


cdef inline double _spline_val(const double[:, ::1] coefs, double bx0, double bh,
                               int nseg, double x) noexcept nogil:
    cdef int i = <int>((x - bx0) / bh)
    if i < 0:
        i = 0
    elif i >= nseg:
        i = nseg - 1
    cdef double t = x - (bx0 + i * bh)
    return ((coefs[0, i] * t + coefs[1, i]) * t + coefs[2, i]) * t + coefs[3, i]


cdef inline void _rhs(int mode, const double[:, ::1] coefs, double bx0, double bh,
                      int nseg, double lam, double x, double ya, double yb,
                      double* fa, double* fb) noexcept nogil:
    if mode == 0:
        fa[0] = _spline_val(coefs, bx0, bh, nseg, x) * yb
        fb[0] = lam * ya
    elif mode == 1:
        fa[0] = yb
        fb[0] = lam * _spline_val(coefs, bx0, bh, nseg, x) * ya
    else:
        fa[0] = yb
        fb[0] = (_spline_val(coefs, bx0, bh, nseg, x) + lam) * ya


def rk_dense(int mode, double bx0, double bh, coefs_in, double lam,
             double y0, double dy0, double x0, x_out_in, double rtol, double atol):
    """Adaptive Dormand-Prince 5(4) with quartic dense output.

    Same contract as heatlab._kernels_py.rk_dense.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] coefs_arr = np.ascontiguousarray(coefs_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x_out_arr = np.ascontiguousarray(x_out_in, dtype=np.float64)
    cdef const double[:, ::1] coefs = coefs_arr
    cdef const double[::1] x_out = x_out_arr
    cdef int nseg = coefs.shape[1]
    cdef Py_ssize_t m = x_out.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((2, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr

    cdef double xend = x_out[m - 1]
    cdef double span = xend - x0
    cdef double tiny = 1e-14 * max(1.0, fabs(xend))
    cdef Py_ssize_t j = 0
    while j < m and x_out[j] <= x0 + tiny:
        out[0, j] = y0
        out[1, j] = dy0
        j += 1
    if j >= m:
        return out_arr
    if span <= 0.0:
        raise ValueError("x_out must extend beyond the start point")

    cdef double x = x0, ya = y0, yb = dy0
    cdef double fa, fb, h
    cdef double ka[7]
    cdef double kb[7]
    cdef double za, zb, na, nb, xn, erra, errb, sca, scb, errnorm, factor
    cdef double th, br, va, vb
    cdef int r, status = 0
    cdef bint rejected = False
    cdef long nsteps = 0

    _rhs(mode, coefs, bx0, bh, nseg, lam, x, ya, yb, &fa, &fb)
    h = span / 64.0
    if 0.5 / sqrt(fabs(lam) + 1.0) < h:
        h = 0.5 / sqrt(fabs(lam) + 1.0)

    with nogil:
        while x < xend - tiny:
            nsteps += 1
            if nsteps > _MAX_STEPS:
                status = 1
                break
            if h > xend - x:
                h = xend - x
            if h < 1e-14 * span:
                status = 2
                break

            ka[0] = fa
            kb[0] = fb
            za = ya + h * (A21 * ka[0])
            zb = yb + h * (A21 * kb[0])
            _rhs(mode, coefs, bx0, bh, nseg, lam, x + C2 * h, za, zb, &ka[1], &kb[1])
            za = ya + h * (A31 * ka[0] + A32 * ka[1])
            zb = yb + h * (A31 * kb[0] + A32 * kb[1])
            _rhs(mode, coefs, bx0, bh, nseg, lam, x + C3 * h, za, zb, &ka[2], &kb[2])
            za = ya + h * (A41 * ka[0] + A42 * ka[1] + A43 * ka[2])
            zb = yb + h * (A41 * kb[0] + A42 * kb[1] + A43 * kb[2])
            _rhs(mode, coefs, bx0, bh, nseg, lam, x + C4 * h, za, zb, &ka[3], &kb[3])
            za = ya + h * (A51 * ka[0] + A52 * ka[1] + A53 * ka[2] + A54 * ka[3])
            zb = yb + h * (A51 * kb[0] + A52 * kb[1] + A53 * kb[2] + A54 * kb[3])
            _rhs(mode, coefs, bx0, bh, nseg, lam, x + C5 * h, za, zb, &ka[4], &kb[4])
            za = ya + h * (A61 * ka[0] + A62 * ka[1] + A63 * ka[2] + A64 * ka[3] + A65 * ka[4])
            zb = yb + h * (A61 * kb[0] + A62 * kb[1] + A63 * kb[2] + A64 * kb[3] + A65 * kb[4])
            _rhs(mode, coefs, bx0, bh, nseg, lam, x + h, za, zb, &ka[5], &kb[5])

            na = ya + h * (B1 * ka[0] + B3 * ka[2] + B4 * ka[3] + B5 * ka[4] + B6 * ka[5])
            nb = yb + h * (B1 * kb[0] + B3 * kb[2] + B4 * kb[3] + B5 * kb[4] + B6 * kb[5])
            xn = x + h
            _rhs(mode, coefs, bx0, bh, nseg, lam, xn, na, nb, &ka[6], &kb[6])

            erra = h * (E1 * ka[0] + E3 * ka[2] + E4 * ka[3] + E5 * ka[4] + E6 * ka[5] + E7 * ka[6])
            errb = h * (E1 * kb[0] + E3 * kb[2] + E4 * kb[3] + E5 * kb[4] + E6 * kb[5] + E7 * kb[6])
            sca = atol + rtol * (fabs(ya) if fabs(ya) > fabs(na) else fabs(na))
            scb = atol + rtol * (fabs(yb) if fabs(yb) > fabs(nb) else fabs(nb))
            errnorm = sqrt(0.5 * ((erra / sca) * (erra / sca) + (errb / scb) * (errb / scb)))

            if not (isfinite(na) and isfinite(nb)):
                status = 3
                break

            if errnorm <= 1.0:
                while j < m and x_out[j] <= xn + tiny:
                    th = (x_out[j] - x) / h
                    va = ya
                    vb = yb
                    for r in range(7):
                        br = ((P_TAB[r][3] * th + P_TAB[r][2]) * th + P_TAB[r][1]) * th * th + P_TAB[r][0] * th
                        va += h * br * ka[r]
                        vb += h * br * kb[r]
                    out[0, j] = va
                    out[1, j] = vb
                    j += 1
                x = xn
                ya = na
                yb = nb
                fa = ka[6]
                fb = kb[6]
                factor = 10.0 if errnorm == 0.0 else 0.9 * errnorm ** -0.2
                if factor > 10.0:
                    factor = 10.0
                if rejected and factor > 1.0:
                    factor = 1.0
                h *= factor
                rejected = False
            else:
                factor = 0.9 * errnorm ** -0.2
                if factor < 0.2:
                    factor = 0.2
                h *= factor
                rejected = True

    if status == 1:
        raise RuntimeError("rk_dense: step budget exhausted")
    if status == 2:
        raise RuntimeError("rk_dense: step size underflow")
    if status == 3:
        raise RuntimeError("rk_dense: solution overflow (non-finite state)")

    while j < m:
        out[0, j] = ya
        out[1, j] = yb
        j += 1
    return out_arr


def cn_heat_loop(face_a_in, double dx, double dt, fvals_in, bint damp_first):
    """Crank-Nicolson loop; same contract as heatlab._kernels_py.cn_heat_loop."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] face_arr = np.ascontiguousarray(face_a_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f_arr = np.ascontiguousarray(fvals_in, dtype=np.float64)
    cdef const double[::1] face_a = face_arr
    cdef const double[::1] fvals = f_arr
    cdef Py_ssize_t nx = face_a.shape[0] + 1
    cdef Py_ssize_t nt = fvals.shape[0] - 1
    if nx < 3:
        raise ValueError("cn_heat_loop: need at least 3 space nodes")

    cdef cnp.ndarray[cnp.float64_t, ndim=2] u_arr = np.zeros((nt + 1, nx), dtype=np.float64)
    cdef double[:, ::1] u = u_arr
    cdef Py_ssize_t M = nx - 2
    cdef Py_ssize_t i, n
    for n in range(1, nt + 1):
        u[n, nx - 1] = fvals[n]
    if nt == 0:
        return u_arr

    # Thomas factorization of the constant CN matrix: keep the modified
    # diagonal and the elimination multipliers; each step is two O(nx) sweeps.
    cdef cnp.ndarray[cnp.float64_t, ndim=1] scratch = np.empty(5 * M, dtype=np.float64)
    cdef double[::1] diag = scratch[0:M]
    cdef double[::1] mult = scratch[M:2 * M]
    cdef double[::1] upper = scratch[2 * M:3 * M]
    cdef double[::1] rhs = scratch[3 * M:4 * M]
    cdef double[::1] dwork = scratch[4 * M:5 * M]
    cdef double r = dt / (2.0 * dx * dx)
    cdef double aLi, aRi, rr
    cdef Py_ssize_t n0 = 0

    with nogil:
        if damp_first:
            rr = 2.0 * r
            for i in range(M):
                aLi = face_a[i]
                aRi = face_a[i + 1]
                diag[i] = 1.0 + rr * (aLi + aRi)
                upper[i] = -rr * aRi
                rhs[i] = 0.0
            rhs[M - 1] += rr * face_a[nx - 2] * fvals[1]
            for i in range(1, M):
                mult[i] = (-rr * face_a[i]) / diag[i - 1]
                diag[i] = diag[i] - mult[i] * upper[i - 1]
                rhs[i] = rhs[i] - mult[i] * rhs[i - 1]
            u[1, M] = rhs[M - 1] / diag[M - 1]
            for i in range(M - 2, -1, -1):
                u[1, i + 1] = (rhs[i] - upper[i] * u[1, i + 2]) / diag[i]
            n0 = 1

        for i in range(M):
            aLi = face_a[i]
            aRi = face_a[i + 1]
            diag[i] = 1.0 + r * (aLi + aRi)
            upper[i] = -r * aRi
        for i in range(1, M):
            mult[i] = (-r * face_a[i]) / diag[i - 1]
            diag[i] = diag[i] - mult[i] * upper[i - 1]

        for n in range(n0, nt):
            for i in range(M):
                aLi = face_a[i]
                aRi = face_a[i + 1]
                rhs[i] = u[n, i + 1] + r * (aRi * (u[n, i + 2] - u[n, i + 1])
                                            - aLi * (u[n, i + 1] - u[n, i]))
            rhs[M - 1] += r * face_a[nx - 2] * fvals[n + 1]
            dwork[0] = rhs[0]
            for i in range(1, M):
                dwork[i] = rhs[i] - mult[i] * dwork[i - 1]
            u[n + 1, M] = dwork[M - 1] / diag[M - 1]
            for i in range(M - 2, -1, -1):
                u[n + 1, i + 1] = (dwork[i] - upper[i] * u[n + 1, i + 2]) / diag[i]

    return u_arr
