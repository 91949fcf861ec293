"""Pure NumPy/SciPy fallback for the compiled kernels.

Mirrors ``heatlab._kernels`` (Cython) step for step so both backends produce
the same numbers to rounding. Selected by ``heatlab._backend`` when the
extension is missing or ``HEATLAB_PURE=1``. Expect roughly 30-100x slower
hot paths; see benchmarks/bench_backends.py.
"""

import math

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

COMPILED = False

MODE_DIRICHLET = 0  # y = (v, m):  v' = c(x) m,  m' = lam v   (c = 1/a, m = a v')
MODE_FLUX = 1       # y = (w, s):  w' = s,       s' = lam c(x) w
MODE_SCHRO = 2      # y = (z, s):  z' = s,       s' = (c(xi) + lam) z   (c = potential)

_MAX_STEPS = 2_000_000

# Dormand-Prince 5(4) tableau; the compiled kernel hard-codes the same values.
_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0)
_A = (
    (0.2,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
)
_B = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0)
_E = (
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)
# Quartic dense-output weights b_i(theta) = sum_j P[i][j] theta^(j+1).
_P = (
    (1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0),
    (0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0),
    (0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0),
    (0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0),
    (0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0),
)


def _spline_val(coefs, bx0, bh, x):
    # cubic segments in scipy.interpolate.CubicSpline coefficient layout
    nseg = coefs.shape[1]
    i = int((x - bx0) / bh)
    if i < 0:
        i = 0
    elif i >= nseg:
        i = nseg - 1
    t = x - (bx0 + i * bh)
    return ((coefs[0, i] * t + coefs[1, i]) * t + coefs[2, i]) * t + coefs[3, i]


def _rhs(mode, coefs, bx0, bh, lam, x, ya, yb):
    if mode == MODE_DIRICHLET:
        return _spline_val(coefs, bx0, bh, x) * yb, lam * ya
    if mode == MODE_FLUX:
        return yb, lam * _spline_val(coefs, bx0, bh, x) * ya
    return yb, (_spline_val(coefs, bx0, bh, x) + lam) * ya


def rk_dense(mode, bx0, bh, coefs, lam, y0, dy0, x0, x_out, rtol, atol):
    """Adaptive Dormand-Prince 5(4) for the second-order kernels.

    Integrates from x0 to x_out[-1] and evaluates the quartic dense-output
    interpolant at every point of the increasing array ``x_out``. The
    coefficient function is a uniform-knot cubic spline (``coefs`` in the
    CubicSpline layout, knots bx0 + i*bh). Returns a (2, len(x_out)) array
    holding both state components.
    """
    coefs = np.ascontiguousarray(coefs, dtype=float)
    x_out = np.ascontiguousarray(x_out, dtype=float)
    m = x_out.shape[0]
    out = np.empty((2, m))
    xend = float(x_out[-1])
    span = xend - x0
    tiny = 1e-14 * max(1.0, abs(xend))

    j = 0
    while j < m and x_out[j] <= x0 + tiny:
        out[0, j] = y0
        out[1, j] = dy0
        j += 1
    if j >= m:
        return out
    if span <= 0.0:
        raise ValueError("x_out must extend beyond the start point")

    x = x0
    ya, yb = float(y0), float(dy0)
    fa, fb = _rhs(mode, coefs, bx0, bh, lam, x, ya, yb)
    h = min(span / 64.0, 0.5 / math.sqrt(abs(lam) + 1.0))
    ka = [0.0] * 7
    kb = [0.0] * 7
    rejected = False
    nsteps = 0

    while x < xend - tiny:
        nsteps += 1
        if nsteps > _MAX_STEPS:
            raise RuntimeError("rk_dense: step budget exhausted")
        if h > xend - x:
            h = xend - x
        if h < 1e-14 * span:
            raise RuntimeError("rk_dense: step size underflow")

        ka[0], kb[0] = fa, fb
        for s in range(5):
            za = ya
            zb = yb
            arow = _A[s]
            for r in range(s + 1):
                za += h * arow[r] * ka[r]
                zb += h * arow[r] * kb[r]
            ka[s + 1], kb[s + 1] = _rhs(mode, coefs, bx0, bh, lam, x + _C[s] * h, za, zb)

        na = ya
        nb = yb
        for r in range(6):
            na += h * _B[r] * ka[r]
            nb += h * _B[r] * kb[r]
        xn = x + h
        ka[6], kb[6] = _rhs(mode, coefs, bx0, bh, lam, xn, na, nb)

        erra = 0.0
        errb = 0.0
        for r in range(7):
            erra += _E[r] * ka[r]
            errb += _E[r] * kb[r]
        erra *= h
        errb *= h
        sca = atol + rtol * max(abs(ya), abs(na))
        scb = atol + rtol * max(abs(yb), abs(nb))
        errnorm = math.sqrt(0.5 * ((erra / sca) ** 2 + (errb / scb) ** 2))

        if not (math.isfinite(na) and math.isfinite(nb)):
            raise RuntimeError("rk_dense: solution overflow (non-finite state)")

        if errnorm <= 1.0:
            while j < m and x_out[j] <= xn + tiny:
                th = (x_out[j] - x) / h
                va = ya
                vb = yb
                for r in range(7):
                    p = _P[r]
                    br = ((p[3] * th + p[2]) * th + p[1]) * th * th + p[0] * th
                    va += h * br * ka[r]
                    vb += h * br * kb[r]
                out[0, j] = va
                out[1, j] = vb
                j += 1
            x = xn
            ya, yb = na, nb
            fa, fb = ka[6], kb[6]
            factor = 10.0 if errnorm == 0.0 else min(10.0, 0.9 * errnorm ** -0.2)
            if rejected:
                factor = min(1.0, factor)
            h *= factor
            rejected = False
        else:
            h *= max(0.2, 0.9 * errnorm ** -0.2)
            rejected = True

    while j < m:
        out[0, j] = ya
        out[1, j] = yb
        j += 1
    return out


def cn_heat_loop(face_a, dx, dt, fvals, damp_first):
    """Crank-Nicolson loop for u_t = (a u_x)_x, u(0)=0, u(1)=f(t), u(x,0)=0.

    ``face_a`` holds conductivities at the nx-1 cell faces; ``fvals`` the
    boundary drive at the nt+1 grid times with fvals[0] forced to 0. With
    ``damp_first`` the first step is one implicit-Euler substep, which damps
    the high-mode ringing a jump drive would otherwise excite. Returns the
    full (nt+1, nx) temperature field.
    """
    face_a = np.ascontiguousarray(face_a, dtype=float)
    fvals = np.ascontiguousarray(fvals, dtype=float)
    nx = face_a.shape[0] + 1
    nt = fvals.shape[0] - 1
    if nx < 3:
        raise ValueError("cn_heat_loop: need at least 3 space nodes")

    u = np.zeros((nt + 1, nx))
    u[:, nx - 1] = fvals
    u[0, :] = 0.0
    if nt == 0:
        return u

    aL = face_a[: nx - 2]   # face left of interior node i = 1 .. nx-2
    aR = face_a[1: nx - 1]  # face right of interior node
    r = dt / (2.0 * dx * dx)

    ab = np.zeros((2, nx - 2))
    ab[1] = 1.0 + r * (aL + aR)
    ab[0, 1:] = -r * aR[:-1]
    cb_cn = cholesky_banded(ab)

    n0 = 0
    if damp_first:
        ab_be = np.zeros((2, nx - 2))
        ab_be[1] = 1.0 + 2.0 * r * (aL + aR)
        ab_be[0, 1:] = -2.0 * r * aR[:-1]
        rhs = u[0, 1:-1].copy()
        rhs[-1] += 2.0 * r * aR[-1] * fvals[1]
        u[1, 1:-1] = cho_solve_banded((cholesky_banded(ab_be), False), rhs)
        n0 = 1

    for n in range(n0, nt):
        un = u[n]
        rhs = un[1:-1] + r * (aR * (un[2:] - un[1:-1]) - aL * (un[1:-1] - un[:-2]))
        rhs[-1] += r * aR[-1] * fvals[n + 1]
        u[n + 1, 1:-1] = cho_solve_banded((cb_cn, False), rhs)
    return u
