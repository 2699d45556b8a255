# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled arc kernels.  Mirrors ``_kernels_py`` exactly; see that module for docs."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, fmod, atan2, sin, cos, hypot, INFINITY

cnp.import_array()

BACKEND = "cython"
# r^2 - d^2 carries a few ulps of rounding; below this relative level a
# near-tangent contact is reported as a single point
cdef double TANGENT_ROUNDING = 8.0 * 2.220446049250313e-16

cdef double TWO_PI = 6.283185307179586
cdef double PI = 3.141592653589793
cdef double HALF_PI = 1.5707963267948966
cdef double THREE_HALF_PI = 4.71238898038469


def prepare(rows):
    return np.ascontiguousarray(np.asarray(rows, dtype=np.float64).reshape(-1, 11))


cdef inline bint _in_range(double theta, double lo, double sweep, double tol) nogil:
    cdef double d = fmod(theta - lo, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    return d <= sweep + tol or d >= TWO_PI - tol


cdef bint _on_row(const double[::1] row, double x, double y, double tol) nogil:
    cdef double dx, dy, L2, t, e, th
    if row[0] == 0.0:
        dx = row[3] - row[1]
        dy = row[4] - row[2]
        L2 = dx * dx + dy * dy
        if L2 == 0.0:
            return hypot(x - row[1], y - row[2]) <= tol
        t = ((x - row[1]) * dx + (y - row[2]) * dy) / L2
        e = tol / sqrt(L2)
        return -e <= t <= 1.0 + e
    if row[9] >= TWO_PI:
        return True
    th = atan2(y - row[6], x - row[5])
    return _in_range(th, row[8], row[9], tol / row[7])


cdef void _bbox(const double[::1] row, double* out) nogil:
    cdef double cx, cy, r, lo, sw
    if row[0] == 0.0:
        out[0] = min(row[1], row[3]); out[1] = min(row[2], row[4])
        out[2] = max(row[1], row[3]); out[3] = max(row[2], row[4])
        return
    cx = row[5]; cy = row[6]; r = row[7]; lo = row[8]; sw = row[9]
    if sw >= TWO_PI:
        out[0] = cx - r; out[1] = cy - r; out[2] = cx + r; out[3] = cy + r
        return
    out[0] = min(row[1], row[3]); out[1] = min(row[2], row[4])
    out[2] = max(row[1], row[3]); out[3] = max(row[2], row[4])
    if _in_range(0.0, lo, sw, 0.0):
        out[2] = cx + r
    if _in_range(HALF_PI, lo, sw, 0.0):
        out[3] = cy + r
    if _in_range(PI, lo, sw, 0.0):
        out[0] = cx - r
    if _in_range(THREE_HALF_PI, lo, sw, 0.0):
        out[1] = cy - r


cdef double _circ_overlap(double lo1, double sw1, double lo2, double sw2) nogil:
    cdef double s = fmod(lo2 - lo1, TWO_PI)
    cdef double total = 0.0, a, b, off
    cdef int k
    if s < 0.0:
        s += TWO_PI
    for k in range(2):
        off = s if k == 0 else s - TWO_PI
        a = max(0.0, off)
        b = min(sw1, off + sw2)
        if b > a:
            total += b - a
    return total


cdef bint _arcs_overlap(const double[::1] a, const double[::1] b, double tol) nogil:
    cdef double dx, dy, L, ex, ey, M, ux, uy, t0, t1, lo_, hi_
    if a[0] != b[0]:
        return False
    if a[0] == 1.0:
        if fabs(a[5] - b[5]) > tol or fabs(a[6] - b[6]) > tol or fabs(a[7] - b[7]) > tol:
            return False
        return _circ_overlap(a[8], a[9], b[8], b[9]) * a[7] > tol
    dx = a[3] - a[1]; dy = a[4] - a[2]
    L = hypot(dx, dy)
    ex = b[3] - b[1]; ey = b[4] - b[2]
    M = hypot(ex, ey)
    if L == 0.0 or M == 0.0:
        return False
    ux = dx / L; uy = dy / L
    if fabs(ux * ey - uy * ex) > tol * M / max(L, 1.0) + 1e-12 * M:
        return False
    if fabs(-uy * (b[1] - a[1]) + ux * (b[2] - a[2])) > tol:
        return False
    t0 = (b[1] - a[1]) * ux + (b[2] - a[2]) * uy
    t1 = (b[3] - a[1]) * ux + (b[4] - a[2]) * uy
    lo_ = min(t0, t1); hi_ = max(t0, t1)
    return min(L, hi_) - max(0.0, lo_) > tol


def arcs_overlap(a, b, double tol):
    cdef double[::1] ra = np.asarray(a, dtype=np.float64)
    cdef double[::1] rb = np.asarray(b, dtype=np.float64)
    return bool(_arcs_overlap(ra, rb, tol))


cdef double _support_dist(const double[::1] row, double x, double y) nogil:
    cdef double dx, dy, L
    if row[0] == 0.0:
        dx = row[3] - row[1]; dy = row[4] - row[2]
        L = hypot(dx, dy)
        if L == 0.0:
            return hypot(x - row[1], y - row[2])
        return fabs(-dy * (x - row[1]) + dx * (y - row[2])) / L
    return fabs(hypot(x - row[5], y - row[6]) - row[7])


cdef int _endpoint_points(const double[::1] a, const double[::1] b, double tol, double* xs, double* ys) nogil:
    cdef int n = 0, k, e
    cdef double x, y
    for k in range(2):
        for e in range(2):
            if k == 0:
                x = a[1] if e == 0 else a[3]
                y = a[2] if e == 0 else a[4]
                if _on_row(b, x, y, tol) and _support_dist(b, x, y) <= tol:
                    xs[n] = x; ys[n] = y; n += 1
            else:
                x = b[1] if e == 0 else b[3]
                y = b[2] if e == 0 else b[4]
                if _on_row(a, x, y, tol) and _support_dist(a, x, y) <= tol:
                    xs[n] = x; ys[n] = y; n += 1
    return n


cdef int _cc_points(const double[::1] a, const double[::1] b, double tol, double* xs, double* ys) nogil:
    cdef double x1 = a[5], y1 = a[6], r1 = a[7]
    cdef double x2 = b[5], y2 = b[6], r2 = b[7]
    cdef double dx = x2 - x1, dy = y2 - y1
    cdef double d2 = dx * dx + dy * dy
    cdef double d = sqrt(d2)
    cdef double aa, h2, ux, uy, fx, fy, h
    if d <= tol:
        return 0
    if d > r1 + r2 + tol or d < fabs(r1 - r2) - tol:
        return 0
    aa = (d2 + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - aa * aa
    ux = dx / d; uy = dy / d
    fx = x1 + aa * ux; fy = y1 + aa * uy
    if h2 <= tol * tol + TANGENT_ROUNDING * r1 * r1:
        xs[0] = fx; ys[0] = fy
        return 1
    h = sqrt(h2)
    xs[0] = fx - h * uy; ys[0] = fy + h * ux
    xs[1] = fx + h * uy; ys[1] = fy - h * ux
    return 2


cdef int _cl_points(const double[::1] c, const double[::1] s, double tol, double* xs, double* ys) nogil:
    cdef double ax = s[1], ay = s[2]
    cdef double dx = s[3] - ax, dy = s[4] - ay
    cdef double L = hypot(dx, dy)
    cdef double ux, uy, cx, cy, r, t, fx, fy, dl, h2, h
    if L == 0.0:
        return 0
    ux = dx / L; uy = dy / L
    cx = c[5]; cy = c[6]; r = c[7]
    t = (cx - ax) * ux + (cy - ay) * uy
    fx = ax + t * ux; fy = ay + t * uy
    dl = -uy * (cx - ax) + ux * (cy - ay)
    h2 = r * r - dl * dl
    if h2 < -2.0 * r * tol:
        return 0
    if h2 <= tol * tol + TANGENT_ROUNDING * r * r:
        xs[0] = fx; ys[0] = fy
        return 1
    h = sqrt(h2)
    xs[0] = fx - h * ux; ys[0] = fy - h * uy
    xs[1] = fx + h * ux; ys[1] = fy + h * uy
    return 2


cdef int _ss_points(const double[::1] a, const double[::1] b, double tol, double* xs, double* ys) nogil:
    cdef double px = a[1], py = a[2]
    cdef double rx = a[3] - px, ry = a[4] - py
    cdef double qx = b[1], qy = b[2]
    cdef double sx = b[3] - qx, sy = b[4] - qy
    cdef double den = rx * sy - ry * sx
    cdef double Lr = hypot(rx, ry), Ls = hypot(sx, sy), t
    if Lr == 0.0 or Ls == 0.0:
        return 0
    if fabs(den) <= 1e-14 * Lr * Ls:
        return -1
    t = ((qx - px) * sy - (qy - py) * sx) / den
    xs[0] = px + t * rx; ys[0] = py + t * ry
    return 1


cdef int _pair_points(const double[::1] a, const double[::1] b, double tol, double* xs, double* ys, int* flags) nogil:
    cdef int n, k, m = 0
    cdef double cx[4]
    cdef double cy[4]
    if _arcs_overlap(a, b, tol):
        n = _endpoint_points(a, b, tol, xs, ys)
        for k in range(n):
            flags[k] = 1
        return n
    if a[0] == 1.0 and b[0] == 1.0:
        if fabs(a[5] - b[5]) <= tol and fabs(a[6] - b[6]) <= tol:
            if fabs(a[7] - b[7]) <= tol:
                n = _endpoint_points(a, b, tol, xs, ys)
                for k in range(n):
                    flags[k] = 0
                return n
            return 0
        n = _cc_points(a, b, tol, cx, cy)
    elif a[0] == 1.0:
        n = _cl_points(a, b, tol, cx, cy)
    elif b[0] == 1.0:
        n = _cl_points(b, a, tol, cx, cy)
    else:
        n = _ss_points(a, b, tol, cx, cy)
        if n == -1 or n == 0:
            n = _endpoint_points(a, b, tol, xs, ys)
            for k in range(n):
                flags[k] = 0
            return n
    for k in range(n):
        if _on_row(a, cx[k], cy[k], tol) and _on_row(b, cx[k], cy[k], tol):
            xs[m] = cx[k]; ys[m] = cy[k]; flags[m] = 0
            m += 1
    return m


def arc_pair_points(a, b, double tol):
    cdef double[::1] ra = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] rb = np.ascontiguousarray(b, dtype=np.float64)
    cdef double xs[4]
    cdef double ys[4]
    cdef int flags[4]
    cdef int n = _pair_points(ra, rb, tol, xs, ys, flags)
    return [(xs[k], ys[k], flags[k]) for k in range(n)]


def pair_intersections(A, B, double tol, bint self_mode=False):
    cdef const double[:, ::1] a = A
    cdef const double[:, ::1] b = B
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], i, j, start
    cdef double[:, ::1] ba = np.empty((na, 4))
    cdef double[:, ::1] bb
    cdef double xs[4]
    cdef double ys[4]
    cdef int flags[4]
    cdef int n, k
    out = []
    for i in range(na):
        _bbox(a[i], &ba[i, 0])
    if self_mode:
        bb = ba
    else:
        bb = np.empty((nb, 4))
        for j in range(nb):
            _bbox(b[j], &bb[j, 0])
    for i in range(na):
        start = i + 1 if self_mode else 0
        for j in range(start, nb):
            if ba[i, 0] > bb[j, 2] + tol or bb[j, 0] > ba[i, 2] + tol or ba[i, 1] > bb[j, 3] + tol or bb[j, 1] > ba[i, 3] + tol:
                continue
            n = _pair_points(a[i], b[j], tol, xs, ys, flags)
            for k in range(n):
                out.append((i, j, xs[k], ys[k], flags[k]))
    return out


cdef int _winding(const double[:, ::1] A, double px, double py) nogil:
    cdef Py_ssize_t i, n = A.shape[0]
    cdef int w = 0, k, nb, np_
    cdef double sy, ey, x, cx, cy, r, lo, sw, d, off, y0, y1, mid, h2, h, tmp
    cdef double offs[4]
    cdef double br[2]
    for i in range(n):
        if A[i, 0] == 0.0:
            sy = A[i, 2]; ey = A[i, 4]
            if (sy > py) != (ey > py):
                x = A[i, 1] + (py - sy) * (A[i, 3] - A[i, 1]) / (ey - sy)
                if x > px:
                    w += 1 if ey > py else -1
            continue
        cx = A[i, 5]; cy = A[i, 6]; r = A[i, 7]; lo = A[i, 8]; sw = A[i, 9]; d = A[i, 10]
        nb = 0
        for k in range(2):
            off = fmod((HALF_PI if k == 0 else THREE_HALF_PI) - lo, TWO_PI)
            if off < 0.0:
                off += TWO_PI
            if 1e-12 < off < sw - 1e-12:
                br[nb] = off
                nb += 1
        if nb == 2 and br[0] > br[1]:
            tmp = br[0]; br[0] = br[1]; br[1] = tmp
        if d > 0:
            offs[0] = 0.0
            for k in range(nb):
                offs[k + 1] = br[k]
            offs[nb + 1] = sw
        else:
            offs[0] = sw
            for k in range(nb):
                offs[k + 1] = br[nb - 1 - k]
            offs[nb + 1] = 0.0
        np_ = nb + 2
        for k in range(np_ - 1):
            if k == 0:
                y0 = A[i, 2]
            else:
                y0 = cy + r * sin(lo + offs[k])
            if k == np_ - 2:
                y1 = A[i, 4]
            else:
                y1 = cy + r * sin(lo + offs[k + 1])
            if (y0 > py) == (y1 > py):
                continue
            mid = lo + 0.5 * (offs[k] + offs[k + 1])
            h2 = r * r - (py - cy) * (py - cy)
            h = sqrt(h2) if h2 > 0.0 else 0.0
            x = cx + h if cos(mid) > 0.0 else cx - h
            if x > px:
                w += 1 if y1 > py else -1
    return w


def winding(A, double px, double py):
    cdef const double[:, ::1] a = A
    return _winding(a, px, py)


def winding_many(A, pts):
    cdef const double[:, ::1] a = A
    cdef const double[:, ::1] p = np.ascontiguousarray(pts, dtype=np.float64).reshape(-1, 2)
    cdef Py_ssize_t i, n = p.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    for i in range(n):
        o[i] = _winding(a, p[i, 0], p[i, 1])
    return out


cdef double _nearest_row(const double[::1] row, double px, double py, double* qx, double* qy) nogil:
    cdef double ax, ay, dx, dy, L2, t, cx, cy, r, vx, vy, n, th, d0, d1
    if row[0] == 0.0:
        ax = row[1]; ay = row[2]
        dx = row[3] - ax; dy = row[4] - ay
        L2 = dx * dx + dy * dy
        t = 0.0 if L2 == 0.0 else ((px - ax) * dx + (py - ay) * dy) / L2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        qx[0] = ax + t * dx; qy[0] = ay + t * dy
        return hypot(px - qx[0], py - qy[0])
    cx = row[5]; cy = row[6]; r = row[7]
    vx = px - cx; vy = py - cy
    n = hypot(vx, vy)
    if n > 0.0:
        th = atan2(vy, vx)
        if row[9] >= TWO_PI or _in_range(th, row[8], row[9], 0.0):
            qx[0] = cx + r * vx / n; qy[0] = cy + r * vy / n
            return fabs(n - r)
    d0 = hypot(px - row[1], py - row[2])
    d1 = hypot(px - row[3], py - row[4])
    if d0 <= d1:
        qx[0] = row[1]; qy[0] = row[2]
        return d0
    qx[0] = row[3]; qy[0] = row[4]
    return d1


cdef double _nearest(const double[:, ::1] A, double px, double py, Py_ssize_t* idx, double* qx, double* qy) nogil:
    cdef Py_ssize_t i
    cdef double best = INFINITY, d, x, y
    idx[0] = -1
    qx[0] = px; qy[0] = py
    for i in range(A.shape[0]):
        d = _nearest_row(A[i], px, py, &x, &y)
        if d < best:
            best = d; idx[0] = i; qx[0] = x; qy[0] = y
    return best


def nearest(A, double px, double py):
    cdef const double[:, ::1] a = A
    cdef Py_ssize_t idx
    cdef double qx, qy
    cdef double d = _nearest(a, px, py, &idx, &qx, &qy)
    return (d, idx, qx, qy)


def nearest_many(A, pts):
    cdef const double[:, ::1] a = A
    cdef const double[:, ::1] p = np.ascontiguousarray(pts, dtype=np.float64).reshape(-1, 2)
    cdef Py_ssize_t i, n = p.shape[0], idx
    cdef double qx, qy, d
    out = []
    for i in range(n):
        d = _nearest(a, p[i, 0], p[i, 1], &idx, &qx, &qy)
        out.append((d, idx, qx, qy))
    return out
