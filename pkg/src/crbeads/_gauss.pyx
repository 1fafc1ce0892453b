# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gauss-linking kernel.

Each pair of segments contributes the signed solid angle of the quadrilateral
spanned by the four difference vectors, via the tangent half-angle closed
form.  Kahan-compensated accumulation keeps the sum independent of pair
order far below 1e-9.
"""

from libc.math cimport atan2, sqrt, M_PI


def solid_angle_sum(double[:, ::1] pa, double[:, ::1] pb):
    """Gauss linking value for two closed polylines.

    Inputs have the first vertex repeated at the end, shape (n+1, 3).
    """
    cdef Py_ssize_t na = pa.shape[0] - 1
    cdef Py_ssize_t nb = pb.shape[0] - 1
    cdef Py_ssize_t i, j
    cdef double ax, ay, az, bx, by, bz, cx, cy, cz, dx, dy, dz
    cdef double an, bn, cn, dn, p, d1, d2, term
    cdef double ab, bc, ca, ad, dc
    cdef double total = 0.0, comp = 0.0, y, t
    for i in range(na):
        for j in range(nb):
            ax = pb[j, 0] - pa[i, 0]
            ay = pb[j, 1] - pa[i, 1]
            az = pb[j, 2] - pa[i, 2]
            bx = pb[j, 0] - pa[i + 1, 0]
            by = pb[j, 1] - pa[i + 1, 1]
            bz = pb[j, 2] - pa[i + 1, 2]
            cx = pb[j + 1, 0] - pa[i + 1, 0]
            cy = pb[j + 1, 1] - pa[i + 1, 1]
            cz = pb[j + 1, 2] - pa[i + 1, 2]
            dx = pb[j + 1, 0] - pa[i, 0]
            dy = pb[j + 1, 1] - pa[i, 1]
            dz = pb[j + 1, 2] - pa[i, 2]
            p = (
                ax * (by * cz - bz * cy)
                + ay * (bz * cx - bx * cz)
                + az * (bx * cy - by * cx)
            )
            an = sqrt(ax * ax + ay * ay + az * az)
            bn = sqrt(bx * bx + by * by + bz * bz)
            cn = sqrt(cx * cx + cy * cy + cz * cz)
            dn = sqrt(dx * dx + dy * dy + dz * dz)
            ab = ax * bx + ay * by + az * bz
            bc = bx * cx + by * cy + bz * cz
            ca = cx * ax + cy * ay + cz * az
            ad = ax * dx + ay * dy + az * dz
            dc = dx * cx + dy * cy + dz * cz
            d1 = an * bn * cn + ab * cn + bc * an + ca * bn
            d2 = an * dn * cn + ad * cn + dc * an + ca * dn
            term = atan2(p, d1) + atan2(p, d2)
            # Kahan step
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
    return total / (2.0 * M_PI)
