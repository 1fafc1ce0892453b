"""Pure-Python (numpy) fallback for the Gauss-linking kernel.

Same contract as the compiled module: chunked vectorized evaluation with
exactly-rounded accumulation of the chunk partials, so the two backends agree
to well below 1e-9.
"""

from __future__ import annotations

import math

import numpy as np

_PAIRS_PER_CHUNK = 500_000


def solid_angle_sum(pa: np.ndarray, pb: np.ndarray) -> float:
    """Gauss linking value for two closed polylines (first vertex repeated)."""
    a0, a1 = pa[:-1], pa[1:]
    b0, b1 = pb[:-1], pb[1:]
    nb = len(b0)
    chunk = max(1, _PAIRS_PER_CHUNK // max(1, nb))
    partials = []
    for s in range(0, len(a0), chunk):
        p0 = a0[s : s + chunk][:, None, :]
        p1 = a1[s : s + chunk][:, None, :]
        a = b0[None, :, :] - p0
        b = b0[None, :, :] - p1
        c = b1[None, :, :] - p1
        d = b1[None, :, :] - p0
        p = np.einsum("ijk,ijk->ij", a, np.cross(b, c))
        an = np.linalg.norm(a, axis=2)
        bn = np.linalg.norm(b, axis=2)
        cn = np.linalg.norm(c, axis=2)
        dn = np.linalg.norm(d, axis=2)
        ab = np.einsum("ijk,ijk->ij", a, b)
        bc = np.einsum("ijk,ijk->ij", b, c)
        ca = np.einsum("ijk,ijk->ij", c, a)
        ad = np.einsum("ijk,ijk->ij", a, d)
        dc = np.einsum("ijk,ijk->ij", d, c)
        d1 = an * bn * cn + ab * cn + bc * an + ca * bn
        d2 = an * dn * cn + ad * cn + dc * an + ca * dn
        terms = np.arctan2(p, d1) + np.arctan2(p, d2)
        partials.append(float(terms.sum()))
    return math.fsum(partials) / (2.0 * math.pi)
