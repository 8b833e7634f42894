"""Hot loops: Jacobi residual and derivation residuals of tensors.

Each kernel has a numba version (``*_nb``) and a numpy version (``*_np``).
The public names dispatch to the numba version unless the backend flag
disables it.  Both return the maximum absolute entry of the residual.
"""
import numpy as np

from ._backend import NUMBA_ENABLED, njit


def jacobi_max_np(c: np.ndarray) -> float:
    """max |[[x, y], z] + cyclic| over basis triples, for ``[b_i, b_j] = c[i, j, :]``."""
    n = c.shape[0]
    flat = c.reshape(n, n * n)
    worst = 0.0
    for i in range(n):
        # t[j, k, l] = sum_m c[i, j, m] c[m, k, l] is [[b_i, b_j], b_k]
        t1 = (c[i] @ flat).reshape(n, n, n)
        # [[b_j, b_k], b_i]
        t2 = np.einsum("jkm,ml->jkl", c, c[:, i, :])
        # [[b_k, b_i], b_j] = -[[b_i, b_k], b_j]
        t3 = -np.einsum("km,mjl->jkl", c[i], c)
        worst = max(worst, float(np.abs(t1 + t2 + t3).max(initial=0.0)))
    return worst


@njit(cache=True)
def jacobi_max_nb(c):
    n = c.shape[0]
    worst = 0.0
    acc = np.zeros(n)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(n):
                    acc[l] = 0.0
                for m in range(n):
                    v = c[i, j, m]
                    if v != 0.0:
                        for l in range(n):
                            acc[l] += v * c[m, k, l]
                    v = c[j, k, m]
                    if v != 0.0:
                        for l in range(n):
                            acc[l] += v * c[m, i, l]
                    v = c[k, i, m]
                    if v != 0.0:
                        for l in range(n):
                            acc[l] += v * c[m, j, l]
                for l in range(n):
                    a = abs(acc[l])
                    if a > worst:
                        worst = a
    return worst


def derivation3_max_np(lam: np.ndarray, t: np.ndarray) -> float:
    """max |(D_v t)(x, y)| with ``D_v`` acting as a derivation.

    ``lam[v]`` is the matrix (out, in) of the endomorphism attached to the
    tangent vector ``v``; ``t[x, y, out]`` is a vector-valued 2-tensor.
    """
    d = np.einsum("vop,xyp->vxyo", lam, t)
    d -= np.einsum("vpx,pyo->vxyo", lam, t)
    d -= np.einsum("vpy,xpo->vxyo", lam, t)
    return float(np.abs(d).max(initial=0.0))


@njit(cache=True)
def derivation3_max_nb(lam, t):
    nv = lam.shape[0]
    n = t.shape[0]
    worst = 0.0
    for v in range(nv):
        for x in range(n):
            for y in range(n):
                for o in range(n):
                    s = 0.0
                    for p in range(n):
                        s += lam[v, o, p] * t[x, y, p]
                        s -= lam[v, p, x] * t[p, y, o]
                        s -= lam[v, p, y] * t[x, p, o]
                    a = abs(s)
                    if a > worst:
                        worst = a
    return worst


def derivation4_max_np(lam: np.ndarray, r: np.ndarray) -> float:
    """Same as :func:`derivation3_max_np` for ``r[w, x, y, out]``."""
    worst = 0.0
    for v in range(lam.shape[0]):
        m = lam[v]
        d = np.einsum("op,wxyp->wxyo", m, r)
        d -= np.einsum("pw,pxyo->wxyo", m, r)
        d -= np.einsum("px,wpyo->wxyo", m, r)
        d -= np.einsum("py,wxpo->wxyo", m, r)
        worst = max(worst, float(np.abs(d).max(initial=0.0)))
    return worst


@njit(cache=True)
def derivation4_max_nb(lam, r):
    nv = lam.shape[0]
    n = r.shape[0]
    worst = 0.0
    for v in range(nv):
        for w in range(n):
            for x in range(n):
                for y in range(n):
                    for o in range(n):
                        s = 0.0
                        for p in range(n):
                            s += lam[v, o, p] * r[w, x, y, p]
                            s -= lam[v, p, w] * r[p, x, y, o]
                            s -= lam[v, p, x] * r[w, p, y, o]
                            s -= lam[v, p, y] * r[w, x, p, o]
                        a = abs(s)
                        if a > worst:
                            worst = a
    return worst


def _as_float(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def jacobi_max(c: np.ndarray) -> float:
    c = _as_float(c)
    return float(jacobi_max_nb(c)) if NUMBA_ENABLED else jacobi_max_np(c)


def derivation3_max(lam: np.ndarray, t: np.ndarray) -> float:
    lam, t = _as_float(lam), _as_float(t)
    return float(derivation3_max_nb(lam, t)) if NUMBA_ENABLED else derivation3_max_np(lam, t)


def derivation4_max(lam: np.ndarray, r: np.ndarray) -> float:
    lam, r = _as_float(lam), _as_float(r)
    return float(derivation4_max_nb(lam, r)) if NUMBA_ENABLED else derivation4_max_np(lam, r)
