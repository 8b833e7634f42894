"""Compare the numba kernels with the pure-numpy fallback.

Run ``python3 benchmarks/bench_kernels.py``.  Only odd ``n`` in ``su(n)`` works as a
group without a center, so ``--ranks`` takes even values.  With ``JOYCE_HKT_NUMBA=0`` the
numba column is skipped because the ``*_nb`` functions are plain Python then.
"""
import argparse
import time

import numpy as np

from joyce_hkt import _kernels as K
from joyce_hkt._backend import NUMBA_ENABLED
from joyce_hkt.connections import bismut_lambda
from joyce_hkt.forms import layer_metric
from joyce_hkt.joyce import coset_space, default_isotropy, hypercomplex_structure, joyce_decompose
from joyce_hkt.lie_core import build_algebra, structure_constants


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(ranks):
    for r in ranks:
        model = build_algebra([("A", r)])
        decomp = joyce_decompose(model)
        coset = coset_space(model, decomp, default_isotropy(decomp))
        hc = hypercomplex_structure(coset)
        coeffs = np.linspace(2.0, 1.0, coset.m)
        conn = bismut_lambda(layer_metric(coset, coeffs), hc)
        table = structure_constants(model)
        yield f"su({r + 1})", table, conn


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ranks", type=int, nargs="+", default=[2, 4])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"numba enabled: {NUMBA_ENABLED}")
    print(f"{'case':<8} {'kernel':<13} {'size':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8} {'agree':>6}")
    for name, table, conn in cases(args.ranks):
        c = np.ascontiguousarray(table.bracket_tensor.real)
        jobs = [
            ("jacobi", c.shape[0], lambda: K.jacobi_max_np(c), lambda: K.jacobi_max_nb(c)),
            ("derivation3", conn.lam.shape[0], lambda: K.derivation3_max_np(conn.lam, conn.torsion),
             lambda: K.derivation3_max_nb(conn.lam, conn.torsion)),
            ("derivation4", conn.lam.shape[0], lambda: K.derivation4_max_np(conn.lam, conn.curvature),
             lambda: K.derivation4_max_nb(conn.lam, conn.curvature)),
        ]
        for kname, size, f_np, f_nb in jobs:
            t_np, v_np = best_of(f_np, args.repeat)
            if NUMBA_ENABLED:
                f_nb()  # compile outside the timing
                t_nb, v_nb = best_of(f_nb, args.repeat)
                agree = abs(v_np - v_nb) <= 1e-12 * max(1.0, abs(v_np))
                print(f"{name:<8} {kname:<13} {size:>6} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f} {str(agree):>6}")
            else:
                print(f"{name:<8} {kname:<13} {size:>6} {t_np:>10.4f} {'-':>10} {'-':>8} {'-':>6}")


if __name__ == "__main__":
    main()
