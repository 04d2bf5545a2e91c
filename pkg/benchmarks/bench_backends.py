"""Compare the numba and pure-numpy kernel backends.

Run with ``python3 benchmarks/bench_backends.py``.  Both backends are imported
in one process: the numpy path is selected per call with ``use_numba=False``.
"""
import time

import numpy as np

from casmodes import kernels
from casmodes._backend import HAVE_NUMBA


def best_of(fn, repeat=5):
    fn()  # warm-up (includes compilation for numba)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ks = np.geomspace(1e-3, 50.0, 2000)
    xi = np.linspace(1e-3, 5.0, 20000)
    cases = [
        ("plasmon_batch  n=2000 L=0.5", lambda nb: kernels.plasmon_batch(ks, 0.5, use_numba=nb)),
        ("plasmon_batch  n=2000 L=50 ", lambda nb: kernels.plasmon_batch(ks, 50.0, use_numba=nb)),
        ("photonic_roots L=60        ", lambda nb: kernels.photonic_roots(kernels.GP_PROP, 0.5, 60.0, use_numba=nb)),
        ("lifshitz_log   n=20000     ", lambda nb: kernels.lifshitz_log(xi, np.hypot(0.3, xi), 1.0, use_numba=nb)),
    ]
    print(f"{'kernel':30s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speed-up':>9s}  max |diff|")
    for name, fn in cases:
        t_np = best_of(lambda: fn(False))
        a = fn(False)
        if HAVE_NUMBA:
            t_nb = best_of(lambda: fn(True))
            b = fn(True)
            diff = max(float(np.nanmax(np.abs(np.asarray(x, float) - np.asarray(y, float))))
                       for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)))
            print(f"{name:30s} {1e3 * t_np:12.3f} {1e3 * t_nb:12.3f} {t_np / t_nb:9.1f}  {diff:.2e}")
        else:
            print(f"{name:30s} {1e3 * t_np:12.3f} {'n/a':>12s}")

    # end to end: flip the module-level default the energy code dispatches on
    from casmodes.energy import energy_breakdown
    from casmodes.optics import MirrorModel

    model = MirrorModel()
    for x in (0.01, 1.0):
        row = []
        for nb in (False, True) if HAVE_NUMBA else (False,):
            kernels.USE_NUMBA = nb
            row.append(best_of(lambda: energy_breakdown(model, x), repeat=2))
        label = f"energy_breakdown L/lp={x:g}"
        if len(row) == 2:
            print(f"{label:30s} {1e3 * row[0]:12.1f} {1e3 * row[1]:12.1f} {row[0] / row[1]:9.1f}")
        else:
            print(f"{label:30s} {1e3 * row[0]:12.1f} {'n/a':>12s}")


if __name__ == "__main__":
    main()
