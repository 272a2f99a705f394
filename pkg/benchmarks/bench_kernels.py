"""Compare the compiled and pure-numpy kernel backends.

Run with
    python benchmarks/bench_kernels.py
The script times each hot kernel on representative sizes under both
backends (the numpy path is exercised in-process through the *_np
functions, so no re-import gymnastics are needed) and finishes with an
end-to-end solve comparison driven by the FRACTRAP_NO_NUMBA flag.
"""

from __future__ import annotations

import os
import subprocess
import sys
import time

import numpy as np

from fractrap import _kernels


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        tic = time.perf_counter()
        fn()
        times.append(time.perf_counter() - tic)
    return min(times)


def main() -> int:
    rng = np.random.default_rng(0)
    print(f"active backend: {_kernels.backend()}")
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable or disabled; timing the numpy path against itself")
    _kernels.warmup()

    a = np.array([1.0, -4.0 / 3.0, 1.0 / 3.0])
    omega = rng.standard_normal(20001)
    f = rng.standard_normal((20000, 2))

    cases = [
        ("miller_power (N=20000, quadratic)",
         lambda: _kernels.miller_power(a, -0.5, 20000),
         lambda: _kernels.miller_power_np(a, -0.5, 20000)),
        ("binomial (N=200000)",
         lambda: _kernels.binomial(-1.0, -0.5, 200000),
         lambda: _kernels.binomial_np(-1.0, -0.5, 200000)),
        ("pi_graded_row (n=8192)",
         lambda: _kernels.pi_graded_row(0.5, 4.0, 8192),
         lambda: _kernels.pi_graded_row_np(0.5, 4.0, 8192)),
        ("lag_tail (n=20000, q=2)",
         lambda: _kernels.lag_tail(omega, f, 0, 20000),
         lambda: _kernels.lag_tail_np(omega, f, 0, 20000)),
    ]
    print(f"{'kernel':<36}{'active':>12}{'numpy':>12}{'speedup':>10}")
    for name, active, plain in cases:
        t_active = best_of(active)
        t_plain = best_of(plain)
        print(f"{name:<36}{t_active*1e3:>10.2f}ms{t_plain*1e3:>10.2f}ms"
              f"{t_plain/max(t_active, 1e-12):>10.1f}x")

    print("\nend-to-end FT solve, N=8192 (subprocess per backend):", flush=True)
    snippet = (
        "import time, fractrap as ft;"
        "from fractrap._kernels import warmup, backend; warmup();"
        "p = ft.make_linear(0.5, -2.0, T=2.0, y0=1.0);"
        "g = ft.grid_for(p, ft.MethodKind.FT, 8192);"
        "t = time.perf_counter(); ft.solve(p, ft.MethodKind.FT, g);"
        "print(f'{backend()}: {time.perf_counter()-t:.3f}s')"
    )
    for env_value in ("", "1"):
        env = dict(os.environ, FRACTRAP_NO_NUMBA=env_value)
        subprocess.run([sys.executable, "-c", snippet], env=env, check=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
