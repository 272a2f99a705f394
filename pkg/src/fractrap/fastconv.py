"""Fast evaluation of the lag (history) sums of a convolution quadrature.

The lag for node n is sum_{j=0}^{n-1} omega_{n-j} f_j; summing it directly
for every node costs O(N^2).  ``LagAccumulator`` instead splits the index
triangle into geometrically growing square blocks: once the history fills
an aligned block of size S = B * 2^l whose block index is even, that
block's contribution to the next S nodes is one zero-padded FFT product,
scattered into a per-node cache.  What remains for a query is a direct
tail of fewer than B terms, for O(N log^2 N) total work.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.fft

from . import _kernels
from .weights import ConvolutionWeights

DEFAULT_BASE_BLOCK = 64


def _omega_array(omega) -> np.ndarray:
    if isinstance(omega, ConvolutionWeights):
        return omega.omega
    return np.asarray(omega, dtype=float)


def lag_direct(omega, f_history: np.ndarray, n: int) -> np.ndarray:
    """Exact direct sum sum_{j=0}^{n-1} omega_{n-j} f_j (unscaled)."""
    om = _omega_array(omega)
    f = np.asarray(f_history, dtype=float)
    if f.ndim != 2:
        raise ValueError("history must have shape (steps, q)")
    if f.shape[0] < n:
        raise ValueError(f"history holds {f.shape[0]} entries, need {n}")
    return _kernels.lag_tail(om, f, 0, n)


class LagAccumulator:
    """Blocked FFT evaluation of all lag sums over one integration.

    History values must be appended in index order; ``lag(n)`` may be
    called once f_0..f_{n-1} are present.  When the whole run fits in a
    single base block the accumulator degenerates to the direct sum and
    returns bit-identical values to :func:`lag_direct`.
    """

    def __init__(self, omega, n_steps: int, q: int, base_block: int = DEFAULT_BASE_BLOCK):
        om = _omega_array(omega)
        if len(om) < n_steps + 1:
            raise ValueError(
                f"need weights omega_0..omega_{n_steps}, got {len(om)}"
            )
        if base_block < 1:
            raise ValueError("base block size must be positive")
        self.omega = om
        self.n_steps = int(n_steps)
        self.q = int(q)
        self.base_block = int(base_block)
        self._direct_only = self.n_steps <= self.base_block
        self._f = np.zeros((self.n_steps, self.q))
        self._count = 0
        self._scattered = np.zeros((self.n_steps + 1, self.q))
        # crude flop model, used only for complexity telemetry
        self.flops_fft = 0.0
        self.flops_direct = 0.0

    @property
    def count(self) -> int:
        return self._count

    def append(self, j: int, fj) -> None:
        """Record f_j; indices must arrive strictly in order."""
        if j != self._count:
            raise ValueError(
                f"out-of-order append: expected index {self._count}, got {j}"
            )
        if j >= self.n_steps:
            raise ValueError(f"history index {j} beyond capacity {self.n_steps}")
        self._f[j] = fj
        self._count += 1
        if self._direct_only:
            return
        size = self.base_block
        while size <= self.n_steps and self._count % size == 0:
            start = self._count - size
            if (start // size) % 2 == 0:
                self._scatter_block(start, size)
            size *= 2

    def _scatter_block(self, start: int, size: int) -> None:
        # contribution of f[start:start+size] to nodes start+size..start+2*size-1
        lo = start + size
        hi = min(start + 2 * size - 1, self.n_steps)
        if lo > self.n_steps:
            return
        m = 2 * size
        # circular wrap-around only pollutes lags below `size`, never the
        # [size, 2*size) range read here, so padding to m suffices
        u = scipy.fft.rfft(self.omega[:m], m)
        v = scipy.fft.rfft(self._f[start : start + size], m, axis=0)
        conv = scipy.fft.irfft(u[:, None] * v, m, axis=0)
        self._scattered[lo : hi + 1] += conv[lo - start : hi - start + 1]
        self.flops_fft += (self.q + 1) * 5.0 * m * math.log2(m) + 12.0 * self.q * size

    def lag(self, n: int) -> np.ndarray:
        """Lag sum for node n, matching :func:`lag_direct` to 1e-12 relative."""
        if not 1 <= n <= self.n_steps:
            raise ValueError(f"node index {n} outside 1..{self.n_steps}")
        if self._count < n:
            raise ValueError(
                f"history incomplete: have f_0..f_{self._count - 1}, node {n} "
                f"needs f_0..f_{n - 1}"
            )
        if self._direct_only:
            self.flops_direct += 2.0 * self.q * n
            return _kernels.lag_tail(self.omega, self._f, 0, n)
        tail_from = (n // self.base_block) * self.base_block
        self.flops_direct += 2.0 * self.q * (n - tail_from)
        tail = _kernels.lag_tail(self.omega, self._f, tail_from, n)
        return self._scattered[n] + tail

    @property
    def flops(self) -> float:
        """Modeled flop total over all scatter and tail work so far."""
        return self.flops_fft + self.flops_direct
