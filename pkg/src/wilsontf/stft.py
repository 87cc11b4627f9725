"""Short-time Fourier transform on the sampled phase-space grid.

V_phi f(x, xi) = <f, M_xi T_x phi> is evaluated at every grid time
shift x_j and every induced frequency xi_k (one centered DFT per row),
and the two structural identities — the orthogonality relation of the
transform and the Fourier-swap identity — hold on the grid to rounding
error, which the check_* helpers measure.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, Signal, dft, inner, shift_modulate

__all__ = [
    "PhasePlaneArray",
    "stft",
    "plane_inner",
    "plane_norm",
    "check_orthogonality_relation",
    "check_fundamental_identity",
]

MAX_PLANE_CELLS = 64_000_000


@dataclass(frozen=True, eq=False)
class PhasePlaneArray:
    """STFT samples indexed by (time shift, frequency); row-major in x."""

    time_grid: GridSpec
    freq_grid: GridSpec
    dim: int
    values: np.ndarray = field(repr=False)
    window: str = ""

    def __post_init__(self):
        m = self.time_grid.n_points**self.dim
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != (m, m):
            raise ValueError(f"plane must be {m} x {m}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("plane values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def cell_weight(self) -> float:
        """Quadrature weight per plane cell, (dx * dxi)**dim."""
        return (self.time_grid.spacing * self.time_grid.freq_spacing) ** self.dim


def _threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("WILSONTF_THREADS", "1") or 1)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return threads


def _stft_1d(f: Signal, phi: Signal, threads: int) -> np.ndarray:
    n = f.grid.n_points
    t = f.grid.half_width
    r = f.grid.rate
    tr = round(t * r)
    phase_j = (-1.0) ** np.arange(n)
    phase_k = ((-1.0) ** tr) * phase_j
    conj_phi = np.conj(phi.values)
    out = np.empty((n, n), dtype=complex)

    def fill(rows):
        for j in rows:
            # x_j = -T + j/R -> circular shift by j - T*R samples
            windowed = f.values * np.roll(conj_phi, j - tr)
            out[j] = (1.0 / r) * phase_k * np.fft.fft(phase_j * windowed)

    if threads == 1:
        fill(range(n))
    else:
        chunks = np.array_split(np.arange(n), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, chunks))
    return out


def _stft_2d(f: Signal, phi: Signal) -> np.ndarray:
    n = f.grid.n_points
    if (n * n) ** 2 > MAX_PLANE_CELLS:
        raise ValueError(
            "dim=2 phase plane too large; use a smaller grid"
        )
    fmat = f.values.reshape(n, n)
    pmat = np.conj(phi.values.reshape(n, n))
    tr = round(f.grid.half_width * f.grid.rate)
    ph = (-1.0) ** np.arange(n)
    phase2 = np.outer(ph, ph)
    scale = ((-1.0) ** tr / f.grid.rate) ** 2
    out = np.empty((n * n, n * n), dtype=complex)
    for j1 in range(n):
        for j2 in range(n):
            windowed = fmat * np.roll(pmat, (j1 - tr, j2 - tr), axis=(0, 1))
            spec = scale * phase2 * np.fft.fft2(phase2 * windowed)
            out[j1 * n + j2] = spec.ravel()
    return out


def stft(f: Signal, phi: Signal, threads: int | None = None) -> PhasePlaneArray:
    """Phase-plane transform; matches inner(f, shift_modulate(phi, x, xi))
    at every on-grid point.

    Row j holds V(x_j, .) over the full induced frequency grid.  Rows are
    independent, so thread-parallel evaluation is deterministic.
    """
    if f.grid != phi.grid or f.dim != phi.dim:
        raise ValueError("signal and window must share grid and dimension")
    n_threads = _threads(threads)
    if f.dim == 1:
        vals = _stft_1d(f, phi, n_threads)
    else:
        vals = _stft_2d(f, phi)
    return PhasePlaneArray(
        time_grid=f.grid,
        freq_grid=f.grid.dual(),
        dim=f.dim,
        values=vals,
        window="",
    )


def plane_inner(v1: PhasePlaneArray, v2: PhasePlaneArray) -> complex:
    """Double-integral scalar product with cell weight dx * dxi."""
    if v1.time_grid != v2.time_grid or v1.dim != v2.dim:
        raise ValueError("phase planes must share the grid")
    return complex(v1.cell_weight * np.sum(v1.values * np.conj(v2.values)))


def plane_norm(v: PhasePlaneArray) -> float:
    return float(np.sqrt(plane_inner(v, v).real))


def check_orthogonality_relation(
    f1: Signal, f2: Signal, phi1: Signal, phi2: Signal
) -> float:
    """| <V1, V2>_plane - <phi2, phi1><f1, f2> |."""
    lhs = plane_inner(stft(f1, phi1), stft(f2, phi2))
    rhs = inner(phi2, phi1) * inner(f1, f2)
    return abs(lhs - rhs)


def check_fundamental_identity(f: Signal, phi: Signal, points) -> float:
    """Max residual of the Fourier-swap identity at on-grid points.

    Each point is an (x, xi) pair with x on the time grid and xi on the
    induced frequency grid; the residual compares V_phi f(x, xi) with
    e^{-2 pi i x xi} V_{phi_hat} f_hat(xi, -x).
    """
    if f.dim != 1:
        raise ValueError("the identity check is implemented for dim=1")
    f_hat = dft(f, "forward")
    phi_hat = dft(phi, "forward")
    worst = 0.0
    for x0, xi0 in points:
        lhs = inner(f, shift_modulate(phi, x0, xi0))
        rhs = np.exp(-2j * np.pi * x0 * xi0) * inner(
            f_hat, shift_modulate(phi_hat, xi0, -x0)
        )
        worst = max(worst, abs(lhs - rhs))
    return worst
