"""Uniform symmetric sampling grids, quadrature, unitary DFT, and
time-frequency shift operators.

A grid covers [-T, T) with R samples per unit, N = 2*T*R points at
x_j = -T + j/R.  The induced frequency grid has points
xi_k = -R/2 + k/(2T), spacing 1/(2T), and is itself a grid of the same
form (half_width R/2, rate 2T).  All quadratures are plain Riemann sums
with weight (1/R)**d, which are exponentially accurate for the smooth
decaying test families used here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np
from numpy.polynomial import hermite as _herm

__all__ = [
    "GridSpec",
    "Signal",
    "FunctionSpec",
    "sample",
    "inner",
    "dft",
    "shift_modulate",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform symmetric grid on [-half_width, half_width)."""

    half_width: float
    rate: int

    def __post_init__(self):
        T, R = self.half_width, self.rate
        if T <= 0:
            raise ValueError("half_width must be positive")
        if int(self.rate) != self.rate or self.rate < 1:
            raise ValueError("rate must be a positive integer")
        object.__setattr__(self, "rate", int(self.rate))
        if abs(T * R - round(T * R)) > 1e-9:
            raise ValueError("half_width * rate must be an integer")
        n = 2 * round(T * R)
        if n % 2 != 0 or n < 8:
            raise ValueError("grid needs an even point count N = 2*T*R >= 8")

    @property
    def n_points(self) -> int:
        return 2 * round(self.half_width * self.rate)

    @property
    def spacing(self) -> float:
        return 1.0 / self.rate

    @property
    def freq_spacing(self) -> float:
        return 1.0 / (2.0 * self.half_width)

    def points(self) -> np.ndarray:
        """Sample points x_j = -T + j/R."""
        return -self.half_width + np.arange(self.n_points) / self.rate

    def freq_points(self) -> np.ndarray:
        """Frequency points xi_k = -R/2 + k/(2T) induced by the DFT."""
        return -self.rate / 2.0 + np.arange(self.n_points) * self.freq_spacing

    def dual(self) -> "GridSpec":
        """Grid carrying the DFT output: half_width R/2, rate 2T."""
        two_t = 2.0 * self.half_width
        if abs(two_t - round(two_t)) > 1e-9:
            raise ValueError(
                "frequency grid requires 2*half_width to be an integer"
            )
        return GridSpec(half_width=self.rate / 2.0, rate=round(two_t))


@dataclass(frozen=True, eq=False)
class Signal:
    """Complex samples of a function on a grid (row-major for dim=2)."""

    grid: GridSpec
    dim: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n_points**self.dim,):
            raise ValueError(
                f"values must have length N**dim = "
                f"{self.grid.n_points**self.dim}, got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def weight(self) -> float:
        """Quadrature weight per sample, (1/R)**dim."""
        return (1.0 / self.grid.rate) ** self.dim

    def norm(self) -> float:
        """Grid L2 norm sqrt((1/R)^d sum |f_j|^2)."""
        return float(np.sqrt(self.weight * np.sum(np.abs(self.values) ** 2)))

    def as_matrix(self) -> np.ndarray:
        """dim=2 values reshaped to (N, N), axis 0 = first coordinate."""
        if self.dim != 2:
            raise ValueError("as_matrix requires dim=2")
        n = self.grid.n_points
        return self.values.reshape(n, n)

    def with_values(self, values: np.ndarray) -> "Signal":
        return Signal(grid=self.grid, dim=self.dim, values=values)


def _eval_bspline(order: int, x: np.ndarray) -> np.ndarray:
    # centered cardinal B-spline of polynomial degree `order`:
    # (order+1)-fold convolution of the unit box, support
    # [-(order+1)/2, (order+1)/2], Fourier transform sinc(xi)**(order+1)
    m = order
    out = np.zeros_like(x, dtype=float)
    for k in range(m + 2):
        t = x + (m + 1) / 2.0 - k
        out += (-1.0) ** k * comb(m + 1, k) * np.where(t > 0, t, 0.0) ** m
    return out / factorial(m)


def _eval_hermite(k: int, x: np.ndarray) -> np.ndarray:
    # L2-normalized Hermite function; eigenfunction of the Fourier
    # transform with eigenvalue (-i)**k under the e^{-2 pi i xi x} kernel
    coeffs = np.zeros(k + 1)
    coeffs[k] = 1.0
    norm = 2.0**0.25 / np.sqrt(2.0**k * factorial(k))
    return norm * _herm.hermval(np.sqrt(2 * np.pi) * x, coeffs) * np.exp(
        -np.pi * x**2
    )


@dataclass(frozen=True)
class FunctionSpec:
    """Closed-form test function family, evaluable at arbitrary points.

    Families: gaussian(a) = exp(-a pi x^2); hermite(k); sech =
    1/cosh(pi x); bspline(m) (compact support); subexp(h, sigma) =
    exp(-h |x|^(1/sigma)); tensor(spec1, spec2) for dim=2.
    """

    family: str
    params: tuple = ()

    _FAMILIES = ("gaussian", "hermite", "sech", "bspline", "subexp", "tensor")

    def __post_init__(self):
        if self.family not in self._FAMILIES:
            raise ValueError(f"unknown function family {self.family!r}")
        object.__setattr__(self, "params", tuple(self.params))

    @classmethod
    def gaussian(cls, a: float = 1.0) -> "FunctionSpec":
        if a <= 0:
            raise ValueError("gaussian width parameter must be positive")
        return cls("gaussian", (float(a),))

    @classmethod
    def hermite(cls, k: int) -> "FunctionSpec":
        if k < 0 or int(k) != k:
            raise ValueError("hermite order must be a non-negative integer")
        return cls("hermite", (int(k),))

    @classmethod
    def sech(cls) -> "FunctionSpec":
        return cls("sech", ())

    @classmethod
    def bspline(cls, m: int) -> "FunctionSpec":
        if m < 0 or int(m) != m:
            raise ValueError("bspline order must be a non-negative integer")
        return cls("bspline", (int(m),))

    @classmethod
    def subexp(cls, h: float, sigma: float) -> "FunctionSpec":
        if h <= 0 or sigma <= 0:
            raise ValueError("subexp parameters must be positive")
        return cls("subexp", (float(h), float(sigma)))

    @classmethod
    def tensor(cls, spec1: "FunctionSpec", spec2: "FunctionSpec") -> "FunctionSpec":
        if spec1.family == "tensor" or spec2.family == "tensor":
            raise ValueError("tensor factors must be one-dimensional families")
        return cls("tensor", (spec1, spec2))

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Pointwise values on a 1-d array of abscissae."""
        x = np.asarray(x, dtype=float)
        if self.family == "gaussian":
            return np.exp(-self.params[0] * np.pi * x**2)
        if self.family == "hermite":
            return _eval_hermite(self.params[0], x)
        if self.family == "sech":
            return 1.0 / np.cosh(np.pi * x)
        if self.family == "bspline":
            return _eval_bspline(self.params[0], x)
        if self.family == "subexp":
            h, sigma = self.params
            return np.exp(-h * np.abs(x) ** (1.0 / sigma))
        raise ValueError("tensor families evaluate through sample()")

    def label(self) -> str:
        if self.family == "tensor":
            return f"tensor({self.params[0].label()},{self.params[1].label()})"
        inner_args = ",".join(repr(p) for p in self.params)
        return f"{self.family}({inner_args})"


def sample(spec: FunctionSpec, grid: GridSpec, dim: int = 1) -> Signal:
    """Evaluate a closed-form family on the grid.

    dim=2 requires a tensor spec (or uses the same 1-d family on both
    axes); samples are the exact pointwise values, row-major.
    """
    if dim not in (1, 2):
        raise ValueError("dim must be 1 or 2")
    x = grid.points()
    if dim == 1:
        if spec.family == "tensor":
            raise ValueError("tensor spec requires dim=2")
        return Signal(grid=grid, dim=1, values=spec.evaluate(x).astype(complex))
    if spec.family == "tensor":
        s1, s2 = spec.params
    else:
        s1 = s2 = spec
    v1 = s1.evaluate(x)
    v2 = s2.evaluate(x)
    return Signal(grid=grid, dim=2, values=np.outer(v1, v2).ravel().astype(complex))


def _check_same_grid(f: Signal, g: Signal):
    if f.grid != g.grid or f.dim != g.dim:
        raise ValueError("signals must share grid and dimension")


def inner(f: Signal, g: Signal) -> complex:
    """Quadrature scalar product (1/R)^d sum f_j conj(g_j)."""
    _check_same_grid(f, g)
    return complex(f.weight * np.sum(f.values * np.conj(g.values)))


def _dft_1d(vals: np.ndarray, grid: GridSpec, sign: int, axis: int = -1) -> np.ndarray:
    # centered transform: out_m = (1/R) sum_k vals_k e^{sign 2 pi i y_k x_m}
    # with y on `grid` and x on grid.dual(); reduces to an FFT after
    # checkerboard phases because T*R is an integer
    n = grid.n_points
    tr = round(grid.half_width * grid.rate)
    ph = (-1.0) ** np.arange(n)
    shape = [1] * vals.ndim
    shape[axis] = n
    ph = ph.reshape(shape)
    fft = np.fft.fft if sign < 0 else np.fft.ifft
    scale = (1.0 / grid.rate) if sign < 0 else (n / grid.rate)
    out = fft(ph * vals, axis=axis)
    return scale * ((-1.0) ** tr) * ph * out


def dft(f: Signal, direction: str = "forward") -> Signal:
    """Approximate the continuous Fourier transform on the induced grid.

    Forward maps samples on (T, R) to samples of
    int e^{-2 pi i xi x} f(x) dx on the dual grid (R/2, 2T); inverse uses
    the conjugate kernel and is the exact algebraic inverse, so
    dft(dft(f), "inverse") round-trips to machine precision.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError("direction must be 'forward' or 'inverse'")
    sign = -1 if direction == "forward" else +1
    out_grid = f.grid.dual()
    if f.dim == 1:
        out = _dft_1d(f.values, f.grid, sign)
        return Signal(grid=out_grid, dim=1, values=out)
    n = f.grid.n_points
    mat = f.values.reshape(n, n)
    mat = _dft_1d(mat, f.grid, sign, axis=0)
    mat = _dft_1d(mat, f.grid, sign, axis=1)
    return Signal(grid=out_grid, dim=2, values=mat.ravel())


def _as_vector(v, dim: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.shape != (dim,):
        raise ValueError(f"{name} must have {dim} component(s)")
    return arr


def shift_modulate(f: Signal, x0, xi0) -> Signal:
    """Apply M_{xi0} T_{x0}: circular shift by x0, then modulate.

    x0 components must be integer multiples of the grid spacing; xi0 is
    unrestricted.  The circular shift keeps grid norms exactly invariant.
    """
    x0 = _as_vector(x0, f.dim, "x0")
    xi0 = _as_vector(xi0, f.dim, "xi0")
    r = f.grid.rate
    shifts = x0 * r
    if np.any(np.abs(shifts - np.round(shifts)) > 1e-9):
        raise ValueError("x0 must be an on-grid shift (multiple of 1/R)")
    shifts = np.round(shifts).astype(int)
    x = f.grid.points()
    if f.dim == 1:
        vals = np.roll(f.values, shifts[0])
        vals = np.exp(2j * np.pi * xi0[0] * x) * vals
        return f.with_values(vals)
    n = f.grid.n_points
    mat = np.roll(f.values.reshape(n, n), shifts, axis=(0, 1))
    phase = np.exp(2j * np.pi * xi0[0] * x)[:, None] * np.exp(
        2j * np.pi * xi0[1] * x
    )[None, :]
    return f.with_values((phase * mat).ravel())
