"""Weight functions for weighted norms: subexponential, polynomial, and
phase-space product weights, with checks of the moderateness axioms.

Subexponential weights e^{h |x|^(1/s)} with s >= 1 are submultiplicative
with constant exactly 1 (subadditivity of t -> t^(1/s)), which keeps the
two-sided norm bounds downstream free of fudge constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["WeightSpec", "WeightAxiomReport", "check_weight_axioms"]


@dataclass(frozen=True)
class WeightSpec:
    """Parametrized positive weight.

    kinds:
      - "subexp": w(x) = e^{h |x|^(1/s)} on the signal domain
      - "poly":   w(x) = (1 + |x|)^sigma
      - "product": w(x, xi) = e^{h_x |x|^(1/s) + h_xi |xi|^(1/s)}
      - "reciprocal": 1 / inner weight
    """

    kind: str
    h: float = 0.0
    s: float = 2.0
    sigma: float = 0.0
    h_xi: float = 0.0
    inner: Optional["WeightSpec"] = None

    def __post_init__(self):
        if self.kind not in ("subexp", "poly", "product", "reciprocal"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind in ("subexp", "product"):
            if self.s <= 1:
                raise ValueError("subexponential weights require s > 1")
            if self.h < 0 or self.h_xi < 0:
                raise ValueError("weight growth rates must be >= 0")
        if self.kind == "poly" and self.sigma < 0:
            raise ValueError("polynomial weight exponent must be >= 0")
        if self.kind == "reciprocal" and self.inner is None:
            raise ValueError("reciprocal weight needs an inner weight")

    @classmethod
    def subexp(cls, h: float, s: float) -> "WeightSpec":
        return cls(kind="subexp", h=h, s=s)

    @classmethod
    def poly(cls, sigma: float) -> "WeightSpec":
        return cls(kind="poly", sigma=sigma)

    @classmethod
    def product(cls, h: float, s: float, h_xi: float | None = None) -> "WeightSpec":
        """Phase-space weight; h_xi defaults to h (symmetric form)."""
        return cls(kind="product", h=h, s=s, h_xi=h if h_xi is None else h_xi)

    @classmethod
    def freq_only(cls, h: float, s: float) -> "WeightSpec":
        """Phase-space weight 1 (x) e^{h |xi|^(1/s)}."""
        return cls(kind="product", h=0.0, s=s, h_xi=h)

    @classmethod
    def reciprocal(cls, inner: "WeightSpec") -> "WeightSpec":
        return cls(kind="reciprocal", inner=inner)

    @property
    def is_plane(self) -> bool:
        if self.kind == "reciprocal":
            return self.inner.is_plane
        return self.kind == "product"

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Signal-domain evaluation; |x| is Euclidean for vector input
        (rows of a 2-column array)."""
        r = _radius(x)
        if self.kind == "subexp":
            return np.exp(self.h * r ** (1.0 / self.s))
        if self.kind == "poly":
            return (1.0 + r) ** self.sigma
        if self.kind == "reciprocal":
            return 1.0 / self.inner.evaluate(x)
        raise ValueError("product weights evaluate on (x, xi) pairs")

    def evaluate_plane(self, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """Phase-space evaluation on broadcastable |x|, |xi| radii."""
        if self.kind == "reciprocal":
            return 1.0 / self.inner.evaluate_plane(x, xi)
        if self.kind != "product":
            raise ValueError("plane evaluation needs a product weight")
        rx = _radius(x)
        rxi = _radius(xi)
        return np.exp(
            self.h * rx ** (1.0 / self.s) + self.h_xi * rxi ** (1.0 / self.s)
        )

    def companion(self) -> "WeightSpec":
        """Submultiplicative weight v dominating the translation axiom."""
        if self.kind == "subexp":
            return self
        if self.kind == "poly":
            return self
        if self.kind == "product":
            return self
        return self.inner.companion()

    def label(self) -> str:
        if self.kind == "subexp":
            return f"subexp(h={self.h},s={self.s})"
        if self.kind == "poly":
            return f"poly(sigma={self.sigma})"
        if self.kind == "product":
            return f"product(h_x={self.h},h_xi={self.h_xi},s={self.s})"
        return f"1/{self.inner.label()}"


def _radius(x: np.ndarray) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim >= 2:
        return np.sqrt((arr**2).sum(axis=-1))
    return np.abs(arr)


@dataclass
class WeightAxiomReport:
    weight: str
    sample_count: int
    seed: int
    moderate_constant: float
    moderate_violations: int
    sandwich_rate: float
    sandwich_ok: bool
    bd_partial_sums: dict = field(default_factory=dict)
    bd_tail_bound: float = 0.0
    bd_converges: bool = True


def _bd_log_weight(w: WeightSpec, n: np.ndarray, x: float) -> np.ndarray:
    if w.is_plane:
        return np.log(w.evaluate_plane(n * x, n * x))
    return np.log(w.evaluate(n * x))


def check_weight_axioms(
    w: WeightSpec,
    sample_count: int = 10_000,
    seed: int = 0,
    box: float = 16.0,
    d: int = 1,
) -> WeightAxiomReport:
    """Empirical verification of the weight axioms on random pairs.

    Checks w(x+y) <= C w(x) v(y) over seeded pairs in [-box, box]^d
    (C = 1 for subexponential kinds), reports the smallest exponential
    sandwich rate r with e^{-r|x|} <= w <= e^{r|x|} on the sample, and
    tabulates the non-quasianalyticity partial sums
    sum n^-2 log w(n x) at N = 1e2, 1e3, 1e4 with an integral tail bound.
    """
    if sample_count < 100:
        raise ValueError("sample_count must be >= 100")
    rng = np.random.default_rng(seed)
    shape = (sample_count, d) if d > 1 else (sample_count,)

    if w.is_plane:
        # a plane weight is a weight on (x, xi) pairs: draw pair points
        xt, xf = (rng.uniform(-box, box, size=shape) for _ in range(2))
        yt, yf = (rng.uniform(-box, box, size=shape) for _ in range(2))
        lhs = w.evaluate_plane(xt + yt, xf + yf)
        rhs = w.evaluate_plane(xt, xf) * w.evaluate_plane(yt, yf)
        r_abs = np.sqrt(_radius(xt) ** 2 + _radius(xf) ** 2)
        logw = np.log(w.evaluate_plane(xt, xf))
    else:
        xs = rng.uniform(-box, box, size=shape)
        ys = rng.uniform(-box, box, size=shape)
        lhs = w.evaluate(xs + ys)
        rhs = w.evaluate(xs) * w.companion().evaluate(ys)
        r_abs = _radius(xs)
        logw = np.log(w.evaluate(xs))
    ratio = lhs / rhs
    c_needed = float(ratio.max())
    violations = int(np.sum(ratio > 1.0 + 1e-12)) if w.kind in (
        "subexp",
        "product",
    ) else int(np.sum(ratio > c_needed * (1 + 1e-12)))

    # exponential sandwich: smallest r with the two-sided bound on sample
    nz = r_abs > 1e-9
    rate = float(np.max(np.abs(logw[nz]) / r_abs[nz])) if nz.any() else 0.0
    sandwich_ok = bool(
        np.all(logw[nz] <= rate * r_abs[nz] + 1e-9)
        and np.all(logw[nz] >= -rate * r_abs[nz] - 1e-9)
    )

    # Beurling-Domar partial sums at |x| = 1
    sums = {}
    total = 0.0
    prev_n = 0
    for n_stop in (100, 1000, 10_000):
        n = np.arange(prev_n + 1, n_stop + 1, dtype=float)
        total += float(np.sum(_bd_log_weight(w, n, 1.0) / n**2))
        sums[n_stop] = total
        prev_n = n_stop
    # integral comparison for the tail: log w(t) grows at most like a
    # power t^gamma with gamma < 1, so the tail is bounded by
    # int_N^inf t^(gamma - 2) dt evaluated from the last decade's growth
    n_last = 10_000
    tail_term = float(_bd_log_weight(w, np.array([float(n_last)]), 1.0)[0])
    g10 = float(_bd_log_weight(w, np.array([float(n_last) / 10]), 1.0)[0])
    gamma = 0.0
    if g10 > 0 and tail_term > 0:
        gamma = max(0.0, np.log(tail_term / g10) / np.log(10.0))
    if gamma < 1.0:
        tail = tail_term * n_last ** (-1.0) / (1.0 - gamma)
        converges = True
    else:
        tail = float("inf")
        converges = False

    return WeightAxiomReport(
        weight=w.label(),
        sample_count=sample_count,
        seed=seed,
        moderate_constant=c_needed,
        moderate_violations=violations,
        sandwich_rate=rate,
        sandwich_ok=sandwich_ok,
        bd_partial_sums=sums,
        bd_tail_bound=tail,
        bd_converges=converges,
    )
