"""Regularity classification from coefficient and STFT decay.

A function of sub-exponential time-frequency decay e^{-k rho^(1/s)}
(rho the shell radius |n/2| + |l| or |x| + |xi|) is classified by
fitting the decay law on shell envelopes, by weighted-series membership
tests on its basis coefficients, and by sup-norm checks of f and its
transform; Roumieu-type membership asks the test to pass at some h > 0,
Beurling-type at every tested h.  The three routes are computed
independently and a report flags any disagreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Signal, dft
from .norms import TailAnalysis, _fit_line, analyze_tail, modulation_norm
from .stft import PhasePlaneArray
from .weights import WeightSpec
from .wilson import CoefficientTable, WilsonSystem, analyze

__all__ = [
    "DecayFit",
    "SeriesReport",
    "SupReport",
    "MembershipReport",
    "PairingResult",
    "fit_coefficient_decay",
    "fit_stft_decay",
    "membership_series",
    "gs_sup_check",
    "classify_gs",
    "pair_distribution",
]

DEFAULT_S_GRID = (0.5, 0.75, 1.0, 1.5, 2.0, 3.0)
DEFAULT_H_GRID = (0.25, 0.5, 1.0, 2.0)
COEFF_FLOOR = 1e-13
MIN_SHELLS = 8


@dataclass
class DecayFit:
    """Fitted exponential-of-power decay law C e^{-k rho^(1/s)}."""

    s_hat: float
    k_hat: float
    C_hat: float
    r2: float
    shells_used: int
    law: str  # "coefficient" | "stft"
    r2_by_s: dict = field(default_factory=dict)
    power_slope: float = 0.0
    power_r2: float = 0.0

    @property
    def rejected(self) -> bool:
        """Polynomial shells fit the power law better than any
        exponential-of-power law."""
        return self.power_r2 > self.r2


def _shell_envelope(rho: np.ndarray, mag: np.ndarray, floor: float):
    """Unit-width shell maxima with the argmax's exact radius."""
    keep = mag > floor
    rho, mag = rho[keep], mag[keep]
    if len(rho) == 0:
        return rho, mag
    bins = np.floor(rho).astype(int)
    out_r, out_v = [], []
    for b in np.unique(bins):
        m = bins == b
        i = np.argmax(mag[m])
        out_r.append(rho[m][i])
        out_v.append(mag[m][i])
    return np.array(out_r), np.array(out_v)


def _fit_shell_law(
    rho: np.ndarray, mag: np.ndarray, s_grid, law: str, floor: float
) -> DecayFit:
    env_r, env_v = _shell_envelope(rho, mag, floor)
    if len(env_r) < MIN_SHELLS:
        raise ValueError(
            f"too few shells above floor ({len(env_r)} < {MIN_SHELLS})"
        )
    logv = np.log(env_v)
    best = None
    table = {}
    for s in s_grid:
        slope, icpt, r2 = _fit_line(env_r ** (1.0 / s), logv)
        table[float(s)] = r2
        if best is None or r2 > best[3]:
            best = (float(s), -slope, float(np.exp(icpt)), r2)
    nz = env_r > 0
    p_slope, _, p_r2 = (
        _fit_line(np.log(env_r[nz]), logv[nz]) if nz.sum() >= 3 else (0.0, 0.0, 0.0)
    )
    return DecayFit(
        s_hat=best[0],
        k_hat=best[1],
        C_hat=best[2],
        r2=best[3],
        shells_used=len(env_r),
        law=law,
        r2_by_s=table,
        power_slope=p_slope,
        power_r2=p_r2,
    )


def fit_coefficient_decay(
    c: CoefficientTable, s_grid=DEFAULT_S_GRID, floor: float = COEFF_FLOOR
) -> DecayFit:
    """Select the s in s_grid whose shell regression of log shell-max
    |c| against rho^(1/s) maximizes r^2."""
    items = c.sorted_items()
    mag = np.array([abs(v) for _, v in items])
    if int((mag > 1e-14).sum()) < 50:
        raise ValueError("table has fewer than 50 entries above floor")
    rho = np.array([idx.radial() for idx, _ in items])
    return _fit_shell_law(rho, mag, s_grid, "coefficient", floor)


def fit_stft_decay(
    v: PhasePlaneArray, s_grid=DEFAULT_S_GRID, floor: float = COEFF_FLOOR
) -> DecayFit:
    """Same shell scheme on the phase plane with rho = |x| + |xi|;
    the regressor per shell is |x*|^(1/s) + |xi*|^(1/s) at the shell's
    maximizing point."""
    if v.dim != 1:
        raise ValueError("stft decay fits are implemented for dim=1")
    x = np.abs(v.time_grid.points())
    xi = np.abs(v.freq_grid.points())
    mag = np.abs(v.values)
    rho = x[:, None] + xi[None, :]
    keep = mag > floor
    if not keep.any():
        raise ValueError("plane is empty above floor")
    rho_f, mag_f = rho[keep], mag[keep]
    ax_x, ax_xi = np.broadcast_arrays(x[:, None], xi[None, :])
    x_f, xi_f = ax_x[keep], ax_xi[keep]
    bins = np.floor(rho_f).astype(int)
    shell_x, shell_xi, shell_v = [], [], []
    for b in np.unique(bins):
        m = bins == b
        i = np.argmax(mag_f[m])
        shell_x.append(x_f[m][i])
        shell_xi.append(xi_f[m][i])
        shell_v.append(mag_f[m][i])
    shell_x = np.array(shell_x)
    shell_xi = np.array(shell_xi)
    logv = np.log(np.array(shell_v))
    if len(logv) < MIN_SHELLS:
        raise ValueError(
            f"too few shells above floor ({len(logv)} < {MIN_SHELLS})"
        )
    best = None
    table = {}
    for s in s_grid:
        reg = shell_x ** (1.0 / s) + shell_xi ** (1.0 / s)
        slope, icpt, r2 = _fit_line(reg, logv)
        table[float(s)] = r2
        if best is None or r2 > best[3]:
            best = (float(s), -slope, float(np.exp(icpt)), r2)
    rr = shell_x + shell_xi
    nz = rr > 0
    p_slope, _, p_r2 = (
        _fit_line(np.log(rr[nz]), logv[nz]) if nz.sum() >= 3 else (0.0, 0.0, 0.0)
    )
    return DecayFit(
        s_hat=best[0],
        k_hat=best[1],
        C_hat=best[2],
        r2=best[3],
        shells_used=len(logv),
        law="stft",
        r2_by_s=table,
        power_slope=p_slope,
        power_r2=p_r2,
    )


@dataclass
class SeriesReport:
    radii: list
    partial_sums: list
    verdict: str  # "finite" | "divergent"
    collapsed: bool
    evidence: dict = field(default_factory=dict)


def membership_series(
    c: CoefficientTable, h: float, s: float, sign: str = "+"
) -> SeriesReport:
    """Partial sums of sum |c|^2 e^{+-2 h rho^(1/s)} over growing shells.

    Verdict: divergent when the shell increments grow at the truncation
    edge (or a polynomial coefficient envelope meets a growing weight);
    finite when the final increments collapse below 1e-10 of the sum, or
    decrease monotonically (slow but summable tail).
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if h < 0 or s <= 0:
        raise ValueError("h >= 0 and s > 0 required")
    sgn = 1.0 if sign == "+" else -1.0
    items = c.sorted_items()
    rho = np.array([idx.radial() for idx, _ in items])
    terms = np.array(
        [
            abs(v) ** 2 * np.exp(sgn * 2.0 * h * idx.radial() ** (1.0 / s))
            for idx, v in items
        ]
    )
    if len(items) == 0:
        return SeriesReport([], [], "finite", True, {"warning": "empty table"})
    rho_max = float(rho.max())
    radii = [r for r in range(8, int(np.ceil(rho_max)) + 8, 8)]
    partials = [float(terms[rho <= r].sum()) for r in radii]
    increments = np.diff([0.0] + partials)
    total = partials[-1]
    collapsed = bool(
        len(increments) >= 2
        and np.all(increments[-2:] <= 1e-10 * max(total, 1e-300))
    )
    growing = bool(
        len(increments) >= 2 and increments[-1] > increments[-2] > 0
    )
    # polynomial coefficient envelope against a growing weight diverges
    # regardless of in-range increments; cap at the modulation bound
    # where the truncation starts bending the law
    r_cap = rho_max
    l_max = c.system.get("l_max")
    if l_max:
        r_cap = min(r_cap, float(l_max))
    in_cap = rho <= r_cap + 0.5
    tail = (
        analyze_tail(
            rho[in_cap],
            np.abs(np.array([v for _, v in items]))[in_cap] ** 2,
            lambda r: float(np.exp(sgn * 2.0 * h * r ** (1.0 / s))),
            max(r_cap, 1.0),
        )
        if sign == "+" and h > 0
        else TailAnalysis(False, 0.0, "decaying weight")
    )
    if growing or tail.divergent:
        verdict = "divergent"
    else:
        verdict = "finite"
    return SeriesReport(
        radii=radii,
        partial_sums=partials,
        verdict=verdict,
        collapsed=collapsed,
        evidence={
            "increments": increments.tolist(),
            "tail_reason": tail.reason,
            "h": h,
            "s": s,
            "sign": sign,
        },
    )


@dataclass
class SupReport:
    h_list: list
    s: float
    time_sup: list
    freq_sup: list
    time_verdicts: list
    freq_verdicts: list
    evidence: dict = field(default_factory=dict)

    def verdict(self, h: float) -> str:
        i = self.h_list.index(h)
        ok = self.time_verdicts[i] == "finite" and self.freq_verdicts[i] == "finite"
        return "finite" if ok else "divergent"


def _sup_side(vals: np.ndarray, radii: np.ndarray, r_max: float, h: float,
              s: float) -> tuple[float, str]:
    weighted = np.abs(vals) * np.exp(h * radii ** (1.0 / s))
    if not np.all(np.isfinite(weighted)):
        return float("inf"), "divergent"
    sup = float(weighted.max())
    boundary = radii[np.argmax(weighted)] > 0.9 * r_max
    ana = analyze_tail(
        radii,
        np.abs(vals),
        lambda r: float(np.exp(h * r ** (1.0 / s))),
        r_max,
    )
    divergent = boundary or (h > 0 and ana.divergent)
    return sup, ("divergent" if divergent else "finite")


def gs_sup_check(f: Signal, h_list, s: float) -> SupReport:
    """Weighted sup of |f| and |f_hat| per h, with growth flags.

    A side is flagged divergent when the weighted sup is attained in the
    outer 10% of the grid or the unweighted envelope follows a
    polynomial law that any growing weight eventually beats.
    """
    if s <= 0:
        raise ValueError("s must be positive")
    if f.dim != 1:
        raise ValueError("sup checks are implemented for dim=1")
    f_hat = dft(f, "forward")
    xr = np.abs(f.grid.points())
    fr = np.abs(f_hat.grid.points())
    t_sup, f_sup, t_v, f_v = [], [], [], []
    for h in h_list:
        if h < 0:
            raise ValueError("h values must be >= 0")
        sup_t, v_t = _sup_side(f.values, xr, f.grid.half_width, h, s)
        sup_f, v_f = _sup_side(
            f_hat.values, fr, f_hat.grid.half_width, h, s
        )
        t_sup.append(sup_t)
        f_sup.append(sup_f)
        t_v.append(v_t)
        f_v.append(v_f)
    return SupReport(
        h_list=list(h_list), s=s, time_sup=t_sup, freq_sup=f_sup,
        time_verdicts=t_v, freq_verdicts=f_v,
    )


@dataclass
class MembershipReport:
    """Per-route membership evidence over an h-grid at fixed s.

    membership maps each class tag to its verdict under its quantifier:
    S_s is Roumieu ("finite at some tested h"), Sigma_s is Beurling
    ("finite at all tested h"); the distribution-side classes use the
    negative-weight series with the dual quantifiers.  The sigma
    exponent of the distribution-side decay bound is read as s.
    """

    s: float
    h_grid: list
    routes: dict  # route name -> list of per-h verdicts
    membership: dict  # class tag -> bool
    quantifiers: dict  # class tag -> "some" | "all"
    consistent: bool
    fit: DecayFit | None = None
    evidence: dict = field(default_factory=dict)


def classify_gs(
    f: Signal,
    sys: WilsonSystem,
    phi: Signal,
    s: float = 2.0,
    h_grid=DEFAULT_H_GRID,
) -> MembershipReport:
    """Aggregate the sup-norm, coefficient-series, and modulation-norm
    membership routes over an h-grid at fixed s.

    Route disagreement is reported through the `consistent` flag, never
    raised; the per-route verdict lists are part of the report.
    """
    h_grid = list(h_grid)
    table = analyze(f, sys)
    sup = gs_sup_check(f, h_grid, s)
    sup_verdicts = [sup.verdict(h) for h in h_grid]
    series_verdicts = [
        membership_series(table, h, s, "+").verdict for h in h_grid
    ]
    mod_verdicts = [
        modulation_norm(f, phi, 2.0, 2.0, WeightSpec.product(h, s)).verdict
        for h in h_grid
    ]
    dual_verdicts = [
        membership_series(table, h, s, "-").verdict for h in h_grid
    ]
    routes = {
        "sup": sup_verdicts,
        "series": series_verdicts,
        "modulation": mod_verdicts,
        "dual_series": dual_verdicts,
    }
    primal = ["sup", "series", "modulation"]
    consistent = all(
        len({routes[r][i] for r in primal}) == 1 for i in range(len(h_grid))
    )

    def _some(verdicts):
        return any(v == "finite" for v in verdicts)

    def _all(verdicts):
        return all(v == "finite" for v in verdicts)

    agg = [
        "finite"
        if all(routes[r][i] == "finite" for r in primal)
        else "divergent"
        for i in range(len(h_grid))
    ]
    membership = {
        "S_s": _some(agg),
        "Sigma_s": _all(agg),
        # distribution side: Sigma' needs some h, S' needs every h
        "Sigma_s_prime": _some(dual_verdicts),
        "S_s_prime": _all(dual_verdicts),
    }
    quantifiers = {
        "S_s": "some",
        "Sigma_s": "all",
        "Sigma_s_prime": "some",
        "S_s_prime": "all",
    }
    try:
        fit = fit_coefficient_decay(table)
    except ValueError:
        fit = None
    return MembershipReport(
        s=s,
        h_grid=h_grid,
        routes=routes,
        membership=membership,
        quantifiers=quantifiers,
        consistent=consistent,
        fit=fit,
        evidence={
            "sigma_note": "distribution-side frequency exponent read as s",
            "per_h_aggregate": agg,
        },
    )


@dataclass
class PairingResult:
    value: complex
    bound: float
    h: float
    s: float


def pair_distribution(
    a: CoefficientTable, c: CoefficientTable, h: float, s: float
) -> PairingResult:
    """Duality pairing sum conj(a) * c with its two-sided bound.

    The bound splits the weight e^{-h rho^(1/s)} onto c and its
    reciprocal onto a; it is finite only when a decays fast enough,
    otherwise the pairing is rejected.
    """
    if h < 0 or s <= 0:
        raise ValueError("h >= 0 and s > 0 required")
    # entries of c outside a contribute nothing: a is a test table and
    # its missing coefficients are zero
    value = 0.0 + 0.0j
    for idx, av in a.sorted_items():
        cv = c.get(idx)
        if cv != 0:
            value += np.conj(av) * cv
    sum_c = 0.0
    for idx, cv in c.sorted_items():
        sum_c += abs(cv) ** 2 * float(
            np.exp(-2.0 * h * idx.radial() ** (1.0 / s))
        )
    sum_a = 0.0
    for idx, av in a.sorted_items():
        sum_a += abs(av) ** 2 * float(
            np.exp(2.0 * h * idx.radial() ** (1.0 / s))
        )
    if not np.isfinite(sum_a):
        raise ValueError(
            "pairing rejected: the test table does not decay at rate h"
        )
    bound = float(np.sqrt(sum_c) * np.sqrt(sum_a))
    if abs(value) > bound * (1.0 + 1e-12) + 1e-300:
        raise ValueError("pairing bound violated beyond rounding")
    return PairingResult(value=complex(value), bound=bound, h=h, s=s)
