"""Numerical verification of the tail-ordering conditions separating two laws.

Two orderings are checked on a far-tail grid, both in log-survival space
(ratios of survivals underflow long before their logs do):

* condition B(F, G): (1-G(x)) / (1-F(x))**(1-eps) nondecreasing past x0,
  i.e.  L(x) = ln(1-G) - (1-eps) ln(1-F) nondecreasing;
* condition C(F, G): (1-G(x)) / ((1-F(x)) (-ln(1-F(x)))**eps) nondecreasing,
  i.e.  M(x) = ln(1-G) - ln(1-F) - eps ln(-ln(1-F)) nondecreasing,

plus the domination condition  1-F1(x) <= (1-F0(x))**delta  for some
delta in (0,1), which in logs reads  ln sv_F1 <= delta * ln sv_F0.

A finite grid can certify monotonicity only at its probe points, so every
verdict here is an "on grid" statement: necessary evidence, not proof.
The classifier combines the checks into an alternative-class label and the
predicted drift sign of the tail statistic: when the sampled law's tail
dominates the hypothesized one (B(F0,F1) or C(F0,F1)), exceedance
log-ratios are stochastically larger than standard exponential and the
statistic drifts above 1 (sign plus); the reverse directions give minus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import Distribution
from .errors import DataError, NotInConditionClass, UsageError

DEFAULT_TOL = 1e-3
DEFAULT_SLACK = 1e-9
_EPS_C_START = 8.0
_EPS_C_CAP = 2.0 ** 16


@dataclass(frozen=True)
class MonotoneGrid:
    """Probe points in the far tail of F0, log-spaced in survival probability."""

    xs: np.ndarray = field(repr=False)
    ps: np.ndarray = field(repr=False)
    x0: float

    def __post_init__(self):
        if len(self.xs) < 16:
            raise UsageError(f"grid needs at least 16 points, got {len(self.xs)}")
        if not np.all(np.diff(self.xs) > 0.0):
            raise UsageError("grid points must be strictly increasing")
        if not self.xs[0] > self.x0:
            raise UsageError("grid points must lie strictly above x0")

    @property
    def m(self) -> int:
        return len(self.xs)

    @classmethod
    def build(
        cls,
        f0: Distribution,
        x0: float | None = None,
        m: int = 512,
        p_min: float = 1e-10,
    ) -> "MonotoneGrid":
        """Grid of m points x_j = F0^{-1}(1 - p_j), p_j log-spaced below sv(x0).

        Defaults: x0 at the 0.9 quantile of F0 and p_j running from 0.1 down
        to 1e-10. The definitions only require monotonicity past *some* x0,
        so the probes target the far tail; x0 is overridable.
        """
        if x0 is None:
            p_max = 0.1
            x0 = float(f0.quantile(0.9))
        else:
            x0 = float(x0)
            ls0 = float(f0.log_survival(x0))
            if ls0 == -math.inf:
                raise UsageError(f"x0={x0} is at or beyond the right endpoint of F0")
            if ls0 >= 0.0:
                raise UsageError(f"x0={x0} must lie strictly inside the support of F0")
            p_max = math.exp(ls0)
            if p_max == 0.0:
                raise UsageError(
                    f"survival at x0={x0} underflows double precision; use a smaller x0"
                )
        if p_min >= p_max:
            p_min = p_max * 1e-9
        # drop the first point: it sits exactly at x0
        ps = np.geomspace(p_max, p_min, m + 1)[1:]
        xs = np.asarray(f0.inverse_survival(ps), dtype=float)
        return cls(xs=xs, ps=ps, x0=x0)


def _log_survivals_on(dist: Distribution, grid: MonotoneGrid, who: str) -> np.ndarray:
    ls = np.asarray(dist.log_survival(grid.xs), dtype=float)
    if np.any(np.isneginf(ls)):
        raise DataError(f"grid point beyond the support of {who}")
    return ls


def _nondecreasing(values: np.ndarray, slack: float) -> bool:
    tol = slack * np.maximum(1.0, np.maximum(np.abs(values[:-1]), np.abs(values[1:])))
    return bool(np.all(np.diff(values) >= -tol))


def check_condition_b(
    f: Distribution,
    g: Distribution,
    epsilon: float,
    grid: MonotoneGrid,
    slack: float = DEFAULT_SLACK,
) -> bool:
    """Is (1-G)/(1-F)**(1-eps) nondecreasing on the grid (relative slack)?"""
    if not 0.0 < epsilon < 1.0:
        raise UsageError(f"condition B needs epsilon in (0,1), got {epsilon}")
    lf = _log_survivals_on(f, grid, "F")
    lg = _log_survivals_on(g, grid, "G")
    return _nondecreasing(lg - (1.0 - epsilon) * lf, slack)


def check_condition_c(
    f: Distribution,
    g: Distribution,
    epsilon: float,
    grid: MonotoneGrid,
    slack: float = DEFAULT_SLACK,
) -> bool:
    """Is (1-G)/((1-F)(-ln(1-F))**eps) nondecreasing on the grid?"""
    if epsilon <= 0.0:
        raise UsageError(f"condition C needs epsilon > 0, got {epsilon}")
    lf = _log_survivals_on(f, grid, "F")
    lg = _log_survivals_on(g, grid, "G")
    if np.any(-lf <= 1.0):
        raise UsageError(
            "grid has points with -ln(1-F(x)) <= 1; start the grid at a larger x0"
        )
    return _nondecreasing(lg - lf - epsilon * np.log(-lf), slack)


@dataclass(frozen=True)
class EpsilonEstimate:
    epsilon: float
    direction: str  # "forward" = condition(F=f, G=g), "reverse" = condition(F=g, G=f)


def estimate_epsilon(
    f: Distribution,
    g: Distribution,
    kind: str,
    grid: MonotoneGrid,
    tol: float = DEFAULT_TOL,
) -> EpsilonEstimate:
    """Largest slack eps for which B (or C) holds on the grid, by bisection.

    Bisects to width `tol` over (0,1) for kind "B"; for kind "C" the upper
    end starts at 8 and doubles while the check still passes (the definition
    does not bound eps by 1). The result is a grid-sup estimate: on a coarse
    grid it can exceed the true supremum.
    """
    if kind not in ("B", "C"):
        raise UsageError(f"kind must be 'B' or 'C', got {kind!r}")
    checker = check_condition_b if kind == "B" else check_condition_c

    def largest_passing(a: Distribution, b: Distribution) -> float | None:
        try:
            holds = checker(a, b, tol, grid)
        except UsageError:
            # the C-grid precondition -ln(1-F)>1 can fail for one direction
            # only; treat that direction as not established on this grid
            return None
        if not holds:
            return None
        if kind == "B":
            lo, hi = tol, 1.0
        else:
            lo, hi = tol, _EPS_C_START
            while hi < _EPS_C_CAP and checker(a, b, hi, grid):
                lo, hi = hi, 2.0 * hi
            if hi >= _EPS_C_CAP:
                return lo
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if checker(a, b, mid, grid):
                lo = mid
            else:
                hi = mid
        return lo

    forward = largest_passing(f, g)
    reverse = largest_passing(g, f)
    if forward is None and reverse is None:
        raise NotInConditionClass(
            f"neither direction of condition {kind} holds on this grid at eps={tol}"
        )
    if reverse is None or (forward is not None and forward >= reverse):
        return EpsilonEstimate(epsilon=forward, direction="forward")
    return EpsilonEstimate(epsilon=reverse, direction="reverse")


def check_delta(
    f0: Distribution,
    f1: Distribution,
    grid: MonotoneGrid,
    tol: float = DEFAULT_TOL,
) -> tuple[bool, float]:
    """Does 1-F1(x) <= (1-F0(x))**delta hold for some delta in (0,1)?

    In logs the condition is ln sv_F1 <= delta * ln sv_F0, so the largest
    admissible delta is the grid infimum of ln sv_F1 / ln sv_F0 (both
    negative). Returns (ok, delta_hat) with delta_hat capped at 1 - tol.
    """
    lf0 = _log_survivals_on(f0, grid, "F0")
    ls1 = np.asarray(f1.log_survival(grid.xs), dtype=float)  # -inf allowed: trivially dominated
    ratio = ls1 / lf0
    delta_hat = float(min(np.min(ratio), 1.0 - tol))
    return delta_hat > tol, delta_hat


@dataclass(frozen=True)
class ConditionReport:
    """On-grid verdicts for one (F0, F1) pair; see module docstring for signs."""

    b_f0_f1: bool
    b_f1_f0: bool
    c_f0_f1: bool
    c_f1_f0: bool
    epsilon_hat_b: float
    epsilon_hat_b_direction: str | None
    epsilon_hat_c: float
    epsilon_hat_c_direction: str | None
    delta_ok: bool
    delta_hat: float
    theta_class: str  # "Theta" | "ThetaPrime" | "neither"
    predicted_sign: str  # "plus" | "minus" | "undetermined"
    x0: float
    grid_points: int
    on_grid: bool = True

    def to_dict(self) -> dict:
        return {
            "b_f0_f1": self.b_f0_f1,
            "b_f1_f0": self.b_f1_f0,
            "c_f0_f1": self.c_f0_f1,
            "c_f1_f0": self.c_f1_f0,
            "epsilon_hat_b": self.epsilon_hat_b,
            "epsilon_hat_b_direction": self.epsilon_hat_b_direction,
            "epsilon_hat_c": self.epsilon_hat_c,
            "epsilon_hat_c_direction": self.epsilon_hat_c_direction,
            "delta_ok": self.delta_ok,
            "delta_hat": self.delta_hat,
            "theta_class": self.theta_class,
            "predicted_sign": self.predicted_sign,
            "x0": self.x0,
            "grid_points": self.grid_points,
            "on_grid": self.on_grid,
        }


def classify_alternative(
    f0: Distribution,
    f1: Distribution,
    grid: MonotoneGrid | None = None,
    tol: float = DEFAULT_TOL,
) -> ConditionReport:
    """Run all four direction checks, estimate the slacks, label the pair.

    Class "Theta" when a B direction holds at eps=tol; "ThetaPrime" when only
    a C direction holds and the delta-domination check passes; "neither"
    otherwise (including the degenerate case where both directions of a
    condition hold, which means the log-ratio is constant to slack and the
    pair is not separated). Direction strings name the holding condition,
    e.g. "B(F1,F0)" puts F1 in the conditioning slot.
    """
    if grid is None:
        grid = MonotoneGrid.build(f0)

    def _try(checker, f, g) -> bool:
        # a direction whose grid precondition fails counts as not established
        try:
            return checker(f, g, tol, grid)
        except UsageError:
            return False

    b01 = check_condition_b(f0, f1, tol, grid)
    b10 = check_condition_b(f1, f0, tol, grid)
    c01 = _try(check_condition_c, f0, f1)
    c10 = _try(check_condition_c, f1, f0)

    def _estimate(kind: str, holds: bool) -> tuple[float, str | None]:
        if not holds:
            return 0.0, None
        est = estimate_epsilon(f0, f1, kind, grid, tol)
        label = f"{kind}(F0,F1)" if est.direction == "forward" else f"{kind}(F1,F0)"
        return est.epsilon, label

    eps_b, dir_b = _estimate("B", b01 or b10)
    eps_c, dir_c = _estimate("C", c01 or c10)
    delta_ok, delta_hat = check_delta(f0, f1, grid, tol)

    if b01 and b10:
        theta, sign = "neither", "undetermined"
    elif b01 or b10:
        theta = "Theta"
        sign = "plus" if b01 else "minus"
    elif c01 and c10:
        theta, sign = "neither", "undetermined"
    elif (c01 or c10) and delta_ok:
        theta = "ThetaPrime"
        sign = "plus" if c01 else "minus"
    elif c01 or c10:
        # ordered by C but not delta-dominated: separated direction is still
        # informative for the drift even though class membership fails
        theta = "neither"
        sign = "plus" if c01 else "minus"
    else:
        theta, sign = "neither", "undetermined"

    return ConditionReport(
        b_f0_f1=b01,
        b_f1_f0=b10,
        c_f0_f1=c01,
        c_f1_f0=c10,
        epsilon_hat_b=eps_b,
        epsilon_hat_b_direction=dir_b,
        epsilon_hat_c=eps_c,
        epsilon_hat_c_direction=dir_c,
        delta_ok=delta_ok,
        delta_hat=delta_hat,
        theta_class=theta,
        predicted_sign=sign,
        x0=grid.x0,
        grid_points=grid.m,
    )


def grid_evaluations(
    f0: Distribution,
    f1: Distribution,
    grid: MonotoneGrid,
    epsilon: float = DEFAULT_TOL,
) -> dict[str, np.ndarray]:
    """Per-point grid diagnostics for CSV dumps; B/C ratios at the given eps."""
    lf0 = _log_survivals_on(f0, grid, "F0")
    lf1 = _log_survivals_on(f1, grid, "F1")
    with np.errstate(invalid="ignore"):
        cols = {
            "x": grid.xs,
            "p": grid.ps,
            "log_ratio_b_f0f1": lf1 - (1.0 - epsilon) * lf0,
            "log_ratio_b_f1f0": lf0 - (1.0 - epsilon) * lf1,
            "log_ratio_c_f0f1": lf1 - lf0 - epsilon * np.log(-lf0),
            "log_ratio_c_f1f0": lf0 - lf1 - epsilon * np.log(-lf1),
            "delta_ratio": lf1 / lf0,
        }
    return cols
