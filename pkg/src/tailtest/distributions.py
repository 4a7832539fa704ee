"""Parametric distribution catalog with numerically stable tail functionals.

Every family exposes four primitives built for far-tail work:

* ``log_survival(x)`` -- ln(1 - F(x)), computed by a direct tail formula
  (erfc route for the normal, ``-rate*x`` for the exponential, ...), never
  as ``log(1 - cdf(x))`` past the median;
* ``quantile(p)`` -- inf{x : F(x) >= p}, closed form for every family;
* ``inverse_survival(s)`` -- quantile(1 - s) evaluated without forming 1-s,
  so it keeps full resolution for s down to the underflow threshold;
* ``sample(seed, n)`` -- inverse-transform sampling from a seeded
  deterministic uniform generator (numpy PCG64); identical seed and
  parameters give identical output.

Pareto convention: tail index gamma > 0 with survival x**(-1/gamma) on
x >= 1, so that the tail statistic equals hill_estimator/gamma exactly
under a Pareto hypothesis. Other conventions (scale, shape=1/gamma) exist;
this one is deliberate.

All functionals accept scalars or numpy arrays and are pure; instances are
frozen dataclasses and safe to share across threads. A sampler created by
``rng`` owns its generator state and must not be driven from two threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .errors import DataError, UsageError

ArrayLike = Union[float, np.ndarray]

_LN2 = math.log(2.0)
# smallest uniform draw admitted by samplers; keeps inverse transforms
# strictly inside the open support (hit with probability 2**-53 per draw)
_MIN_UNIFORM = 2.0 ** -53


def _log1mexp_neg(log_t) -> np.ndarray:
    """ln(1 - exp(-t)) given ln(t), stable even when t underflows to 0.

    Used for families whose survival is 1 - exp(-t(x)) with t(x) -> 0 in the
    right tail (Frechet, Gumbel): there ln(1 - e^-t) ~ ln t - t/2, so the
    answer stays finite long after t itself is subnormal.
    """
    shape = np.shape(log_t)
    log_t = np.atleast_1d(np.asarray(log_t, dtype=float))
    t = np.exp(log_t)
    out = np.empty_like(t)
    tiny = log_t < -37.0
    big = ~tiny & (t > _LN2)
    mid = ~tiny & ~big
    out[tiny] = log_t[tiny] - 0.5 * t[tiny]
    out[mid] = np.log(-np.expm1(-t[mid]))
    out[big] = np.log1p(-np.exp(-t[big]))
    return out.reshape(shape)


def _returning_like(x_in, arr: np.ndarray):
    if np.ndim(x_in) == 0:
        return float(arr)
    return arr


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


@dataclass(frozen=True)
class Distribution:
    """Base interface; subclasses implement the three tail primitives."""

    #: open/closed support endpoints (used by the numeric inverter and docs)
    support = (-math.inf, math.inf)
    family = "abstract"

    # -- primitives ------------------------------------------------------

    def log_survival(self, x: ArrayLike) -> ArrayLike:
        """ln(1 - F(x)); 0 at/below the left endpoint, -inf at/above the right."""
        raise NotImplementedError

    def _quantile(self, p: np.ndarray) -> np.ndarray:
        # default: monotone bracketing inversion of the cdf; every catalog
        # family overrides with its closed form, and the tests pin the two
        # routes against each other
        return np.vectorize(lambda q: invert_cdf(self, q))(p)

    def _inverse_survival(self, s: np.ndarray) -> np.ndarray:
        return self._quantile(1.0 - s)

    # -- derived functionals ----------------------------------------------

    def cdf(self, x: ArrayLike) -> ArrayLike:
        # -expm1(log_survival) keeps full relative accuracy in BOTH tails,
        # since log_survival is itself accurate there
        arr = np.asarray(x, dtype=float)
        return _returning_like(x, -np.expm1(self.log_survival(arr)))

    def survival(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        return _returning_like(x, np.exp(self.log_survival(arr)))

    def quantile(self, p: ArrayLike) -> ArrayLike:
        """inf{x : F(x) >= p} for p in (0,1)."""
        arr = np.asarray(p, dtype=float)
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise UsageError(f"quantile probability must lie in (0,1), got {p!r}")
        return _returning_like(p, self._quantile(arr))

    def inverse_survival(self, s: ArrayLike) -> ArrayLike:
        """x with survival(x) = s, for s in (0,1); stable for tiny s."""
        arr = np.asarray(s, dtype=float)
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise UsageError(f"survival probability must lie in (0,1), got {s!r}")
        return _returning_like(s, self._inverse_survival(arr))

    def sample(self, seed, n: int) -> np.ndarray:
        """n inverse-transform draws from a generator seeded with `seed`.

        `seed` may be an int or a numpy SeedSequence. Draws are clamped away
        from u=0 (probability 2**-53) so values stay strictly inside the
        open support.
        """
        if n < 1:
            raise UsageError(f"sample size must be >= 1, got {n}")
        rng = np.random.default_rng(seed)
        u = np.maximum(rng.random(n), _MIN_UNIFORM)
        return self._quantile(u)

    def spec(self) -> str:
        """Canonical CLI spec string for this distribution."""
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float
    family = "exponential"
    support = (0.0, math.inf)

    def __post_init__(self):
        _require(self.rate > 0, f"exponential rate must be > 0, got {self.rate}")

    def log_survival(self, x):
        arr = np.asarray(x, dtype=float)
        return _returning_like(x, np.where(arr > 0.0, -self.rate * arr, 0.0))

    def _quantile(self, p):
        return -np.log1p(-p) / self.rate

    def _inverse_survival(self, s):
        return -np.log(s) / self.rate

    def spec(self):
        return f"exp:{self.rate:g}"


@dataclass(frozen=True)
class Pareto(Distribution):
    """Survival x**(-1/gamma) on x >= 1; gamma is the extreme value index."""

    gamma: float
    family = "pareto"
    support = (1.0, math.inf)

    def __post_init__(self):
        _require(self.gamma > 0, f"pareto tail index must be > 0, got {self.gamma}")

    def log_survival(self, x):
        arr = np.asarray(x, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            ls = -np.log(np.maximum(arr, 1.0)) / self.gamma
        return _returning_like(x, ls)

    def _quantile(self, p):
        return np.exp(-self.gamma * np.log1p(-p))

    def _inverse_survival(self, s):
        return np.exp(-self.gamma * np.log(s))

    def spec(self):
        return f"pareto:{self.gamma:g}"


@dataclass(frozen=True)
class Normal(Distribution):
    mu: float
    sigma: float
    family = "normal"

    def __post_init__(self):
        _require(self.sigma > 0, f"normal stddev must be > 0, got {self.sigma}")

    def log_survival(self, x):
        arr = np.asarray(x, dtype=float)
        # erfc route via scipy's log_ndtr: accurate to z ~ 1e7, far past the
        # z ~ 40 needed by condition-checking grids
        return _returning_like(x, special.log_ndtr(-(arr - self.mu) / self.sigma))

    def _quantile(self, p):
        return self.mu + self.sigma * special.ndtri(p)

    def _inverse_survival(self, s):
        return self.mu - self.sigma * special.ndtri(s)

    def spec(self):
        return f"normal:{self.mu:g},{self.sigma:g}"


@dataclass(frozen=True)
class LogNormal(Distribution):
    mu: float
    sigma: float
    family = "lognormal"
    support = (0.0, math.inf)

    def __post_init__(self):
        _require(self.sigma > 0, f"lognormal log-sd must be > 0, got {self.sigma}")

    def log_survival(self, x):
        arr = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(np.maximum(arr, 0.0)) - self.mu) / self.sigma
        return _returning_like(x, np.where(arr > 0.0, special.log_ndtr(-z), 0.0))

    def _quantile(self, p):
        return np.exp(self.mu + self.sigma * special.ndtri(p))

    def _inverse_survival(self, s):
        return np.exp(self.mu - self.sigma * special.ndtri(s))

    def spec(self):
        return f"lognormal:{self.mu:g},{self.sigma:g}"


@dataclass(frozen=True)
class Weibull(Distribution):
    shape: float
    scale: float
    family = "weibull"
    support = (0.0, math.inf)

    def __post_init__(self):
        _require(self.shape > 0, f"weibull shape must be > 0, got {self.shape}")
        _require(self.scale > 0, f"weibull scale must be > 0, got {self.scale}")

    def log_survival(self, x):
        arr = np.asarray(x, dtype=float)
        t = np.power(np.maximum(arr, 0.0) / self.scale, self.shape)
        return _returning_like(x, np.where(arr > 0.0, -t, 0.0))

    def _quantile(self, p):
        return self.scale * np.power(-np.log1p(-p), 1.0 / self.shape)

    def _inverse_survival(self, s):
        return self.scale * np.power(-np.log(s), 1.0 / self.shape)

    def spec(self):
        return f"weibull:{self.shape:g},{self.scale:g}"


@dataclass(frozen=True)
class Frechet(Distribution):
    """Standard Frechet: F(x) = exp(-x**-shape) on x > 0."""

    shape: float
    family = "frechet"
    support = (0.0, math.inf)

    def __post_init__(self):
        _require(self.shape > 0, f"frechet shape must be > 0, got {self.shape}")

    def log_survival(self, x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(arr)
        pos = arr > 0.0
        # survival = 1 - exp(-t) with ln t = -shape*ln x
        out[pos] = _log1mexp_neg(-self.shape * np.log(arr[pos]))
        return _returning_like(x, out.reshape(np.shape(x)))

    def _quantile(self, p):
        return np.power(-np.log(p), -1.0 / self.shape)

    def _inverse_survival(self, s):
        return np.power(-np.log1p(-s), -1.0 / self.shape)

    def spec(self):
        return f"frechet:{self.shape:g}"


@dataclass(frozen=True)
class Gumbel(Distribution):
    loc: float
    scale: float
    family = "gumbel"

    def __post_init__(self):
        _require(self.scale > 0, f"gumbel scale must be > 0, got {self.scale}")

    def log_survival(self, x):
        arr = np.asarray(x, dtype=float)
        z = (arr - self.loc) / self.scale
        # survival = 1 - exp(-t) with ln t = -z
        return _returning_like(x, _log1mexp_neg(-z))

    def _quantile(self, p):
        return self.loc - self.scale * np.log(-np.log(p))

    def _inverse_survival(self, s):
        return self.loc - self.scale * np.log(-np.log1p(-s))

    def spec(self):
        return f"gumbel:{self.loc:g},{self.scale:g}"


@dataclass(frozen=True)
class Uniform(Distribution):
    a: float
    b: float
    family = "uniform"

    def __post_init__(self):
        _require(self.a < self.b, f"uniform requires a < b, got a={self.a}, b={self.b}")

    @property
    def support(self):  # type: ignore[override]
        return (self.a, self.b)

    def log_survival(self, x):
        arr = np.asarray(x, dtype=float)
        width = self.b - self.a
        frac = np.clip((arr - self.a) / width, 0.0, np.inf)
        with np.errstate(divide="ignore"):
            ls = np.log1p(-np.minimum(frac, 1.0))
        return _returning_like(x, ls)

    def _quantile(self, p):
        return self.a + p * (self.b - self.a)

    def _inverse_survival(self, s):
        return self.b - s * (self.b - self.a)

    def spec(self):
        return f"uniform:{self.a:g},{self.b:g}"


@dataclass(frozen=True)
class TransformedDistribution(Distribution):
    """Pushforward of a finite-right-endpoint law under y = 1/(x* - x).

    Maps (-inf, x*) monotonically onto (0, inf): G(y) = F(x* - 1/y) for
    y > 0, which is how bounded-endpoint data is reduced to the unbounded
    setting before testing.
    """

    base: Distribution
    right_endpoint: float
    family = "transformed"
    support = (0.0, math.inf)

    def log_survival(self, x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(arr)
        pos = arr > 0.0
        out[pos] = np.asarray(
            self.base.log_survival(self.right_endpoint - 1.0 / arr[pos]), dtype=float
        )
        return _returning_like(x, out.reshape(np.shape(x)))

    def _quantile(self, p):
        return 1.0 / (self.right_endpoint - np.asarray(self.base._quantile(p), dtype=float))

    def _inverse_survival(self, s):
        return 1.0 / (
            self.right_endpoint - np.asarray(self.base._inverse_survival(s), dtype=float)
        )

    def spec(self):
        return f"transformed({self.base.spec()},endpoint={self.right_endpoint:g})"


def to_infinite_endpoint(dist: Distribution, right_endpoint: float) -> TransformedDistribution:
    """Distribution view of the y = 1/(x* - x) change of variables."""
    return TransformedDistribution(dist, float(right_endpoint))


def transform_sample(values: ArrayLike, right_endpoint: float) -> np.ndarray:
    """Apply y = 1/(x* - x) to data; every value must be < x*."""
    arr = np.asarray(values, dtype=float)
    bad = arr >= right_endpoint
    if np.any(bad):
        offender = float(arr[np.argmax(bad)])
        raise DataError(
            f"sample value {offender!r} is not below the right endpoint {right_endpoint!r}"
        )
    return 1.0 / (right_endpoint - arr)


def invert_cdf(dist: Distribution, p: float, rel_tol: float = 1e-12) -> float:
    """Generic quantile via monotone bracketing; fallback for cdf-only laws.

    Expands the bracket with exponential steps from the support interior,
    then bisects to `rel_tol` relative width. Families with closed forms
    override `_quantile`; this routine exists so any monotone cdf plugs in.
    """
    if not 0.0 < p < 1.0:
        raise UsageError(f"quantile probability must lie in (0,1), got {p!r}")
    lo, hi = dist.support
    # left bracket: cdf(a) < p. Halve toward a finite endpoint, else double out.
    if math.isfinite(lo):
        offset = 1.0
        a = lo + offset
        while dist.cdf(a) >= p and offset > 1e-300:
            offset /= 2.0
            a = lo + offset
        if dist.cdf(a) >= p:
            a = lo
    else:
        a = -1.0
        while dist.cdf(a) >= p:
            a *= 2.0
    # right bracket: cdf(b) >= p
    if math.isfinite(hi):
        offset = 1.0
        b = hi - offset
        while dist.cdf(b) < p and offset > 1e-300:
            offset /= 2.0
            b = hi - offset
        if dist.cdf(b) < p:
            b = hi
    else:
        b = 1.0
        while dist.cdf(b) < p:
            b *= 2.0
    for _ in range(200):
        mid = 0.5 * (a + b)
        if dist.cdf(mid) >= p:
            b = mid
        else:
            a = mid
        if abs(b - a) <= rel_tol * max(1.0, abs(a), abs(b)):
            break
    return b


_FAMILY_ALIASES = {
    "exp": "exp",
    "exponential": "exp",
    "pareto": "pareto",
    "normal": "normal",
    "gaussian": "normal",
    "lognormal": "lognormal",
    "weibull": "weibull",
    "frechet": "frechet",
    "gumbel": "gumbel",
    "uniform": "uniform",
}

_SPEC_BUILDERS = {
    "exp": (1, lambda v: Exponential(rate=v[0])),
    "pareto": (1, lambda v: Pareto(gamma=v[0])),
    "normal": (2, lambda v: Normal(mu=v[0], sigma=v[1])),
    "lognormal": (2, lambda v: LogNormal(mu=v[0], sigma=v[1])),
    "weibull": (2, lambda v: Weibull(shape=v[0], scale=v[1])),
    "frechet": (1, lambda v: Frechet(shape=v[0])),
    "gumbel": (2, lambda v: Gumbel(loc=v[0], scale=v[1])),
    "uniform": (2, lambda v: Uniform(a=v[0], b=v[1])),
}


def parse_spec(spec: str) -> Distribution:
    """Parse a CLI distribution string such as `exp:1` or `normal:0,1`.

    Accepted families: exp:rate, pareto:gamma, normal:mu,sigma,
    lognormal:mu,sigma, weibull:shape,scale, frechet:shape,
    gumbel:loc,scale, uniform:a,b.
    """
    text = spec.strip()
    name, sep, rest = text.partition(":")
    key = _FAMILY_ALIASES.get(name.strip().lower())
    if key is None or not sep:
        raise UsageError(f"unknown distribution spec {spec!r}")
    try:
        params = [float(tok) for tok in rest.split(",")]
    except ValueError:
        raise UsageError(f"non-numeric parameter in distribution spec {spec!r}") from None
    arity, build = _SPEC_BUILDERS[key]
    if len(params) != arity:
        raise UsageError(
            f"distribution {name!r} takes {arity} parameter(s), got {len(params)} in {spec!r}"
        )
    return build(params)


CATALOG = (
    Exponential(1.0),
    Pareto(1.0),
    Normal(0.0, 1.0),
    LogNormal(0.0, 1.0),
    Weibull(1.5, 1.0),
    Frechet(2.0),
    Gumbel(0.0, 1.0),
    Uniform(0.0, 1.0),
)
