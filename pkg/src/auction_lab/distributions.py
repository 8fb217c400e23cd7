"""One-dimensional value distributions with auction-theoretic derived quantities.

Each family exposes the usual cdf/pdf/quantile/sampling surface plus the
quantities mechanism design cares about: hazard rate h(x) = f(x)/(1-F(x)),
virtual value phi(x) = x - 1/h(x), the revenue curve R(q) = q * Q(1-q) where
Q is the (generalized inverse) quantile function, and the monopoly reserve
argmax_r r * P(value >= r).

Conventions
-----------
* cdf is right-continuous; posted-price and monopoly-revenue computations use
  the left limit P(value >= r) = 1 - F(r-) so a price at an atom sells it.
* Supports are intervals on the non-negative real line.  Grid work on
  unbounded supports happens in quantile space q in (EPS_Q, 1 - EPS_Q) so no
  truncation point has to be chosen in value space.
* All distribution objects are immutable and safe to share across workers.
  Sampling requires an explicit stream (see streams.stream).

regularity_check and hr_dominates are grid certificates: numerical, not
symbolic, verdicts on a quantile-spaced grid (default 10 001 points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import (
    AtomicDistribution,
    DisjointSupports,
    OutsideSupport,
    SupremumNotAttained,
    UnboundedQuantile,
)

__all__ = [
    "SupportInterval",
    "Distribution",
    "Uniform",
    "Exponential",
    "PowerLaw",
    "EqualRevenue",
    "TruncatedNormal",
    "PointMass",
    "TwoPoint",
    "regularity_check",
    "hr_dominates",
    "hr_crossing",
    "EPS_Q",
    "MONOTONE_TOL",
]

#: Quantile-space epsilon for all grid work on unbounded supports.
EPS_Q = 1e-9

#: Tie tolerance for every monotonicity check in this module.
MONOTONE_TOL = 1e-9

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SupportInterval:
    """Closed support interval [lo, hi]; hi may be math.inf."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo < 0.0:
            raise ValueError("valuations are non-negative; support lo must be >= 0")
        if not self.lo <= self.hi:
            raise ValueError("support requires lo <= hi")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.hi)

    def width(self) -> float:
        return self.hi - self.lo


def _match(x, out):
    """Return float for scalar input, ndarray otherwise."""
    if np.isscalar(x) or getattr(x, "ndim", 1) == 0:
        return float(out)
    return out


class Distribution:
    """Common derived quantities; families implement the primitive surface."""

    #: set by subclasses
    support: SupportInterval
    is_continuous: bool

    # -- primitive surface (subclasses override) ----------------------------

    def cdf(self, x):
        raise NotImplementedError

    def cdf_left(self, x):
        """P(value < x); differs from cdf only at atoms."""
        return self.cdf(x)

    def pdf(self, x):
        raise NotImplementedError

    def quantile(self, q):
        """Generalized inverse inf{x : F(x) >= q}.

        q in (0, 1) always allowed; q in {0, 1} only when the corresponding
        support endpoint is finite, otherwise UnboundedQuantile.
        """
        raise NotImplementedError

    # -- shared machinery ----------------------------------------------------

    def _check_quantile_arg(self, q):
        q = np.asarray(q, dtype=float)
        if np.any(q < 0.0) or np.any(q > 1.0):
            raise ValueError("quantile level must lie in [0, 1]")
        if np.any(q == 1.0) and not self.support.bounded:
            raise UnboundedQuantile(f"{self}: quantile(1) is an infinite endpoint")
        return q

    def sample(self, stream, size=None):
        """Inverse-transform sample; deterministic given the stream state."""
        u = stream.random(size)
        return self._inverse_transform(u)

    def _inverse_transform(self, u):
        return self.quantile(u)

    def survival(self, x):
        """P(value > x).  Families override this to stay exact in the tail,
        where 1 - cdf(x) would lose all precision."""
        xv = np.asarray(x, dtype=float)
        return _match(x, 1.0 - np.asarray(self.cdf(xv), dtype=float))

    def survival_quantile(self, q):
        """inf{x : survival(x) <= q}, i.e. quantile(1 - q) computed stably.

        q in {0, 1} follows the quantile endpoint rules (q = 0 needs a
        finite top).
        """
        qv = np.asarray(q, dtype=float)
        if np.any(qv < 0.0) or np.any(qv > 1.0):
            raise ValueError("survival level must lie in [0, 1]")
        if np.any(qv == 0.0) and not self.support.bounded:
            raise UnboundedQuantile(f"{self}: survival_quantile(0) is infinite")
        return self.quantile(1.0 - qv)

    def survival_at_or_above(self, r):
        """P(value >= r) = 1 - F(r-)."""
        if self.is_continuous:
            return self.survival(r)
        x = np.asarray(r, dtype=float)
        return _match(r, 1.0 - np.asarray(self.cdf_left(x), dtype=float))

    def hazard(self, x):
        """Hazard rate f(x)/(1-F(x)) strictly inside the support."""
        self._require_density(x)
        xv = np.asarray(x, dtype=float)
        return _match(x, np.asarray(self.pdf(xv), dtype=float)
                      / np.asarray(self.survival(xv), dtype=float))

    def virtual(self, x):
        """Virtual value x - 1/h(x) strictly inside the support."""
        self._require_density(x)
        return self._virtual_unchecked(x)

    def _virtual_unchecked(self, x):
        xv = np.asarray(x, dtype=float)
        sf = np.asarray(self.survival(xv), dtype=float)
        return _match(x, xv - sf / np.asarray(self.pdf(xv), dtype=float))

    def hazard_and_virtual(self, x):
        """Return (h(x), phi(x)) at a point strictly inside the support."""
        h = self.hazard(x)
        return h, _match(x, np.asarray(x, dtype=float) - 1.0 / np.asarray(h))

    def _require_density(self, x):
        if not self.is_continuous:
            raise AtomicDistribution(f"{self} has atoms; no density exists")
        lo, hi = self.support.lo, self.support.hi
        xv = np.asarray(x, dtype=float)
        if np.any(xv <= lo) or np.any(xv >= hi):
            raise OutsideSupport(f"{self}: need {lo} < x < {hi}")

    def virtual_inverse(self, y):
        """inf{x in support : phi(x) >= y} for regular families."""
        raise NotImplementedError(f"{self} has no virtual inverse")

    def revenue_curve_point(self, q):
        """R(q) = q * Q(1 - q) for 0 < q < 1."""
        qv = np.asarray(q, dtype=float)
        if np.any(qv <= 0.0) or np.any(qv >= 1.0):
            raise ValueError("revenue curve is defined for 0 < q < 1")
        return _match(q, qv * np.asarray(self.survival_quantile(qv), dtype=float))

    def monopoly_reserve(self) -> float:
        """argmax_r r * P(value >= r), to 1e-9 relative precision.

        Continuous families are maximized over sale probability q (the
        objective is R(q)); a maximum pinned against the search cap
        q = EPS_Q means the posted-price revenue is still increasing at
        quantile(1 - EPS_Q) and the supremum is not attained.
        """
        if not self.is_continuous:
            return self._atom_monopoly_reserve()

        grid = np.linspace(EPS_Q, 1.0, 2049)
        rev = grid * self.survival_quantile(grid)
        j = int(np.argmax(rev))
        if j == 0 and rev[0] > rev[1] + MONOTONE_TOL:
            raise SupremumNotAttained(
                f"{self}: posted revenue still increasing at quantile(1-{EPS_Q})"
            )
        lo = grid[max(j - 1, 0)]
        hi = grid[min(j + 1, len(grid) - 1)]
        q_star = _golden_max(lambda q: q * self.survival_quantile(q), lo, hi)
        return float(self.survival_quantile(q_star))

    def _atom_monopoly_reserve(self) -> float:
        raise NotImplementedError

    def __str__(self):
        return type(self).__name__


def _golden_max(f, lo, hi, rel_tol=1e-9):
    """Golden-section maximization of a unimodal-on-bracket function."""
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rel_tol * max(abs(a), abs(b), 1e-12):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# Continuous families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Uniform(Distribution):
    """Uniform on [a, b]; h(x) = 1/(b-x), phi(x) = 2x - b."""

    a: float
    b: float
    is_continuous = True

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("Uniform requires b > a")
        if self.a < 0.0:
            raise ValueError("Uniform requires a >= 0")

    @property
    def support(self):
        return SupportInterval(self.a, self.b)

    def cdf(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.clip((xv - self.a) / (self.b - self.a), 0.0, 1.0))

    def pdf(self, x):
        xv = np.asarray(x, dtype=float)
        inside = (xv >= self.a) & (xv <= self.b)
        return _match(x, np.where(inside, 1.0 / (self.b - self.a), 0.0))

    def quantile(self, q):
        q = self._check_quantile_arg(q)
        return _match(q, self.a + q * (self.b - self.a))

    def survival(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.clip((self.b - xv) / (self.b - self.a), 0.0, 1.0))

    def survival_quantile(self, q):
        qv = np.asarray(q, dtype=float)
        return _match(q, self.b - qv * (self.b - self.a))

    def virtual_inverse(self, y):
        yv = np.asarray(y, dtype=float)
        return _match(y, np.clip((yv + self.b) / 2.0, self.a, self.b))

    def __str__(self):
        return f"Uniform({self.a}, {self.b})"


@dataclass(frozen=True)
class Exponential(Distribution):
    """Exponential with rate lam on [0, inf); constant hazard lam."""

    lam: float
    is_continuous = True

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("Exponential requires lam > 0")

    @property
    def support(self):
        return SupportInterval(0.0, math.inf)

    def cdf(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.where(xv <= 0.0, 0.0, -np.expm1(-self.lam * np.maximum(xv, 0.0))))

    def pdf(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.where(xv < 0.0, 0.0, self.lam * np.exp(-self.lam * np.maximum(xv, 0.0))))

    def quantile(self, q):
        q = self._check_quantile_arg(q)
        with np.errstate(divide="ignore"):
            return _match(q, -np.log1p(-q) / self.lam)

    def survival(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.exp(-self.lam * np.maximum(xv, 0.0)))

    def survival_quantile(self, q):
        qv = np.asarray(q, dtype=float)
        if np.any(qv == 0.0):
            raise UnboundedQuantile(f"{self}: survival_quantile(0) is infinite")
        with np.errstate(divide="ignore"):
            return _match(q, -np.log(qv) / self.lam)

    def virtual_inverse(self, y):
        yv = np.asarray(y, dtype=float)
        return _match(y, np.maximum(yv + 1.0 / self.lam, 0.0))

    def __str__(self):
        return f"Exponential({self.lam})"


@dataclass(frozen=True)
class PowerLaw(Distribution):
    """G(x) = 1 - x**(-alpha) on [1, inf); h(x) = alpha/x.

    phi(x) = x * (1 - 1/alpha): regular iff alpha >= 1 (constant zero at
    alpha = 1, decreasing below).
    """

    alpha: float
    is_continuous = True

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError("PowerLaw requires alpha > 0")

    @property
    def support(self):
        return SupportInterval(1.0, math.inf)

    def cdf(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.where(xv <= 1.0, 0.0, 1.0 - np.maximum(xv, 1.0) ** (-self.alpha)))

    def pdf(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.where(xv < 1.0, 0.0, self.alpha * np.maximum(xv, 1.0) ** (-self.alpha - 1.0)))

    def quantile(self, q):
        q = self._check_quantile_arg(q)
        with np.errstate(divide="ignore"):
            return _match(q, (1.0 - q) ** (-1.0 / self.alpha))

    def survival(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.maximum(xv, 1.0) ** (-self.alpha))

    def survival_quantile(self, q):
        qv = np.asarray(q, dtype=float)
        if np.any(qv == 0.0):
            raise UnboundedQuantile(f"{self}: survival_quantile(0) is infinite")
        with np.errstate(divide="ignore"):
            return _match(q, qv ** (-1.0 / self.alpha))

    def virtual_inverse(self, y):
        yv = np.asarray(y, dtype=float)
        if self.alpha == 1.0:
            # phi is identically zero: any support point meets y <= 0
            return _match(y, np.where(yv <= 0.0, 1.0, np.inf))
        if self.alpha < 1.0:
            raise ValueError("PowerLaw(alpha<1) is irregular; no virtual inverse")
        return _match(y, np.maximum(yv * self.alpha / (self.alpha - 1.0), 1.0))

    def __str__(self):
        return f"PowerLaw({self.alpha})"


@dataclass(frozen=True)
class EqualRevenue(Distribution):
    """F(x) = 1 - 1/(x+1) on [0, inf): the shifted equal-revenue family.

    Every posted price r earns r/(r+1), increasing toward 1; the virtual
    value is identically -1, so the monopoly price is a supremum and
    monopoly_reserve raises SupremumNotAttained.
    """

    is_continuous = True

    @property
    def support(self):
        return SupportInterval(0.0, math.inf)

    def cdf(self, x):
        xv = np.maximum(np.asarray(x, dtype=float), 0.0)
        return _match(x, xv / (xv + 1.0))

    def pdf(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.where(xv < 0.0, 0.0, (np.maximum(xv, 0.0) + 1.0) ** -2.0))

    def quantile(self, q):
        q = self._check_quantile_arg(q)
        with np.errstate(divide="ignore"):
            return _match(q, q / (1.0 - q))

    def survival(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, 1.0 / (np.maximum(xv, 0.0) + 1.0))

    def survival_quantile(self, q):
        qv = np.asarray(q, dtype=float)
        if np.any(qv == 0.0):
            raise UnboundedQuantile(f"{self}: survival_quantile(0) is infinite")
        with np.errstate(divide="ignore"):
            return _match(q, (1.0 - qv) / qv)

    def virtual_inverse(self, y):
        yv = np.asarray(y, dtype=float)
        out = np.where(yv <= -1.0, 0.0, np.inf)
        return _match(y, out)

    def __str__(self):
        return "EqualRevenue"


@dataclass(frozen=True)
class TruncatedNormal(Distribution):
    """Normal(mu, sigma) conditioned on [0, inf).

    The quantile has no assumed closed form; it is computed by bisection on
    the cdf to 1e-10.
    """

    mu: float
    sigma: float
    is_continuous = True

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError("TruncatedNormal requires sigma > 0")

    @property
    def support(self):
        return SupportInterval(0.0, math.inf)

    @property
    def _mass_above_zero(self):
        return float(ndtr(self.mu / self.sigma))

    def cdf(self, x):
        xv = np.asarray(x, dtype=float)
        z = (xv - self.mu) / self.sigma
        z0 = -self.mu / self.sigma
        out = (ndtr(z) - ndtr(z0)) / self._mass_above_zero
        return _match(x, np.clip(np.where(xv <= 0.0, 0.0, out), 0.0, 1.0))

    def pdf(self, x):
        xv = np.asarray(x, dtype=float)
        z = (xv - self.mu) / self.sigma
        dens = np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))
        return _match(x, np.where(xv < 0.0, 0.0, dens / self._mass_above_zero))

    def survival(self, x):
        xv = np.asarray(x, dtype=float)
        # Phi((mu - x)/sigma) stays accurate where 1 - cdf would round away
        out = ndtr((self.mu - xv) / self.sigma) / self._mass_above_zero
        return _match(x, np.where(xv <= 0.0, 1.0, np.clip(out, 0.0, 1.0)))

    def survival_quantile(self, q):
        qv = np.asarray(q, dtype=float)
        if np.any(qv == 0.0):
            raise UnboundedQuantile(f"{self}: survival_quantile(0) is infinite")
        scalar = qv.ndim == 0
        qa = np.atleast_1d(qv)
        lo = np.zeros_like(qa)
        hi_val = self.mu + 10.0 * self.sigma
        while np.asarray(self.survival(hi_val)) > np.min(qa[qa > 0.0], initial=1.0):
            hi_val += 10.0 * self.sigma
        hi = np.full_like(qa, hi_val)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            above = np.asarray(self.survival(mid)) > qa
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out = 0.5 * (lo + hi)
        return float(out[0]) if scalar else out

    def quantile(self, q):
        q = self._check_quantile_arg(q)
        scalar = q.ndim == 0
        qv = np.atleast_1d(q)
        # bracket: cdf is 0 at 0; expand hi until it covers max(q) < 1
        lo = np.zeros_like(qv)
        hi_val = self.mu + 10.0 * self.sigma
        while self.cdf(hi_val) < np.max(qv[qv < 1.0], initial=0.0):
            hi_val += 10.0 * self.sigma
        hi = np.full_like(qv, hi_val)
        for _ in range(80):  # 80 halvings push the bracket below 1e-10
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.cdf(mid)) < qv
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return float(out[0]) if scalar else out

    def virtual_inverse(self, y):
        yv = np.atleast_1d(np.asarray(y, dtype=float))
        lo = np.zeros_like(yv)
        hi_val = self.mu + 12.0 * self.sigma
        hi = np.full_like(yv, hi_val)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self._virtual_unchecked(mid)) < yv
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return float(out[0]) if np.isscalar(y) or np.ndim(y) == 0 else out

    def __str__(self):
        return f"TruncatedNormal({self.mu}, {self.sigma})"


# ---------------------------------------------------------------------------
# Atomic families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointMass(Distribution):
    """Deterministic value v."""

    v: float
    is_continuous = False

    def __post_init__(self):
        if self.v < 0.0:
            raise ValueError("PointMass requires v >= 0")

    @property
    def support(self):
        return SupportInterval(self.v, self.v)

    def cdf(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.where(xv >= self.v, 1.0, 0.0))

    def cdf_left(self, x):
        xv = np.asarray(x, dtype=float)
        return _match(x, np.where(xv > self.v, 1.0, 0.0))

    def pdf(self, x):
        raise AtomicDistribution("PointMass has no density")

    def quantile(self, q):
        q = self._check_quantile_arg(q)
        return _match(q, np.full(np.shape(q), self.v))

    def _inverse_transform(self, u):
        return _match(u, np.full(np.shape(u), self.v))

    def _atom_monopoly_reserve(self):
        return self.v

    def __str__(self):
        return f"PointMass({self.v})"


@dataclass(frozen=True)
class TwoPoint(Distribution):
    """v_lo with probability 1 - p_hi, v_hi with probability p_hi."""

    v_lo: float
    v_hi: float
    p_hi: float
    is_continuous = False

    def __post_init__(self):
        if not self.v_lo < self.v_hi:
            raise ValueError("TwoPoint requires v_lo < v_hi")
        if self.v_lo < 0.0:
            raise ValueError("TwoPoint requires v_lo >= 0")
        if not 0.0 < self.p_hi < 1.0:
            raise ValueError("TwoPoint requires 0 < p_hi < 1")

    @property
    def support(self):
        return SupportInterval(self.v_lo, self.v_hi)

    def cdf(self, x):
        xv = np.asarray(x, dtype=float)
        out = np.where(xv >= self.v_hi, 1.0, np.where(xv >= self.v_lo, 1.0 - self.p_hi, 0.0))
        return _match(x, out)

    def cdf_left(self, x):
        xv = np.asarray(x, dtype=float)
        out = np.where(xv > self.v_hi, 1.0, np.where(xv > self.v_lo, 1.0 - self.p_hi, 0.0))
        return _match(x, out)

    def pdf(self, x):
        raise AtomicDistribution("TwoPoint has no density")

    def quantile(self, q):
        q = self._check_quantile_arg(q)
        out = np.where(np.asarray(q) > 1.0 - self.p_hi, self.v_hi, self.v_lo)
        return _match(q, out)

    def _inverse_transform(self, u):
        out = np.where(np.asarray(u) > 1.0 - self.p_hi, self.v_hi, self.v_lo)
        return _match(u, out)

    def _atom_monopoly_reserve(self):
        # tie goes to the lower price (same revenue, weakly more sales)
        if self.v_hi * self.p_hi > self.v_lo:
            return self.v_hi
        return self.v_lo

    def __str__(self):
        return f"TwoPoint({self.v_lo}, {self.v_hi}, {self.p_hi})"


# ---------------------------------------------------------------------------
# Grid certificates
# ---------------------------------------------------------------------------


def regularity_check(d: Distribution, grid_size: int = 10_001) -> bool:
    """True iff phi is nondecreasing on a quantile-spaced grid.

    Numerical verdict: successive differences are allowed to dip by at most
    MONOTONE_TOL.  Raises AtomicDistribution for atom-carrying families.
    """
    if not d.is_continuous:
        raise AtomicDistribution(f"{d}: regularity is defined via the density")
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    q = np.linspace(EPS_Q, 1.0 - EPS_Q, grid_size)
    phi = np.asarray(d._virtual_unchecked(d.quantile(q)))
    return bool(np.all(np.diff(phi) >= -MONOTONE_TOL))


def _intersection_grid(d1: Distribution, d2: Distribution, grid_size: int):
    """Value-space grid strictly inside the support intersection.

    Points are quantile-spaced under d1 so unbounded intersections need no
    truncation choice.
    """
    lo = max(d1.support.lo, d2.support.lo)
    hi = min(d1.support.hi, d2.support.hi)
    if not hi > lo:
        raise DisjointSupports(f"supports of {d1} and {d2} overlap in at most a point")
    u_lo = max(float(d1.cdf(lo)), EPS_Q)
    u_hi = min(float(d1.cdf(hi)) if math.isfinite(hi) else 1.0, 1.0 - EPS_Q)
    # interior points only: both hazards must be defined at every grid point
    u = np.linspace(u_lo, u_hi, grid_size + 2)[1:-1]
    return np.asarray(d1.quantile(u))


def hr_crossing(d1: Distribution, d2: Distribution, grid_size: int = 10_001):
    """First grid point where h_{d1} > h_{d2} + tol, or None if dominated.

    None means d1 hazard-rate dominates d2 on the grid certificate.
    """
    if not (d1.is_continuous and d2.is_continuous):
        raise AtomicDistribution("hazard-rate dominance needs continuous distributions")
    x = _intersection_grid(d1, d2, grid_size)
    with np.errstate(divide="ignore", over="ignore"):
        h1 = np.asarray(d1.pdf(x)) / np.maximum(np.asarray(d1.survival(x)), 1e-300)
        h2 = np.asarray(d2.pdf(x)) / np.maximum(np.asarray(d2.survival(x)), 1e-300)
    bad = h1 > h2 + MONOTONE_TOL
    if not np.any(bad):
        return None
    j = int(np.argmax(bad))
    return float(x[j]), float(h1[j]), float(h2[j])


def hr_dominates(d1: Distribution, d2: Distribution, grid_size: int = 10_001) -> bool:
    """True iff h_{d1}(x) <= h_{d2}(x) + tol on the support intersection grid."""
    return hr_crossing(d1, d2, grid_size) is None
