"""Mixtures of regular components and the machinery built on them.

A market is n bidders and k component distributions; bidder i draws her
value in two stages: a k-valued coin picks a component with probabilities
given by row i of the weight matrix, then the value is drawn from that
component.  The coin outcome is observable to the discriminating benchmark,
so sampling returns it alongside the value.

Irregular revenue curves are "ironed" by replacing R(q) = q * Q(1-q) with
its upper concave hull on a uniform quantile grid; the hull slope per grid
cell is the ironed virtual value (the marginal revenue dR/dq), constant
across ironed intervals and nonincreasing in q.  The grid construction is a
numerical approximation of exact ironing with error vanishing in grid size.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    EPS_Q,
    Distribution,
    SupportInterval,
    regularity_check,
)
from .errors import (
    AtomicDistribution,
    IrregularComponentWarning,
    NegativeWeight,
    ProfileSpaceTooLarge,
    UnboundedQuantile,
    WeightRowSum,
)

__all__ = [
    "MixtureDistribution",
    "MarketModel",
    "IndexProfile",
    "IronedCurve",
    "build_market",
    "sample_two_stage",
    "enumerate_profiles",
    "iron",
    "iron_distribution",
    "DEFAULT_IRONING_GRID",
    "PROFILE_CAP",
]

ROW_SUM_TOL = 1e-12
DEFAULT_IRONING_GRID = 4_097
PROFILE_CAP = 10**6


class MixtureDistribution(Distribution):
    """Convex combination of component distributions for one bidder."""

    def __init__(self, components, weights):
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(components),):
            raise ValueError("one weight per component required")
        self.components = tuple(components)
        self.weights = weights
        self._active = [(t, w) for t, w in enumerate(weights) if w > 0.0]
        self.is_continuous = all(
            self.components[t].is_continuous for t, _ in self._active
        )

    @property
    def support(self):
        los = [self.components[t].support.lo for t, _ in self._active]
        his = [self.components[t].support.hi for t, _ in self._active]
        return SupportInterval(min(los), max(his))

    def _delegate(self):
        if len(self._active) == 1:
            return self.components[self._active[0][0]]
        return None

    def cdf(self, x):
        single = self._delegate()
        if single is not None:
            return single.cdf(x)
        return sum(w * self.components[t].cdf(x) for t, w in self._active)

    def cdf_left(self, x):
        single = self._delegate()
        if single is not None:
            return single.cdf_left(x)
        return sum(w * self.components[t].cdf_left(x) for t, w in self._active)

    def pdf(self, x):
        if not self.is_continuous:
            raise AtomicDistribution("mixture carries an atom; no density")
        single = self._delegate()
        if single is not None:
            return single.pdf(x)
        return sum(w * self.components[t].pdf(x) for t, w in self._active)

    def survival(self, x):
        single = self._delegate()
        if single is not None:
            return single.survival(x)
        return sum(w * self.components[t].survival(x) for t, w in self._active)

    def survival_quantile(self, q):
        single = self._delegate()
        if single is not None:
            return single.survival_quantile(q)
        qv = np.asarray(q, dtype=float)
        if np.any(qv < 0.0) or np.any(qv > 1.0):
            raise ValueError("survival level must lie in [0, 1]")
        if np.any(qv == 0.0) and not self.support.bounded:
            raise UnboundedQuantile(f"{self}: survival_quantile(0) is infinite")
        scalar = qv.ndim == 0
        qa = np.atleast_1d(qv)
        comp_q = np.stack(
            [
                np.atleast_1d(self.components[t].survival_quantile(qa))
                for t, _ in self._active
            ]
        )
        lo = comp_q.min(axis=0)
        hi = comp_q.max(axis=0)
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            above = np.asarray(self.survival(mid)) > qa
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out = 0.5 * (lo + hi)
        return float(out[0]) if scalar else out

    def quantile(self, q):
        single = self._delegate()
        if single is not None:
            return single.quantile(q)
        q = self._check_quantile_arg(q)
        scalar = q.ndim == 0
        qv = np.atleast_1d(q).astype(float)
        # bracket each level by the extreme component quantiles
        comp_q = np.stack(
            [np.atleast_1d(self.components[t].quantile(qv)) for t, _ in self._active]
        )
        lo = comp_q.min(axis=0)
        hi = comp_q.max(axis=0)
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.cdf(mid)) < qv
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return float(out[0]) if scalar else out

    def sample(self, stream, size=None):
        """Two-stage draw; marginal law equals the mixture cdf."""
        _, values = self.sample_with_coin(stream, size)
        return values

    def sample_with_coin(self, stream, size=None):
        """Return (component-index, value); the coin stays observable."""
        cum = np.cumsum(self.weights)
        u_coin = stream.random(size)
        coin = np.minimum(
            np.searchsorted(cum, u_coin, side="right"), len(self.components) - 1
        )
        u_val = stream.random(size)
        if size is None:
            return int(coin), float(
                self.components[int(coin)]._inverse_transform(u_val)
            )
        values = np.empty(size, dtype=float)
        for t in range(len(self.components)):
            mask = coin == t
            if np.any(mask):
                values[mask] = self.components[t]._inverse_transform(u_val[mask])
        return coin, values

    def __str__(self):
        parts = " + ".join(f"{w:g}*{self.components[t]}" for t, w in self._active)
        return f"Mixture({parts})"


@dataclass(frozen=True)
class MarketModel:
    """n bidders over k shared components with per-bidder mixture weights."""

    components: tuple
    weights: np.ndarray  # (n, k), rows sum to 1

    def __post_init__(self):
        self.weights.setflags(write=False)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def k(self) -> int:
        return self.weights.shape[1]

    @property
    def delta(self) -> float:
        """Minimum mixture probability over the entries actually used."""
        used = self.weights[self.weights > 0.0]
        return float(used.min())

    @property
    def iid(self) -> bool:
        return bool(np.all(np.abs(self.weights - self.weights[0]) <= ROW_SUM_TOL))

    def bidder_mixture(self, i: int) -> MixtureDistribution:
        return MixtureDistribution(self.components, self.weights[i])

    def mixture_cdf(self, i: int, x):
        return self.bidder_mixture(i).cdf(x)

    def mixture_pdf(self, i: int, x):
        return self.bidder_mixture(i).pdf(x)

    def extended(self, extra_rows: int) -> "MarketModel":
        """Append i.i.d. bidders drawn from the (shared) marginal mixture.

        Only valid for i.i.d. markets; used by the non-targeted recipes.
        """
        if not self.iid:
            raise ValueError("extending by marginal draws requires an i.i.d. market")
        rows = np.vstack([self.weights, np.tile(self.weights[0], (extra_rows, 1))])
        return MarketModel(self.components, rows)


def build_market(components, weights) -> MarketModel:
    """Validate and freeze a MarketModel.

    Continuous components failing the regularity grid check trigger an
    IrregularComponentWarning (not fatal: atomic components are legitimate
    inputs for the advertising experiments).
    """
    components = tuple(components)
    if len(components) < 1:
        raise ValueError("at least one component required")
    w = np.array(weights, dtype=float)
    if w.ndim != 2 or w.shape[1] != len(components) or w.shape[0] < 1:
        raise ValueError(
            f"weights must be (n, k={len(components)}); got shape {w.shape}"
        )
    if np.any(w < 0.0):
        i, t = map(int, np.argwhere(w < 0.0)[0])
        raise NegativeWeight(f"weights[{i}][{t}] = {w[i, t]} is negative")
    sums = w.sum(axis=1)
    bad = np.abs(sums - 1.0) > ROW_SUM_TOL
    if np.any(bad):
        i = int(np.argmax(bad))
        raise WeightRowSum(f"weights row {i} sums to {sums[i]!r}, not 1")
    for t, comp in enumerate(components):
        if comp.is_continuous and not regularity_check(comp):
            warnings.warn(
                f"component {t} ({comp}) fails the regularity grid check",
                IrregularComponentWarning,
                stacklevel=2,
            )
    return MarketModel(components, w)


def sample_two_stage(market: MarketModel, i: int, stream, size=None):
    """Draw (component-index, value) for bidder i."""
    if not 0 <= i < market.n:
        raise IndexError(f"bidder index {i} out of range for n={market.n}")
    return market.bidder_mixture(i).sample_with_coin(stream, size)


@dataclass(frozen=True)
class IndexProfile:
    """One outcome of the n mixture coins with its probability."""

    q: tuple
    weight: float

    @property
    def distinct_count(self) -> int:
        """k(q): number of distinct components in the profile."""
        return len(set(self.q))


def enumerate_profiles(market: MarketModel, cap: int = PROFILE_CAP):
    """All k**n index profiles with exact weights (sum to 1 up to 1e-12)."""
    total = market.k**market.n
    if total > cap:
        raise ProfileSpaceTooLarge(
            f"k**n = {market.k}**{market.n} = {total} exceeds cap {cap}"
        )
    w = market.weights
    out = []
    for q in itertools.product(range(market.k), repeat=market.n):
        weight = float(np.prod(w[np.arange(market.n), q]))
        out.append(IndexProfile(q=q, weight=weight))
    return out


@dataclass(frozen=True)
class IronedCurve:
    """Revenue curve, its upper concave hull, and the hull-slope virtual values.

    grid        uniform quantile points q_0 < ... < q_{m-1}
    raw_R       R(q_j) = q_j * Q(1 - q_j)
    hull_R      upper concave hull of (grid, raw_R), equal at the grid ends
    ironed_phi  hull slope per grid cell (length m-1), nonincreasing in q,
                i.e. the ironed marginal revenue dR/dq
    values      Q(1 - q_j), decreasing in j; value-space cell edges
    """

    grid: np.ndarray
    raw_R: np.ndarray
    hull_R: np.ndarray
    ironed_phi: np.ndarray
    values: np.ndarray
    source: Distribution = field(repr=False)

    def __post_init__(self):
        for arr in (self.grid, self.raw_R, self.hull_R, self.ironed_phi, self.values):
            arr.setflags(write=False)

    def ironed_virtual(self, v):
        """Ironed virtual value at v: slope of the hull cell containing it."""
        q = 1.0 - np.asarray(self.source.cdf(v), dtype=float)
        dq = self.grid[1] - self.grid[0]
        cell = np.clip(((q - self.grid[0]) / dq).astype(int), 0, len(self.ironed_phi) - 1)
        out = self.ironed_phi[cell]
        if np.isscalar(v) or np.ndim(v) == 0:
            return float(out)
        return out


def _upper_concave_hull(x, y):
    """Indices of the upper hull vertices of the path (x, y), x increasing."""
    hull = []
    for j in range(len(x)):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (x[a] - x[o]) * (y[j] - y[o]) - (y[a] - y[o]) * (x[j] - x[o])
            if cross >= 0.0:
                hull.pop()
            else:
                break
        hull.append(j)
    return np.asarray(hull, dtype=int)


def iron_distribution(dist: Distribution, grid_size: int = DEFAULT_IRONING_GRID) -> IronedCurve:
    """Iron any continuous distribution's revenue curve."""
    if not dist.is_continuous:
        raise AtomicDistribution(f"{dist}: ironing needs a continuous distribution")
    if grid_size < 257:
        raise ValueError("ironing grid must have at least 257 points")
    grid = np.linspace(EPS_Q, 1.0, grid_size)
    values = np.asarray(dist.survival_quantile(grid), dtype=float)
    raw = grid * values
    verts = _upper_concave_hull(grid, raw)
    hull = np.interp(grid, grid[verts], raw[verts])
    # the hull never dips below the curve; enforce against float round-off
    hull = np.maximum(hull, raw)
    phi = np.diff(hull) / np.diff(grid)
    # concavity makes the slopes nonincreasing; remove interpolation noise
    # (~1e-13 inside ironed intervals) so the step function is exactly monotone
    phi = np.minimum.accumulate(phi)
    return IronedCurve(
        grid=grid, raw_R=raw, hull_R=hull, ironed_phi=phi, values=values, source=dist
    )


def iron(market: MarketModel, i: int, grid_size: int = DEFAULT_IRONING_GRID) -> IronedCurve:
    """Iron bidder i's mixture revenue curve."""
    return iron_distribution(market.bidder_mixture(i), grid_size)
