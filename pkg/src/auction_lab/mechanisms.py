"""Executable single-item mechanisms.

All mechanisms are deterministic pure functions of (spec, profile) and are
safe for unlimited parallel invocation.  Ties are broken by lowest bidder
index everywhere; this is measure-zero for continuous value draws and is
the documented convention for atomic inputs.

Payments are critical values: the infimum bid at which the winner still
wins, located by bisection on the (monotone) allocation rule.  Reserve
semantics at equality: a value equal to the reserve qualifies, matching the
right-continuous-cdf atom convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import regularity_check
from .errors import (
    IndexOutOfRange,
    IrregularComponent,
    NegativeReserve,
    NonMonotoneAllocation,
    ValueOutsideSupport,
)
from .mixtures import IronedCurve

__all__ = [
    "ValuationProfile",
    "AuctionOutcome",
    "SecondPrice",
    "SecondPriceAnonymousReserve",
    "SecondPriceBidderReserves",
    "SecondPriceSubsetReserve",
    "SecondPriceSampleReserve",
    "MyersonRegular",
    "MyersonIroned",
    "PostedSequence",
    "run",
    "run_second_price",
    "run_myerson",
    "run_posted_sequence",
    "run_subset_reserve",
    "critical_payment",
    "BISECTION_TOL",
]

BISECTION_TOL = 1e-9
_BISECTION_MAX_ITER = 200

ORIGINAL = "original"
EXTRA = "extra"  # ("extra", component_index)
DETERMINISTIC = "det"  # ("det", value)


@dataclass(frozen=True)
class ValuationProfile:
    """Non-negative values plus where each column came from.

    Origin tags are (kind, detail) pairs: ("original", bidder_index),
    ("extra", component_index) or ("det", value).  Augmented profiles keep
    the original bidders first.
    """

    values: tuple
    origins: tuple = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(v < 0.0 for v in vals):
            raise ValueError("valuations must be non-negative")
        object.__setattr__(self, "values", vals)
        if self.origins is None:
            object.__setattr__(
                self, "origins", tuple((ORIGINAL, i) for i in range(len(vals)))
            )
        else:
            if len(self.origins) != len(vals):
                raise ValueError("one origin tag per value required")
            object.__setattr__(self, "origins", tuple(self.origins))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class AuctionOutcome:
    """Result of one run: at most one winner, losers pay zero."""

    winner: int | None
    payments: tuple
    revenue: float

    @classmethod
    def no_sale(cls, n: int) -> "AuctionOutcome":
        return cls(winner=None, payments=(0.0,) * n, revenue=0.0)

    @classmethod
    def sale(cls, n: int, winner: int, price: float) -> "AuctionOutcome":
        payments = [0.0] * n
        payments[winner] = price
        return cls(winner=winner, payments=tuple(payments), revenue=price)


# ---------------------------------------------------------------------------
# Mechanism specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SecondPrice:
    """Vickrey auction, no reserve."""


@dataclass(frozen=True)
class SecondPriceAnonymousReserve:
    reserve: float

    def __post_init__(self):
        if self.reserve < 0.0:
            raise NegativeReserve(f"reserve {self.reserve} < 0")


@dataclass(frozen=True)
class SecondPriceBidderReserves:
    reserves: tuple

    def __post_init__(self):
        if any(r < 0.0 for r in self.reserves):
            raise NegativeReserve("bidder reserves must be non-negative")


@dataclass(frozen=True)
class SecondPriceSubsetReserve:
    """Vickrey among the non-subset bidders with reserve = max subset value.

    The subset members only set the price; they never win.  This is the
    sample-based single-reserve auction whose halving inequality against
    the augmented Vickrey auction is directly testable.
    """

    subset: tuple


@dataclass(frozen=True)
class SecondPriceSampleReserve:
    """Vickrey with a random anonymous reserve drawn per run.

    The reserve is the maximum of one fresh draw from each listed component.
    The draw needs a stream, so this spec is evaluated by the revenue
    estimator rather than by the scalar `run` dispatcher.
    """

    component_indices: tuple


@dataclass(frozen=True)
class MyersonRegular:
    """Highest-virtual-value auction for per-bidder regular distributions."""

    dists: tuple

    def __post_init__(self):
        for j, d in enumerate(self.dists):
            if not regularity_check(d):
                raise IrregularComponent(f"dists[{j}] = {d} fails regularity")


@dataclass(frozen=True)
class MyersonIroned:
    """Myerson auction on ironed virtual values (one curve per bidder)."""

    curves: tuple


@dataclass(frozen=True)
class PostedSequence:
    """Sequential posted prices: first bidder in `order` meeting their price buys."""

    prices: tuple
    order: tuple


MechanismSpec = (
    SecondPrice
    | SecondPriceAnonymousReserve
    | SecondPriceBidderReserves
    | SecondPriceSubsetReserve
    | SecondPriceSampleReserve
    | MyersonRegular
    | MyersonIroned
    | PostedSequence
)


# ---------------------------------------------------------------------------
# Second price
# ---------------------------------------------------------------------------


def run_second_price(
    profile: ValuationProfile,
    anonymous_reserve: float | None = None,
    bidder_reserves=None,
) -> AuctionOutcome:
    """Vickrey auction with optional anonymous or per-bidder reserves.

    The winner is the highest-value bidder meeting their reserve (ties to
    the lowest index); they pay max(second-highest qualifying value, own
    reserve).  With no qualifying bidder there is no sale.
    """
    if anonymous_reserve is not None and bidder_reserves is not None:
        raise ValueError("set at most one reserve mode")
    n = len(profile)
    if n == 0:
        raise ValueError("profile must be non-empty")
    if anonymous_reserve is not None:
        if anonymous_reserve < 0.0:
            raise NegativeReserve(f"reserve {anonymous_reserve} < 0")
        reserves = np.full(n, float(anonymous_reserve))
    elif bidder_reserves is not None:
        reserves = np.asarray(bidder_reserves, dtype=float)
        if reserves.shape != (n,):
            raise ValueError("one reserve per bidder required")
        if np.any(reserves < 0.0):
            raise NegativeReserve("bidder reserves must be non-negative")
    else:
        reserves = np.zeros(n)

    values = np.asarray(profile.values)
    qualifies = values >= reserves
    if not np.any(qualifies):
        return AuctionOutcome.no_sale(n)
    masked = np.where(qualifies, values, -np.inf)
    winner = int(np.argmax(masked))
    others = np.delete(masked, winner)
    runner_up = float(others.max()) if others.size else -np.inf
    price = max(runner_up, float(reserves[winner]))
    return AuctionOutcome.sale(n, winner, price)


def run_subset_reserve(profile: ValuationProfile, subset) -> AuctionOutcome:
    """Vickrey among bidders outside `subset` with reserve = max subset value."""
    n = len(profile)
    subset = tuple(subset)
    for j in subset:
        if not 0 <= j < n:
            raise IndexOutOfRange(f"subset index {j} out of range for n={n}")
    values = np.asarray(profile.values)
    rest = [i for i in range(n) if i not in set(subset)]
    if not rest:
        return AuctionOutcome.no_sale(n)
    reserve = float(values[list(subset)].max()) if subset else 0.0
    sub_outcome = run_second_price(
        ValuationProfile(tuple(values[rest])), anonymous_reserve=reserve
    )
    if sub_outcome.winner is None:
        return AuctionOutcome.no_sale(n)
    return AuctionOutcome.sale(n, rest[sub_outcome.winner], sub_outcome.revenue)


# ---------------------------------------------------------------------------
# Myerson (regular and ironed)
# ---------------------------------------------------------------------------


def _virtual_value(rule, v: float) -> float:
    """phi under a Distribution or an IronedCurve, tolerant of support edges."""
    if isinstance(rule, IronedCurve):
        sup = rule.source.support
        if not sup.lo <= v <= sup.hi:
            raise ValueOutsideSupport(f"value {v} outside support of {rule.source}")
        return float(rule.ironed_virtual(v))
    sup = rule.support
    if not sup.lo <= v <= sup.hi:
        raise ValueOutsideSupport(f"value {v} outside support of {rule}")
    # closed-interval evaluation: (1-F)/f is well behaved at the endpoints
    # of every family used here
    return float(rule._virtual_unchecked(v))


def _support_lo(rule) -> float:
    return rule.source.support.lo if isinstance(rule, IronedCurve) else rule.support.lo


def run_myerson(profile: ValuationProfile, per_bidder) -> AuctionOutcome:
    """Award to the highest (ironed) virtual value if non-negative.

    `per_bidder` holds one Distribution or IronedCurve per column of the
    profile.  The payment is the critical value of the induced monotone
    allocation rule, found by bisection to BISECTION_TOL.
    """
    n = len(profile)
    if len(per_bidder) != n:
        raise ValueError("one distribution or ironed curve per bidder required")
    values = profile.values
    phi = np.array([_virtual_value(per_bidder[i], values[i]) for i in range(n)])
    winner = int(np.argmax(phi))
    if phi[winner] < 0.0:
        return AuctionOutcome.no_sale(n)

    others = np.delete(phi, winner)
    max_others = float(others.max()) if others.size else -np.inf
    thr = max(0.0, max_others)
    if others.size and max_others >= 0.0:
        rivals = [j for j in range(n) if j != winner and phi[j] == max_others]
        wins_ties = winner < min(rivals)
    else:
        wins_ties = True

    rule = per_bidder[winner]

    def allocation(bid: float) -> bool:
        phi_b = _virtual_value(rule, bid)
        if phi_b < thr or phi_b < 0.0:
            return False
        if phi_b > thr:
            return True
        # phi_b == thr: wins outright when only the phi >= 0 gate binds,
        # otherwise the tie goes to the lower index
        if max_others < thr:
            return True
        return wins_ties

    lo = _support_lo(rule)
    price = _bisect_allocation(allocation, lo, values[winner])
    return AuctionOutcome.sale(n, winner, price)


def _bisect_allocation(allocation, lo: float, hi: float) -> float:
    """Infimum winning bid in [lo, hi]; allocation(hi) must hold."""
    if allocation(lo):
        return lo
    a, b = lo, hi
    for _ in range(_BISECTION_MAX_ITER):
        if b - a <= BISECTION_TOL:
            break
        mid = 0.5 * (a + b)
        if allocation(mid):
            b = mid
        else:
            a = mid
    return b


def critical_payment(profile: ValuationProfile, winner: int, allocation, lo: float = 0.0) -> float:
    """Infimum bid keeping `winner` winning, to BISECTION_TOL.

    `allocation(bid)` reports whether the winner wins when bidding `bid`
    with all other values fixed.  Monotonicity is asserted by probing; a
    win that disappears at a higher bid raises NonMonotoneAllocation.
    """
    if not 0 <= winner < len(profile):
        raise IndexOutOfRange(f"winner index {winner} out of range")
    hi = profile.values[winner]
    probes = [allocation(b) for b in np.linspace(lo, hi, 9)]
    for earlier, later in zip(probes, probes[1:]):
        if earlier and not later:
            raise NonMonotoneAllocation("allocation rule lost a win at a higher bid")
    if not probes[-1]:
        raise NonMonotoneAllocation("winner does not win at their own value")
    return _bisect_allocation(allocation, lo, hi)


# ---------------------------------------------------------------------------
# Posted prices
# ---------------------------------------------------------------------------


def run_posted_sequence(profile: ValuationProfile, prices, order) -> AuctionOutcome:
    """Offer prices[j] to bidder order[j] in turn; first acceptance ends it."""
    n = len(profile)
    prices = tuple(float(p) for p in prices)
    order = tuple(int(i) for i in order)
    if len(prices) != len(order):
        raise ValueError("prices and order must have equal length")
    if len(order) > n:
        raise ValueError("cannot make more offers than there are bidders")
    for i in order:
        if not 0 <= i < n:
            raise IndexOutOfRange(f"bidder {i} out of range for n={n}")
    for price, i in zip(prices, order):
        if profile.values[i] >= price:
            return AuctionOutcome.sale(n, i, price)
    return AuctionOutcome.no_sale(n)


# ---------------------------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------------------------


def run(mech: MechanismSpec, profile: ValuationProfile) -> AuctionOutcome:
    """Run a mechanism spec on a valuation profile."""
    if isinstance(mech, SecondPrice):
        return run_second_price(profile)
    if isinstance(mech, SecondPriceAnonymousReserve):
        return run_second_price(profile, anonymous_reserve=mech.reserve)
    if isinstance(mech, SecondPriceBidderReserves):
        return run_second_price(profile, bidder_reserves=mech.reserves)
    if isinstance(mech, SecondPriceSubsetReserve):
        return run_subset_reserve(profile, mech.subset)
    if isinstance(mech, MyersonRegular):
        return run_myerson(profile, mech.dists)
    if isinstance(mech, MyersonIroned):
        return run_myerson(profile, mech.curves)
    if isinstance(mech, PostedSequence):
        return run_posted_sequence(profile, mech.prices, mech.order)
    if isinstance(mech, SecondPriceSampleReserve):
        raise ValueError(
            "SecondPriceSampleReserve draws its reserve per sample; "
            "evaluate it through revenue.estimate_mc"
        )
    raise TypeError(f"unknown mechanism spec {mech!r}")
