"""Expected-revenue computation and the benchmark machinery.

Three estimation routes:

* Monte Carlo (`estimate_mc`) over seeded streams.  Sampling is partitioned
  across n_streams independent streams; per-stream totals use compensated
  (exact) summation and streams combine in index order, so a result is
  bit-identical for a fixed (seed, n_samples, n_streams) no matter how the
  work would be scheduled.
* Exact order-statistic formulas (`vickrey_revenue_cdf`,
  `posted_sequence_revenue_exact`, the two-point evaluators).
* Quantile/tail quadrature (`expected_revenue_quadrature`): adaptive Simpson
  with the substitution u = z/(1+z) on the unbounded tail.

`discriminating_benchmark` prices the seller who observes the mixture coins
before choosing the auction: sum over index profiles q of p(q) * OPT(G(q)),
by exact profile enumeration when k**n fits the cap and by unbiased coin
sampling otherwise.  `commensurateness_check` measures the two conditional
inequalities that make a simple auction commensurate with an optimal one,
with common random numbers feeding both mechanisms because the underlying
inequalities are per-draw couplings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import TwoPoint, regularity_check
from .errors import (
    DivergentTail,
    InsufficientDivergenceSamples,
    ProfileSpaceTooLarge,
    ZeroDenominator,
)
from .mechanisms import (
    MyersonIroned,
    MyersonRegular,
    PostedSequence,
    SecondPrice,
    SecondPriceAnonymousReserve,
    SecondPriceBidderReserves,
    SecondPriceSampleReserve,
    SecondPriceSubsetReserve,
)
from .mixtures import IronedCurve, MarketModel, enumerate_profiles
from .streams import substream

__all__ = [
    "RevenueEstimate",
    "RatioEstimate",
    "EstimatorConfig",
    "ComponentExtra",
    "DeterministicExtra",
    "estimate_mc",
    "vickrey_revenue_cdf",
    "expected_revenue_quadrature",
    "posted_sequence_revenue_exact",
    "second_price_two_point_exact",
    "best_posted_ladder_two_point",
    "discriminating_benchmark",
    "approximation_ratio",
    "commensurateness_check",
    "CommensuratenessReport",
    "virtual_surplus_gap",
    "EstimateRecord",
    "estimate_records_csv",
]


@dataclass(frozen=True)
class RevenueEstimate:
    """Expected revenue with its uncertainty and provenance."""

    mean: float
    std_err: float
    n_samples: int
    method: str  # "mc" | "exact" | "quadrature"

    def __post_init__(self):
        if self.std_err < 0.0:
            raise ValueError("std_err must be non-negative")


@dataclass(frozen=True)
class RatioEstimate:
    """opt/simple with first-order (delta method) error propagation."""

    ratio: float
    std_err: float


@dataclass(frozen=True)
class EstimatorConfig:
    seed: int
    n_samples: int = 100_000
    n_streams: int = 8
    profile_cap: int = 10**6
    quadrature_tol: float = 1e-6

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.n_streams < 1:
            raise ValueError("n_streams must be >= 1")


@dataclass(frozen=True)
class ComponentExtra:
    """Extra bidder drawn fresh from component `index` on every sample."""

    index: int


@dataclass(frozen=True)
class DeterministicExtra:
    """Extra bidder with a fixed value."""

    value: float


# ---------------------------------------------------------------------------
# Batch kernels (vectorized counterparts of mechanisms.run; equivalence is
# covered by tests against the scalar implementations)
# ---------------------------------------------------------------------------


def _chunk_sizes(n_samples: int, n_streams: int):
    base, rem = divmod(n_samples, n_streams)
    return [base + (1 if s < rem else 0) for s in range(n_streams)]


def _draw_market(market: MarketModel, rng, size: int):
    """Coins and values for all bidders: two (size, n) arrays."""
    coins = np.empty((size, market.n), dtype=np.int64)
    values = np.empty((size, market.n), dtype=float)
    for i in range(market.n):
        c, v = market.bidder_mixture(i).sample_with_coin(rng, size)
        coins[:, i] = c
        values[:, i] = v
    return coins, values


def _draw_extras(market: MarketModel, extras, rng, size: int):
    """Value columns for extra bidders, drawn after the originals."""
    if not extras:
        return np.empty((size, 0))
    cols = []
    for spec in extras:
        if isinstance(spec, ComponentExtra):
            u = rng.random(size)
            cols.append(market.components[spec.index]._inverse_transform(u))
        elif isinstance(spec, DeterministicExtra):
            cols.append(np.full(size, float(spec.value)))
        else:
            raise TypeError(f"unknown extra spec {spec!r}")
    return np.column_stack(cols)


def _sp_batch(values, anonymous_reserve=None, bidder_reserves=None):
    """Second-price winners and prices; winner == -1 means no sale."""
    size, m = values.shape
    if bidder_reserves is not None:
        reserves = np.broadcast_to(np.asarray(bidder_reserves, dtype=float), (size, m))
    elif anonymous_reserve is not None:
        r = np.asarray(anonymous_reserve, dtype=float)
        reserves = np.broadcast_to(r[:, None] if r.ndim == 1 else r, (size, m))
    else:
        reserves = np.zeros((size, m))
    qual = values >= reserves
    masked = np.where(qual, values, -np.inf)
    winner = np.argmax(masked, axis=1)
    sale = qual.any(axis=1)
    rows = np.arange(size)
    if m >= 2:
        second = np.partition(masked, m - 2, axis=1)[:, m - 2]
    else:
        second = np.full(size, -np.inf)
    price = np.maximum(second, reserves[rows, winner])
    price = np.where(sale, price, 0.0)
    return np.where(sale, winner, -1), price


def _virtual_matrix(values, rules):
    """phi per column under a Distribution or IronedCurve per column."""
    phi = np.empty_like(values)
    for j, rule in enumerate(rules):
        if isinstance(rule, IronedCurve):
            phi[:, j] = rule.ironed_virtual(values[:, j])
        else:
            phi[:, j] = rule._virtual_unchecked(values[:, j])
    return phi


def _ironed_inverse(curve: IronedCurve, y, strict):
    """Lowest value whose ironed phi meets y (> y where strict)."""
    s_rev = curve.ironed_phi[::-1]  # ascending slopes
    p_incl = np.searchsorted(s_rev, y, side="left")
    p_strict = np.searchsorted(s_rev, y, side="right")
    p = np.where(strict, p_strict, p_incl)
    idx = np.clip(len(curve.values) - 1 - p, 0, len(curve.values) - 1)
    return curve.values[idx]


def _myerson_batch(values, rules):
    """Myerson winners and critical prices for fixed per-column rules."""
    size, m = values.shape
    phi = _virtual_matrix(values, rules)
    winner = np.argmax(phi, axis=1)
    rows = np.arange(size)
    phi_w = phi[rows, winner]
    sale = phi_w >= 0.0
    if m >= 2:
        max_others = np.partition(phi, m - 2, axis=1)[:, m - 2]
        phi_masked = phi.copy()
        phi_masked[rows, winner] = -np.inf
        rival = np.argmax(phi_masked, axis=1)
        # a tie at the threshold goes to the rival only when the rival has
        # the lower index and actually sits at the threshold (not when the
        # phi >= 0 gate is what binds)
        strict = (rival < winner) & (max_others >= 0.0)
    else:
        max_others = np.full(size, -np.inf)
        strict = np.zeros(size, dtype=bool)
    thr = np.maximum(max_others, 0.0)
    price = np.zeros(size)
    for j, rule in enumerate(rules):
        mask = sale & (winner == j)
        if not np.any(mask):
            continue
        if isinstance(rule, IronedCurve):
            crit = _ironed_inverse(rule, thr[mask], strict[mask])
        else:
            # exact float ties are measure-zero for continuous families
            crit = rule.virtual_inverse(thr[mask])
        price[mask] = np.minimum(np.asarray(crit, dtype=float), values[mask, j])
    return np.where(sale, winner, -1), price


def _myerson_coins_batch(values, coins, components):
    """Myerson prices when each cell's distribution comes from its coin."""
    size, m = values.shape
    phi = np.empty_like(values)
    for t, comp in enumerate(components):
        mask = coins == t
        if np.any(mask):
            phi[mask] = comp._virtual_unchecked(values[mask])
    winner = np.argmax(phi, axis=1)
    rows = np.arange(size)
    phi_w = phi[rows, winner]
    sale = phi_w >= 0.0
    if m >= 2:
        max_others = np.partition(phi, m - 2, axis=1)[:, m - 2]
    else:
        max_others = np.full(size, -np.inf)
    thr = np.maximum(max_others, 0.0)
    price = np.zeros(size)
    wcomp = coins[rows, winner]
    for t, comp in enumerate(components):
        mask = sale & (wcomp == t)
        if not np.any(mask):
            continue
        crit = comp.virtual_inverse(thr[mask])
        price[mask] = np.minimum(np.asarray(crit, dtype=float), values[rows, winner][mask])
    return np.where(sale, winner, -1), price


def _posted_batch(values, prices, order):
    size = values.shape[0]
    prices = np.asarray(prices, dtype=float)
    order = np.asarray(order, dtype=np.int64)
    accept = values[:, order] >= prices[None, :]
    any_accept = accept.any(axis=1)
    first = np.argmax(accept, axis=1)
    winner = np.where(any_accept, order[first], -1)
    price = np.where(any_accept, prices[first], 0.0)
    return winner, price


def _mech_batch(mech, values, rng, market=None):
    """Dispatch a mechanism spec over a (size, m) value matrix."""
    if isinstance(mech, SecondPrice):
        return _sp_batch(values)
    if isinstance(mech, SecondPriceAnonymousReserve):
        return _sp_batch(values, anonymous_reserve=np.full(values.shape[0], mech.reserve))
    if isinstance(mech, SecondPriceBidderReserves):
        return _sp_batch(values, bidder_reserves=mech.reserves)
    if isinstance(mech, SecondPriceSubsetReserve):
        subset = list(mech.subset)
        rest = [j for j in range(values.shape[1]) if j not in set(subset)]
        if not rest:
            size = values.shape[0]
            return np.full(size, -1, dtype=np.int64), np.zeros(size)
        reserve = values[:, subset].max(axis=1) if subset else np.zeros(values.shape[0])
        w_rest, price = _sp_batch(values[:, rest], anonymous_reserve=reserve)
        winner = np.where(w_rest >= 0, np.asarray(rest, dtype=np.int64)[np.maximum(w_rest, 0)], -1)
        return winner, price
    if isinstance(mech, SecondPriceSampleReserve):
        if market is None:
            raise ValueError("SecondPriceSampleReserve needs the market for its draws")
        draws = np.column_stack(
            [
                market.components[t]._inverse_transform(rng.random(values.shape[0]))
                for t in mech.component_indices
            ]
        )
        return _sp_batch(values, anonymous_reserve=draws.max(axis=1))
    if isinstance(mech, MyersonRegular):
        return _myerson_batch(values, mech.dists)
    if isinstance(mech, MyersonIroned):
        return _myerson_batch(values, mech.curves)
    if isinstance(mech, PostedSequence):
        return _posted_batch(values, mech.prices, mech.order)
    raise TypeError(f"unknown mechanism spec {mech!r}")


def _combine_streams(stream_stats):
    """Merge (sum, sum_sq, count) triples in index order into an estimate."""
    s1 = math.fsum(t[0] for t in stream_stats)
    s2 = math.fsum(t[1] for t in stream_stats)
    n = sum(t[2] for t in stream_stats)
    mean = s1 / n
    var = max(s2 - n * mean * mean, 0.0) / (n - 1) if n > 1 else 0.0
    return RevenueEstimate(mean=mean, std_err=math.sqrt(var / n), n_samples=n, method="mc")


# ---------------------------------------------------------------------------
# Monte Carlo estimation
# ---------------------------------------------------------------------------


def estimate_mc(
    market: MarketModel,
    mech,
    extras=(),
    cfg: EstimatorConfig = None,
) -> RevenueEstimate:
    """Mean revenue over n_samples joint draws of bidders and extras.

    Mechanism errors abort the whole estimate, annotated with the sample
    range (stream and offsets) that was being evaluated.
    """
    if cfg is None:
        raise ValueError("an EstimatorConfig with an explicit seed is required")
    stats = []
    offset = 0
    for s, chunk in enumerate(_chunk_sizes(cfg.n_samples, cfg.n_streams)):
        if chunk == 0:
            continue
        rng = substream(cfg.seed, s)
        _, values = _draw_market(market, rng, chunk)
        extra_vals = _draw_extras(market, extras, rng, chunk)
        full = np.hstack([values, extra_vals]) if extra_vals.size else values
        try:
            _, price = _mech_batch(mech, full, rng, market=market)
        except Exception as exc:
            exc.sample_range = (offset, offset + chunk)
            exc.stream_index = s
            if hasattr(exc, "add_note"):  # 3.11+
                exc.add_note(
                    f"while evaluating samples [{offset}, {offset + chunk}) "
                    f"on stream {s}"
                )
            raise
        stats.append((math.fsum(price), math.fsum(price * price), chunk))
        offset += chunk
    return _combine_streams(stats)


def virtual_surplus_gap(
    market: MarketModel,
    mech,
    extras=(),
    cfg: EstimatorConfig = None,
) -> RevenueEstimate:
    """Paired MC estimate of E[revenue - phi_winner(v_winner)].

    Both sides use the same draws, so the standard error is that of the
    per-draw difference; a truthful mechanism should give a mean within
    noise of zero.  Every column needs a continuous distribution (extras
    must be component draws, not deterministic values).
    """
    col_dists = [market.bidder_mixture(i) for i in range(market.n)]
    for spec in extras:
        if not isinstance(spec, ComponentExtra):
            raise ValueError("virtual surplus needs a distribution per column")
        col_dists.append(market.components[spec.index])
    stats = []
    for s, chunk in enumerate(_chunk_sizes(cfg.n_samples, cfg.n_streams)):
        if chunk == 0:
            continue
        rng = substream(cfg.seed, s)
        _, values = _draw_market(market, rng, chunk)
        extra_vals = _draw_extras(market, extras, rng, chunk)
        full = np.hstack([values, extra_vals]) if extra_vals.size else values
        winner, price = _mech_batch(mech, full, rng, market=market)
        phi = _virtual_matrix(full, col_dists)
        rows = np.arange(chunk)
        virt = np.where(winner >= 0, phi[rows, np.maximum(winner, 0)], 0.0)
        diff = price - virt
        stats.append((math.fsum(diff), math.fsum(diff * diff), chunk))
    return _combine_streams(stats)


# ---------------------------------------------------------------------------
# Exact order-statistic formulas
# ---------------------------------------------------------------------------


def vickrey_revenue_cdf(dists, z):
    """P(second-highest of independent draws <= z).

    Equals prod_i F_i(z) + sum_i (1 - F_i(z)) * prod_{j != i} F_j(z):
    either everyone is below z or exactly one bidder exceeds it.
    """
    if len(dists) < 2:
        raise ValueError("second-highest needs at least two bidders")
    zv = np.atleast_1d(np.asarray(z, dtype=float))
    F = np.stack([np.atleast_1d(np.asarray(d.cdf(zv), dtype=float)) for d in dists])
    all_below = np.prod(F, axis=0)
    total = all_below.copy()
    for i in range(len(dists)):
        others = np.prod(np.delete(F, i, axis=0), axis=0)
        total = total + (1.0 - F[i]) * others
    return float(total[0]) if np.isscalar(z) or np.ndim(z) == 0 else total


def _second_order_survival(dists, z: float) -> float:
    """P(second-highest > z) as a positive subset sum (no cancellation).

    Sums P(exactly the bidders in T exceed z) over |T| >= 2; exact for the
    handfuls of bidders these instances use, and it keeps the heavy tails
    accurate where 1 - cdf-product formulas round to zero.
    """
    m = len(dists)
    S = [float(d.survival(z)) for d in dists]
    F = [float(d.cdf(z)) for d in dists]
    total = 0.0
    for mask in range(1, 1 << m):
        if mask.bit_count() < 2:
            continue
        term = 1.0
        for i in range(m):
            term *= S[i] if (mask >> i) & 1 else F[i]
        total += term
    return total


def posted_sequence_revenue_exact(dists, prices, order) -> RevenueEstimate:
    """Exact expected revenue of a sequential posted-price mechanism.

    Bidders are independent and each appears at most once in `order`;
    acceptance at equality follows the atom convention P(v >= p) = 1 - F(p-).
    """
    order = tuple(int(i) for i in order)
    if len(set(order)) != len(order):
        raise ValueError("posted order must not repeat a bidder")
    if len(prices) != len(order):
        raise ValueError("prices and order must have equal length")
    survive = 1.0
    total = 0.0
    for price, i in zip(prices, order):
        accept = float(dists[i].survival_at_or_above(price))
        total += price * survive * accept
        survive *= 1.0 - accept
    return RevenueEstimate(mean=total, std_err=0.0, n_samples=0, method="exact")


def second_price_two_point_exact(
    n_bidders: int, dist: TwoPoint, extra_values=()
) -> RevenueEstimate:
    """Exact Vickrey revenue for i.i.d. two-point bidders plus fixed extras.

    Sums the binomial law of the high-value count; the second-order statistic
    of the pooled profile is a deterministic function of that count.
    """
    extras = sorted(float(v) for v in extra_values)
    total_bidders = n_bidders + len(extras)
    if total_bidders < 2:
        raise ValueError("need at least two bidders overall")
    p = dist.p_hi
    mean = 0.0
    for h in range(n_bidders + 1):
        pmf = math.comb(n_bidders, h) * p**h * (1.0 - p) ** (n_bidders - h)
        pool = [dist.v_hi] * h + [dist.v_lo] * (n_bidders - h) + extras
        pool.sort()
        mean += pmf * pool[-2]
    return RevenueEstimate(mean=mean, std_err=0.0, n_samples=0, method="exact")


def best_posted_ladder_two_point(n_bidders: int, dist: TwoPoint):
    """Optimal sequential posted-price revenue for i.i.d. two-point bidders.

    Searches ladders that offer the high price to the first j bidders and
    optionally the low price to one more; with two support points this
    family attains the optimal (virtual-surplus) revenue.

    Returns (RevenueEstimate, ladder) where ladder is (prices, order).
    """
    q = 1.0 - dist.p_hi
    best = None
    for j in range(n_bidders + 1):
        high_part = dist.v_hi * (1.0 - q**j)
        candidates = [(high_part, j, False)]
        if j < n_bidders:
            candidates.append((high_part + q**j * dist.v_lo, j, True))
        for value, j_high, low_offer in candidates:
            if best is None or value > best[0]:
                best = (value, j_high, low_offer)
    value, j_high, low_offer = best
    prices = [dist.v_hi] * j_high + ([dist.v_lo] if low_offer else [])
    order = list(range(j_high + (1 if low_offer else 0)))
    est = RevenueEstimate(mean=value, std_err=0.0, n_samples=0, method="exact")
    return est, (tuple(prices), tuple(order))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def _adaptive_simpson(f, a, b, tol, depth=50):
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_recurse(f, a, b, fa, fm, fb, whole, tol, depth)


def _simpson_recurse(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = left + right - whole
    if depth <= 0 or abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    half = 0.5 * tol
    return _simpson_recurse(
        f, a, m, fa, flm, fm, left, half, depth - 1
    ) + _simpson_recurse(f, m, b, fm, frm, fb, right, half, depth - 1)


def _atom_breakpoints(dists):
    pts = set()
    for d in dists:
        sup = d.support
        pts.add(sup.lo)
        if math.isfinite(sup.hi):
            pts.add(sup.hi)
        if isinstance(d, TwoPoint):
            pts.update((d.v_lo, d.v_hi))
    return pts


def expected_revenue_quadrature(dists, reserve: float | None = None, tol: float = 1e-6) -> RevenueEstimate:
    """E[second-price revenue] = integral of the revenue survival function.

    Splits at atoms and support endpoints so each Simpson segment is smooth,
    then substitutes z = u/(1-u) on the unbounded tail.  Raises DivergentTail
    when the transformed tail integrand keeps growing toward u = 1.
    """
    lo = float(reserve) if reserve is not None else 0.0
    if len(dists) > 16:
        raise ValueError("quadrature's exact subset sum handles at most 16 bidders")

    def survival(z):
        return _second_order_survival(dists, z)

    head = 0.0
    if reserve is not None:
        sold = 1.0 - math.prod(float(d.cdf_left(reserve)) for d in dists)
        head = reserve * sold

    pts = sorted(p for p in _atom_breakpoints(dists) if p > lo + 1e-300)
    cut = max([lo] + pts) + 1.0  # tail starts past every breakpoint
    segments = []
    prev = lo
    for p in pts + [cut]:
        if p > prev:
            segments.append((prev, p))
            prev = p

    seg_tol = tol / (2.0 * max(len(segments), 1))
    nudge = 1e-13
    bounded = 0.0
    for a, b in segments:
        eps_a = nudge * (1.0 + abs(a))
        eps_b = nudge * (1.0 + abs(b))
        bounded += _adaptive_simpson(survival, a + eps_a, b - eps_b, seg_tol)

    # tail: z = u/(1-u), dz = du/(1-u)^2
    def g(u):
        z = u / (1.0 - u)
        return survival(z) / ((1.0 - u) ** 2)

    probes = [g(1.0 - 10.0**-e) for e in (6, 8, 10)]
    if probes[0] < probes[1] < probes[2] and probes[2] > max(probes[0] * 25.0, 1.0 / tol):
        raise DivergentTail("revenue survival tail is not integrable at this tolerance")
    u_start = cut / (1.0 + cut)
    tail = _adaptive_simpson(g, u_start, 1.0 - 1e-12, tol / 2.0)

    return RevenueEstimate(
        mean=head + bounded + tail, std_err=0.0, n_samples=0, method="quadrature"
    )


# ---------------------------------------------------------------------------
# Discriminating benchmark and ratios
# ---------------------------------------------------------------------------

_MIN_PROFILE_SAMPLES = 64


def discriminating_benchmark(
    market: MarketModel, cfg: EstimatorConfig, policies=None
) -> RevenueEstimate:
    """sum_q p(q) * OPT(G(q)): optimal revenue given the coins are observed.

    With `policies` (a mapping or callable from a profile tuple to a
    PostedSequence), each profile is valued exactly by the supplied policy;
    this is how equal-revenue or atomic components are benchmarked.  Without
    policies every component must be regular and each profile's optimum is
    a per-profile Myerson Monte Carlo estimate.
    """
    total = market.k**market.n
    if policies is None:
        # each profile's optimum is Myerson per component; make sure that is
        # meaningful before spending samples (equal-revenue-type components
        # need explicit policies instead)
        for t, comp in enumerate(market.components):
            if not comp.is_continuous:
                raise ValueError(
                    f"component {t} ({comp}) is atomic; supply per-profile policies"
                )
            if not regularity_check(comp):
                raise ValueError(
                    f"component {t} ({comp}) is irregular; supply per-profile policies"
                )
    if total <= cfg.profile_cap:
        profiles = enumerate_profiles(market, cfg.profile_cap)
        if policies is not None:
            lookup = policies if callable(policies) else policies.get
            mean = 0.0
            for prof in profiles:
                if prof.weight == 0.0:
                    continue
                policy = lookup(prof.q)
                if policy is None:
                    raise ValueError(f"no policy supplied for profile {prof.q}")
                dists = [market.components[t] for t in prof.q]
                val = posted_sequence_revenue_exact(dists, policy.prices, policy.order)
                mean += prof.weight * val.mean
            return RevenueEstimate(mean=mean, std_err=0.0, n_samples=0, method="exact")

        mean = 0.0
        var = 0.0
        n_total = 0
        for idx, prof in enumerate(profiles):
            if prof.weight == 0.0:
                continue
            dists = [market.components[t] for t in prof.q]
            n_q = max(int(round(cfg.n_samples * prof.weight)), _MIN_PROFILE_SAMPLES)
            stats = []
            for s, chunk in enumerate(_chunk_sizes(n_q, cfg.n_streams)):
                if chunk == 0:
                    continue
                rng = substream(cfg.seed, idx, s)
                values = np.column_stack(
                    [d._inverse_transform(rng.random(chunk)) for d in dists]
                )
                _, price = _myerson_batch(values, dists)
                stats.append((math.fsum(price), math.fsum(price * price), chunk))
            est = _combine_streams(stats)
            mean += prof.weight * est.mean
            var += (prof.weight * est.std_err) ** 2
            n_total += est.n_samples
        return RevenueEstimate(
            mean=mean, std_err=math.sqrt(var), n_samples=n_total, method="mc"
        )

    if policies is not None:
        raise ProfileSpaceTooLarge(
            f"k**n = {total} exceeds the cap and policies cannot be sampled"
        )
    # unbiased coin sampling: draw (q, v) jointly, run the realized-profile
    # optimal auction per draw
    stats = []
    for s, chunk in enumerate(_chunk_sizes(cfg.n_samples, cfg.n_streams)):
        if chunk == 0:
            continue
        rng = substream(cfg.seed, s)
        coins, values = _draw_market(market, rng, chunk)
        _, price = _myerson_coins_batch(values, coins, market.components)
        stats.append((math.fsum(price), math.fsum(price * price), chunk))
    return _combine_streams(stats)


def approximation_ratio(opt: RevenueEstimate, simple: RevenueEstimate) -> RatioEstimate:
    """opt.mean / simple.mean with delta-method uncertainty."""
    if not simple.mean > 0.0:
        raise ZeroDenominator("denominator estimate must be strictly positive")
    ratio = opt.mean / simple.mean
    se = math.sqrt(
        (opt.std_err / simple.mean) ** 2
        + (opt.mean * simple.std_err / simple.mean**2) ** 2
    )
    return RatioEstimate(ratio=ratio, std_err=se)


# ---------------------------------------------------------------------------
# Commensurateness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CommensuratenessReport:
    """MC evidence for the two commensurateness inequalities.

    eq5: E[phi_{W'}(v_{W'}) | W' != W] >= 0, estimated with its standard
         error over the divergence samples.
    eq6: on every divergence sample the price paid by W' must be at least
         phi_W(v_W); the report carries the pointwise pass rate (the
         inequality holds sample by sample, not just in expectation).
    """

    n_samples: int
    divergence_count: int
    eq5_mean: float | None
    eq5_std_err: float | None
    eq6_pass_count: int
    no_divergence: bool

    @property
    def eq5_within_noise(self) -> bool:
        if self.no_divergence:
            return True
        return self.eq5_mean >= -4.0 * self.eq5_std_err

    @property
    def eq6_pass_rate(self) -> float:
        if self.divergence_count == 0:
            return 1.0
        return self.eq6_pass_count / self.divergence_count

    @property
    def eq6_pointwise(self) -> bool:
        return self.eq6_pass_count == self.divergence_count


_EQ6_TOL = 1e-9
_MIN_DIVERGENCE = 100


def commensurateness_check(
    market: MarketModel,
    mech_m,
    mech_m_prime,
    extras_for_m_prime=(),
    cfg: EstimatorConfig = None,
) -> CommensuratenessReport:
    """Measure whether M' is commensurate with M on this market.

    M runs on the original bidders; M' runs on the originals plus the extra
    bidders.  Common random numbers: the same original draws feed both
    mechanisms, because the inequalities being tested are per-draw
    couplings.  Conditioning is by rejection: only samples whose winners
    diverge contribute, and fewer than 100 such samples (but more than
    zero) raises InsufficientDivergenceSamples.
    """
    col_dists = [market.bidder_mixture(i) for i in range(market.n)]
    for spec in extras_for_m_prime:
        if not isinstance(spec, ComponentExtra):
            raise ValueError("commensurateness needs distribution-backed extras")
        col_dists.append(market.components[spec.index])
    for d in col_dists:
        if not d.is_continuous:
            raise ValueError("commensurateness needs continuous distributions")

    n = market.n
    div_count = 0
    eq5_sum = 0.0
    eq5_sq = 0.0
    eq6_pass = 0
    n_total = 0
    for s, chunk in enumerate(_chunk_sizes(cfg.n_samples, cfg.n_streams)):
        if chunk == 0:
            continue
        rng = substream(cfg.seed, s)
        _, values = _draw_market(market, rng, chunk)
        extra_vals = _draw_extras(market, extras_for_m_prime, rng, chunk)
        full = np.hstack([values, extra_vals]) if extra_vals.size else values

        w_m, _ = _mech_batch(mech_m, values, rng, market=market)
        w_p, price_p = _mech_batch(mech_m_prime, full, rng, market=market)

        phi = _virtual_matrix(full, col_dists)
        rows = np.arange(chunk)
        phi_wp = np.where(w_p >= 0, phi[rows, np.maximum(w_p, 0)], 0.0)
        phi_wm = np.where(w_m >= 0, phi[rows, np.maximum(w_m, 0)], 0.0)

        diverged = w_p != w_m
        div_count += int(np.count_nonzero(diverged))
        if np.any(diverged):
            sel = phi_wp[diverged]
            eq5_sum += math.fsum(sel)
            eq5_sq += math.fsum(sel * sel)
            eq6_pass += int(
                np.count_nonzero(price_p[diverged] >= phi_wm[diverged] - _EQ6_TOL)
            )
        n_total += chunk

    if div_count == 0:
        return CommensuratenessReport(
            n_samples=n_total,
            divergence_count=0,
            eq5_mean=None,
            eq5_std_err=None,
            eq6_pass_count=0,
            no_divergence=True,
        )
    if div_count < _MIN_DIVERGENCE:
        raise InsufficientDivergenceSamples(
            f"only {div_count} divergence samples; need {_MIN_DIVERGENCE}"
        )
    mean = eq5_sum / div_count
    var = max(eq5_sq - div_count * mean * mean, 0.0) / max(div_count - 1, 1)
    return CommensuratenessReport(
        n_samples=n_total,
        divergence_count=div_count,
        eq5_mean=mean,
        eq5_std_err=math.sqrt(var / div_count),
        eq6_pass_count=eq6_pass,
        no_divergence=False,
    )


# ---------------------------------------------------------------------------
# Estimate records (CSV surface)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimateRecord:
    scenario_id: str
    mechanism: str
    estimate: RevenueEstimate
    seed: int


def estimate_records_csv(records) -> str:
    """CSV rows: scenario_id, mechanism, mean, std_err, n_samples, method, seed."""
    lines = ["scenario_id,mechanism,mean,std_err,n_samples,method,seed"]
    for r in records:
        e = r.estimate
        lines.append(
            f"{r.scenario_id},{r.mechanism},{e.mean!r},{e.std_err!r},"
            f"{e.n_samples},{e.method},{r.seed}"
        )
    return "\n".join(lines) + "\n"
