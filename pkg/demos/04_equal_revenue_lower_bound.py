"""The two-bidder mixture instance where extra bidders cannot reach optimal.

Two i.i.d. bidders, each worth 1 with probability 1/2 and otherwise drawn
from the equal-revenue law F(x) = 1 - 1/(x+1).  Conditioning on the coins:

* both deterministic      -> any auction earns 1
* both equal-revenue      -> a huge posted price H earns ~2 (sup, never max)
* one of each             -> offer H to the heavy bidder, fall back to 1

so a seller who could observe the coins earns ~1.75 in the limit.  The
Vickrey auction with two extra bidders (one deterministic, one
equal-revenue) earns ~1.55: above half the benchmark, as the theory
guarantees, but strictly below it.
"""

from auction_lab import emit_report, run_experiment


def main():
    report = run_experiment("appendix-lb", seed=1, horizon=1e6)
    print(emit_report(report, "text-table").decode())

    by = {r.mechanism: r.mean for r in report.rows}
    print("conditional decomposition of the augmented Vickrey revenue:")
    print("  1/4 * 1 (both deterministic)")
    print(f"  1/4 * {by['both_equal_revenue_conditional']:.4f} (both equal-revenue)")
    print("  1/2 * 1.5 (one of each)")
    print(f"  = {by['vickrey_plus_2_extras']:.4f}")
    print(f"\nbenchmark / augmented = {by['benchmark_over_vickrey']:.4f} <= 2")

    hr09 = run_experiment("hr09-lb", seed=1, horizon=1e6)
    duplicated = {r.mechanism: r.mean for r in hr09.rows}["optimal_over_duplicated"]
    print(f"duplicating two non-identical regular bidders: ratio {duplicated:.4f} "
          "(the 4/3 barrier)")


if __name__ == "__main__":
    main()
