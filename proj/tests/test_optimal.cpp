#include "btl/optimal.hpp"

#include <cmath>
#include <limits>

#include <doctest.h>

#include "btl/errors.hpp"
#include "btl/instances.hpp"
#include "oracles.hpp"

using btl::Dist;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("two-sided threshold: uniform pair solves 2v-1 = 2c") {
  const Dist u = Dist::uniform(0, 1);
  CHECK(btl::two_sided_threshold(u, u, 0.1) ==
        doctest::Approx(0.6).epsilon(1e-9));
  CHECK(btl::two_sided_threshold(u, u, 0.4) ==
        doctest::Approx(0.9).epsilon(1e-9));
  // phi_G(c) above max phi_F: no trade.
  CHECK(btl::two_sided_threshold(u, u, 0.75) == kInf);
}

TEST_CASE("two-sided threshold: equal-revenue family lands on the tail") {
  const Dist f = Dist::equal_revenue_with_tail(1.0, 100.0);
  const Dist g = Dist::uniform(0, 1);
  for (double c : {0.1, 0.5, 0.9})
    CHECK(btl::two_sided_threshold(f, g, c) ==
          doctest::Approx(100.0 + c).epsilon(1e-7));
}

TEST_CASE("two-sided rule rejects atoms and irregular inputs") {
  CHECK_THROWS_AS(
      btl::two_sided_threshold(Dist::point_mass(1), Dist::uniform(0, 1), 0.5),
      btl::AtomicInput);
}

TEST_CASE("threshold is nondecreasing in c") {
  const btl::TwoSidedRule rule(Dist::equal_revenue_with_tail(1.0, 10.0),
                               Dist::uniform(0, 1));
  double prev = -kInf;
  for (int i = 0; i <= 50; ++i) {
    const double t = rule.buyer_threshold(i / 50.0);
    if (t == kInf) break;
    CHECK(t >= prev - 1e-10);
    prev = t;
  }
}

TEST_CASE("optimal mechanism: uniform pair hits the tight 1/2 ratio") {
  const Dist u = Dist::uniform(0, 1);
  const auto m = btl::optimal_mechanism_metrics(u, u);
  CHECK(m.fb == doctest::Approx(1.0 / 6).epsilon(1e-10));
  CHECK(m.gft == doctest::Approx(1.0 / 12).epsilon(1e-10));
  CHECK(m.ratio == doctest::Approx(0.5).epsilon(1e-8));
  // Threshold payments give 1/24, beating the optimal posted 1/27.
  CHECK(m.profit == doctest::Approx(1.0 / 24).epsilon(1e-8));
  CHECK(m.sw == doctest::Approx(0.5 + 1.0 / 12).epsilon(1e-9));
  CHECK(m.fbw == doctest::Approx(0.5 + 1.0 / 6).epsilon(1e-9));
}

TEST_CASE("optimal mechanism profit equals the virtual surplus route") {
  // Threshold payments integrate to E[(phi_F(v) - phi_G(c)) 1{trade}]; the
  // two routes must agree, which pins the payment bookkeeping.
  for (const auto& [F, G] :
       {std::pair{Dist::uniform(0, 1), Dist::uniform(0, 1)},
        std::pair{Dist::uniform(0, 1), Dist::uniform(0.2, 0.7)},
        std::pair{Dist::equal_revenue_with_tail(1, 10), Dist::uniform(0, 1)},
        std::pair{Dist::truncated_exponential(1.0, 4.0),
                  Dist::truncated_exponential(1.0, 4.0)}}) {
    const btl::TwoSidedRule rule(F, G);
    const auto m = btl::optimal_mechanism_metrics(F, G);
    btl::QuadConfig cfg;
    const auto c_bps = rule.threshold_breakpoints_c();
    std::vector<double> bps = G.breakpoints();
    bps.insert(bps.end(), c_bps.begin(), c_bps.end());
    // ∫_t^hi phi_F dF collapses to t (1-F(t)) by parts, so the virtual
    // surplus is a single outer integral over c.
    const double virt2 = btl::integrate(
        [&](double c) {
          const double t = rule.buyer_threshold(c);
          if (t == kInf) return 0.0;
          const double phi_g = c + G.cdf(c) / G.pdf(c);
          return (t - phi_g) * F.survival(t) * G.pdf(c);
        },
        G.support_lo(), G.support_hi(), bps, cfg);
    CHECK(m.profit == doctest::Approx(virt2).epsilon(1e-6));
  }
}

TEST_CASE("optimal mechanism: case 4(d) instance gives ratio 4/7") {
  const auto m = btl::optimal_mechanism_metrics(
      Dist::uniform(0, 1), Dist::uniform(1.0 / 3, 2.0 / 3));
  CHECK(m.fb == doctest::Approx(7.0 / 54).epsilon(1e-9));
  CHECK(m.gft == doctest::Approx(2.0 / 27).epsilon(1e-9));
  CHECK(m.ratio == doctest::Approx(4.0 / 7).epsilon(1e-7));
}

TEST_CASE("optimal mechanism: theorem 6 instance stays under the proof cap") {
  const auto m = btl::optimal_mechanism_metrics(
      Dist::equal_revenue_with_tail(1.0, 100.0), Dist::uniform(0, 1), {},
      false);
  CHECK(m.gft <= 1.495 + 1e-9);
  CHECK(m.gft == doctest::Approx(1.49001666666667).epsilon(1e-9));
  CHECK(m.fb == doctest::Approx(std::log(100.0) + 1.0).epsilon(1e-9));
}

TEST_CASE("public seller: theorem 7 instance frozen values") {
  const Dist f = Dist::equal_revenue_with_tail(1.0, 10.0);
  const auto m = btl::public_seller_metrics(f, 1.0);
  CHECK(m.gft == doctest::Approx(1083.0 / 800).epsilon(1e-12));
  CHECK(m.fb == doctest::Approx(std::log(10.0) + 0.5).epsilon(1e-10));
  CHECK(m.ratio == doctest::Approx(0.483).epsilon(2e-3));
  // Buyer pays the threshold (a+2b)/2 = 10.5 whenever trade happens.
  CHECK(m.profit ==
        doctest::Approx((10.5 - 1.0) * f.survival(10.5)).epsilon(1e-10));
  // Cost above the buyer's support shuts everything down.
  const auto none = btl::public_seller_metrics(f, 25.0);
  CHECK(none.gft == 0.0);
  CHECK(none.fb == 0.0);
}

TEST_CASE("public buyer: theorem 7 instance frozen values") {
  const Dist g = Dist::public_buyer_linear_rational(0.1);
  const auto m = btl::public_buyer_metrics(g, 2.0);
  CHECK(m.gft == doctest::Approx(0.15).epsilon(1e-10));
  const double h = (2.0 - 0.3) / 0.8;
  const double a = 0.1 * (1.0 - h) * (1.0 - h);
  const double fb_formula =
      0.15 + a * (1.0 / (1.0 - h) - std::log((2.0 - h) / (1.0 - h)));
  CHECK(m.fb == doctest::Approx(fb_formula).epsilon(1e-10));
  // Value below the support: nothing trades.
  const auto none = btl::public_buyer_metrics(g, 0.0);
  CHECK(none.gft == 0.0);
}

TEST_CASE("public-agent DSIC spot check: deviations never help") {
  const Dist f = Dist::equal_revenue_with_tail(1.0, 10.0);
  const double c = 1.0;
  // Winning reports pay the fixed threshold; losing reports pay nothing.
  const double vhat = 10.5;
  oracle::InstanceGen gen{41};
  for (int i = 0; i < 100; ++i) {
    const double v = gen.in(f.support_lo(), f.support_hi());
    const double dev = gen.in(f.support_lo(), f.support_hi());
    const double truthful = v >= vhat ? v - vhat : 0.0;
    const double deviated = dev >= vhat ? v - vhat : 0.0;
    CHECK(truthful >= deviated - 1e-12);
  }
  (void)c;
}

TEST_CASE("two-sided payments stay nonnegative per trade on uniform pairs") {
  const btl::TwoSidedRule rule(Dist::uniform(0, 1), Dist::uniform(0.1, 0.9));
  oracle::InstanceGen gen{42};
  for (int i = 0; i < 200; ++i) {
    const double c = gen.in(0.1, 0.9);
    const double t = rule.buyer_threshold(c);
    if (t == kInf) continue;
    const double v = gen.in(t, 1.0);
    const double pb = rule.buyer_threshold(c);
    const double ps = rule.seller_threshold(v);
    CHECK(pb >= ps - 1e-9);
    CHECK(pb <= v + 1e-9);
    CHECK(ps >= c - 1e-9);
  }
}

TEST_CASE("normalization: ratio invariant under joint affine maps") {
  const auto r =
      btl::normalization_check(Dist::uniform(0, 1), Dist::uniform(0, 1), 5, 3);
  CHECK(r.ratio_before == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.ratio_after == doctest::Approx(r.ratio_before).epsilon(1e-7));

  const auto id =
      btl::normalization_check(Dist::uniform(0, 1), Dist::uniform(0, 1), 0, 1);
  CHECK(id.ratio_before == doctest::Approx(id.ratio_after).epsilon(1e-12));

  // Case 4(d) instance under k1 = -1/3, k2 = 3: ratio must stay 4/7.
  const auto c4 = btl::normalization_check(
      Dist::uniform(0, 1), Dist::uniform(1.0 / 3, 2.0 / 3), -1.0 / 3, 3.0);
  CHECK(c4.ratio_before == doctest::Approx(4.0 / 7).epsilon(1e-7));
  CHECK(c4.ratio_after == doctest::Approx(4.0 / 7).epsilon(1e-7));
}

TEST_CASE("acceptance region is invariant pointwise under affine maps") {
  const Dist F = Dist::truncated_exponential(1.5, 3.0);
  const Dist G = Dist::truncated_exponential(1.5, 3.0);
  const btl::TwoSidedRule rule(F, G);
  const double k1 = 2.0, k2 = 1.7;
  const btl::TwoSidedRule mapped(F.affine(k1, k2), G.affine(k1, k2));
  for (int i = 1; i < 12; ++i) {
    const double c = 3.0 * i / 12.0;
    const double t = rule.buyer_threshold(c);
    const double tm = mapped.buyer_threshold(k2 * c + k1);
    if (t == kInf) {
      CHECK(tm == kInf);
    } else {
      CHECK(tm == doctest::Approx(k2 * t + k1).epsilon(1e-6));
    }
  }
}

TEST_CASE("uniform-vs-uniform quadrature matches the case evaluator") {
  oracle::InstanceGen gen{43};
  int done = 0;
  while (done < 30) {
    const double a = gen.in(-3.0, 0.95);
    const double b = a + gen.in(0.1, 3.0);
    btl::CaseEval ce;
    try {
      ce = btl::case_eval(a, b);
    } catch (const btl::Error&) {
      continue;
    }
    if (ce.cell.case_id == 6 || ce.fb < 1e-3) continue;
    const auto m = btl::optimal_mechanism_metrics(
        Dist::uniform(0, 1), Dist::uniform(a, b), {}, false);
    CHECK(m.ratio == doctest::Approx(ce.ratio).epsilon(1e-7));
    ++done;
  }
}
