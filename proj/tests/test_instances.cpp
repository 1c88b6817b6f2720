#include "btl/instances.hpp"

#include <cmath>
#include <set>

#include <doctest.h>

#include "btl/errors.hpp"
#include "btl/rng.hpp"
#include "oracles.hpp"

using btl::Dist;

TEST_CASE("build: general family shape") {
  const auto [F, G] = btl::build(btl::GeneralInapprox{1.0, 100.0});
  CHECK(F.support_lo() == 1.0);
  CHECK(F.support_hi() == 200.0);
  CHECK(F.cdf(100.0) == doctest::Approx(0.99));
  CHECK(G.support_hi() == 1.0);
  CHECK(btl::classify(F, G).buyer_regular);
  CHECK_THROWS_AS(btl::build(btl::GeneralInapprox{2.0, 1.0}),
                  btl::BadFamilyParams);
  CHECK_THROWS_AS(btl::build(btl::GeneralInapprox{0.5, 10.0}),
                  btl::BadFamilyParams);
}

TEST_CASE("build: public families") {
  const auto [F, G] = btl::build(btl::PublicSellerInapprox{1.0, 10.0});
  CHECK(G.is_point_mass());
  CHECK(G.atom_location() == 1.0);
  const auto [F2, G2] = btl::build(btl::PublicBuyerInapprox{0.1});
  CHECK(F2.is_point_mass());
  CHECK(F2.atom_location() == 2.0);
  CHECK(G2.cdf(1.0) == doctest::Approx(0.1));
  CHECK(G2.cdf(2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(btl::build(btl::PublicBuyerInapprox{0.7}),
                  btl::BadFamilyParams);
}

TEST_CASE("build: uniform pair witness cells") {
  const auto [F, G] = btl::build(btl::UniformPair{-3.0, -2.0});
  CHECK(G.support_lo() == -3.0);
  const auto ce = btl::case_eval(-3.0, -2.0);
  CHECK(ce.cell.case_id == 1);
  CHECK(ce.cell.subcase == 'a');
  CHECK(ce.ratio == doctest::Approx(1.0));
  (void)F;
}

TEST_CASE("case table: all witnesses land in their cells at the bound") {
  for (const auto& w : btl::case_witnesses(1e-4)) {
    const auto ce = btl::case_eval(w.a, w.b);
    CHECK(ce.cell.case_id == w.case_id);
    CHECK(ce.cell.subcase == w.subcase);
    CHECK(ce.cell.lower_bound == doctest::Approx(w.lower_bound));
    CHECK(std::fabs(ce.ratio - w.lower_bound) <= 1e-3);
    CHECK(ce.ratio >= w.lower_bound - 1e-9);
  }
}

TEST_CASE("case table: frozen three-point examples") {
  const auto c2e = btl::case_eval(0.0, 1.0);
  CHECK(c2e.cell.case_id == 2);
  CHECK(c2e.cell.subcase == 'e');
  CHECK(c2e.fb == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(c2e.gft == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(c2e.ratio == doctest::Approx(0.5).epsilon(1e-12));

  const auto c4d = btl::case_eval(1.0 / 3, 2.0 / 3);
  CHECK(c4d.cell.case_id == 4);
  CHECK(c4d.cell.subcase == 'd');
  CHECK(c4d.fb == doctest::Approx(7.0 / 54).epsilon(1e-12));
  CHECK(c4d.gft == doctest::Approx(2.0 / 27).epsilon(1e-12));
  CHECK(c4d.ratio == doctest::Approx(4.0 / 7).epsilon(1e-12));

  const auto c6 = btl::case_eval(1.5, 2.5);
  CHECK(c6.cell.case_id == 6);
  CHECK(c6.fb == 0.0);
  CHECK(c6.gft == 0.0);
}

TEST_CASE("case table: infeasible cells never reached on mass random draws") {
  const std::set<std::pair<int, char>> feasible = {
      {1, 'a'}, {1, 'b'}, {1, 'c'}, {1, 'd'}, {2, 'c'}, {2, 'd'}, {2, 'e'},
      {3, 'c'}, {3, 'e'}, {4, 'd'}, {4, 'e'}, {5, 'e'}, {6, '-'},
  };
  std::uint64_t ctr = 0;
  for (int i = 0; i < 100'000; ++i) {
    const double a = btl::uniform_in(515, ctr++, -6.0, 3.0);
    const double b = a + btl::uniform_in(515, ctr++, 1e-6, 5.0);
    const auto ce = btl::case_eval(a, b);  // must not throw InfeasibleCell
    CHECK(feasible.count({ce.cell.case_id, ce.cell.subcase}) == 1);
    CHECK(ce.ratio >= ce.cell.lower_bound - 1e-9);
    CHECK(ce.gft <= ce.fb + 1e-12);
  }
}

TEST_CASE("closed-form bounds: general family frozen numbers") {
  const auto cb = btl::closed_form_bounds(btl::GeneralInapprox{1.0, 100.0});
  CHECK(*cb.gft_upper == doctest::Approx(1.495).epsilon(1e-12));
  CHECK(*cb.fb_exact == doctest::Approx(std::log(100.0) + 1.0).epsilon(1e-12));
  CHECK(*cb.ratio_upper == doctest::Approx(0.2667).epsilon(1e-3));
}

TEST_CASE("closed-form bounds: symmetric family at b = e^10") {
  const double b = std::exp(10.0);
  const auto cb = btl::closed_form_bounds(btl::SymmetricInapprox{1.0, b});
  CHECK(*cb.gft_upper == doctest::Approx(1.5 + std::exp(-10.0) / 6).epsilon(1e-12));
  CHECK(*cb.fb_lower ==
        doctest::Approx(10.0 - 2.0 - 1.5 * std::exp(-10.0)).epsilon(1e-12));
}

TEST_CASE("closed-form bounds: public seller exact 1083/800") {
  const auto cb = btl::closed_form_bounds(btl::PublicSellerInapprox{1.0, 10.0});
  CHECK(*cb.gft_exact == doctest::Approx(1083.0 / 800).epsilon(1e-14));
}

TEST_CASE("closed-form bounds: uniform pair has none") {
  CHECK_THROWS_AS(btl::closed_form_bounds(btl::UniformPair{0.0, 1.0}),
                  btl::NoClosedForm);
}

TEST_CASE("mhr families certify on the grid") {
  CHECK_NOTHROW(btl::mhr_family("uniform"));
  CHECK_NOTHROW(btl::mhr_family("trunc-exp", 2.0, 3.0));
  CHECK_NOTHROW(btl::mhr_family("linear-density", 1.0));
  CHECK_NOTHROW(btl::mhr_family("linear-density", 2.0));
  CHECK_THROWS_AS(btl::mhr_family("cauchy"), btl::BadFamilyParams);
  const auto [F, G] = btl::mhr_family("trunc-exp", 0.5, 4.0);
  const auto reg = btl::classify(F, G);
  CHECK(reg.buyer_mhr);
  CHECK(reg.seller_mhr);
}

TEST_CASE("sweep: general family ratios decay under the caps") {
  const auto reports = btl::sweep("general", {10.0, 100.0, 1000.0}, 1.0);
  REQUIRE(reports.size() == 3);
  double prev = 1e9;
  for (const auto& r : reports) {
    CHECK(r.error.empty());
    CHECK(r.passes);
    CHECK(r.ratio <= r.guaranteed + 1e-6);
    CHECK(r.ratio < prev + 1e-6);
    prev = r.ratio;
  }
  CHECK(reports[0].ratio == doctest::Approx(0.42441).epsilon(1e-3));
}

TEST_CASE("sweep: public buyer gft is exactly 1.5 delta along the sweep") {
  const auto reports = btl::sweep("public-buyer", {0.2, 0.1, 0.05}, 1.0);
  for (size_t i = 0; i < reports.size(); ++i) {
    CHECK(reports[i].passes);
    CHECK(reports[i].gft ==
          doctest::Approx(1.5 * reports[i].param).epsilon(1e-12));
    if (i > 0) CHECK(reports[i].ratio <= reports[i - 1].ratio + 1e-6);
  }
}

TEST_CASE("sweep: a failing point reports instead of aborting") {
  const auto reports = btl::sweep("general", {10.0, 0.5}, 1.0);
  CHECK(reports[0].passes);
  CHECK_FALSE(reports[1].passes);
  CHECK_FALSE(reports[1].error.empty());
}

TEST_CASE("sweep csv carries the documented header") {
  const auto reports = btl::sweep("general", {10.0}, 1.0);
  const std::string csv = btl::sweep_csv(reports);
  CHECK(csv.rfind("family,param,fb,gft,profit,ratio,guaranteed,passes\n", 0) ==
        0);
}
