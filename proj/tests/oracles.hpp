// Test-only oracles, kept independent of the library paths they check:
// brute-force Riemann-Stieltjes sums over CDF differences, nested 2-D
// quadrature routes, and a randomized instance generator.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "btl/dist.hpp"
#include "btl/quad.hpp"
#include "btl/rng.hpp"

namespace oracle {

// Value grid over the support: breakpoints plus uniform fill, ascending.
inline std::vector<double> grid_over(const btl::Dist& d, int n,
                                     std::vector<double> extra = {}) {
  std::vector<double> g = d.breakpoints();
  for (double x : extra)
    if (x > d.support_lo() && x < d.support_hi()) g.push_back(x);
  const double lo = d.support_lo(), hi = d.support_hi();
  for (int i = 0; i <= n; ++i) g.push_back(lo + (hi - lo) * i / n);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

// E[(v-c) x(v,c)] by direct Stieltjes double sum with midpoint values.
// Uses only CDF evaluations, so it shares nothing with the library's
// integrators or closed-form piece algebra.
inline double stieltjes_expect(
    const btl::Dist& F, const btl::Dist& G,
    const std::function<double(double, double)>& weight, int n = 1500,
    std::vector<double> extra_v = {}, std::vector<double> extra_c = {}) {
  const auto vg = grid_over(F, n, extra_v);
  const auto cg = grid_over(G, n, extra_c);
  std::vector<double> vm(vg.size() - 1), wv(vg.size() - 1);
  for (size_t i = 0; i + 1 < vg.size(); ++i) {
    vm[i] = 0.5 * (vg[i] + vg[i + 1]);
    wv[i] = F.cdf(vg[i + 1]) - F.cdf(vg[i]);
  }
  double total = 0.0;
  for (size_t j = 0; j + 1 < cg.size(); ++j) {
    const double cm = 0.5 * (cg[j] + cg[j + 1]);
    const double wc = G.cdf(cg[j + 1]) - G.cdf(cg[j]);
    if (wc == 0.0) continue;
    double inner = 0.0;
    for (size_t i = 0; i < vm.size(); ++i)
      inner += wv[i] * weight(vm[i], cm);
    total += wc * inner;
  }
  return total;
}

inline double stieltjes_fb(const btl::Dist& F, const btl::Dist& G,
                           int n = 1500) {
  return stieltjes_expect(
      F, G, [](double v, double c) { return v >= c ? v - c : 0.0; }, n);
}

inline double stieltjes_gft_posted(const btl::Dist& F, const btl::Dist& G,
                                   double p, double q, int n = 1500) {
  return stieltjes_expect(
      F, G,
      [&](double v, double c) { return (v >= p && c <= q) ? v - c : 0.0; }, n,
      {p}, {q});
}

// 2-D definition of FB through nested adaptive quadrature: an algebraic
// route distinct from the library's 1-D survival identity.
inline double nested_fb(const btl::Dist& F, const btl::Dist& G) {
  btl::QuadConfig cfg;
  cfg.abs_tol = 1e-12;
  const auto fb = F.breakpoints();
  return btl::integrate(
      [&](double c) {
        std::vector<double> bps = fb;
        bps.push_back(c);
        const double inner = btl::integrate(
            [&](double v) { return (v - c) * F.pdf(v); },
            std::max(c, F.support_lo()), F.support_hi(), bps, cfg);
        return inner * G.pdf(c);
      },
      G.support_lo(), G.support_hi(), G.breakpoints(), cfg);
}

inline double nested_gft_posted(const btl::Dist& F, const btl::Dist& G,
                                double p, double q) {
  btl::QuadConfig cfg;
  cfg.abs_tol = 1e-12;
  const auto fb = F.breakpoints();
  return btl::integrate(
      [&](double c) {
        const double lo = std::max(p, F.support_lo());
        if (lo >= F.support_hi()) return 0.0;
        const double inner = btl::integrate(
            [&](double v) { return (v - c) * F.pdf(v); }, lo, F.support_hi(),
            fb, cfg);
        return inner * G.pdf(c);
      },
      G.support_lo(), std::min(q, G.support_hi()), G.breakpoints(), cfg);
}

// Randomized piecewise instances for property tests. Not all draws are
// regular or MHR; callers filter with classify() where a theorem needs it.
struct InstanceGen {
  std::uint64_t seed;
  std::uint64_t counter = 0;

  double u() { return btl::uniform01(seed, counter++); }
  double in(double a, double b) { return a + (b - a) * u(); }

  btl::Dist dist() {
    switch (static_cast<int>(u() * 5.0)) {
      case 0: {
        const double a = in(0.0, 2.0);
        return btl::Dist::uniform(a, a + in(0.3, 2.5));
      }
      case 1:
        return btl::Dist::truncated_exponential(in(0.4, 3.0), in(0.8, 4.0));
      case 2: {
        const double a = in(0.5, 1.5);
        return btl::Dist::equal_revenue_with_tail(a, a * in(2.0, 10.0));
      }
      case 3: {
        // Linear density, sometimes shifted and stretched off [0, 1].
        btl::Dist d = btl::Dist::linear_density(in(0.2, 2.0));
        if (u() < 0.5) return d;
        return d.affine(in(0.0, 1.5), in(0.5, 2.0));
      }
      default: {
        // Two constant-density segments with a kink.
        const double lo = in(0.0, 1.0);
        const double mid = lo + in(0.2, 1.0);
        const double hi = mid + in(0.2, 1.0);
        const double mass1 = in(0.2, 0.8);
        std::vector<btl::Piece> ps;
        ps.push_back(btl::Piece{
            lo, mid, btl::LinearPiece{0.0, mass1 / (mid - lo), lo}});
        ps.push_back(btl::Piece{
            mid, hi, btl::LinearPiece{mass1, (1.0 - mass1) / (hi - mid), mid}});
        return btl::Dist::from_pieces(std::move(ps));
      }
    }
  }
};

}  // namespace oracle
