#include "btl/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "btl/errors.hpp"

namespace btl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SimpsonState {
  const std::function<double(double)>& f;
  int max_depth;
  bool converged = true;
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(SimpsonState& st, double a, double b, double fa, double fm,
                double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = st.f(lm), frm = st.f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol || (b - a) < 1e-15 * std::fabs(m)) {
    return left + right + delta / 15.0;
  }
  if (depth >= st.max_depth) {
    st.converged = false;
    return left + right + delta / 15.0;
  }
  return adaptive(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adaptive(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 std::span<const double> breakpoints, const QuadConfig& cfg) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> pts;
  pts.push_back(lo);
  for (double b : breakpoints)
    if (b > lo && b < hi) pts.push_back(b);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](double x, double y) {
                          return std::fabs(x - y) <=
                                 1e-14 * std::max(1.0, std::fabs(x));
                        }),
            pts.end());

  // First pass estimate to seed the relative-tolerance target.
  double rough = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    rough += std::fabs(simpson(f(a), f(0.5 * (a + b)), f(b), a, b));
  }
  const double tol_total = std::max(cfg.abs_tol, cfg.rel_tol * rough);

  double total = 0.0;
  bool converged = true;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson(fa, fm, fb, a, b);
    SimpsonState st{f, cfg.max_depth, true};
    const double seg_tol = tol_total * std::max(1e-3, (b - a) / (hi - lo));
    total += adaptive(st, a, b, fa, fm, fb, whole, seg_tol, 0);
    converged = converged && st.converged;
  }
  if (!converged)
    throw QuadNoConverge("adaptive quadrature hit max depth before tolerance");
  return total;
}

double first_best(const Dist& F, const Dist& G, const QuadConfig& cfg) {
  if (F.is_point_mass() && G.is_point_mass())
    return std::max(F.atom_location() - G.atom_location(), 0.0);
  if (G.is_point_mass()) return F.expected_excess_above(G.atom_location());
  if (F.is_point_mass()) return G.expected_slack_below(F.atom_location());

  const double lo = G.support_lo();
  const double hi = F.support_hi();
  if (lo >= hi) {
    // Supports ordered the wrong way round: full trade region is empty only
    // when the buyer's top value cannot exceed the seller's bottom cost...
    // (1-F)G vanishes outside [lo, hi] regardless, so the integral is 0.
    return 0.0;
  }
  std::vector<double> bps = F.breakpoints();
  const auto gb = G.breakpoints();
  bps.insert(bps.end(), gb.begin(), gb.end());
  auto integrand = [&](double x) { return (1.0 - F.cdf(x)) * G.cdf(x); };
  return integrate(integrand, lo, hi, bps, cfg);
}

double gft_posted(const Dist& F, const Dist& G, double p, double q) {
  if (!(p >= q)) throw Error("posted prices need p >= q");
  const double surv = F.survival(p);
  const double gq = G.cdf(q);
  const double profit = (p - q) * surv * gq;
  return profit + gq * F.expected_excess_above(p) +
         surv * G.expected_slack_below(q);
}

double gft_allocation(const Dist& F, const Dist& G,
                      const std::function<double(double)>& buyer_threshold,
                      std::span<const double> c_breakpoints,
                      const QuadConfig& cfg) {
  // Spot-check that the threshold is nondecreasing in c; a profit-maximizing
  // allocation can only shrink the trade set as the cost rises.
  {
    const double lo = G.support_lo(), hi = G.support_hi();
    double prev = -kInf;
    for (int i = 0; i <= 16; ++i) {
      const double c = lo + (hi - lo) * i / 16.0;
      const double t = buyer_threshold(c);
      if (std::isnan(t)) throw BadPredicate("threshold returned NaN");
      if (t < prev - 1e-7 * std::max(1.0, std::fabs(prev)))
        throw BadPredicate("threshold is not monotone in c");
      prev = t;
    }
  }

  auto inner = [&](double c) {
    const double t = buyer_threshold(c);
    if (t == kInf || t >= F.support_hi()) return 0.0;
    const double t0 = std::max(t, F.support_lo());
    return F.partial_mean_above(t0) - c * F.survival(t0);
  };

  if (G.is_point_mass()) return inner(G.atom_location());

  std::vector<double> bps = G.breakpoints();
  for (double b : c_breakpoints) bps.push_back(b);
  auto integrand = [&](double c) { return inner(c) * G.pdf(c); };
  return integrate(integrand, G.support_lo(), G.support_hi(), bps, cfg);
}

Welfare social_welfare(const Dist& F, const Dist& G, double gft,
                       const QuadConfig& cfg) {
  if (gft < -1e-12) throw Error("social welfare needs gft >= 0");
  const double ec = G.expectation();
  return Welfare{ec + gft, ec + first_best(F, G, cfg)};
}

}  // namespace btl
