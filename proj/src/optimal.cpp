#include "btl/optimal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "btl/errors.hpp"

namespace btl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_of(double gft, double fb) { return fb > 1e-12 ? gft / fb : 1.0; }

// Virtual value evaluated just inside the support so endpoint densities of
// zero do not poison the bisection.
double phi_buyer_at(const Dist& F, double x) {
  const double lo = F.support_lo(), hi = F.support_hi();
  const double nudge = 1e-12 * std::max(1.0, hi - lo);
  x = std::clamp(x, lo + nudge, hi - nudge);
  return F.virtual_buyer(x);
}

double phi_seller_at(const Dist& G, double x) {
  const double lo = G.support_lo(), hi = G.support_hi();
  const double nudge = 1e-12 * std::max(1.0, hi - lo);
  x = std::clamp(x, lo + nudge, hi - nudge);
  return G.virtual_seller(x);
}

// min{x in [lo, hi] : phi(x) >= target} for nondecreasing phi; +inf if the
// target is never reached.
double monotone_inverse_min(const std::function<double(double)>& phi,
                            double lo, double hi, double target) {
  if (phi(hi) < target) return kInf;
  if (phi(lo) >= target) return lo;
  double a = lo, b = hi;
  while (b - a > 1e-13 * std::max(1.0, std::fabs(b))) {
    const double m = 0.5 * (a + b);
    (phi(m) >= target ? b : a) = m;
  }
  return b;
}

// max{x in [lo, hi] : phi(x) <= target} for nondecreasing phi; lo - 1 when
// even phi(lo) exceeds the target.
double monotone_inverse_max(const std::function<double(double)>& phi,
                            double lo, double hi, double target) {
  if (phi(lo) > target) return lo - 1.0;
  if (phi(hi) <= target) return hi;
  double a = lo, b = hi;
  while (b - a > 1e-13 * std::max(1.0, std::fabs(b))) {
    const double m = 0.5 * (a + b);
    (phi(m) <= target ? a : b) = m;
  }
  return a;
}

void require_regular_pair(const Dist& F, const Dist& G) {
  if (F.is_point_mass() || G.is_point_mass())
    throw AtomicInput(
        "two-sided rule needs continuous distributions; use the public-agent "
        "variants for point masses");
  const Regularity reg = classify(F, G);
  if (!reg.buyer_regular)
    throw NotRegular("buyer distribution is not regular");
  if (!reg.seller_regular)
    throw NotRegular("seller distribution is not regular");
}

}  // namespace

TwoSidedRule::TwoSidedRule(const Dist& F, const Dist& G) : F_(F), G_(G) {
  require_regular_pair(F, G);
  phi_f_min_ = phi_buyer_at(F_, F_.support_lo());
  phi_f_max_ = phi_buyer_at(F_, F_.support_hi());
  phi_g_min_ = phi_seller_at(G_, G_.support_lo());
  phi_g_max_ = phi_seller_at(G_, G_.support_hi());
}

double TwoSidedRule::buyer_threshold(double c) const {
  const double target = phi_seller_at(G_, c);
  return monotone_inverse_min([&](double v) { return phi_buyer_at(F_, v); },
                              F_.support_lo(), F_.support_hi(), target);
}

double TwoSidedRule::seller_threshold(double v) const {
  const double target = phi_buyer_at(F_, v);
  return monotone_inverse_max([&](double c) { return phi_seller_at(G_, c); },
                              G_.support_lo(), G_.support_hi(), target);
}

std::vector<double> TwoSidedRule::threshold_breakpoints_c() const {
  // c-values where v_hat(c) crosses a piece joint of F, plus the point where
  // trade shuts off entirely (phi_G(c) passes max phi_F).
  std::vector<double> bps;
  auto phi_g = [&](double c) { return phi_seller_at(G_, c); };
  for (double vb : F_.breakpoints()) {
    const double target = phi_buyer_at(F_, vb);
    const double c = monotone_inverse_max(phi_g, G_.support_lo(),
                                          G_.support_hi(), target);
    if (c > G_.support_lo() && c < G_.support_hi()) bps.push_back(c);
  }
  const double off = monotone_inverse_max(phi_g, G_.support_lo(),
                                          G_.support_hi(), phi_f_max_);
  if (off > G_.support_lo() && off < G_.support_hi()) bps.push_back(off);
  return bps;
}

std::vector<double> TwoSidedRule::threshold_breakpoints_v() const {
  std::vector<double> bps;
  auto phi_f = [&](double v) { return phi_buyer_at(F_, v); };
  for (double cb : G_.breakpoints()) {
    const double target = phi_seller_at(G_, cb);
    const double v = monotone_inverse_min(phi_f, F_.support_lo(),
                                          F_.support_hi(), target);
    if (v > F_.support_lo() && v < F_.support_hi()) bps.push_back(v);
  }
  const double on = monotone_inverse_min(phi_f, F_.support_lo(),
                                         F_.support_hi(), phi_g_min_);
  if (on > F_.support_lo() && on < F_.support_hi()) bps.push_back(on);
  return bps;
}

double two_sided_threshold(const Dist& F, const Dist& G, double c) {
  TwoSidedRule rule(F, G);
  return rule.buyer_threshold(c);
}

TradeMetrics optimal_mechanism_metrics(const Dist& F, const Dist& G,
                                       const QuadConfig& cfg,
                                       bool check_posted_profit) {
  TwoSidedRule rule(F, G);
  const auto c_bps = rule.threshold_breakpoints_c();
  const auto v_bps = rule.threshold_breakpoints_v();

  TradeMetrics m;
  m.fb = first_best(F, G, cfg);
  m.gft = gft_allocation(
      F, G, [&](double c) { return rule.buyer_threshold(c); }, c_bps, cfg);

  // Threshold payments: buyer pays v_hat(c) whenever he wins, the seller
  // receives c_hat(v) whenever she sells. Both integrate one-dimensionally.
  {
    std::vector<double> bps = G.breakpoints();
    bps.insert(bps.end(), c_bps.begin(), c_bps.end());
    const double buyer_pay = integrate(
        [&](double c) {
          const double t = rule.buyer_threshold(c);
          if (t == kInf) return 0.0;
          return t * F.survival(t) * G.pdf(c);
        },
        G.support_lo(), G.support_hi(), bps, cfg);
    std::vector<double> bps_v = F.breakpoints();
    bps_v.insert(bps_v.end(), v_bps.begin(), v_bps.end());
    const double seller_rcv = integrate(
        [&](double v) {
          const double t = rule.seller_threshold(v);
          if (t < G.support_lo()) return 0.0;
          return t * G.cdf(t) * F.pdf(v);
        },
        F.support_lo(), F.support_hi(), bps_v, cfg);
    m.profit = buyer_pay - seller_rcv;
  }

  const Welfare w = social_welfare(F, G, std::max(m.gft, 0.0), cfg);
  m.sw = w.sw;
  m.fbw = w.fbw;
  m.ratio = ratio_of(m.gft, m.fb);

  // A posted pair is itself BNIC and IR, so the optimal mechanism's profit
  // can never fall below the optimal posted profit.
  if (check_posted_profit && m.fb > 1e-12) {
    OptimizerConfig small;
    small.grid_n = 256;
    small.refine_iters = 40;
    const PostedResult pp = optimize_prices(F, G, small, cfg);
    if (m.profit < pp.profit - 1e-6)
      throw BoundViolation(
          "optimal-mechanism profit fell below the optimal posted profit");
  }
  return m;
}

TradeMetrics public_seller_metrics(const Dist& F, double c,
                                   const QuadConfig& cfg) {
  if (!(c >= 0.0)) throw Error("public seller cost must be nonnegative");
  if (F.is_point_mass())
    throw AtomicInput("public-seller analysis needs a continuous buyer");
  if (!classify(F, F).buyer_regular)
    throw NotRegular("buyer distribution is not regular");

  const double vhat = monotone_inverse_min(
      [&](double v) { return phi_buyer_at(F, v); }, F.support_lo(),
      F.support_hi(), c);

  TradeMetrics m;
  m.fb = F.expected_excess_above(c);
  if (vhat == kInf) {
    m.gft = 0.0;
    m.profit = 0.0;
  } else {
    m.gft = F.partial_mean_above(vhat) - c * F.survival(vhat);
    m.profit = (vhat - c) * F.survival(vhat);
  }
  m.sw = c + m.gft;
  m.fbw = c + m.fb;
  m.ratio = ratio_of(m.gft, m.fb);
  (void)cfg;
  return m;
}

TradeMetrics public_buyer_metrics(const Dist& G, double v,
                                  const QuadConfig& cfg) {
  if (!(v >= 0.0)) throw Error("public buyer value must be nonnegative");
  if (G.is_point_mass())
    throw AtomicInput("public-buyer analysis needs a continuous seller");
  if (!classify(G, G).seller_regular)
    throw NotRegular("seller distribution is not regular");

  const double chat = monotone_inverse_max(
      [&](double c) { return phi_seller_at(G, c); }, G.support_lo(),
      G.support_hi(), v);

  TradeMetrics m;
  m.fb = G.expected_slack_below(v);
  if (chat < G.support_lo()) {
    m.gft = 0.0;
    m.profit = 0.0;
  } else {
    m.gft = v * G.cdf(chat) - G.partial_mean_below(chat);
    m.profit = (v - chat) * G.cdf(chat);
  }
  m.sw = G.expectation() + m.gft;
  m.fbw = G.expectation() + m.fb;
  m.ratio = ratio_of(m.gft, m.fb);
  (void)cfg;
  return m;
}

NormalizationCheck normalization_check(const Dist& F, const Dist& G, double k1,
                                       double k2, const QuadConfig& cfg) {
  if (!(k2 > 0.0)) throw Error("normalization needs k2 > 0");
  const TradeMetrics before =
      optimal_mechanism_metrics(F, G, cfg, /*check_posted_profit=*/false);
  const TradeMetrics after = optimal_mechanism_metrics(
      F.affine(k1, k2), G.affine(k1, k2), cfg, /*check_posted_profit=*/false);
  NormalizationCheck r{before.ratio, after.ratio};
  if (std::fabs(r.ratio_before - r.ratio_after) > 1e-7)
    throw BoundViolation("GFT/FB ratio changed under a joint affine map");
  return r;
}

}  // namespace btl
