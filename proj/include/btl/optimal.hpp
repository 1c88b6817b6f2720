#pragma once

#include "btl/dist.hpp"
#include "btl/posted.hpp"
#include "btl/quad.hpp"

namespace btl {

// Everything an analysis of one (F, G, mechanism) triple reports.
struct TradeMetrics {
  double gft = 0.0;
  double fb = 0.0;
  double profit = 0.0;
  double sw = 0.0;
  double fbw = 0.0;
  double ratio = 0.0;  // gft / fb, defined as 1 when fb ~ 0 (nothing to gain)
};

// The profit-maximizing two-sided rule: trade iff phi_F(v) >= phi_G(c).
// Requires both distributions regular with bounded supports; atoms are
// rejected (use the public variants).
class TwoSidedRule {
 public:
  TwoSidedRule(const Dist& F, const Dist& G);

  // v_hat(c) = min{v : phi_F(v) >= phi_G(c)}, +inf when no such v exists.
  double buyer_threshold(double c) const;
  // c_hat(v) = max{c : phi_G(c) <= phi_F(v)}, support_lo - 1 when none wins
  // (the G mass below it is then zero).
  double seller_threshold(double v) const;

  // c-values where the buyer threshold kinks (crosses piece joints of F) or
  // leaves the support; used as mandatory quadrature breakpoints.
  std::vector<double> threshold_breakpoints_c() const;
  std::vector<double> threshold_breakpoints_v() const;

  const Dist& buyer() const { return F_; }
  const Dist& seller() const { return G_; }

 private:
  Dist F_, G_;
  double phi_f_min_, phi_f_max_;
  double phi_g_min_, phi_g_max_;
};

// min{v : phi_F(v) >= phi_G(c)} for one c; +inf sentinel when trade never
// occurs at that cost.
double two_sided_threshold(const Dist& F, const Dist& G, double c);

// GFT/profit/welfare of the broker-optimal two-sided mechanism. Profit uses
// threshold payments (buyer pays the lowest winning report given c, seller
// receives the highest winning report given v), which integrates to the
// virtual surplus. Also cross-checks that the mechanism's profit weakly
// beats an optimal posted pair.
TradeMetrics optimal_mechanism_metrics(const Dist& F, const Dist& G,
                                       const QuadConfig& cfg = {},
                                       bool check_posted_profit = true);

// Public seller at cost c: trade iff phi_F(v) >= c.
TradeMetrics public_seller_metrics(const Dist& F, double c,
                                   const QuadConfig& cfg = {});

// Public buyer at value v: trade iff phi_G(c) <= v.
TradeMetrics public_buyer_metrics(const Dist& G, double v,
                                  const QuadConfig& cfg = {});

struct NormalizationCheck {
  double ratio_before;
  double ratio_after;
};

// GFT/FB of the optimal mechanism before and after x -> k2*x + k1 applied to
// both distributions; the two ratios must agree within 1e-7.
NormalizationCheck normalization_check(const Dist& F, const Dist& G, double k1,
                                       double k2, const QuadConfig& cfg = {});

}  // namespace btl
