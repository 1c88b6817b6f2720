#pragma once

#include <cstdint>

#include "btl/dist.hpp"
#include "btl/quad.hpp"

namespace btl {

// A posted-price offer: p to the buyer, q to the seller. The broker never
// runs a deficit, so p >= q.
struct PricePair {
  double p;
  double q;
};

struct PostedResult {
  PricePair prices;
  double profit;
  double gft;
  double fb;
  double decomposition_rhs;
};

struct MonteCarloConfig {
  long long samples = 1'000'000;
  std::uint64_t seed = 0;
  int batches = 20;
};

struct SingleSampleResult {
  double mean_gft;
  double std_err;
  double fb;
  bool asymmetric_inputs;  // warning flag: the 1/12 guarantee assumes F == G
};

struct OptimizerConfig {
  int grid_n = 2048;
  int refine_iters = 200;
};

struct MedianPricingResult : PostedResult {
  bool median_order_violated;
  double guaranteed_factor;  // 1/2 when medians are ordered, else min(G(p), 1-F(p))
};

struct QuantilePricingResult : PostedResult {
  double alpha, beta;
  double guaranteed_factor;  // beta * (1 - alpha)
};

// (p - q) * P(v >= p) * G(q).
double profit(const Dist& F, const Dist& G, const PricePair& pp);

// Right-hand side of the decomposition bound:
//   Pro + min(G(q), 1-F(p)) * (FB - ∫_q^p G(x)(1-F(x)) dx).
double decomposition_rhs(const Dist& F, const Dist& G, const PricePair& pp,
                         const QuadConfig& cfg = {});

// Profit-maximizing posted pair via an exhaustive quantile-space grid scan
// followed by coordinate-wise golden-section refinement. The reported profit
// is >= the profit of every grid point. Throws DegenerateInstance when
// FB <= 1e-12.
PostedResult optimize_prices(const Dist& F, const Dist& G,
                             const OptimizerConfig& opt = {},
                             const QuadConfig& cfg = {});

// Single price at the midpoint of the two medians. When the median of F is
// at least that of G the gains-from-trade are guaranteed >= FB/2; otherwise
// the result carries the degraded factor min(G(p), 1-F(p)) and a flag.
MedianPricingResult median_pricing(const Dist& F, const Dist& G,
                                   const QuadConfig& cfg = {});

// p = mu_F(alpha), q = mu_G(beta); requires mu_G(beta) <= mu_F(alpha)
// (else QuantileOrderViolated). Guarantees GFT >= beta*(1-alpha)*FB.
QuantilePricingResult quantile_pricing(const Dist& F, const Dist& G,
                                       double alpha, double beta,
                                       const QuadConfig& cfg = {});

// Draws p ~ F, q ~ G per sample via inverse CDF from a counter-based stream
// and evaluates gft_posted(max(p,q), min(p,q)) in closed form, so only the
// price draw is sampled. Batch-means standard error.
SingleSampleResult single_sample(const Dist& F, const Dist& G,
                                 const MonteCarloConfig& mc = {},
                                 const QuadConfig& cfg = {});

// Theorem factor 2/M^2 for hazard rates bounded by M; 0 when M = +inf.
// M < 2 (finite) is impossible for a symmetric MHR pair and is rejected.
double hazard_bound_factor(double M);

}  // namespace btl
