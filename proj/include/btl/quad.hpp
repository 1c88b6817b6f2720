#pragma once

#include <functional>
#include <span>
#include <vector>

#include "btl/dist.hpp"

namespace btl {

struct QuadConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_depth = 60;
};

// Adaptive Simpson quadrature of f over [lo, hi]. Breakpoints are mandatory
// subdivision points (piece joints, mechanism thresholds); the integrand is
// assumed smooth between consecutive breakpoints. Throws QuadNoConverge.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 std::span<const double> breakpoints, const QuadConfig& cfg);

// First-best gains-from-trade E[(v-c) 1{v>=c}], computed through the 1-D
// identity ∫ (1-F)G; point-mass sides collapse to exact closed forms.
double first_best(const Dist& F, const Dist& G, const QuadConfig& cfg = {});

// Gains-from-trade of the posted pair (p to the buyer, q to the seller),
// via the decomposition Pro + G(q) E[(v-p)^+] + P(v>=p) E[(q-c)^+].
double gft_posted(const Dist& F, const Dist& G, double p, double q);

// Gains-from-trade of a threshold allocation: trade happens iff
// v >= buyer_threshold(c). A +inf threshold means no trade at that c.
// Extra breakpoints mark c-values where the threshold kinks.
double gft_allocation(const Dist& F, const Dist& G,
                      const std::function<double(double)>& buyer_threshold,
                      std::span<const double> c_breakpoints,
                      const QuadConfig& cfg = {});

struct Welfare {
  double sw;
  double fbw;
};

// SW = E[c] + GFT and FBW = E[c] + FB.
Welfare social_welfare(const Dist& F, const Dist& G, double gft,
                       const QuadConfig& cfg = {});

}  // namespace btl
