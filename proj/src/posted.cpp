#include "btl/posted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "btl/errors.hpp"
#include "btl/rng.hpp"

namespace btl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double profit_at(const Dist& F, const Dist& G, double p, double q) {
  if (p < q) return -kInf;
  return (p - q) * F.survival(p) * G.cdf(q);
}

// Golden-section maximization of a unimodal-ish slice; only ever used to
// polish around an already-located grid optimum.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  int iters) {
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && (b - a) > 1e-15 * std::max(1.0, std::fabs(b));
       ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

PostedResult finish(const Dist& F, const Dist& G, double p, double q,
                    double fb, const QuadConfig& cfg) {
  PostedResult r;
  r.prices = {p, q};
  r.profit = profit_at(F, G, p, q);
  r.gft = gft_posted(F, G, p, q);
  r.fb = fb;
  r.decomposition_rhs = decomposition_rhs(F, G, {p, q}, cfg);
  return r;
}

}  // namespace

double profit(const Dist& F, const Dist& G, const PricePair& pp) {
  if (!(pp.p >= pp.q)) throw Error("posted prices need p >= q");
  return (pp.p - pp.q) * F.survival(pp.p) * G.cdf(pp.q);
}

double decomposition_rhs(const Dist& F, const Dist& G, const PricePair& pp,
                         const QuadConfig& cfg) {
  if (!(pp.p >= pp.q)) throw Error("posted prices need p >= q");
  const double pro = profit(F, G, pp);
  const double weight = std::min(G.cdf(pp.q), F.survival(pp.p));
  if (weight <= 0.0) return pro;
  const double fb = first_best(F, G, cfg);
  double middle = 0.0;
  if (pp.p > pp.q && !F.is_point_mass() && !G.is_point_mass()) {
    std::vector<double> bps = F.breakpoints();
    const auto gb = G.breakpoints();
    bps.insert(bps.end(), gb.begin(), gb.end());
    middle = integrate(
        [&](double x) { return G.cdf(x) * (1.0 - F.cdf(x)); }, pp.q, pp.p, bps,
        cfg);
  } else if (pp.p > pp.q) {
    // A point mass contributes a step CDF; the integrand is still piecewise
    // analytic with a breakpoint at the atom.
    std::vector<double> bps;
    if (F.is_point_mass()) bps.push_back(F.atom_location());
    if (G.is_point_mass()) bps.push_back(G.atom_location());
    middle = integrate(
        [&](double x) { return G.cdf(x) * (1.0 - F.cdf(x)); }, pp.q, pp.p, bps,
        cfg);
  }
  return pro + weight * (fb - middle);
}

PostedResult optimize_prices(const Dist& F, const Dist& G,
                             const OptimizerConfig& opt, const QuadConfig& cfg) {
  const double fb = first_best(F, G, cfg);
  if (fb <= 1e-12)
    throw DegenerateInstance("first-best gains-from-trade is zero");

  const int n = std::max(opt.grid_n, 8);

  // Price grids in quantile space keep resolution uniform in probability
  // mass; the support endpoints join as explicit candidates.
  std::vector<double> ps, qs;
  ps.reserve(n + 1);
  qs.reserve(n + 1);
  ps.push_back(F.support_lo());
  qs.push_back(G.support_lo());
  for (int i = 1; i <= n; ++i) {
    ps.push_back(F.quantile(static_cast<double>(i) / n));
    qs.push_back(G.quantile(static_cast<double>(i) / n));
  }
  std::vector<double> surv(ps.size()), gq(qs.size());
  for (size_t i = 0; i < ps.size(); ++i) surv[i] = F.survival(ps[i]);
  for (size_t j = 0; j < qs.size(); ++j) gq[j] = G.cdf(qs[j]);

  double best = -kInf, bp = ps.front(), bq = qs.front();
  size_t bi = 0, bj = 0;
  for (size_t i = 0; i < ps.size(); ++i) {
    if (surv[i] <= 0.0) continue;
    for (size_t j = 0; j < qs.size(); ++j) {
      if (qs[j] > ps[i]) break;
      const double v = (ps[i] - qs[j]) * surv[i] * gq[j];
      // Ties break toward the smallest p, then the largest q.
      if (v > best ||
          (v == best && (ps[i] < bp || (ps[i] == bp && qs[j] > bq)))) {
        best = v;
        bp = ps[i];
        bq = qs[j];
        bi = i;
        bj = j;
      }
    }
  }

  // Named quantile pairs worth probing directly (the grid need not contain
  // them exactly); includes the (2/3, 1/3) witness pair.
  for (double alpha : {1.0 / 4, 1.0 / 3, 1.0 / 2, 2.0 / 3, 3.0 / 4}) {
    for (double beta : {1.0 / 4, 1.0 / 3, 1.0 / 2, 2.0 / 3, 3.0 / 4}) {
      const double p = F.quantile(alpha), q = G.quantile(beta);
      if (q > p) continue;
      const double v = profit_at(F, G, p, q);
      if (v > best) {
        best = v;
        bp = p;
        bq = q;
      }
    }
  }

  // Coordinate-wise golden-section refinement inside the bracket formed by
  // the neighbouring grid values.
  auto neighbor = [](const std::vector<double>& xs, size_t i, int d) {
    if (d < 0) return xs[i == 0 ? 0 : i - 1];
    return xs[std::min(xs.size() - 1, i + 1)];
  };
  double lo_p = neighbor(ps, bi, -1), hi_p = neighbor(ps, bi, +1);
  double lo_q = neighbor(qs, bj, -1), hi_q = neighbor(qs, bj, +1);
  for (int pass = 0; pass < opt.refine_iters; ++pass) {
    if (pass % 2 == 0) {
      const double a = std::max(lo_p, bq), b = hi_p;
      if (b > a) {
        const double cand =
            golden_max([&](double p) { return profit_at(F, G, p, bq); }, a, b, 64);
        if (profit_at(F, G, cand, bq) > best) {
          best = profit_at(F, G, cand, bq);
          bp = cand;
        }
      }
    } else {
      const double a = lo_q, b = std::min(hi_q, bp);
      if (b > a) {
        const double cand =
            golden_max([&](double q) { return profit_at(F, G, bp, q); }, a, b, 64);
        if (profit_at(F, G, bp, cand) > best) {
          best = profit_at(F, G, bp, cand);
          bq = cand;
        }
      }
    }
  }

  return finish(F, G, bp, bq, fb, cfg);
}

MedianPricingResult median_pricing(const Dist& F, const Dist& G,
                                   const QuadConfig& cfg) {
  const double mf = F.quantile(0.5), mg = G.quantile(0.5);
  const double p = 0.5 * (mf + mg);
  MedianPricingResult r;
  static_cast<PostedResult&>(r) = finish(F, G, p, p, first_best(F, G, cfg), cfg);
  r.median_order_violated = mf < mg;
  r.guaranteed_factor = r.median_order_violated
                            ? std::min(G.cdf(p), F.survival(p))
                            : 0.5;
  return r;
}

QuantilePricingResult quantile_pricing(const Dist& F, const Dist& G,
                                       double alpha, double beta,
                                       const QuadConfig& cfg) {
  if (!(beta > 0.0 && beta <= 1.0) || !(alpha >= 0.0 && alpha < 1.0))
    throw InvalidQuantile("need 0 <= alpha < 1 and 0 < beta <= 1");
  const double p = alpha > 0.0 ? F.quantile(alpha) : F.support_lo();
  const double q = G.quantile(beta);
  if (q > p)
    throw QuantileOrderViolated("mu_G(beta) exceeds mu_F(alpha)");
  QuantilePricingResult r;
  static_cast<PostedResult&>(r) = finish(F, G, p, q, first_best(F, G, cfg), cfg);
  r.alpha = alpha;
  r.beta = beta;
  r.guaranteed_factor = beta * (1.0 - alpha);
  return r;
}

SingleSampleResult single_sample(const Dist& F, const Dist& G,
                                 const MonteCarloConfig& mc,
                                 const QuadConfig& cfg) {
  if (mc.samples < 1000) throw Error("need at least 1000 samples");
  if (mc.batches < 2) throw Error("need at least 2 batches");
  const long long per_batch = mc.samples / mc.batches;
  std::vector<double> batch_mean(mc.batches, 0.0);
  for (int b = 0; b < mc.batches; ++b) {
    double acc = 0.0;
    const std::uint64_t base = static_cast<std::uint64_t>(b) * per_batch;
    for (long long i = 0; i < per_batch; ++i) {
      const std::uint64_t ctr = 2 * (base + static_cast<std::uint64_t>(i));
      const double pv = F.quantile(uniform01(mc.seed, ctr));
      const double qv = G.quantile(uniform01(mc.seed, ctr + 1));
      acc += gft_posted(F, G, std::max(pv, qv), std::min(pv, qv));
    }
    batch_mean[b] = acc / static_cast<double>(per_batch);
  }
  double mean = 0.0;
  for (double m : batch_mean) mean += m;
  mean /= mc.batches;
  double var = 0.0;
  for (double m : batch_mean) var += (m - mean) * (m - mean);
  var /= (mc.batches - 1);
  SingleSampleResult r;
  r.mean_gft = mean;
  r.std_err = std::sqrt(var / mc.batches);
  r.fb = first_best(F, G, cfg);
  r.asymmetric_inputs = F.spec_string() != G.spec_string();
  return r;
}

double hazard_bound_factor(double M) {
  if (M == kInf) return 0.0;
  if (!(M >= 2.0)) throw InvalidM("a symmetric MHR pair forces M >= 2");
  return 2.0 / (M * M);
}

}  // namespace btl
