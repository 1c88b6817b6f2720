#include "btl/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "btl/errors.hpp"
#include "btl/parallel.hpp"

namespace btl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::pair<Dist, Dist> build(const InstanceFamily& fam) {
  if (const auto* g = std::get_if<GeneralInapprox>(&fam)) {
    if (!(g->b > g->a && g->a >= 1.0))
      throw BadFamilyParams("general inapproximability needs b > a >= 1");
    return {Dist::equal_revenue_with_tail(g->a, g->b), Dist::uniform(0.0, 1.0)};
  }
  if (const auto* p = std::get_if<PublicSellerInapprox>(&fam)) {
    if (!(p->b > p->a && p->a > 0.0))
      throw BadFamilyParams("public-seller family needs b > a > 0");
    return {Dist::equal_revenue_with_tail(p->a, p->b), Dist::point_mass(p->a)};
  }
  if (const auto* p = std::get_if<PublicBuyerInapprox>(&fam)) {
    if (!(p->delta > 0.0 && p->delta < 0.5))
      throw BadFamilyParams("public-buyer family needs 0 < delta < 1/2");
    return {Dist::point_mass(2.0), Dist::public_buyer_linear_rational(p->delta)};
  }
  if (const auto* s = std::get_if<SymmetricInapprox>(&fam)) {
    if (!(s->b > s->a && s->a > 0.0))
      throw BadFamilyParams("symmetric family needs b > a > 0");
    Dist f = Dist::equal_revenue_with_tail(s->a, s->b);
    return {f, f};
  }
  if (const auto* u = std::get_if<UniformPair>(&fam)) {
    if (!(u->a < u->b)) throw BadFamilyParams("uniform pair needs a < b");
    return {Dist::uniform(0.0, 1.0), Dist::uniform(u->a, u->b)};
  }
  const auto& m = std::get<SymmetricMHR>(fam);
  return mhr_family(m.tag, m.p1, m.p2);
}

std::string family_name(const InstanceFamily& fam) {
  if (std::holds_alternative<GeneralInapprox>(fam)) return "general";
  if (std::holds_alternative<PublicSellerInapprox>(fam)) return "public-seller";
  if (std::holds_alternative<PublicBuyerInapprox>(fam)) return "public-buyer";
  if (std::holds_alternative<SymmetricInapprox>(fam)) return "symmetric";
  if (std::holds_alternative<UniformPair>(fam)) return "uniform";
  return "symmetric-mhr";
}

double family_param(const InstanceFamily& fam) {
  if (const auto* g = std::get_if<GeneralInapprox>(&fam)) return g->b;
  if (const auto* p = std::get_if<PublicSellerInapprox>(&fam)) return p->b;
  if (const auto* p = std::get_if<PublicBuyerInapprox>(&fam)) return p->delta;
  if (const auto* s = std::get_if<SymmetricInapprox>(&fam)) return s->b;
  if (const auto* u = std::get_if<UniformPair>(&fam)) return u->b;
  return 0.0;
}

std::pair<Dist, Dist> mhr_family(const std::string& tag, double p1, double p2) {
  Dist d = [&] {
    if (tag == "uniform") return Dist::uniform(0.0, 1.0);
    if (tag == "trunc-exp") {
      if (p1 <= 0.0 || p2 <= 0.0)
        throw BadFamilyParams("trunc-exp needs rate > 0 and hi > 0");
      return Dist::truncated_exponential(p1, p2);
    }
    if (tag == "linear-density") return Dist::linear_density(p1);
    throw BadFamilyParams("unknown MHR family tag '" + tag + "'");
  }();
  const Regularity reg = classify(d, d);
  if (!(reg.buyer_mhr && reg.seller_mhr))
    throw NotMHR("family '" + tag + "' failed the grid MHR check");
  return {d, d};
}

// ---------------------------------------------------------------------------
// Uniform-vs-uniform case table

namespace {

int case_of(double a, double b) {
  if (a >= 1.0) return 6;
  if (b <= 0.0) return 1;
  if (a <= 0.0 && b <= 1.0) return 2;
  if (a <= 0.0) return 3;
  if (b <= 1.0) return 4;
  return 5;
}

char subcase_of(double a, double b) {
  const double t_a = 0.5 * (1.0 - a);
  const double s = a + t_a, t = b + t_a;
  if (t <= 0.0) return 'a';
  if (s <= 0.0 && t <= 1.0) return 'b';
  if (s <= 0.0) return 'c';
  if (t <= 1.0) return 'd';
  return 'e';
}

double fb_closed(int case_id, double a, double b) {
  switch (case_id) {
    case 1:
      return 0.5 * (1.0 - a - b);
    case 2:
      return (3 * a * a - 3 * a + b * b * b - 3 * b * b + 3 * b) /
             (6.0 * (b - a));
    case 3:
      return (3 * a * a - 3 * a + 1.0) / (6.0 * (b - a));
    case 4:
      return (a * a + a * b + b * b - 3 * a - 3 * b + 3.0) / 6.0;
    case 5: {
      const double u = 1.0 - a;
      return u * u * u / (6.0 * (b - a));
    }
    default:
      return 0.0;
  }
}

double gft_closed(char subcase, double a, double b) {
  switch (subcase) {
    case 'a':
      return 0.5 * (1.0 - a - b);
    case 'b':
      return (a + b - 1.0) *
             (a * a - 4 * a * b + 10 * a + 4 * b * b - 8 * b + 1.0) /
             (24.0 * (b - a));
    case 'c': {
      const double u = 3.0 * a - 1.0;
      return u * u / (24.0 * (b - a));
    }
    case 'd': {
      const double u = a + 2.0 * b - 3.0;
      return u * u / 24.0;
    }
    case 'e': {
      const double u = 1.0 - a;
      return u * u * u / (12.0 * (b - a));
    }
    default:
      return 0.0;
  }
}

const std::set<std::pair<int, char>> kFeasibleCells = {
    {1, 'a'}, {1, 'b'}, {1, 'c'}, {1, 'd'}, {2, 'c'}, {2, 'd'},
    {2, 'e'}, {3, 'c'}, {3, 'e'}, {4, 'd'}, {4, 'e'}, {5, 'e'},
};

double lower_bound_of(int case_id, char subcase) {
  if (case_id == 1) return subcase == 'a' ? 1.0 : 2.0 / 3.0;
  if (subcase == 'c' || subcase == 'd') return 4.0 / 7.0;
  return 0.5;
}

}  // namespace

CaseEval case_eval(double a, double b) {
  if (!(a < b)) throw BadFamilyParams("case table needs a < b");
  const int case_id = case_of(a, b);
  if (case_id == 6) {
    // Supports ordered: the seller never values the item below the buyer's
    // maximum, so nothing can be gained and the bound holds vacuously.
    return CaseEval{CaseCell{6, '-', 1.0}, 0.0, 0.0, 1.0};
  }
  const char subcase = subcase_of(a, b);
  if (!kFeasibleCells.count({case_id, subcase})) {
    std::ostringstream os;
    os << "case " << case_id << "(" << subcase << ") is infeasible";
    throw InfeasibleCell(os.str());
  }
  const double fb = fb_closed(case_id, a, b);
  const double gft = gft_closed(subcase, a, b);
  const double lb = lower_bound_of(case_id, subcase);
  return CaseEval{CaseCell{case_id, subcase, lb}, fb, gft,
                  fb > 1e-15 ? gft / fb : 1.0};
}

std::vector<CaseWitness> case_witnesses(double epsilon) {
  const double e = epsilon;
  return {
      {1, 'a', -3.0, -2.0, 1.0},
      {1, 'b', -1.0, 0.0, 2.0 / 3.0},
      {1, 'c', -1.0 - e, 0.0, 2.0 / 3.0},
      {1, 'd', -1.0 + e, 0.0, 2.0 / 3.0},
      {2, 'c', -1.0, 1.0, 4.0 / 7.0},
      {2, 'd', 0.0, 0.5, 4.0 / 7.0},
      {2, 'e', 0.0, 1.0, 1.0 / 2.0},
      {3, 'c', -1.0, 2.0, 4.0 / 7.0},
      {3, 'e', 0.0, 2.0, 1.0 / 2.0},
      {4, 'd', 1.0 / 3.0, 2.0 / 3.0, 4.0 / 7.0},
      {4, 'e', 0.5, 1.0, 1.0 / 2.0},
      {5, 'e', 0.5, 1.5, 1.0 / 2.0},
  };
}

// ---------------------------------------------------------------------------
// Closed-form proof bounds

ClosedFormBounds closed_form_bounds(const InstanceFamily& fam) {
  ClosedFormBounds out;
  if (const auto* g = std::get_if<GeneralInapprox>(&fam)) {
    const double a = g->a, b = g->b;
    const double gft_cap = a * (3.0 * b - 1.0) / (2.0 * b);
    const double fb = a * (std::log(b / a) + 0.5 / b - 0.5 / a) + gft_cap;
    out.gft_upper = gft_cap;
    out.fb_exact = fb;
    out.fb_lower = fb;
    out.ratio_upper = gft_cap / fb;
    // Social-welfare cap with the seller's support bounded by M = 1.
    const double d = gft_cap / fb;
    out.sw_ratio_upper = (1.0 / fb + d) / (1.0 / fb + 1.0);
    return out;
  }
  if (const auto* p = std::get_if<PublicSellerInapprox>(&fam)) {
    const double a = p->a, b = p->b;
    const double gft = 3.0 * a * (a - 2.0 * b) * (a - 2.0 * b) / (8.0 * b * b);
    const double fb =
        a * (std::log(b / a) + a / b - 1.0) + (1.5 * a - a * a / b);
    out.gft_exact = gft;
    out.gft_upper = gft;
    out.fb_exact = fb;
    out.fb_lower = fb;
    out.ratio_upper = gft / fb;
    const double d = gft / fb;
    out.sw_ratio_upper = (a / fb + d) / (a / fb + 1.0);
    return out;
  }
  if (const auto* p = std::get_if<PublicBuyerInapprox>(&fam)) {
    const double d = p->delta;
    const double h = (2.0 - 3.0 * d) / (1.0 - 2.0 * d);
    const double ar = d * (1.0 - h) * (1.0 - h);
    const double gft = 1.5 * d;
    const double fb = gft + ar * (1.0 / (1.0 - h) - std::log((2.0 - h) / (1.0 - h)));
    out.gft_exact = gft;
    out.gft_upper = gft;
    out.fb_exact = fb;
    out.fb_lower = fb;
    out.ratio_upper = gft / fb;
    return out;
  }
  if (const auto* s = std::get_if<SymmetricInapprox>(&fam)) {
    const double a = s->a, b = s->b;
    out.gft_upper = 1.5 * a + a * a / (6.0 * b);
    out.fb_lower = a * std::log(b) - a * std::log(a) - 2.0 * a -
                   1.5 * a * a / b;
    out.ratio_upper = *out.gft_upper / *out.fb_lower;
    return out;
  }
  throw NoClosedForm(
      "no displayed closed form for this family; use case_eval for uniform "
      "pairs");
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

InstanceFamily make_family(const std::string& name, double a, double param) {
  if (name == "general") return GeneralInapprox{a, param};
  if (name == "public-seller") return PublicSellerInapprox{a, param};
  if (name == "public-buyer") return PublicBuyerInapprox{param};
  if (name == "symmetric") return SymmetricInapprox{a, param};
  if (name == "uniform") return UniformPair{a, param};
  throw BadFamilyParams("unknown sweep family '" + name + "'");
}

}  // namespace

std::vector<BoundReport> sweep(const std::string& family,
                               const std::vector<double>& params,
                               double fixed_a, const QuadConfig& cfg) {
  if (params.empty()) throw BadFamilyParams("sweep needs a nonempty grid");
  std::vector<BoundReport> out(params.size());

  parallel_for(params.size(), [&](size_t i) {
    BoundReport& r = out[i];
    r.family = family;
    r.param = params[i];
    try {
      const InstanceFamily fam = make_family(family, fixed_a, params[i]);
      const auto [F, G] = build(fam);
      TradeMetrics m;
      if (family == "public-seller") {
        m = public_seller_metrics(F, G.atom_location(), cfg);
      } else if (family == "public-buyer") {
        m = public_buyer_metrics(G, F.atom_location(), cfg);
      } else {
        m = optimal_mechanism_metrics(F, G, cfg, /*check_posted_profit=*/false);
      }
      r.fb = m.fb;
      r.gft = m.gft;
      r.profit = m.profit;
      r.ratio = m.ratio;
      if (family == "uniform") {
        const CaseEval ce = case_eval(fixed_a, params[i]);
        r.guaranteed = ce.cell.lower_bound;
        r.upper_bound = false;
        r.tolerance = 1e-9;
        r.passes = r.ratio >= r.guaranteed - r.tolerance;
      } else {
        const ClosedFormBounds cb = closed_form_bounds(fam);
        r.guaranteed = *cb.ratio_upper;
        r.upper_bound = true;
        r.tolerance = 1e-6;
        bool ok = r.ratio <= r.guaranteed + r.tolerance;
        if (cb.gft_upper) ok = ok && r.gft <= *cb.gft_upper + 1e-6;
        if (cb.fb_lower) ok = ok && r.fb >= *cb.fb_lower - 1e-6;
        if (cb.gft_exact) ok = ok && std::fabs(r.gft - *cb.gft_exact) <= 1e-9;
        if (cb.fb_exact)
          ok = ok && std::fabs(r.fb - *cb.fb_exact) <=
                         1e-7 * std::max(1.0, std::fabs(*cb.fb_exact));
        r.passes = ok;
      }
    } catch (const Error& e) {
      r.error = e.what();
      r.passes = false;
    }
  });

  // Inapproximability sweeps must show the ratio decaying toward zero along
  // the grid; a later point may never exceed an earlier one materially.
  if (family != "uniform") {
    for (size_t i = 1; i < out.size(); ++i) {
      if (!out[i].error.empty() || !out[i - 1].error.empty()) continue;
      if (out[i].ratio > out[i - 1].ratio + 1e-6) out[i].passes = false;
    }
  }
  return out;
}

std::string sweep_csv(const std::vector<BoundReport>& reports) {
  std::ostringstream os;
  os << "family,param,fb,gft,profit,ratio,guaranteed,passes\n";
  os.setf(std::ios::scientific);
  os.precision(11);
  for (const BoundReport& r : reports) {
    os << r.family << "," << r.param << "," << r.fb << "," << r.gft << ","
       << r.profit << "," << r.ratio << "," << r.guaranteed << ","
       << (r.passes ? "true" : "false") << "\n";
  }
  return os.str();
}

}  // namespace btl
