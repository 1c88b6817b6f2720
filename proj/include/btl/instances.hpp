#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "btl/dist.hpp"
#include "btl/optimal.hpp"

namespace btl {

// Parameterized generators for every worst-case construction studied here.
struct GeneralInapprox {
  double a, b;  // F = truncER(a, b), G = U[0, 1]; b > a >= 1
};
struct PublicSellerInapprox {
  double a, b;  // F = truncER(a, b), G = point mass at a
};
struct PublicBuyerInapprox {
  double delta;  // G = delta-linear + rational tail, F = point mass at 2
};
struct SymmetricInapprox {
  double a, b;  // F = G = truncER(a, b)
};
struct UniformPair {
  double a, b;  // F = U[0, 1], G = U[a, b]
};
struct SymmetricMHR {
  std::string tag;  // "uniform" | "trunc-exp" | "linear-density"
  double p1 = 0.0, p2 = 0.0;
};

using InstanceFamily =
    std::variant<GeneralInapprox, PublicSellerInapprox, PublicBuyerInapprox,
                 SymmetricInapprox, UniformPair, SymmetricMHR>;

std::pair<Dist, Dist> build(const InstanceFamily& fam);
std::string family_name(const InstanceFamily& fam);
double family_param(const InstanceFamily& fam);

// Symmetric MHR pair (F = G); throws NotMHR if the grid check fails.
std::pair<Dist, Dist> mhr_family(const std::string& tag, double p1 = 0.0,
                                 double p2 = 0.0);

// One cell of the uniform-vs-uniform case analysis.
struct CaseCell {
  int case_id;            // 1..6
  char subcase;           // 'a'..'e', '-' for the degenerate case 6
  double lower_bound;     // guaranteed GFT/FB for the cell
};

struct CaseEval {
  CaseCell cell;
  double fb;
  double gft;
  double ratio;
};

// Closed-form FB/GFT/ratio of the broker-optimal mechanism for F = U[0,1],
// G = U[a,b], classified into the case table. Boundary ties follow the
// printed inequality conventions: cases test b<=0, a<=0, b<=1, a>=1 with <=
// on the left; subcases test s=a+T, t=b+T against 0 and 1 with (a) t<=0,
// (b) s<=0<t<=1, (c) s<=0, t>1, (d) s>0, t<=1, (e) s>0, t>1, T=(1-a)/2.
CaseEval case_eval(double a, double b);

// All feasible (case, subcase) cells with their tightness witnesses.
struct CaseWitness {
  int case_id;
  char subcase;
  double a, b;
  double lower_bound;
};
std::vector<CaseWitness> case_witnesses(double epsilon = 1e-4);

struct ClosedFormBounds {
  std::optional<double> gft_upper;      // proven cap on the mechanism's GFT
  std::optional<double> gft_exact;      // exact value when the proof gives one
  std::optional<double> fb_exact;
  std::optional<double> fb_lower;
  std::optional<double> ratio_upper;
  std::optional<double> sw_ratio_upper; // (M/FB + d)/(M/FB + 1) cap
};

// Evaluates the displayed closed forms of the inapproximability proofs at
// the family's parameters; NoClosedForm for UniformPair / SymmetricMHR.
ClosedFormBounds closed_form_bounds(const InstanceFamily& fam);

struct BoundReport {
  std::string family;
  double param;
  double fb = 0.0;
  double gft = 0.0;
  double profit = 0.0;
  double ratio = 0.0;
  double guaranteed = 0.0;  // cap (upper families) or floor (lower families)
  bool upper_bound = true;  // direction of the guarantee
  bool passes = false;
  double tolerance = 1e-6;
  std::string error;  // nonempty when the point failed to evaluate
};

// Builds and measures each parameter point, compares against the closed
// forms, and checks that measured ratios decrease monotonically along the
// sweep (each successive ratio <= previous + 1e-6). A failing point is
// reported, not fatal.
std::vector<BoundReport> sweep(const std::string& family,
                               const std::vector<double>& params,
                               double fixed_a = 1.0,
                               const QuadConfig& cfg = {});

std::string sweep_csv(const std::vector<BoundReport>& reports);

}  // namespace btl
