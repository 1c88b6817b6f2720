#pragma once

#include <optional>
#include <string>
#include <vector>

#include "btl/piece.hpp"

namespace btl {

// Regularity / MHR certification of a (buyer, seller) distribution pair,
// decided by grid sampling (4096 points per piece plus piece endpoints).
struct Regularity {
  bool buyer_regular = false;
  bool seller_regular = false;
  bool buyer_mhr = false;
  bool seller_mhr = false;
  double hazard_sup_M = 0.0;  // +inf when the grid max exceeds 1e12
  bool atomic = false;        // set when either input carries an atom
};

// A piecewise-analytic probability distribution on a bounded interval, or a
// point mass. Immutable after construction; all operations are pure.
class Dist {
 public:
  // Named constructors for the shipped shapes.
  static Dist uniform(double a, double b);
  static Dist point_mass(double t);
  // Exponential truncated to [0, hi] and renormalized.
  static Dist truncated_exponential(double rate, double hi);
  // Equal-revenue CDF 1 - a/x on [a, b] extended by its tangent line on
  // [b, 2b], reaching 1 at 2b.
  static Dist equal_revenue_with_tail(double a, double b);
  // Density delta on [0, 1] followed by a rational tail on [1, 2] chosen so
  // the CDF and its slope are continuous at 1 and reach 1 at 2. 0 < delta < 1/2.
  static Dist public_buyer_linear_rational(double delta);
  // Linear density f(x) = (1 - slope/2) + slope*x on [0, 1], slope in [0, 2].
  static Dist linear_density(double slope);
  // Arbitrary contiguous composition; validates all CDF invariants.
  static Dist from_pieces(std::vector<Piece> pieces);

  // Parses the one-line distribution grammar:
  //   uniform:a=<r>,b=<r> | pointmass:t=<r> | exp:rate=<r>,hi=<r> |
  //   truncER:a=<r>,b=<r> | publicbuyerG:delta=<r> | inline JSON {"pieces":[...]}
  // Reals also accept e^<r> and exp(<r>).
  static Dist parse(const std::string& spec);

  double cdf(double x) const;
  double pdf(double x) const;          // throws NoDensity for point masses
  double survival(double x) const;     // P(X >= x); counts an atom at x
  double quantile(double alpha) const; // inf{t : F(t) >= alpha}, alpha in (0,1]

  double virtual_buyer(double x) const;   // x - (1-F)/f
  double virtual_seller(double x) const;  // x + F/f
  double hazard_buyer(double x) const;    // f/(1-F), +inf where 1-F == 0
  double hazard_seller(double x) const;   // f/F,    +inf where F == 0

  double expectation() const;

  // E[(X - p) 1{X >= p}]  = ∫_p^hi (1-F) for continuous parts, atoms included.
  double expected_excess_above(double p) const;
  // E[(q - X) 1{X <= q}]  = ∫_lo^q F for continuous parts, atoms included.
  double expected_slack_below(double q) const;
  // E[X 1{X >= t}] and E[X 1{X <= t}].
  double partial_mean_above(double t) const;
  double partial_mean_below(double t) const;

  double support_lo() const { return support_lo_; }
  double support_hi() const { return support_hi_; }
  bool is_point_mass() const { return atom_.has_value(); }
  double atom_location() const { return *atom_; }

  // x -> k2 * x + k1 applied to the random variable (k2 > 0).
  Dist affine(double k1, double k2) const;

  const std::vector<Piece>& pieces() const { return pieces_; }
  // Piece joints plus support endpoints, ascending.
  std::vector<double> breakpoints() const;

  std::string spec_string() const { return spec_; }

 private:
  Dist() = default;
  void validate() const;
  const Piece& piece_at(double x) const;

  std::vector<Piece> pieces_;
  std::optional<double> atom_;
  double support_lo_ = 0.0;
  double support_hi_ = 0.0;
  std::string spec_;
};

// Grid-sampled regularity/MHR certification of a buyer/seller pair.
Regularity classify(const Dist& buyer, const Dist& seller,
                    int grid_per_piece = 4096);

}  // namespace btl
