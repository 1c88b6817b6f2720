#include "btl/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "btl/errors.hpp"

namespace btl {

namespace {
constexpr double kJointTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

Dist Dist::uniform(double a, double b) {
  if (!(a < b)) throw InvalidDist("uniform needs a < b");
  Dist d;
  d.pieces_ = {Piece{a, b, UniformPiece{a, b}}};
  d.support_lo_ = a;
  d.support_hi_ = b;
  std::ostringstream os;
  os << "uniform:a=" << a << ",b=" << b;
  d.spec_ = os.str();
  d.validate();
  return d;
}

Dist Dist::point_mass(double t) {
  if (!(t >= 0.0)) throw InvalidDist("point mass needs t >= 0");
  Dist d;
  d.atom_ = t;
  d.support_lo_ = t;
  d.support_hi_ = t;
  std::ostringstream os;
  os << "pointmass:t=" << t;
  d.spec_ = os.str();
  return d;
}

Dist Dist::truncated_exponential(double rate, double hi) {
  if (!(rate > 0.0 && hi > 0.0))
    throw InvalidDist("truncated exponential needs rate > 0, hi > 0");
  const double scale = 1.0 / (1.0 - std::exp(-rate * hi));
  Dist d;
  d.pieces_ = {Piece{0.0, hi, ExponentialPiece{rate, scale, 0.0}}};
  d.support_lo_ = 0.0;
  d.support_hi_ = hi;
  std::ostringstream os;
  os << "exp:rate=" << rate << ",hi=" << hi;
  d.spec_ = os.str();
  d.validate();
  return d;
}

Dist Dist::equal_revenue_with_tail(double a, double b) {
  if (!(b > a && a > 0.0))
    throw InvalidDist("equal-revenue-with-tail needs b > a > 0");
  Dist d;
  const double cb = 1.0 - a / b;          // CDF at the truncation point
  const double slope = a / (b * b);       // tangent slope there
  d.pieces_ = {Piece{a, b, EqualRevenuePiece{a}},
               Piece{b, 2.0 * b, LinearPiece{cb, slope, b}}};
  d.support_lo_ = a;
  d.support_hi_ = 2.0 * b;
  std::ostringstream os;
  os << "truncER:a=" << a << ",b=" << b;
  d.spec_ = os.str();
  d.validate();
  return d;
}

Dist Dist::public_buyer_linear_rational(double delta) {
  if (!(delta > 0.0 && delta < 0.5))
    throw InvalidDist("public-buyer G needs 0 < delta < 1/2");
  const double h = (2.0 - 3.0 * delta) / (1.0 - 2.0 * delta);
  const double a = delta * (1.0 - h) * (1.0 - h);
  const double k = delta * (2.0 - h);
  Dist d;
  d.pieces_ = {Piece{0.0, 1.0, LinearPiece{0.0, delta, 0.0}},
               Piece{1.0, 2.0, RationalTailPiece{k, a, h}}};
  d.support_lo_ = 0.0;
  d.support_hi_ = 2.0;
  std::ostringstream os;
  os << "publicbuyerG:delta=" << delta;
  d.spec_ = os.str();
  d.validate();
  return d;
}

Dist Dist::linear_density(double slope) {
  if (!(slope >= 0.0 && slope <= 2.0))
    throw InvalidDist("linear density slope must lie in [0, 2]");
  Dist d;
  if (slope == 0.0) return uniform(0.0, 1.0);
  d.pieces_ = {Piece{0.0, 1.0, QuadraticPiece{0.0, 1.0 - slope / 2.0, slope, 0.0}}};
  d.support_lo_ = 0.0;
  d.support_hi_ = 1.0;
  std::ostringstream os;
  os << "lindens:slope=" << slope;
  d.spec_ = os.str();
  d.validate();
  return d;
}

Dist Dist::from_pieces(std::vector<Piece> pieces) {
  if (pieces.empty()) throw InvalidDist("no pieces");
  Dist d;
  d.pieces_ = std::move(pieces);
  d.support_lo_ = d.pieces_.front().lo;
  d.support_hi_ = d.pieces_.back().hi;
  d.spec_ = "pieces";
  d.validate();
  return d;
}

void Dist::validate() const {
  double prev_hi = pieces_.front().lo;
  double prev_cdf = 0.0;
  for (const Piece& p : pieces_) {
    p.validate();
    if (std::fabs(p.lo - prev_hi) > kJointTol)
      throw InvalidDist("pieces are not contiguous");
    if (std::fabs(p.cdf(p.lo) - prev_cdf) > kJointTol)
      throw InvalidDist("CDF is discontinuous at a piece joint");
    prev_hi = p.hi;
    prev_cdf = p.cdf(p.hi);
  }
  if (std::fabs(pieces_.front().cdf(support_lo_)) > kJointTol)
    throw InvalidDist("CDF does not start at 0");
  if (std::fabs(prev_cdf - 1.0) > kJointTol)
    throw InvalidDist("CDF does not reach 1");
  // Negative support only arises for the normalized uniform instances.
  if (support_lo_ < 0.0) {
    for (const Piece& p : pieces_)
      if (!std::holds_alternative<UniformPiece>(p.params))
        throw InvalidDist("negative support is only valid for uniform pieces");
  }
  // PDF nonnegative across each piece (the CDF<->PDF quadrature consistency
  // invariant is exercised by the test suite, not re-checked per construction).
  for (const Piece& p : pieces_) {
    const double mid = 0.5 * (p.lo + p.hi);
    for (double x : {p.lo, mid, p.hi}) {
      if (p.pdf(x) < -1e-12) throw InvalidDist("negative density");
    }
    if (p.cdf(p.hi) - p.cdf(p.lo) < -1e-12)
      throw InvalidDist("piece loses mass");
  }
}

const Piece& Dist::piece_at(double x) const {
  // Boundaries resolve to the right piece, except support_hi -> last piece.
  for (size_t i = 0; i + 1 < pieces_.size(); ++i) {
    if (x < pieces_[i].hi) return pieces_[i];
  }
  return pieces_.back();
}

double Dist::cdf(double x) const {
  if (atom_) return x < *atom_ ? 0.0 : 1.0;
  if (x <= support_lo_) return x < support_lo_ ? 0.0 : pieces_.front().cdf(x);
  if (x >= support_hi_) return 1.0;
  return piece_at(x).cdf(x);
}

double Dist::survival(double x) const {
  if (atom_) return x <= *atom_ ? 1.0 : 0.0;
  return 1.0 - cdf(x);
}

double Dist::pdf(double x) const {
  if (atom_) throw NoDensity("point mass has no density");
  if (x < support_lo_ || x > support_hi_) return 0.0;
  return piece_at(x).pdf(x);
}

double Dist::quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidQuantile("quantile level must lie in (0, 1]");
  if (atom_) return *atom_;
  for (const Piece& p : pieces_) {
    const double chi = p.cdf(p.hi);
    if (alpha <= chi + kJointTol) {
      const double clo = p.cdf(p.lo);
      if (alpha <= clo) return p.lo;
      const double u = std::min(alpha, chi);
      double x = p.quantile(u);
      x = std::clamp(x, p.lo, p.hi);
      // Closed forms can drift at the last ulp; one bisection pass repairs it.
      if (std::fabs(p.cdf(x) - u) > kJointTol) {
        double lo = p.lo, hi = p.hi;
        for (int it = 0; it < 200 && hi - lo > kJointTol * std::max(1.0, std::fabs(hi)); ++it) {
          const double mid = 0.5 * (lo + hi);
          (p.cdf(mid) >= u ? hi : lo) = mid;
        }
        x = hi;
      }
      return x;
    }
  }
  return support_hi_;
}

double Dist::virtual_buyer(double x) const {
  if (atom_ || x < support_lo_ || x > support_hi_)
    throw NoDensity("no density at x");
  const Piece& p = piece_at(x);
  if (p.pdf(x) <= 0.0) throw NoDensity("no density at x");
  return x - p.survival_over_pdf(x);
}

double Dist::virtual_seller(double x) const {
  if (atom_ || x < support_lo_ || x > support_hi_)
    throw NoDensity("no density at x");
  const Piece& p = piece_at(x);
  if (p.pdf(x) <= 0.0) throw NoDensity("no density at x");
  return x + p.cdf_over_pdf(x);
}

double Dist::hazard_buyer(double x) const {
  if (atom_) throw NoDensity("point mass has no density");
  if (x < support_lo_ || x > support_hi_) return 0.0;
  const double s = piece_at(x).survival_over_pdf(x);
  // 0/0 at a support endpoint diverges in the limit; f = 0 inside gives 0.
  if (std::isnan(s) || s <= 0.0) return kInf;
  return 1.0 / s;  // s = +inf (zero density) correctly yields 0
}

double Dist::hazard_seller(double x) const {
  if (atom_) throw NoDensity("point mass has no density");
  if (x < support_lo_ || x > support_hi_) return 0.0;
  const double c = piece_at(x).cdf_over_pdf(x);
  if (std::isnan(c) || c <= 0.0) return kInf;
  return 1.0 / c;
}

double Dist::expectation() const {
  if (atom_) return *atom_;
  double e = 0.0;
  for (const Piece& p : pieces_) e += p.mean_integral(p.lo, p.hi);
  return e;
}

double Dist::expected_excess_above(double p) const {
  if (atom_) return *atom_ >= p ? *atom_ - p : 0.0;
  if (p >= support_hi_) return 0.0;
  const double lo = std::max(p, support_lo_);
  // ∫_lo^hi (1 - F) dx, plus the full overhang when p is below the support.
  double r = (support_lo_ > p) ? (support_lo_ - p) : 0.0;
  for (const Piece& q : pieces_) {
    const double a = std::max(lo, q.lo), b = q.hi;
    if (a >= b) continue;
    r += (b - a) - q.cdf_integral(a, b);
  }
  return r;
}

double Dist::expected_slack_below(double q) const {
  if (atom_) return *atom_ <= q ? q - *atom_ : 0.0;
  if (q <= support_lo_) return 0.0;
  double r = (q > support_hi_) ? (q - support_hi_) : 0.0;
  for (const Piece& p : pieces_) {
    const double a = p.lo, b = std::min(q, p.hi);
    if (a >= b) continue;
    r += p.cdf_integral(a, b);
  }
  return r;
}

double Dist::partial_mean_above(double t) const {
  if (atom_) return *atom_ >= t ? *atom_ : 0.0;
  double r = 0.0;
  for (const Piece& p : pieces_) {
    const double a = std::max(t, p.lo), b = p.hi;
    if (a >= b) continue;
    r += p.mean_integral(a, b);
  }
  return r;
}

double Dist::partial_mean_below(double t) const {
  if (atom_) return *atom_ <= t ? *atom_ : 0.0;
  double r = 0.0;
  for (const Piece& p : pieces_) {
    const double a = p.lo, b = std::min(t, p.hi);
    if (a >= b) continue;
    r += p.mean_integral(a, b);
  }
  return r;
}

Dist Dist::affine(double k1, double k2) const {
  if (!(k2 > 0.0)) throw InvalidDist("affine map needs k2 > 0");
  Dist d;
  if (atom_) return point_mass(k2 * *atom_ + k1);
  d.pieces_.reserve(pieces_.size());
  for (const Piece& p : pieces_) d.pieces_.push_back(affine_transform(p, k1, k2));
  d.support_lo_ = d.pieces_.front().lo;
  d.support_hi_ = d.pieces_.back().hi;
  d.spec_ = spec_ + "(affine)";
  d.validate();
  return d;
}

std::vector<double> Dist::breakpoints() const {
  std::vector<double> b;
  if (atom_) {
    b.push_back(*atom_);
    return b;
  }
  b.push_back(support_lo_);
  for (const Piece& p : pieces_) b.push_back(p.hi);
  return b;
}

// ---------------------------------------------------------------------------
// classify

namespace {

// Monotonicity with a small relative slack so closed-form roundoff (e.g. the
// identically-zero virtual value on equal-revenue pieces) is not flagged.
bool nondecreasing(const std::vector<double>& v) {
  double scale = 1.0;
  for (double x : v)
    if (std::isfinite(x)) scale = std::max(scale, std::fabs(x));
  const double tol = 1e-9 * scale;
  for (size_t i = 1; i < v.size(); ++i) {
    if (std::isnan(v[i]) || std::isnan(v[i - 1])) return false;
    if (v[i] < v[i - 1] - tol) return false;
  }
  return true;
}

bool nonincreasing(std::vector<double> v) {
  std::reverse(v.begin(), v.end());
  return nondecreasing(v);
}

}  // namespace

Regularity classify(const Dist& buyer, const Dist& seller, int grid_per_piece) {
  Regularity r;
  if (buyer.is_point_mass() || seller.is_point_mass()) {
    r.atomic = true;
    r.hazard_sup_M = kInf;
    return r;
  }
  auto grid_of = [&](const Dist& d) {
    std::vector<double> xs;
    for (const Piece& p : d.pieces()) {
      xs.push_back(p.lo);
      for (int i = 1; i < grid_per_piece; ++i)
        xs.push_back(p.lo + (p.hi - p.lo) * i / grid_per_piece);
      xs.push_back(p.hi);
    }
    return xs;
  };

  const auto bx = grid_of(buyer);
  std::vector<double> phi_b, hb;
  phi_b.reserve(bx.size());
  hb.reserve(bx.size());
  for (double x : bx) {
    const double f = buyer.pdf(x);
    phi_b.push_back(f > 0.0 ? buyer.virtual_buyer(x) : std::nan(""));
    hb.push_back(buyer.hazard_buyer(x));
  }
  // Zero density at an interior grid point makes the virtual value undefined
  // there; skip NaNs that sit at segment ends where the density vanishes.
  auto drop_nans = [](std::vector<double>& v) {
    v.erase(std::remove_if(v.begin(), v.end(),
                           [](double x) { return std::isnan(x); }),
            v.end());
  };
  drop_nans(phi_b);
  r.buyer_regular = nondecreasing(phi_b);
  r.buyer_mhr = nondecreasing(hb);

  const auto sx = grid_of(seller);
  std::vector<double> phi_s, hs;
  phi_s.reserve(sx.size());
  hs.reserve(sx.size());
  for (double x : sx) {
    const double f = seller.pdf(x);
    phi_s.push_back(f > 0.0 ? seller.virtual_seller(x) : std::nan(""));
    hs.push_back(seller.hazard_seller(x));
  }
  drop_nans(phi_s);
  r.seller_regular = nondecreasing(phi_s);
  r.seller_mhr = nonincreasing(hs);

  double sup = 0.0;
  for (double h : hb) sup = std::max(sup, h);
  for (double h : hs) sup = std::max(sup, h);
  r.hazard_sup_M = sup > 1e12 ? kInf : sup;
  return r;
}

// ---------------------------------------------------------------------------
// grammar

namespace {

double parse_real(const std::string& tok) {
  std::string s = tok;
  bool take_exp = false;
  if (s.rfind("e^", 0) == 0) {
    take_exp = true;
    s = s.substr(2);
  } else if (s.rfind("exp(", 0) == 0 && s.back() == ')') {
    take_exp = true;
    s = s.substr(4, s.size() - 5);
  }
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected a real number, got '" + tok + "'");
  }
  if (pos != s.size())
    throw ParseError("trailing characters in number '" + tok + "'");
  return take_exp ? std::exp(v) : v;
}

std::map<std::string, double> parse_kv(const std::string& body) {
  std::map<std::string, double> kv;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key=value, got '" + item + "'");
    kv[item.substr(0, eq)] = parse_real(item.substr(eq + 1));
  }
  return kv;
}

double require(const std::map<std::string, double>& kv, const std::string& k,
               const std::string& what) {
  auto it = kv.find(k);
  if (it == kv.end())
    throw ParseError("missing parameter '" + k + "' in " + what + " spec");
  return it->second;
}

Dist parse_json_pieces(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid JSON distribution: ") + e.what());
  }
  if (j.contains("pointmass")) return Dist::point_mass(j["pointmass"].get<double>());
  if (!j.contains("pieces") || !j["pieces"].is_array())
    throw ParseError("JSON distribution needs a 'pieces' array");
  std::vector<Piece> pieces;
  for (const auto& jp : j["pieces"]) {
    const std::string kind = jp.at("kind").get<std::string>();
    const double lo = jp.at("lo").get<double>();
    const double hi = jp.at("hi").get<double>();
    PieceParams params;
    if (kind == "uniform") {
      params = UniformPiece{jp.at("a").get<double>(), jp.at("b").get<double>()};
    } else if (kind == "equal_revenue") {
      params = EqualRevenuePiece{jp.at("a").get<double>()};
    } else if (kind == "linear") {
      params = LinearPiece{jp.at("c0").get<double>(), jp.at("slope").get<double>(),
                           jp.value("x0", lo)};
    } else if (kind == "exponential") {
      params = ExponentialPiece{jp.at("rate").get<double>(),
                                jp.value("scale", 1.0), jp.value("x0", 0.0)};
    } else if (kind == "rational_tail") {
      params = RationalTailPiece{jp.at("k").get<double>(), jp.at("a").get<double>(),
                                 jp.at("h").get<double>()};
    } else if (kind == "quadratic") {
      params = QuadraticPiece{jp.at("c0").get<double>(), jp.at("f0").get<double>(),
                              jp.at("slope").get<double>(), jp.value("x0", lo)};
    } else {
      throw ParseError("unknown piece kind '" + kind + "'");
    }
    pieces.push_back(Piece{lo, hi, params});
  }
  return Dist::from_pieces(std::move(pieces));
}

}  // namespace

Dist Dist::parse(const std::string& spec) {
  if (!spec.empty() && spec.front() == '{') return parse_json_pieces(spec);
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ParseError("expected '<family>:<params>' or inline JSON, got '" +
                     spec + "'");
  const std::string family = spec.substr(0, colon);
  const auto kv = parse_kv(spec.substr(colon + 1));
  if (family == "uniform")
    return uniform(require(kv, "a", family), require(kv, "b", family));
  if (family == "pointmass") return point_mass(require(kv, "t", family));
  if (family == "exp")
    return truncated_exponential(require(kv, "rate", family),
                                 require(kv, "hi", family));
  if (family == "truncER")
    return equal_revenue_with_tail(require(kv, "a", family),
                                   require(kv, "b", family));
  if (family == "publicbuyerG")
    return public_buyer_linear_rational(require(kv, "delta", family));
  if (family == "lindens") return linear_density(require(kv, "slope", family));
  throw ParseError("unknown distribution family '" + family + "'");
}

}  // namespace btl
