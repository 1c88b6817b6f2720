#include "btl/piece.hpp"

#include <algorithm>
#include <stdexcept>

#include "btl/errors.hpp"

namespace btl {

namespace {

struct CdfVisitor {
  double x;
  double operator()(const UniformPiece& p) const {
    return (x - p.a) / (p.b - p.a);
  }
  double operator()(const EqualRevenuePiece& p) const { return 1.0 - p.a / x; }
  double operator()(const LinearPiece& p) const {
    return p.c0 + p.slope * (x - p.x0);
  }
  double operator()(const ExponentialPiece& p) const {
    return p.scale * (1.0 - std::exp(-p.rate * (x - p.x0)));
  }
  double operator()(const RationalTailPiece& p) const {
    return p.k - p.a / (x - p.h);
  }
  double operator()(const QuadraticPiece& p) const {
    const double d = x - p.x0;
    return p.c0 + p.f0 * d + 0.5 * p.slope * d * d;
  }
};

struct PdfVisitor {
  double x;
  double operator()(const UniformPiece& p) const { return 1.0 / (p.b - p.a); }
  double operator()(const EqualRevenuePiece& p) const { return p.a / (x * x); }
  double operator()(const LinearPiece& p) const { return p.slope; }
  double operator()(const ExponentialPiece& p) const {
    return p.scale * p.rate * std::exp(-p.rate * (x - p.x0));
  }
  double operator()(const RationalTailPiece& p) const {
    const double d = x - p.h;
    return p.a / (d * d);
  }
  double operator()(const QuadraticPiece& p) const {
    return p.f0 + p.slope * (x - p.x0);
  }
};

struct SurvivalOverPdfVisitor {
  double x;
  double operator()(const UniformPiece& p) const { return p.b - x; }
  double operator()(const EqualRevenuePiece&) const { return x; }
  double operator()(const LinearPiece& p) const {
    return (1.0 - p.c0) / p.slope - (x - p.x0);
  }
  double operator()(const ExponentialPiece& p) const {
    // 1 - F = (1 - scale) + scale e^{-r d}
    const double d = x - p.x0;
    return (1.0 - p.scale) * std::exp(p.rate * d) / (p.scale * p.rate) +
           1.0 / p.rate;
  }
  double operator()(const RationalTailPiece& p) const {
    const double d = x - p.h;
    return d * ((1.0 - p.k) * d + p.a) / p.a;
  }
  double operator()(const QuadraticPiece& p) const {
    const double d = x - p.x0;
    const double f = p.f0 + p.slope * d;
    return (1.0 - (p.c0 + d * (p.f0 + 0.5 * p.slope * d))) / f;
  }
};

struct CdfOverPdfVisitor {
  double x;
  double operator()(const UniformPiece& p) const { return x - p.a; }
  double operator()(const EqualRevenuePiece& p) const {
    return x * (x - p.a) / p.a;
  }
  double operator()(const LinearPiece& p) const {
    return p.c0 / p.slope + (x - p.x0);
  }
  double operator()(const ExponentialPiece& p) const {
    return std::expm1(p.rate * (x - p.x0)) / p.rate;
  }
  double operator()(const RationalTailPiece& p) const {
    const double d = x - p.h;
    return d * (p.k * d - p.a) / p.a;
  }
  double operator()(const QuadraticPiece& p) const {
    const double d = x - p.x0;
    const double f = p.f0 + p.slope * d;
    return (p.c0 + d * (p.f0 + 0.5 * p.slope * d)) / f;
  }
};

struct QuantileVisitor {
  double u;
  double operator()(const UniformPiece& p) const {
    return p.a + u * (p.b - p.a);
  }
  double operator()(const EqualRevenuePiece& p) const {
    return p.a / (1.0 - u);
  }
  double operator()(const LinearPiece& p) const {
    return p.x0 + (u - p.c0) / p.slope;
  }
  double operator()(const ExponentialPiece& p) const {
    return p.x0 - std::log1p(-u / p.scale) / p.rate;
  }
  double operator()(const RationalTailPiece& p) const {
    return p.h + p.a / (p.k - u);
  }
  double operator()(const QuadraticPiece& p) const {
    // Stable root of slope/2 d^2 + f0 d - (u - c0) = 0 continuous at slope=0.
    const double rhs = u - p.c0;
    const double disc = p.f0 * p.f0 + 2.0 * p.slope * rhs;
    const double root = std::sqrt(std::max(disc, 0.0));
    const double denom = p.f0 + root;
    if (denom <= 0.0) {
      // f0 == 0 and slope < 0 cannot produce mass; guarded by validate().
      return p.x0;
    }
    return p.x0 + 2.0 * rhs / denom;
  }
};

struct CdfIntegralVisitor {
  double x0, x1;
  double operator()(const UniformPiece& p) const {
    auto anti = [&](double x) {
      const double d = x - p.a;
      return 0.5 * d * d / (p.b - p.a);
    };
    return anti(x1) - anti(x0);
  }
  double operator()(const EqualRevenuePiece& p) const {
    auto anti = [&](double x) { return x - p.a * std::log(x); };
    return anti(x1) - anti(x0);
  }
  double operator()(const LinearPiece& p) const {
    auto anti = [&](double x) {
      const double d = x - p.x0;
      return p.c0 * x + 0.5 * p.slope * d * d;
    };
    return anti(x1) - anti(x0);
  }
  double operator()(const ExponentialPiece& p) const {
    auto anti = [&](double x) {
      return p.scale * (x + std::exp(-p.rate * (x - p.x0)) / p.rate);
    };
    return anti(x1) - anti(x0);
  }
  double operator()(const RationalTailPiece& p) const {
    auto anti = [&](double x) {
      return p.k * x - p.a * std::log(std::fabs(x - p.h));
    };
    return anti(x1) - anti(x0);
  }
  double operator()(const QuadraticPiece& p) const {
    auto anti = [&](double x) {
      const double d = x - p.x0;
      return p.c0 * x + 0.5 * p.f0 * d * d + p.slope * d * d * d / 6.0;
    };
    return anti(x1) - anti(x0);
  }
};

struct MeanIntegralVisitor {
  double x0, x1;
  double operator()(const UniformPiece& p) const {
    return 0.5 * (x1 * x1 - x0 * x0) / (p.b - p.a);
  }
  double operator()(const EqualRevenuePiece& p) const {
    return p.a * std::log(x1 / x0);
  }
  double operator()(const LinearPiece& p) const {
    return 0.5 * p.slope * (x1 * x1 - x0 * x0);
  }
  double operator()(const ExponentialPiece& p) const {
    auto anti = [&](double x) {
      return -p.scale * (x + 1.0 / p.rate) * std::exp(-p.rate * (x - p.x0));
    };
    return anti(x1) - anti(x0);
  }
  double operator()(const RationalTailPiece& p) const {
    auto anti = [&](double x) {
      const double d = x - p.h;
      return p.a * (std::log(std::fabs(d)) - p.h / d);
    };
    return anti(x1) - anti(x0);
  }
  double operator()(const QuadraticPiece& p) const {
    // ∫ x (f0 + slope (x - x0)) dx
    auto anti = [&](double x) {
      return 0.5 * p.f0 * x * x +
             p.slope * (x * x * x / 3.0 - 0.5 * p.x0 * x * x);
    };
    return anti(x1) - anti(x0);
  }
};

struct KindNameVisitor {
  std::string operator()(const UniformPiece&) const { return "uniform"; }
  std::string operator()(const EqualRevenuePiece&) const {
    return "equal_revenue";
  }
  std::string operator()(const LinearPiece&) const { return "linear"; }
  std::string operator()(const ExponentialPiece&) const {
    return "exponential";
  }
  std::string operator()(const RationalTailPiece&) const {
    return "rational_tail";
  }
  std::string operator()(const QuadraticPiece&) const { return "quadratic"; }
};

}  // namespace

double Piece::cdf(double x) const { return std::visit(CdfVisitor{x}, params); }

double Piece::pdf(double x) const { return std::visit(PdfVisitor{x}, params); }

double Piece::survival_over_pdf(double x) const {
  return std::visit(SurvivalOverPdfVisitor{x}, params);
}

double Piece::cdf_over_pdf(double x) const {
  return std::visit(CdfOverPdfVisitor{x}, params);
}

double Piece::quantile(double u) const {
  return std::visit(QuantileVisitor{u}, params);
}

double Piece::cdf_integral(double x0, double x1) const {
  if (x1 <= x0) return 0.0;
  return std::visit(CdfIntegralVisitor{x0, x1}, params);
}

double Piece::mean_integral(double x0, double x1) const {
  if (x1 <= x0) return 0.0;
  return std::visit(MeanIntegralVisitor{x0, x1}, params);
}

std::string Piece::kind_name() const {
  return std::visit(KindNameVisitor{}, params);
}

void Piece::validate() const {
  if (!(lo < hi)) throw InvalidDist("piece has empty interval [lo, hi)");
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidDist("piece bounds must be finite");
  if (const auto* u = std::get_if<UniformPiece>(&params)) {
    if (!(u->a < u->b)) throw InvalidDist("uniform piece needs a < b");
  } else if (const auto* er = std::get_if<EqualRevenuePiece>(&params)) {
    if (!(er->a > 0.0)) throw InvalidDist("equal-revenue piece needs a > 0");
    if (!(lo > 0.0)) throw InvalidDist("equal-revenue piece needs lo > 0");
  } else if (const auto* l = std::get_if<LinearPiece>(&params)) {
    if (!(l->slope > 0.0)) throw InvalidDist("linear piece needs slope > 0");
  } else if (const auto* e = std::get_if<ExponentialPiece>(&params)) {
    if (!(e->rate > 0.0 && e->scale > 0.0))
      throw InvalidDist("exponential piece needs rate > 0, scale > 0");
  } else if (const auto* r = std::get_if<RationalTailPiece>(&params)) {
    if (!(r->a > 0.0)) throw InvalidDist("rational-tail piece needs a > 0");
    if (r->h >= lo && r->h <= hi)
      throw InvalidDist("rational-tail pole lies inside the segment");
  } else if (const auto* q = std::get_if<QuadraticPiece>(&params)) {
    // Density must stay nonnegative across the segment.
    if (pdf(lo) < 0.0 || pdf(hi) < 0.0)
      throw InvalidDist("quadratic piece has negative density");
    (void)q;
  }
  if (!(cdf(hi) >= cdf(lo)))
    throw InvalidDist("piece CDF is decreasing on its segment");
}

Piece affine_transform(const Piece& p, double k1, double k2) {
  Piece out = p;
  out.lo = k2 * p.lo + k1;
  out.hi = k2 * p.hi + k1;
  if (const auto* u = std::get_if<UniformPiece>(&p.params)) {
    out.params = UniformPiece{k2 * u->a + k1, k2 * u->b + k1};
  } else if (const auto* er = std::get_if<EqualRevenuePiece>(&p.params)) {
    // 1 - a / ((y - k1)/k2) = 1 - a k2 / (y - k1): a rational tail with k = 1.
    out.params = RationalTailPiece{1.0, er->a * k2, k1};
  } else if (const auto* l = std::get_if<LinearPiece>(&p.params)) {
    out.params = LinearPiece{l->c0, l->slope / k2, k2 * l->x0 + k1};
  } else if (const auto* e = std::get_if<ExponentialPiece>(&p.params)) {
    out.params = ExponentialPiece{e->rate / k2, e->scale, k2 * e->x0 + k1};
  } else if (const auto* r = std::get_if<RationalTailPiece>(&p.params)) {
    out.params = RationalTailPiece{r->k, r->a * k2, k2 * r->h + k1};
  } else if (const auto* q = std::get_if<QuadraticPiece>(&p.params)) {
    out.params = QuadraticPiece{q->c0, q->f0 / k2, q->slope / (k2 * k2),
                                k2 * q->x0 + k1};
  }
  return out;
}

}  // namespace btl
