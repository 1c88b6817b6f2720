#pragma once

#include <cmath>
#include <string>
#include <variant>

namespace btl {

// Analytic CDF segments. Each kind stores the parameters of a closed-form
// CDF evaluated in absolute terms (not conditional on the piece), so a
// composite distribution is just a contiguous list of segments whose CDF
// values agree at the joints.

// F(x) = (x - a) / (b - a)
struct UniformPiece {
  double a, b;
};

// F(x) = 1 - a / x, valid for x > 0. The revenue curve x * (1 - F(x)) is
// flat (= a) and the buyer virtual value is identically zero.
struct EqualRevenuePiece {
  double a;
};

// F(x) = c0 + slope * (x - x0): affine CDF segment (constant density),
// e.g. the tangent extension of a truncated equal-revenue curve.
struct LinearPiece {
  double c0, slope, x0;
};

// F(x) = scale * (1 - exp(-rate * (x - x0))). scale != 1 renormalizes a
// truncation; x0 != 0 keeps the family closed under affine maps.
struct ExponentialPiece {
  double rate, scale, x0;
};

// F(x) = k - a / (x - h) with h outside the segment.
struct RationalTailPiece {
  double k, a, h;
};

// F(x) = c0 + f0 * (x - x0) + slope * (x - x0)^2 / 2: linear density
// f(x) = f0 + slope * (x - x0).
struct QuadraticPiece {
  double c0, f0, slope, x0;
};

using PieceParams = std::variant<UniformPiece, EqualRevenuePiece, LinearPiece,
                                 ExponentialPiece, RationalTailPiece,
                                 QuadraticPiece>;

struct Piece {
  double lo, hi;
  PieceParams params;

  double cdf(double x) const;
  double pdf(double x) const;
  // (1 - F(x)) / f(x) and F(x) / f(x) in cancellation-free per-kind forms;
  // the buyer virtual value on an equal-revenue piece must come out as
  // exactly zero, which the generic cdf/pdf route cannot deliver.
  double survival_over_pdf(double x) const;
  double cdf_over_pdf(double x) const;
  // Inverse CDF; u must lie in [cdf(lo), cdf(hi)].
  double quantile(double u) const;
  // ∫ F(x) dx over [x0, x1] (callers clamp to [lo, hi]).
  double cdf_integral(double x0, double x1) const;
  // ∫ x f(x) dx over [x0, x1].
  double mean_integral(double x0, double x1) const;

  // Largest |F| scale on the segment, used for continuity tolerances.
  void validate() const;

  std::string kind_name() const;
};

Piece affine_transform(const Piece& p, double k1, double k2);

}  // namespace btl
