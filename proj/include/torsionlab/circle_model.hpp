#pragma once

// Input model for the spectral engine: a circle of length L, a Morse function
// with one minimum and one maximum, and a flat bundle given by its holonomy.

#include "torsionlab/complex_io.hpp"
#include "torsionlab/thom_smale.hpp"

#include <numbers>

namespace torsionlab::circle {

/// Real trigonometric polynomial in the angle theta = 2 pi s / L:
///   f = a_0 + sum_k (a_k cos k theta + b_k sin k theta).
class PeriodicFunction {
 public:
  enum class Kind { one_minus_cos, samples };

  /// (1 - cos theta) / 2.
  static PeriodicFunction one_minus_cos();
  /// Trigonometric interpolant of values at theta_j = 2 pi j / size.
  static PeriodicFunction from_samples(std::span<const double> values);

  Kind kind() const { return kind_; }
  const Vector& samples() const { return samples_; }

  /// The derivative order is taken with respect to theta.
  double operator()(double theta, int derivative = 0) const;
  /// Same function rotated so that the new origin sits at old angle `theta0`.
  PeriodicFunction rotated(double theta0) const;

 private:
  Kind kind_ = Kind::one_minus_cos;
  Vector samples_;  // as given; empty for the analytic kind
  Vector cos_;      // cos_[k] = a_k
  Vector sin_;      // sin_[k] = b_k, sin_[0] unused
};

struct FlatBundle {
  int rank = 1;
  Matrix holonomy = Matrix::Identity(1, 1);
  Matrix fiber_metric = Matrix::Identity(1, 1);

  static FlatBundle trivial(int rank = 1);
  /// Rank-2 real realization of the line bundle with holonomy e^{i alpha}.
  static FlatBundle rotation(double alpha);

  /// Holonomy preserves the fiber metric.
  bool parallel(double tol = 1e-10) const;
};

struct CriticalData {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double f_min = 0.0;
  double f_max = 0.0;
};

struct CircleModel {
  double length = 2.0 * std::numbers::pi;
  int grid = 512;
  PeriodicFunction f = PeriodicFunction::one_minus_cos();
  FlatBundle bundle;

  static CircleModel trivial(int grid = 512, double length = 2.0 * std::numbers::pi);
  static CircleModel rotation(double alpha, int grid = 512,
                              double length = 2.0 * std::numbers::pi);

  bool self_indexing(double tol = 1e-12) const;
};

/// Checks grid size (even, >= 64), length, holonomy/metric shapes, SPD metric,
/// invertible holonomy, and that f has exactly one minimum and one maximum.
/// Throws Error(input).
void validate(const CircleModel& model);

/// Locates the two critical points of f (Newton-refined).
CriticalData critical_data(const PeriodicFunction& f);

/// The model with f rotated so that its minimum lies at s = 0.
CircleModel centered(const CircleModel& model);

/// Two points "min" (index 0) and "max" (index 1) joined by two instantons,
/// (+1, holonomy) and (-1, identity), so that the boundary is H - I.
morse::MorseData canonical_morse_data(const CircleModel& model);

CircleModel model_from_json(const Json& j);
Json model_to_json(const CircleModel& model);

}  // namespace torsionlab::circle
