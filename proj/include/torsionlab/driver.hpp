#pragma once

// t-sweeps of the circle model, least-squares fit of the large-t expansion,
// comparison with predicted coefficients, and the randomized identity suite.

#include "torsionlab/anomaly.hpp"
#include "torsionlab/circle_model.hpp"
#include "torsionlab/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace torsionlab::driver {

enum class Spacing { uniform, log };

struct SweepConfig {
  double t_min = 8.0;
  double t_max = 40.0;
  int samples = 33;
  Spacing spacing = Spacing::log;
  circle::CircleModel model;
  int threads = 0;  // 0: hardware concurrency
  spectral::ZetaOptions zeta;
};

/// Grid points in ascending order; empty for samples = 0, {t_min} for 1.
std::vector<double> sweep_grid(const SweepConfig& config);

struct SweepRow {
  double t = 0.0;
  double log_det0 = 0.0;
  double log_det1 = 0.0;
  double log_rho = 0.0;
  int m0 = 0;
  int m1 = 0;
  double smallest_positive = 0.0;
  double error = 0.0;
  std::string status = "ok";  // error text for a failed row

  bool ok() const { return status == "ok"; }
};

struct SweepResult {
  std::vector<SweepRow> rows;    // sorted by t
  std::vector<std::string> failures;
  std::vector<std::string> warnings;  // grid not suitable for fitting
};

SweepRow sweep_row(const circle::CircleModel& model, double t, const spectral::ZetaOptions& opt);
SweepResult sweep(const SweepConfig& config);

void write_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> read_csv(std::istream& in);

struct FitResult {
  double a0 = 0.0;
  double a1 = 0.0;
  double b = 0.0;
  std::array<double, 3> standard_error{0.0, 0.0, 0.0};
  double residual_rms = 0.0;
  double condition = 0.0;
  int samples = 0;
};

/// Ordinary least squares on {1, t, log(t / pi)}. Throws Error(input) for
/// fewer than four points or repeated t, Error(numeric) "t-range too narrow to
/// separate t from log t" when the design condition number exceeds 1e10.
FitResult fit_expansion(std::span<const double> t, std::span<const double> y);
/// Fits the successful rows only.
FitResult fit_expansion(std::span<const SweepRow> rows);

Json fit_to_json(const FitResult& fit);
FitResult fit_from_json(const Json& j);

struct Tolerances {
  double a0 = 0.05;
  double a1 = 0.02;
  double b = 0.05;
};

struct CoefficientCheck {
  std::string name;
  double fitted = 0.0;
  std::optional<double> predicted;
  double deviation = 0.0;
  double tolerance = 0.0;
  std::string status;  // "pass", "fail" or "not evaluated"
};

struct Comparison {
  std::vector<CoefficientCheck> checks;
  bool pass = true;  // every evaluated coefficient within tolerance
};

Comparison compare(const FitResult& fit, const anomaly::Prediction& prediction,
                   const Tolerances& tol);
Json comparison_to_json(const Comparison& c);
anomaly::Prediction prediction_from_json(const Json& j);

struct VerifyReport {
  std::uint64_t seed = 0;
  int count = 0;
  double max_identity_gap = 0.0;
  double max_basis_deviation = 0.0;
  double max_reference_deviation = 0.0;
  double max_deformation_deviation = 0.0;
  int adversarial_total = 0;
  int adversarial_rejected = 0;
  std::vector<std::string> failures;
  double tolerance = 1e-10;

  bool pass() const { return failures.empty() && adversarial_rejected == adversarial_total; }
};

/// `count` random complexes and `count` random self-indexing Morse data sets
/// (t in {1, 2.5, 10}), plus one adversarial complex per ten cases that must
/// be rejected. Deterministic in `seed`.
VerifyReport verify_finite_suite(std::uint64_t seed, int count, double tolerance = 1e-10);
Json verify_to_json(const VerifyReport& r);

}  // namespace torsionlab::driver
