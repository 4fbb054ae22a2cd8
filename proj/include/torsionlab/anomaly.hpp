#pragma once

// Predicted coefficients of the large-t expansion
//   log rho(t) = a0 + a1 t + b log(t / pi) + o(1)
// from topological and combinatorial data only, plus the two geometric
// ingredients that can be evaluated here: the trace one-form of a fiber
// metric and the f-weighted Euler integral of a closed surface.

#include "torsionlab/circle_model.hpp"
#include "torsionlab/complex_io.hpp"
#include "torsionlab/thom_smale.hpp"

#include <functional>
#include <optional>
#include <string>

namespace torsionlab::anomaly {

enum class Provenance { computed, user_supplied, vanishes_by_assumption, missing };
const char* to_string(Provenance p);

struct Term {
  std::optional<double> value;
  Provenance provenance = Provenance::missing;

  static Term computed(double v) { return {v, Provenance::computed}; }
  static Term user(double v) { return {v, Provenance::user_supplied}; }
  static Term vanishing() { return {0.0, Provenance::vanishes_by_assumption}; }
};

struct PredictionInputs {
  int n = 1;
  int rank = 1;
  long chi = 0;
  long chi_prime = 0;
  long tilde_chi_prime = 0;
  bool parallel_metric = true;
  Term log_rho_milnor;
  Term f_euler_integral;    // integral of f against the Euler form
  Term theta_psi_integral;  // integral of theta(F, g^F) (grad f)^* psi
};

/// Throws Error(input) if n = 1 with a nonzero Euler integral, or a parallel
/// metric with a nonzero theta-psi integral.
void validate(const PredictionInputs& in);

struct Prediction {
  std::optional<double> a0;  // absent when one of its ingredients is missing
  std::optional<double> a1;
  double b = 0.0;
};

Prediction predict_coefficients(const PredictionInputs& in);

/// Inputs built from Morse data alone: Betti numbers and Milnor torsion of the
/// Thom-Smale complex. The two integrals vanish by assumption where the
/// dimension or a parallel metric forces it, take the supplied value otherwise,
/// and are marked missing when neither applies.
PredictionInputs inputs_from_morse(const morse::MorseData& data,
                                   std::optional<double> theta_psi_integral = {},
                                   std::optional<double> f_euler_integral = {});

Json prediction_report(const PredictionInputs& in, const Prediction& p);

/// Tr[G^{-1} dG/ds] at the sample points of a periodic grid of the given
/// length, in a flat frame. Spectral differentiation of log det G.
Vector theta_form(std::span<const Matrix> metric_samples, double length);

/// A closed surface given by first fundamental form coefficients E, F, G and a
/// function f on the parameter domain. `v` is periodic with period 2 pi;
/// `u` is periodic with period 2 pi (torus type) or runs over (0, pi) with
/// degenerate ends (sphere type, Gauss-Legendre nodes keep clear of the poles).
struct Surface {
  enum class Kind { torus, sphere };
  Kind kind = Kind::sphere;
  std::function<double(double, double)> e;
  std::function<double(double, double)> f_metric;
  std::function<double(double, double)> g;
  std::function<double(double, double)> f;

  static Surface round_sphere(std::function<double(double, double)> f);
  static Surface flat_torus(std::function<double(double, double)> f);
  /// Torus of revolution with radii big > small.
  static Surface revolution_torus(double big, double small, std::function<double(double, double)> f);
};

struct EulerIntegral {
  double value = 0.0;
  double estimate = 0.0;  // |value - value on the coarser grid|
  int nu = 0;
  int nv = 0;
};

/// Quadrature of f K / (2 pi) dA with the Brioschi curvature formula, on an
/// nu x nv grid and a coarser one. Throws Error(numeric) when they differ by
/// more than `tolerance`.
EulerIntegral f_euler_integral_2d(const Surface& s, int nu = 48, int nv = 48,
                                  double tolerance = 1e-8);

}  // namespace torsionlab::anomaly
