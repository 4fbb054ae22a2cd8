#pragma once

// Thom-Smale cochain complex of Morse data with coefficients in a flat bundle,
// its Milnor metric and the Witten-deformed version of that metric.

#include "torsionlab/complex_core.hpp"
#include "torsionlab/complex_io.hpp"

#include <map>
#include <string>
#include <vector>

namespace torsionlab::morse {

struct CriticalPoint {
  std::string id;
  int index = 0;
  double f = 0.0;
};

/// A gradient line from `from` (index i) to `to` (index i+1); the transport
/// maps the fiber at `from` to the fiber at `to`.
struct Instanton {
  std::string from;
  std::string to;
  int sign = 1;
  Matrix transport;
};

struct MorseData {
  int n = 0;
  int rank = 1;
  bool parallel_metric = false;
  std::vector<CriticalPoint> points;
  std::map<std::string, Matrix> fiber_metrics;  // missing entries mean identity
  std::vector<Instanton> instantons;

  bool self_indexing() const;
  Matrix fiber_metric(const std::string& id) const;
};

/// Throws Error(input) on unknown ids, bad indices, wrong shapes, singular
/// transports, or non-isometric transports when parallel_metric is set.
void validate(const MorseData& data);

struct ThomSmaleComplex {
  complex::GradedComplex complex;
  /// points_by_degree[i] lists indices into MorseData::points, in input order;
  /// point k occupies rows offset[k] .. offset[k] + rank - 1 of its degree.
  std::vector<std::vector<int>> points_by_degree;
  std::vector<int> offset;
};

/// Throws Error(input) with message "Morse data not a complex" when ∂² ≠ 0.
ThomSmaleComplex build_thom_smale(const MorseData& data);

/// rank * sum_x (-1)^index(x) index(x).
long tilde_chi_prime(const MorseData& data);
/// rank * sum_x (-1)^index(x) f(x); equals tilde_chi_prime for self-indexing data.
double signed_morse_sum(const MorseData& data);

double milnor_torsion_log(const MorseData& data);

/// The complex with fiber grams scaled by exp(-2t f(x)) at every critical
/// point. Each degree is scaled relative to its mean critical value so the
/// grams stay O(1); log_volume_offset[i] restores the dropped factor.
struct DeformedMilnorState {
  double t = 0.0;
  complex::GradedComplex complex;
  std::vector<double> log_volume_offset;
};
DeformedMilnorState deform(const MorseData& data, const ThomSmaleComplex& ts, double t);

/// log of the chain-induced metric on det H of the deformed complex, for the
/// given reference cocycles.
double deformed_milnor_lognorm(const DeformedMilnorState& state,
                               const complex::ReferenceClasses& refs);

struct DeformationShift {
  double shift = 0.0;     // log|.|_t - log|.|_0
  double expected = 0.0;  // -t * signed_morse_sum
  bool self_indexing = false;
};
DeformationShift deformed_milnor_lognorm_shift(const MorseData& data, double t,
                                               const complex::ReferenceClasses& refs);
/// Same, with the t = 0 harmonic cocycles as references.
DeformationShift deformed_milnor_lognorm_shift(const MorseData& data, double t);

MorseData morse_from_json(const Json& j);
Json morse_to_json(const MorseData& data);

}  // namespace torsionlab::morse
