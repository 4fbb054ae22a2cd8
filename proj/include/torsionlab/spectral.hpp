#pragma once

// Witten-deformed de Rham complex of a flat bundle over the circle.
//
// Sections live at the nodes s_j = j h, one-forms at the midpoints
// s_{j+1/2}; the exterior derivative is the fourth-order staggered stencil
//
//   (D u)_{j+1/2} = (u_{j-1} - 27 u_j + 27 u_{j+1} - u_{j+2}) / (24 h),
//
// with u_{j+N} = H u_j across the seam at s = 0. Grams are h e^{-2tf} G at
// nodes and midpoints. Everything is stored in the frame that makes both
// grams the identity, where D becomes
//
//   D~ = diag(e^{-t f_mid}) (C^T D C^{-T}) diag(e^{t f_node}),   G = C C^T,
//
// so Delta_0 = D~^T D~, Delta_1 = D~ D~^T and one SVD yields both spectra.

#include "torsionlab/circle_model.hpp"
#include "torsionlab/complex_core.hpp"
#include "torsionlab/thom_smale.hpp"

#include <array>
#include <string>
#include <vector>

namespace torsionlab::spectral {

/// Refusal thresholds for the weight dynamic range.
struct PrecisionGuard {
  /// Largest admissible ratio of e^{-2tf} weights inside one stencil.
  double max_stencil_ratio = 1e12;
  /// Largest admissible 2 t (max f - min f); beyond it e^{2tf} overflows.
  double max_log_range = 700.0;

  /// Defaults, with max_stencil_ratio overridden by TORSIONLAB_PRECISION_GUARD.
  static PrecisionGuard from_environment();
};

struct WittenOperators {
  circle::CircleModel model;  // centered: minimum of f at s = 0
  double t = 0.0;
  int grid = 0;
  int rank = 1;
  double step = 0.0;
  Vector f_node;
  Vector f_mid;
  Matrix fiber_factor;      // C, lower Cholesky factor of the fiber metric
  Matrix twisted_holonomy;  // C^T H C^{-T}
  Matrix d;                 // D~, (rank*grid) x (rank*grid), entry (j*rank + a)
  int kernel_dim = 0;       // dimension of the holonomy-invariant subspace

  /// Delta_{t,i} in the orthonormal frame.
  Matrix laplacian(int degree) const;
  /// Frame vectors (columns) to fiber coordinates of sections or one-forms,
  /// sampled at nodes (degree 0) or midpoints (degree 1).
  Matrix to_fiber_coordinates(int degree, const Matrix& frame) const;
};

/// Throws Error(numeric) with a suggested grid size when the weights exceed
/// the guard, Error(input) for an invalid model.
WittenOperators discretize(const circle::CircleModel& model, double t,
                           const PrecisionGuard& guard = PrecisionGuard::from_environment());

struct Spectrum {
  std::array<Vector, 2> eigenvalues;   // ascending, identical multisets
  std::array<Matrix, 2> eigenvectors;  // frame vectors, only when requested
  int kernel_dim = 0;
  double noise_floor = 0.0;  // singular values below this are numerically zero
};

/// Throws Error(ambiguity) when the numerical kernel disagrees with the
/// holonomy-invariant dimension.
Spectrum spectrum(const WittenOperators& ops, bool with_vectors = false);

struct ZetaOptions {
  /// Also run the eigenvalue-sum route and require agreement.
  bool cross_check = true;
};

struct ZetaDet {
  double log_det = 0.0;  // log det' Delta_{t,i}, kernel excluded
  double error = 0.0;
  std::string method;
  double monodromy_value = 0.0;
  double monodromy_error = 0.0;
  bool spectral_available = false;
  double spectral_value = 0.0;
  double spectral_error = 0.0;
  int spectral_modes = 0;  // Fourier cutoff used by the eigenvalue-sum route
};

/// Both degrees at once; the eigenvalue-sum route shares one pair of spectra.
/// Throws Error(inconsistent) with "regularization inconsistent" when the
/// routes differ by more than five times their joint error estimate.
std::array<ZetaDet, 2> zeta_log_dets(const WittenOperators& ops, const ZetaOptions& opt = {});
ZetaDet zeta_log_det(const WittenOperators& ops, int degree, const ZetaOptions& opt = {});

/// d/dmu of tr(monodromy) at mu = 0 for Delta_{t,i} + mu, and tr(monodromy)
/// at mu = 0, by RK4 with step doubling. The weight is rescaled by a constant,
/// which leaves the derivative unchanged.
struct MonodromyTrace {
  double trace = 0.0;
  double derivative = 0.0;
  double relative_error = 0.0;
  int steps = 0;
};
MonodromyTrace monodromy_trace(const circle::CircleModel& centered_model, double t, int degree);

struct SpectralSplit {
  std::array<Vector, 2> small;         // eigenvalues <= 1, ascending
  std::array<Vector, 2> large;         // eigenvalues > 1
  std::array<Matrix, 2> small_vectors;
  std::array<int, 2> count{0, 0};
  std::vector<std::string> warnings;  // eigenvalues within 1% of the cutoff
};
SpectralSplit spectral_split(const WittenOperators& ops);
SpectralSplit spectral_split(const WittenOperators& ops, const Spectrum& with_vectors);

struct TorsionReport {
  double t = 0.0;
  std::array<ZetaDet, 2> det;
  double log_rho = 0.0;
  std::array<int, 2> small_count{0, 0};
  double smallest_positive = 0.0;
  double error = 0.0;
  std::vector<std::string> warnings;
};
TorsionReport rs_torsion(const circle::CircleModel& model, double t, const ZetaOptions& opt = {});
/// -1/2 log det' Delta_{t,1}.
double rs_torsion_log(const circle::CircleModel& model, double t, const ZetaOptions& opt = {});

/// P_0 evaluates at the minimum; P_1 integrates over the arc S^1 minus the
/// minimum (the unstable manifold of the maximum). Images are in the fiber
/// coordinates of the Thom-Smale complex.
Matrix integrate(const WittenOperators& ops, int degree, const Matrix& frame);

struct IntegrationMap {
  std::array<Matrix, 2> map;  // rank x m_i
  std::array<double, 2> condition{1.0, 1.0};
  /// |P_1 d - boundary P_0| / |boundary P_0| on the small degree-0 space.
  double chain_defect = 0.0;
};
/// Throws Error(degenerate) "comparison map degenerate; increase t or N" when
/// the map is not injective or its condition number exceeds 1e8.
IntegrationMap unstable_integration_map(const WittenOperators& ops, const SpectralSplit& split,
                                        const morse::MorseData& morse);

/// Per degree, the Thom-Smale norms of the images of the unit small eigenvectors.
std::array<Vector, 2> image_norms(const IntegrationMap& map, const morse::MorseData& morse);

/// L2 metric of the weighted de Rham complex on det H for reference classes
/// given as Thom-Smale cocycles (rank-length columns per degree).
complex::DetLineLogNorm rs_metric_lognorm(const circle::CircleModel& model, double t,
                                          const complex::ReferenceClasses& refs);

/// log(|.|^M / |.|^RS_t), reference independent.
double metric_ratio_log(const circle::CircleModel& model, double t);

}  // namespace torsionlab::spectral
