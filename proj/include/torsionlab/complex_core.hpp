#pragma once

// Finite graded Euclidean cochain complexes: Hodge Laplacians, Betti numbers,
// torsion and metrics on the determinant line of cohomology.
//
// Inner products are carried as explicit Gram matrices. All spectral work is
// done in the Cholesky-orthonormalized frame, where
//
//   d_i = L_{i+1}^T * boundary_i * L_i^{-T},      gram_i = L_i L_i^T,
//
// so that the adjoint becomes a plain transpose and the Laplacian
// d_{i-1} d_{i-1}^T + d_i^T d_i is symmetric.

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace torsionlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace torsionlab

namespace torsionlab::complex {

struct Tolerances {
  /// Kernel cutoff, relative to the largest Laplacian eigenvalue per degree.
  double kernel = 1e-9;
  /// Bound on |boundary_{i+1} boundary_i| relative to |boundary_{i+1}||boundary_i|.
  double boundary = 1e-12;
  /// Floor for the normalized Gram determinant of the harmonic projections of
  /// reference classes; each projection must also keep sqrt(degenerate) of
  /// its reference's norm.
  double degenerate = 1e-12;
  /// Representatives must satisfy |d r| <= cocycle * |d| |r|.
  double cocycle = 1e-8;
};

class GradedComplex {
 public:
  /// grams[i] is dim_i x dim_i; boundaries[i] maps degree i to degree i+1, so
  /// there are exactly grams.size() - 1 of them. Throws Error(input) on shape
  /// mismatch, non-SPD grams or a boundary that does not square to zero.
  GradedComplex(std::vector<Matrix> grams, std::vector<Matrix> boundaries,
                const Tolerances& tol = {});

  int top_degree() const { return static_cast<int>(grams_.size()) - 1; }
  int dim(int i) const;
  std::vector<int> dims() const;
  int total_dim() const;

  const Matrix& gram(int i) const;
  /// Valid for -1 <= i <= n; the two ends are empty maps.
  const Matrix& boundary(int i) const;
  /// Adjoint of boundary_i: gram_i^{-1} boundary_i^T gram_{i+1}.
  Matrix adjoint(int i) const;
  /// Lower Cholesky factor of gram_i.
  const Matrix& gram_factor(int i) const;
  /// boundary_i expressed in orthonormal frames of degrees i and i+1.
  Matrix orthonormal_boundary(int i) const;

  /// Same boundaries, new inner products.
  GradedComplex with_grams(std::vector<Matrix> grams) const;
  /// Re-express the complex in a new basis whose vectors are the columns of
  /// basis[i] (old coordinates). Each basis[i] must be invertible.
  GradedComplex change_basis(std::span<const Matrix> basis) const;

  const std::vector<Matrix>& grams() const { return grams_; }
  std::vector<Matrix> boundaries() const;

 private:
  std::vector<Matrix> grams_;
  std::vector<Matrix> factors_;
  std::vector<Matrix> padded_;  // boundary(-1) .. boundary(n)
};

struct SpectrumByDegree {
  std::vector<Vector> eigenvalues;  // ascending, per degree
  std::vector<int> kernel_dim;
  std::vector<double> cutoff;       // absolute kernel threshold used per degree
  std::vector<std::string> warnings;

  bool ambiguous() const { return !warnings.empty(); }
};

/// Laplacian of degree i in the original coordinates (self-adjoint for gram_i).
Matrix laplacian(const GradedComplex& c, int i);
/// The same operator in the orthonormal frame (a symmetric matrix).
Matrix orthonormal_laplacian(const GradedComplex& c, int i);

SpectrumByDegree spectrum(const GradedComplex& c, const Tolerances& tol = {});

struct BettiResult {
  std::vector<int> betti;
  std::vector<std::string> warnings;
};
BettiResult betti(const GradedComplex& c, const Tolerances& tol = {});

/// Numerical ranks of boundary_0 .. boundary_{n-1}.
std::vector<int> boundary_ranks(const GradedComplex& c, const Tolerances& tol = {});

struct EulerCharacteristics {
  long chi = 0;
  long chi_prime = 0;
};
EulerCharacteristics euler_characteristics(std::span<const int> betti);

/// Degree operator N and parity operator tau on the total space.
struct GradingOperators {
  std::vector<int> dims;
  Matrix degree;
  Matrix parity;
};
GradingOperators grading_operators(std::span<const int> dims);

/// Tr[tau A]. A must be block diagonal with respect to the grading; anything
/// else is rejected with Error(input).
double supertrace(const Matrix& a, const GradingOperators& grading);

/// log of the torsion, (1/2) sum_i (-1)^i i sum_{lambda > 0} log lambda over
/// the spectrum of the degree-i Laplacian. Throws Error(ambiguity) when an
/// eigenvalue sits in the band around the kernel cutoff.
double torsion_log(const GradedComplex& c, const Tolerances& tol = {});

/// Per degree, b_i representative cocycles stored as the columns of a
/// dim_i x b_i matrix.
using ReferenceClasses = std::vector<Matrix>;

/// A metric on det H^* recorded as the log-norm of the element built from a
/// fixed set of reference classes.
struct DetLineLogNorm {
  std::string reference_id;
  std::vector<double> log_volume;
  double combined = 0.0;  // sum_i (-1)^i log_volume[i]
};

/// Orthonormal (for gram_i) bases of the harmonic spaces, one matrix per degree.
std::vector<Matrix> harmonic_basis(const GradedComplex& c, const Tolerances& tol = {});

/// L2-type metric: project the references onto harmonic cochains and take
/// half the log Gram determinant in each degree.
DetLineLogNorm det_line_lognorm(const GradedComplex& c, const ReferenceClasses& refs,
                                std::string reference_id = {},
                                const Tolerances& tol = {});

/// Metric transported from det C^* through the canonical isomorphism
/// det C^* = det H^*. Per degree the log-volume of the basis
/// [boundary(b_{i-1}), r_i, b_i] is taken, which does not depend on the
/// complementary vectors b.
DetLineLogNorm chain_det_line_lognorm(const GradedComplex& c, const ReferenceClasses& refs,
                                      std::string reference_id = {},
                                      const Tolerances& tol = {});

/// log|.|_chain - log|.|_harmonic - torsion_log. Zero up to rounding.
double metric_identity_gap(const GradedComplex& c, const ReferenceClasses& refs,
                           const Tolerances& tol = {});

/// log|det A| through an LU factorization. Returns -inf for singular A.
double log_abs_det(const Matrix& a);

}  // namespace torsionlab::complex
