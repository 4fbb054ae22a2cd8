#include "torsionlab/complex_core.hpp"

#include "torsionlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace torsionlab::complex {

namespace {

Matrix checked_factor(const Matrix& gram, int degree) {
  if (gram.rows() != gram.cols()) {
    throw Error(ErrorKind::input, "gram of degree " + std::to_string(degree) + " is not square");
  }
  if (gram.size() == 0) return Matrix(0, 0);
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::input, "gram of degree " + std::to_string(degree) + " is not symmetric");
  }
  Eigen::LLT<Matrix> llt(0.5 * (gram + gram.transpose()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::input,
                "gram of degree " + std::to_string(degree) + " is not positive definite");
  }
  Matrix l = llt.matrixL();
  if (l.diagonal().minCoeff() <= 0.0) {
    throw Error(ErrorKind::input,
                "gram of degree " + std::to_string(degree) + " is not positive definite");
  }
  return l;
}

// In the orthonormal frame the coordinates of x are L^T x.
Matrix to_frame(const Matrix& factor, const Matrix& x) { return factor.transpose() * x; }

Matrix from_frame(const Matrix& factor, const Matrix& y) {
  if (y.size() == 0) return Matrix(factor.rows(), y.cols());
  return factor.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

int numerical_rank(const Vector& sv, double rel) {
  if (sv.size() == 0) return 0;
  const double top = sv.maxCoeff();
  if (top == 0.0) return 0;
  int r = 0;
  for (double s : sv) {
    if (s * s > rel * top * top) ++r;
  }
  return r;
}

std::string dump(const Vector& v) {
  std::ostringstream os;
  os.precision(6);
  os << "[";
  for (Eigen::Index k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
  os << "]";
  return os.str();
}

}  // namespace

GradedComplex::GradedComplex(std::vector<Matrix> grams, std::vector<Matrix> boundaries,
                             const Tolerances& tol)
    : grams_(std::move(grams)) {
  if (grams_.empty()) throw Error(ErrorKind::input, "complex must have at least one degree");
  const int n = top_degree();
  if (static_cast<int>(boundaries.size()) != n) {
    throw Error(ErrorKind::input, "expected " + std::to_string(n) + " boundary maps, got " +
                                      std::to_string(boundaries.size()));
  }
  factors_.reserve(grams_.size());
  for (int i = 0; i <= n; ++i) factors_.push_back(checked_factor(grams_[i], i));
  for (int i = 0; i <= n; ++i) grams_[i] = 0.5 * (grams_[i] + grams_[i].transpose());

  padded_.reserve(n + 2);
  padded_.emplace_back(Matrix::Zero(dim(0), 0));
  for (int i = 0; i < n; ++i) {
    const Matrix& b = boundaries[i];
    if (b.rows() != dim(i + 1) || b.cols() != dim(i)) {
      throw Error(ErrorKind::input, "boundary " + std::to_string(i) + " has shape " +
                                        std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                                        ", expected " + std::to_string(dim(i + 1)) + "x" +
                                        std::to_string(dim(i)));
    }
    padded_.push_back(b);
  }
  padded_.emplace_back(Matrix::Zero(0, dim(n)));

  for (int i = 0; i + 1 < n; ++i) {
    const Matrix& lo = padded_[i + 1];
    const Matrix& hi = padded_[i + 2];
    if (lo.size() == 0 || hi.size() == 0) continue;
    const double composite = (hi * lo).norm();
    if (composite > tol.boundary * hi.norm() * lo.norm()) {
      std::ostringstream os;
      os << "boundary_" << i + 1 << " * boundary_" << i << " has norm " << composite
         << " (complex condition violated)";
      throw Error(ErrorKind::input, os.str());
    }
  }
}

int GradedComplex::dim(int i) const {
  if (i < 0 || i > top_degree()) return 0;
  return static_cast<int>(grams_[i].rows());
}

std::vector<int> GradedComplex::dims() const {
  std::vector<int> out;
  for (int i = 0; i <= top_degree(); ++i) out.push_back(dim(i));
  return out;
}

int GradedComplex::total_dim() const {
  int s = 0;
  for (int i = 0; i <= top_degree(); ++i) s += dim(i);
  return s;
}

const Matrix& GradedComplex::gram(int i) const {
  if (i < 0 || i > top_degree()) throw Error(ErrorKind::input, "degree out of range");
  return grams_[i];
}

const Matrix& GradedComplex::boundary(int i) const {
  if (i < -1 || i > top_degree()) throw Error(ErrorKind::input, "degree out of range");
  return padded_[i + 1];
}

const Matrix& GradedComplex::gram_factor(int i) const {
  if (i < 0 || i > top_degree()) throw Error(ErrorKind::input, "degree out of range");
  return factors_[i];
}

Matrix GradedComplex::adjoint(int i) const {
  const Matrix& b = boundary(i);
  if (b.size() == 0) return Matrix::Zero(b.cols(), b.rows());
  Eigen::LLT<Matrix> llt(grams_[i]);
  return llt.solve(b.transpose() * grams_[i + 1]);
}

Matrix GradedComplex::orthonormal_boundary(int i) const {
  const Matrix& b = boundary(i);
  if (b.size() == 0) return Matrix::Zero(b.rows(), b.cols());
  // L_{i+1}^T b L_i^{-T}: solve from the right with the upper factor L_i^T.
  Matrix left = factors_[i + 1].transpose() * b;
  return factors_[i].transpose().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(left);
}

std::vector<Matrix> GradedComplex::boundaries() const {
  return {padded_.begin() + 1, padded_.end() - 1};
}

GradedComplex GradedComplex::with_grams(std::vector<Matrix> grams) const {
  return GradedComplex(std::move(grams), boundaries());
}

GradedComplex GradedComplex::change_basis(std::span<const Matrix> basis) const {
  const int n = top_degree();
  if (static_cast<int>(basis.size()) != n + 1) {
    throw Error(ErrorKind::input, "change_basis needs one matrix per degree");
  }
  std::vector<Eigen::PartialPivLU<Matrix>> lu;
  std::vector<Matrix> grams;
  for (int i = 0; i <= n; ++i) {
    if (basis[i].rows() != dim(i) || basis[i].cols() != dim(i)) {
      throw Error(ErrorKind::input, "basis matrix has the wrong shape");
    }
    grams.push_back(basis[i].transpose() * grams_[i] * basis[i]);
    lu.emplace_back(basis[i]);
  }
  std::vector<Matrix> bds;
  for (int i = 0; i < n; ++i) {
    const Matrix& b = boundary(i);
    if (b.size() == 0) {
      bds.push_back(b);
    } else {
      bds.push_back(lu[i + 1].solve(b * basis[i]));
    }
  }
  Tolerances loose;
  loose.boundary = 1e-9;
  return GradedComplex(std::move(grams), std::move(bds), loose);
}

Matrix laplacian(const GradedComplex& c, int i) {
  if (i < 0 || i > c.top_degree()) throw Error(ErrorKind::input, "degree out of range");
  Matrix out = Matrix::Zero(c.dim(i), c.dim(i));
  if (c.boundary(i - 1).size() != 0) out += c.boundary(i - 1) * c.adjoint(i - 1);
  if (c.boundary(i).size() != 0) out += c.adjoint(i) * c.boundary(i);
  return out;
}

Matrix orthonormal_laplacian(const GradedComplex& c, int i) {
  if (i < 0 || i > c.top_degree()) throw Error(ErrorKind::input, "degree out of range");
  Matrix out = Matrix::Zero(c.dim(i), c.dim(i));
  const Matrix down = c.orthonormal_boundary(i - 1);
  const Matrix up = c.orthonormal_boundary(i);
  if (down.size() != 0) out += down * down.transpose();
  if (up.size() != 0) out += up.transpose() * up;
  return 0.5 * (out + out.transpose());
}

SpectrumByDegree spectrum(const GradedComplex& c, const Tolerances& tol) {
  SpectrumByDegree s;
  for (int i = 0; i <= c.top_degree(); ++i) {
    Vector ev(0);
    if (c.dim(i) > 0) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(orthonormal_laplacian(c, i),
                                               Eigen::EigenvaluesOnly);
      ev = es.eigenvalues();
    }
    const double top = ev.size() ? std::max(ev.maxCoeff(), 0.0) : 0.0;
    const double cut = tol.kernel * top;
    int k = 0;
    for (double lambda : ev) {
      if (lambda <= cut) ++k;
      if (cut > 0.0 && lambda >= 0.1 * cut && lambda <= 10.0 * cut) {
        std::ostringstream os;
        os << "degree " << i << ": eigenvalue " << lambda << " near kernel cutoff " << cut;
        s.warnings.push_back(os.str());
      }
    }
    s.eigenvalues.push_back(ev);
    s.kernel_dim.push_back(k);
    s.cutoff.push_back(cut);
  }
  return s;
}

BettiResult betti(const GradedComplex& c, const Tolerances& tol) {
  SpectrumByDegree s = spectrum(c, tol);
  return {s.kernel_dim, s.warnings};
}

std::vector<int> boundary_ranks(const GradedComplex& c, const Tolerances& tol) {
  std::vector<int> r;
  for (int i = 0; i < c.top_degree(); ++i) {
    r.push_back(numerical_rank(singular_values(c.orthonormal_boundary(i)), tol.kernel));
  }
  return r;
}

EulerCharacteristics euler_characteristics(std::span<const int> betti) {
  EulerCharacteristics e;
  for (std::size_t i = 0; i < betti.size(); ++i) {
    const long sign = (i % 2 == 0) ? 1 : -1;
    e.chi += sign * betti[i];
    e.chi_prime += sign * static_cast<long>(i) * betti[i];
  }
  return e;
}

GradingOperators grading_operators(std::span<const int> dims) {
  GradingOperators g;
  g.dims.assign(dims.begin(), dims.end());
  int total = 0;
  for (int d : dims) total += d;
  g.degree = Matrix::Zero(total, total);
  g.parity = Matrix::Zero(total, total);
  int off = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    for (int k = 0; k < dims[i]; ++k) {
      g.degree(off + k, off + k) = static_cast<double>(i);
      g.parity(off + k, off + k) = (i % 2 == 0) ? 1.0 : -1.0;
    }
    off += dims[i];
  }
  return g;
}

double supertrace(const Matrix& a, const GradingOperators& grading) {
  const Eigen::Index total = grading.degree.rows();
  if (a.rows() != total || a.cols() != total) {
    throw Error(ErrorKind::input, "operator size does not match the grading");
  }
  int row = 0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < grading.dims.size(); ++i) {
    const int d = grading.dims[i];
    int col = 0;
    for (std::size_t j = 0; j < grading.dims.size(); ++j) {
      const int e = grading.dims[j];
      if (i != j && d > 0 && e > 0 &&
          a.block(row, col, d, e).cwiseAbs().maxCoeff() > 1e-14 * scale) {
        throw Error(ErrorKind::input, "operator does not preserve degrees");
      }
      col += e;
    }
    row += d;
  }
  return (grading.parity * a).trace();
}

double torsion_log(const GradedComplex& c, const Tolerances& tol) {
  SpectrumByDegree s = spectrum(c, tol);
  if (s.ambiguous()) {
    std::ostringstream os;
    os << "torsion undefined: eigenvalue in the kernel cutoff band;";
    for (const auto& w : s.warnings) os << " " << w << ";";
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
      os << " spectrum[" << i << "]=" << dump(s.eigenvalues[i]);
    }
    throw Error(ErrorKind::ambiguity, os.str());
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    if (i == 0) continue;
    double logs = 0.0;
    for (double lambda : s.eigenvalues[i]) {
      if (lambda > s.cutoff[i]) logs += std::log(lambda);
    }
    acc += ((i % 2 == 0) ? 1.0 : -1.0) * static_cast<double>(i) * logs;
  }
  return 0.5 * acc;
}

std::vector<Matrix> harmonic_basis(const GradedComplex& c, const Tolerances& tol) {
  std::vector<Matrix> out;
  for (int i = 0; i <= c.top_degree(); ++i) {
    if (c.dim(i) == 0) {
      out.emplace_back(0, 0);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(orthonormal_laplacian(c, i));
    const Vector& ev = es.eigenvalues();
    const double cut = tol.kernel * std::max(ev.maxCoeff(), 0.0);
    int k = 0;
    while (k < ev.size() && ev[k] <= cut) ++k;
    out.push_back(from_frame(c.gram_factor(i), es.eigenvectors().leftCols(k)));
  }
  return out;
}

namespace {

void check_references(const GradedComplex& c, const ReferenceClasses& refs,
                      const Tolerances& tol) {
  if (static_cast<int>(refs.size()) != c.top_degree() + 1) {
    throw Error(ErrorKind::input, "reference classes must be given for every degree");
  }
  for (int i = 0; i <= c.top_degree(); ++i) {
    if (refs[i].cols() > 0 && refs[i].rows() != c.dim(i)) {
      throw Error(ErrorKind::input, "reference classes of degree " + std::to_string(i) +
                                        " have the wrong length");
    }
    const Matrix& up = c.boundary(i);
    if (up.size() == 0 || refs[i].cols() == 0) continue;
    const Matrix image = up * refs[i];
    for (Eigen::Index k = 0; k < refs[i].cols(); ++k) {
      if (image.col(k).norm() > tol.cocycle * up.norm() * refs[i].col(k).norm()) {
        throw Error(ErrorKind::input, "reference class " + std::to_string(k) + " of degree " +
                                          std::to_string(i) + " is not a cocycle");
      }
    }
  }
}

void finish(DetLineLogNorm& out) {
  out.combined = 0.0;
  for (std::size_t i = 0; i < out.log_volume.size(); ++i) {
    out.combined += ((i % 2 == 0) ? 1.0 : -1.0) * out.log_volume[i];
  }
}

// Coordinates of the references in the orthonormal harmonic basis. Rejects
// classes whose projections are lost in rounding or nearly dependent; exact
// components of the references do not count against them.
Matrix harmonic_coordinates(const GradedComplex& c, const Matrix& harmonic, const Matrix& refs,
                            int degree, const Tolerances& tol) {
  const Matrix coords = harmonic.transpose() * c.gram(degree) * refs;
  const Vector full = (refs.transpose() * c.gram(degree) * refs).diagonal().cwiseSqrt();
  const Vector projected = coords.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < coords.cols(); ++k) {
    if (!(projected[k] > std::sqrt(tol.degenerate) * full[k])) {
      throw Error(ErrorKind::degenerate, "reference classes not independent in cohomology");
    }
  }
  const Vector scale = projected.cwiseInverse();
  const Matrix normalized = scale.asDiagonal() * (coords.transpose() * coords) * scale.asDiagonal();
  if (!(normalized.determinant() > tol.degenerate)) {
    throw Error(ErrorKind::degenerate, "reference classes not independent in cohomology");
  }
  return coords;
}

}  // namespace

DetLineLogNorm det_line_lognorm(const GradedComplex& c, const ReferenceClasses& refs,
                                std::string reference_id, const Tolerances& tol) {
  check_references(c, refs, tol);
  const std::vector<Matrix> harmonic = harmonic_basis(c, tol);
  DetLineLogNorm out;
  out.reference_id = std::move(reference_id);
  for (int i = 0; i <= c.top_degree(); ++i) {
    const Eigen::Index b = harmonic[i].cols();
    if (refs[i].cols() != b) {
      throw Error(ErrorKind::input, "degree " + std::to_string(i) + " needs " +
                                        std::to_string(b) + " reference classes, got " +
                                        std::to_string(refs[i].cols()));
    }
    if (b == 0) {
      out.log_volume.push_back(0.0);
      continue;
    }
    const Matrix coords = harmonic_coordinates(c, harmonic[i], refs[i], i, tol);
    out.log_volume.push_back(log_abs_det(coords));
  }
  finish(out);
  return out;
}

DetLineLogNorm chain_det_line_lognorm(const GradedComplex& c, const ReferenceClasses& refs,
                                      std::string reference_id, const Tolerances& tol) {
  check_references(c, refs, tol);
  const std::vector<Matrix> harmonic = harmonic_basis(c, tol);
  const int n = c.top_degree();
  // Complements of the kernels: b_i spans a complement of ker boundary_i.
  std::vector<Matrix> complement;
  for (int i = 0; i <= n; ++i) {
    const Matrix d = c.orthonormal_boundary(i);
    if (d.size() == 0) {
      complement.emplace_back(c.dim(i), 0);
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(d, Eigen::ComputeFullV);
    const int r = numerical_rank(svd.singularValues(), tol.kernel);
    complement.push_back(from_frame(c.gram_factor(i), svd.matrixV().leftCols(r)));
  }
  DetLineLogNorm out;
  out.reference_id = std::move(reference_id);
  for (int i = 0; i <= n; ++i) {
    const Matrix image =
        i > 0 ? Matrix(c.boundary(i - 1) * complement[i - 1]) : Matrix(c.dim(i), 0);
    const Eigen::Index cols = image.cols() + refs[i].cols() + complement[i].cols();
    if (cols != c.dim(i)) {
      throw Error(ErrorKind::input, "degree " + std::to_string(i) +
                                        ": reference classes do not match the cohomology dimension");
    }
    if (cols == 0) {
      out.log_volume.push_back(0.0);
      continue;
    }
    Matrix basis(c.dim(i), cols);
    basis << image, refs[i], complement[i];
    if (refs[i].cols() > 0) (void)harmonic_coordinates(c, harmonic[i], refs[i], i, tol);
    out.log_volume.push_back(log_abs_det(to_frame(c.gram_factor(i), basis)));
  }
  finish(out);
  return out;
}

double metric_identity_gap(const GradedComplex& c, const ReferenceClasses& refs,
                           const Tolerances& tol) {
  const double chain = chain_det_line_lognorm(c, refs, {}, tol).combined;
  const double harmonic = det_line_lognorm(c, refs, {}, tol).combined;
  return chain - harmonic - torsion_log(c, tol);
}

double log_abs_det(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::input, "log_abs_det needs a square matrix");
  if (a.size() == 0) return 0.0;
  Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& m = lu.matrixLU();
  double s = 0.0;
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    const double d = std::abs(m(k, k));
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    s += std::log(d);
  }
  return s;
}

}  // namespace torsionlab::complex
