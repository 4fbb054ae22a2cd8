#include "torsionlab/spectral.hpp"

#include "torsionlab/error.hpp"
#include "torsionlab/zeta.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

namespace torsionlab::spectral {

using std::numbers::pi;

PrecisionGuard PrecisionGuard::from_environment() {
  PrecisionGuard g;
  if (const char* env = std::getenv("TORSIONLAB_PRECISION_GUARD")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || !(v > 1.0)) {
      throw Error(ErrorKind::input, "TORSIONLAB_PRECISION_GUARD must be a number > 1");
    }
    g.max_stencil_ratio = v;
  }
  return g;
}

namespace {

constexpr std::array<int, 4> kOffsets{-1, 0, 1, 2};
constexpr std::array<double, 4> kWeights{1.0, -27.0, 27.0, -1.0};

Matrix matrix_power(const Matrix& h, const Matrix& h_inv, int q) {
  if (q == 0) return Matrix::Identity(h.rows(), h.cols());
  return q > 0 ? h : h_inv;
}

WittenOperators assemble(const circle::CircleModel& centered_model, double t,
                         const PrecisionGuard& guard) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::input, "t must be finite and >= 0");
  const circle::CircleModel& m = centered_model;
  const int n = m.grid;
  const int r = m.bundle.rank;
  WittenOperators ops;
  ops.model = m;
  ops.t = t;
  ops.grid = n;
  ops.rank = r;
  ops.step = m.length / n;
  ops.f_node.resize(n);
  ops.f_mid.resize(n);
  for (int j = 0; j < n; ++j) {
    ops.f_node[j] = m.f(2.0 * pi * j / n);
    ops.f_mid[j] = m.f(2.0 * pi * (j + 0.5) / n);
  }

  const circle::CriticalData crit = circle::critical_data(m.f);
  const double log_range = 2.0 * t * (crit.f_max - crit.f_min);
  if (log_range > guard.max_log_range) {
    std::ostringstream os;
    os << "weight range e^{" << log_range << "} exceeds double precision at t = " << t
       << "; reduce t";
    throw Error(ErrorKind::numeric, os.str());
  }
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    double lo = ops.f_mid[j];
    double hi = lo;
    for (int o : kOffsets) {
      const double v = ops.f_node[((j + o) % n + n) % n];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, 2.0 * t * (hi - lo));
  }
  if (worst > std::log(guard.max_stencil_ratio)) {
    const double factor = worst / std::log(guard.max_stencil_ratio);
    const int suggested = 64 * static_cast<int>(std::ceil(factor * n / 64.0));
    std::ostringstream os;
    os << "resolution insufficient for t = " << t << ": weight ratio e^{" << worst
       << "} within one stencil exceeds " << guard.max_stencil_ratio << "; use N >= " << suggested;
    throw Error(ErrorKind::numeric, os.str());
  }

  ops.fiber_factor = Eigen::LLT<Matrix>(m.bundle.fiber_metric).matrixL();
  const Matrix ct = ops.fiber_factor.transpose();
  ops.twisted_holonomy =
      ct.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(Matrix(ct * m.bundle.holonomy));
  const Matrix h = ops.twisted_holonomy;
  const Matrix h_inv = h.inverse();

  const double scale = 1.0 / (24.0 * ops.step);
  ops.d = Matrix::Zero(static_cast<Eigen::Index>(r) * n, static_cast<Eigen::Index>(r) * n);
  for (int j = 0; j < n; ++j) {
    for (std::size_t s = 0; s < kOffsets.size(); ++s) {
      const int node = j + kOffsets[s];
      const int q = node < 0 ? -1 : (node >= n ? 1 : 0);
      const int wrapped = node - q * n;
      const double coef = kWeights[s] * scale * std::exp(t * (ops.f_node[wrapped] - ops.f_mid[j]));
      ops.d.block(static_cast<Eigen::Index>(j) * r, static_cast<Eigen::Index>(wrapped) * r, r, r) +=
          coef * matrix_power(h, h_inv, q);
    }
  }

  Eigen::JacobiSVD<Matrix> fixed(h - Matrix::Identity(r, r));
  const Vector& sv = fixed.singularValues();
  ops.kernel_dim = 0;
  for (double v : sv) {
    if (v <= 1e-8 * std::max(1.0, h.norm())) ++ops.kernel_dim;
  }
  return ops;
}

int count_unit_eigenvalues(const Eigen::VectorXcd& eig) {
  int k = 0;
  for (const auto& z : eig) {
    if (std::abs(z - 1.0) <= 1e-8) ++k;
  }
  return k;
}

struct PotentialStats {
  double mean = 0.0;
  double variance = 0.0;
  double max_deviation = 0.0;
};

// Witten potential t^2 f'^2 -+ t f'' of the conjugated operator on degree i.
PotentialStats potential_stats(const circle::CircleModel& m, double t, int degree) {
  const int samples = 4 * m.grid;
  const double k = 2.0 * pi / m.length;
  Vector v(samples);
  for (int j = 0; j < samples; ++j) {
    const double theta = 2.0 * pi * j / samples;
    const double d1 = k * m.f(theta, 1);
    const double d2 = k * k * m.f(theta, 2);
    v[j] = t * t * d1 * d1 + (degree == 0 ? -t * d2 : t * d2);
  }
  PotentialStats s;
  s.mean = v.mean();
  s.variance = (v.array() - s.mean).square().mean();
  s.max_deviation = (v.array() - s.mean).abs().maxCoeff();
  return s;
}

// Regularized sum over m >= 0 of log(c (m+q)^2 + mean + var / (4 c (m+q)^2)).
double tail_log_sum(double c, double q, const PotentialStats& v) {
  double s = zeta::hurwitz_log_sum(c, q);
  if (v.mean == 0.0 && v.variance == 0.0) return s;
  constexpr int terms = 20000;
  double rem = 0.0;
  for (int m = 0; m < terms; ++m) {
    const double x = c * (m + q) * (m + q);
    rem += std::log1p(v.mean / x + v.variance / (4.0 * x * x));
  }
  rem += v.mean / (c * (terms + q - 0.5));
  return s + rem;
}

struct SpectralRoute {
  bool available = false;
  double value = 0.0;
  double error = 0.0;
  int modes = 0;
};

SpectralRoute spectral_route(const WittenOperators& ops, const Eigen::VectorXcd& holonomy_eig,
                             const Vector& fine, const Vector& coarse, int degree) {
  SpectralRoute out;
  const int r = ops.rank;
  const int k = ops.kernel_dim;
  const double c = std::pow(2.0 * pi / ops.model.length, 2);
  const PotentialStats v = potential_stats(ops.model, ops.t, degree);
  std::vector<double> shifts;
  for (const auto& z : holonomy_eig) shifts.push_back(std::arg(z) / (2.0 * pi));

  const Eigen::Index pos_f = fine.size() - k;
  const Eigen::Index pos_c = coarse.size() - k;
  // Prefix sums of refined logs and of the Richardson corrections.
  const Eigen::Index avail = std::min(pos_f, pos_c);
  std::vector<double> log_sum(avail + 1, 0.0);
  std::vector<double> corr_sum(avail + 1, 0.0);
  for (Eigen::Index p = 0; p < avail; ++p) {
    const double lf = fine[k + p];
    const double lc = coarse[k + p];
    double refined = lf + (lf - lc) / 15.0;
    if (!(refined > 0.0)) refined = lf;
    log_sum[p + 1] = log_sum[p] + std::log(refined);
    corr_sum[p + 1] = corr_sum[p] + std::abs(std::log(refined) - std::log(lf));
  }

  const int k_max = ops.grid / 16;
  double best = std::numeric_limits<double>::infinity();
  for (int kc = 8; kc <= k_max; ++kc) {
    const Eigen::Index count = static_cast<Eigen::Index>(r) * (2 * kc + 1) - k;
    if (count > avail || count < 0) break;
    const double tail_err = 2.0 * r * std::pow(v.max_deviation / c, 3) / (5.0 * std::pow(kc, 5));
    const double est = corr_sum[count] + tail_err;
    if (!(est < best)) continue;
    double tail = 0.0;
    for (double a : shifts) {
      tail += tail_log_sum(c, kc + 1 + a, v) + tail_log_sum(c, kc + 1 - a, v);
    }
    best = est;
    out.available = true;
    out.value = log_sum[count] + tail;
    out.error = est;
    out.modes = kc;
  }
  return out;
}

double noise_floor(double sigma_max, Eigen::Index dim) {
  return 64.0 * std::numeric_limits<double>::epsilon() * sigma_max *
         std::sqrt(static_cast<double>(dim));
}

Spectrum spectrum_impl(const WittenOperators& ops, bool with_vectors) {
  const unsigned opts = with_vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
  Eigen::BDCSVD<Matrix> svd(ops.d, opts);
  const Vector& sv = svd.singularValues();  // descending
  const Eigen::Index dim = sv.size();
  Spectrum s;
  s.noise_floor = noise_floor(sv.size() ? sv[0] : 0.0, dim);
  Vector ascending = sv.reverse().array().square().matrix();
  s.eigenvalues = {ascending, ascending};
  s.kernel_dim = ops.kernel_dim;
  int numerical = 0;
  for (double v : sv) {
    if (v <= s.noise_floor) ++numerical;
  }
  if (numerical != ops.kernel_dim) {
    std::ostringstream os;
    os.precision(6);
    os << "numerical kernel (" << numerical << ") differs from holonomy-invariant dimension ("
       << ops.kernel_dim << ") at t = " << ops.t << "; noise floor " << s.noise_floor
       << ", smallest singular values:";
    for (Eigen::Index p = 0; p < std::min<Eigen::Index>(dim, ops.kernel_dim + 3); ++p) {
      os << " " << sv[dim - 1 - p];
    }
    throw Error(ErrorKind::ambiguity, os.str());
  }
  if (with_vectors) {
    s.eigenvectors[0] = svd.matrixV().rowwise().reverse();
    s.eigenvectors[1] = svd.matrixU().rowwise().reverse();
  }
  return s;
}

std::array<ZetaDet, 2> zeta_impl(const WittenOperators& ops, const Spectrum& fine,
                                 const ZetaOptions& opt) {
  Eigen::EigenSolver<Matrix> es(ops.twisted_holonomy, false);
  const Eigen::VectorXcd eig = es.eigenvalues();
  if (count_unit_eigenvalues(eig) != ops.kernel_dim) {
    throw Error(ErrorKind::input, "holonomy is not semisimple at eigenvalue 1");
  }
  bool unitary = true;
  for (const auto& z : eig) unitary = unitary && std::abs(std::abs(z) - 1.0) <= 1e-10;

  Spectrum coarse;
  bool have_coarse = false;
  if (opt.cross_check && unitary && ops.grid % 4 == 0) {
    circle::CircleModel half = ops.model;
    half.grid = ops.grid / 2;
    PrecisionGuard loose;
    loose.max_stencil_ratio = std::numeric_limits<double>::max();
    coarse = spectrum_impl(assemble(half, ops.t, loose), false);
    have_coarse = true;
  }

  std::array<ZetaDet, 2> out;
  for (int degree = 0; degree <= 1; ++degree) {
    ZetaDet& z = out[degree];
    const MonodromyTrace mt = monodromy_trace(ops.model, ops.t, degree);
    double value = ops.kernel_dim * std::log(mt.derivative);
    double err = ops.kernel_dim * mt.relative_error;
    for (const auto& h : eig) {
      if (std::abs(h - 1.0) <= 1e-8) continue;
      const std::complex<double> factor = mt.trace - h - 1.0 / h;
      value += std::log(std::abs(factor));
      err += mt.relative_error * std::abs(mt.trace) / std::abs(factor);
    }
    z.monodromy_value = value;
    z.monodromy_error = err + 1e-14 * std::max(1.0, std::abs(value));
    z.log_det = z.monodromy_value;
    z.error = z.monodromy_error;
    z.method = "monodromy";
    if (have_coarse) {
      const SpectralRoute sr =
          spectral_route(ops, eig, fine.eigenvalues[degree], coarse.eigenvalues[degree], degree);
      if (sr.available) {
        z.spectral_available = true;
        z.spectral_value = sr.value;
        z.spectral_error = sr.error;
        z.spectral_modes = sr.modes;
        z.method = "monodromy+spectral";
        const double gap = std::abs(z.spectral_value - z.monodromy_value);
        if (gap > 5.0 * (z.spectral_error + z.monodromy_error)) {
          std::ostringstream os;
          os.precision(10);
          os << "regularization inconsistent in degree " << degree << " at t = " << ops.t
             << ": monodromy " << z.monodromy_value << " +- " << z.monodromy_error
             << ", spectral " << z.spectral_value << " +- " << z.spectral_error;
          throw Error(ErrorKind::inconsistent, os.str());
        }
      }
    }
  }
  return out;
}

// Integrates Z' = [[A, 0], [B, A]] Z with Z(0) = [I; 0]; returns (tr Y, tr Psi).
using Block = Eigen::Matrix<double, 4, 2>;

std::pair<double, double> monodromy_pass(const Vector& w, double length, int steps, int degree) {
  // w holds the weight at s = k L / (2 steps), k = 0 .. 2 steps.
  const double h = length / steps;
  auto rhs = [degree](double wk, const Block& z) {
    const double up = degree == 0 ? 1.0 / wk : wk;    // A(0, 1)
    const double down = degree == 0 ? wk : 1.0 / wk;  // B(1, 0)
    Block dz = Block::Zero();
    dz.row(0) = up * z.row(1);
    dz.row(2) = up * z.row(3);
    dz.row(3) = down * z.row(0);
    return dz;
  };
  Block z = Block::Zero();
  z(0, 0) = 1.0;
  z(1, 1) = 1.0;
  for (int s = 0; s < steps; ++s) {
    const double w0 = w[2 * s];
    const double w1 = w[2 * s + 1];
    const double w2 = w[2 * s + 2];
    const Block k1 = rhs(w0, z);
    const Block k2 = rhs(w1, z + 0.5 * h * k1);
    const Block k3 = rhs(w1, z + 0.5 * h * k2);
    const Block k4 = rhs(w2, z + h * k3);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {z(0, 0) + z(1, 1), z(2, 0) + z(3, 1)};
}

}  // namespace

Matrix WittenOperators::laplacian(int degree) const {
  if (degree == 0) return d.transpose() * d;
  if (degree == 1) return d * d.transpose();
  throw Error(ErrorKind::input, "degree out of range");
}

Matrix WittenOperators::to_fiber_coordinates(int degree, const Matrix& frame) const {
  if (degree != 0 && degree != 1) throw Error(ErrorKind::input, "degree out of range");
  if (frame.rows() != d.rows()) throw Error(ErrorKind::input, "frame vectors have the wrong length");
  const Vector& f = degree == 0 ? f_node : f_mid;
  const auto upper = fiber_factor.transpose().triangularView<Eigen::Upper>();
  Matrix out(frame.rows(), frame.cols());
  for (int j = 0; j < grid; ++j) {
    const double scale = std::exp(t * f[j]) / std::sqrt(step);
    out.middleRows(static_cast<Eigen::Index>(j) * rank, rank) =
        scale * upper.solve(frame.middleRows(static_cast<Eigen::Index>(j) * rank, rank));
  }
  return out;
}

WittenOperators discretize(const circle::CircleModel& model, double t, const PrecisionGuard& guard) {
  circle::validate(model);
  return assemble(circle::centered(model), t, guard);
}

Spectrum spectrum(const WittenOperators& ops, bool with_vectors) {
  return spectrum_impl(ops, with_vectors);
}

MonodromyTrace monodromy_trace(const circle::CircleModel& m, double t, int degree) {
  if (degree != 0 && degree != 1) throw Error(ErrorKind::input, "degree out of range");
  const circle::CriticalData crit = circle::critical_data(m.f);
  const double center = 0.5 * (crit.f_min + crit.f_max);
  auto weights = [&](int steps) {
    Vector w(2 * steps + 1);
    for (int k = 0; k <= 2 * steps; ++k) {
      w[k] = std::exp(-2.0 * t * (m.f(pi * k / steps) - center));
    }
    return w;
  };
  MonodromyTrace out;
  int steps = 256;
  auto prev = monodromy_pass(weights(steps), m.length, steps, degree);
  for (;;) {
    const int next_steps = 2 * steps;
    const auto cur = monodromy_pass(weights(next_steps), m.length, next_steps, degree);
    const double rel = std::abs(cur.second - prev.second) / std::abs(cur.second);
    const double trace_rel = std::abs(cur.first - prev.first) / std::abs(cur.first);
    out.trace = cur.first;
    out.derivative = cur.second;
    out.relative_error = std::max(rel, trace_rel);
    out.steps = next_steps;
    steps = next_steps;
    prev = cur;
    if (out.relative_error < 1e-13 || steps >= (1 << 17)) break;
  }
  if (!(out.derivative > 0.0) || !std::isfinite(out.derivative)) {
    throw Error(ErrorKind::numeric, "monodromy integration failed");
  }
  return out;
}

std::array<ZetaDet, 2> zeta_log_dets(const WittenOperators& ops, const ZetaOptions& opt) {
  const Spectrum fine = spectrum_impl(ops, false);
  return zeta_impl(ops, fine, opt);
}

ZetaDet zeta_log_det(const WittenOperators& ops, int degree, const ZetaOptions& opt) {
  if (degree != 0 && degree != 1) throw Error(ErrorKind::input, "degree out of range");
  return zeta_log_dets(ops, opt)[degree];
}

SpectralSplit spectral_split(const WittenOperators& ops, const Spectrum& s) {
  SpectralSplit out;
  for (int i = 0; i <= 1; ++i) {
    const Vector& ev = s.eigenvalues[i];
    Eigen::Index m = 0;
    while (m < ev.size() && ev[m] <= 1.0) ++m;
    out.small[i] = ev.head(m);
    out.large[i] = ev.tail(ev.size() - m);
    out.count[i] = static_cast<int>(m);
    if (s.eigenvectors[i].cols() == ev.size()) out.small_vectors[i] = s.eigenvectors[i].leftCols(m);
    for (double lambda : ev) {
      if (std::abs(lambda - 1.0) <= 0.01) {
        std::ostringstream os;
        os << "degree " << i << ": eigenvalue " << lambda << " within 1% of the cutoff 1 at t = "
           << ops.t;
        out.warnings.push_back(os.str());
      }
    }
  }
  return out;
}

SpectralSplit spectral_split(const WittenOperators& ops) {
  return spectral_split(ops, spectrum_impl(ops, true));
}

TorsionReport rs_torsion(const circle::CircleModel& model, double t, const ZetaOptions& opt) {
  const WittenOperators ops = discretize(model, t);
  const Spectrum s = spectrum_impl(ops, false);
  const SpectralSplit split = spectral_split(ops, s);
  TorsionReport rep;
  rep.t = t;
  rep.det = zeta_impl(ops, s, opt);
  rep.log_rho = -0.5 * rep.det[1].log_det;
  rep.error = 0.5 * rep.det[1].error;
  rep.small_count = split.count;
  rep.warnings = split.warnings;
  const Vector& ev = s.eigenvalues[0];
  rep.smallest_positive =
      ev.size() > s.kernel_dim ? ev[s.kernel_dim] : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

double rs_torsion_log(const circle::CircleModel& model, double t, const ZetaOptions& opt) {
  return rs_torsion(model, t, opt).log_rho;
}

Matrix integrate(const WittenOperators& ops, int degree, const Matrix& frame) {
  const Matrix fiber = ops.to_fiber_coordinates(degree, frame);
  const int r = ops.rank;
  if (degree == 0) return fiber.topRows(r);
  Matrix sum = Matrix::Zero(r, frame.cols());
  for (int j = 0; j < ops.grid; ++j) sum += fiber.middleRows(static_cast<Eigen::Index>(j) * r, r);
  return ops.step * sum;
}

namespace {

void check_circle_morse(const WittenOperators& ops, const morse::MorseData& morse) {
  if (morse.n != 1 || morse.rank != ops.rank || morse.points.size() != 2) {
    throw Error(ErrorKind::input, "Morse data does not match the circle model");
  }
  int mins = 0;
  for (const auto& p : morse.points) mins += p.index == 0 ? 1 : 0;
  if (mins != 1) throw Error(ErrorKind::input, "Morse data needs one minimum and one maximum");
}

const morse::CriticalPoint& point_of_index(const morse::MorseData& morse, int index) {
  for (const auto& p : morse.points) {
    if (p.index == index) return p;
  }
  throw Error(ErrorKind::input, "no critical point of index " + std::to_string(index));
}

}  // namespace

IntegrationMap unstable_integration_map(const WittenOperators& ops, const SpectralSplit& split,
                                        const morse::MorseData& morse) {
  check_circle_morse(ops, morse);
  IntegrationMap out;
  for (int i = 0; i <= 1; ++i) {
    if (split.small_vectors[i].cols() != split.count[i]) {
      throw Error(ErrorKind::input, "spectral split was computed without eigenvectors");
    }
    out.map[i] = integrate(ops, i, split.small_vectors[i]);
    if (split.count[i] == 0) continue;
    Eigen::JacobiSVD<Matrix> svd(out.map[i]);
    const Vector& sv = svd.singularValues();
    const double cond = split.count[i] > ops.rank || sv.minCoeff() == 0.0
                            ? std::numeric_limits<double>::infinity()
                            : sv.maxCoeff() / sv.minCoeff();
    out.condition[i] = cond;
    if (!(cond <= 1e8)) {
      throw Error(ErrorKind::degenerate, "comparison map degenerate; increase t or N");
    }
  }
  const Matrix boundary = morse::build_thom_smale(morse).complex.boundary(0);
  const Matrix& p0 = out.map[0];
  if (p0.cols() > 0) {
    const Matrix lhs = integrate(ops, 1, ops.d * split.small_vectors[0]);
    const Matrix rhs = boundary * p0;
    out.chain_defect = (lhs - rhs).norm() / (p0.norm() * (1.0 + boundary.norm()));
  }
  return out;
}

std::array<Vector, 2> image_norms(const IntegrationMap& map, const morse::MorseData& morse) {
  std::array<Vector, 2> out;
  for (int i = 0; i <= 1; ++i) {
    const Matrix g = morse.fiber_metric(point_of_index(morse, i).id);
    const Matrix& p = map.map[i];
    out[i].resize(p.cols());
    for (Eigen::Index k = 0; k < p.cols(); ++k) out[i][k] = std::sqrt(p.col(k).dot(g * p.col(k)));
  }
  return out;
}

namespace {

// A_i = Z_i^T G P_i Omega_i and the Thom-Smale harmonic bases Z_i.
struct HarmonicComparison {
  std::array<Matrix, 2> a;
  std::array<Matrix, 2> ts_harmonic;
  std::array<Matrix, 2> ts_gram;
};

HarmonicComparison compare_harmonic(const circle::CircleModel& model, double t) {
  const WittenOperators ops = discretize(model, t);
  const Spectrum s = spectrum_impl(ops, true);
  const morse::MorseData morse = circle::canonical_morse_data(model);
  const morse::ThomSmaleComplex ts = morse::build_thom_smale(morse);
  const std::vector<Matrix> z = complex::harmonic_basis(ts.complex);
  HarmonicComparison out;
  for (int i = 0; i <= 1; ++i) {
    const Matrix omega = s.eigenvectors[i].leftCols(s.kernel_dim);
    if (z[i].cols() != s.kernel_dim) {
      throw Error(ErrorKind::numeric, "Thom-Smale cohomology and spectral kernel differ in degree " +
                                          std::to_string(i));
    }
    out.ts_gram[i] = ts.complex.gram(i);
    out.ts_harmonic[i] = z[i];
    out.a[i] = z[i].transpose() * out.ts_gram[i] * integrate(ops, i, omega);
  }
  return out;
}

}  // namespace

complex::DetLineLogNorm rs_metric_lognorm(const circle::CircleModel& model, double t,
                                          const complex::ReferenceClasses& refs) {
  if (refs.size() != 2) throw Error(ErrorKind::input, "reference classes needed for degrees 0 and 1");
  const HarmonicComparison hc = compare_harmonic(model, t);
  complex::DetLineLogNorm out;
  for (int i = 0; i <= 1; ++i) {
    const Eigen::Index b = hc.a[i].cols();
    if (refs[i].cols() != b || (b > 0 && refs[i].rows() != model.bundle.rank)) {
      throw Error(ErrorKind::input, "degree " + std::to_string(i) + " needs " + std::to_string(b) +
                                        " reference cocycles of length rank");
    }
    if (b == 0) {
      out.log_volume.push_back(0.0);
      continue;
    }
    const Matrix coords = hc.ts_harmonic[i].transpose() * hc.ts_gram[i] * refs[i];
    const double ref = complex::log_abs_det(coords);
    if (!std::isfinite(ref)) {
      throw Error(ErrorKind::degenerate, "reference classes not independent in cohomology");
    }
    out.log_volume.push_back(ref - complex::log_abs_det(hc.a[i]));
  }
  out.combined = out.log_volume[0] - out.log_volume[1];
  return out;
}

double metric_ratio_log(const circle::CircleModel& model, double t) {
  const HarmonicComparison hc = compare_harmonic(model, t);
  return complex::log_abs_det(hc.a[0]) - complex::log_abs_det(hc.a[1]);
}

}  // namespace torsionlab::spectral
