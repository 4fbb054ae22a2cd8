#include "torsionlab/circle_model.hpp"

#include "torsionlab/error.hpp"

#include <cmath>

namespace torsionlab::circle {

using std::numbers::pi;

PeriodicFunction PeriodicFunction::one_minus_cos() {
  PeriodicFunction f;
  f.kind_ = Kind::one_minus_cos;
  f.cos_ = Vector::Zero(2);
  f.sin_ = Vector::Zero(2);
  f.cos_[0] = 0.5;
  f.cos_[1] = -0.5;
  return f;
}

PeriodicFunction PeriodicFunction::from_samples(std::span<const double> values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  if (n < 4) throw Error(ErrorKind::input, "need at least four samples of f");
  PeriodicFunction f;
  f.kind_ = Kind::samples;
  f.samples_ = Eigen::Map<const Vector>(values.data(), n);
  const Eigen::Index top = n / 2;
  f.cos_ = Vector::Zero(top + 1);
  f.sin_ = Vector::Zero(top + 1);
  for (Eigen::Index k = 0; k <= top; ++k) {
    double c = 0.0;
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double theta = 2.0 * pi * static_cast<double>(k * j % n) / static_cast<double>(n);
      c += values[j] * std::cos(theta);
      s += values[j] * std::sin(theta);
    }
    const bool edge = k == 0 || (n % 2 == 0 && k == top);
    f.cos_[k] = (edge ? 1.0 : 2.0) * c / static_cast<double>(n);
    f.sin_[k] = edge ? 0.0 : 2.0 * s / static_cast<double>(n);
  }
  return f;
}

double PeriodicFunction::operator()(double theta, int derivative) const {
  double v = derivative == 0 ? cos_[0] : 0.0;
  const double phase = 0.5 * pi * derivative;
  for (Eigen::Index k = 1; k < cos_.size(); ++k) {
    if (cos_[k] == 0.0 && sin_[k] == 0.0) continue;
    const double kd = static_cast<double>(k);
    const double arg = kd * theta + phase;
    v += std::pow(kd, derivative) * (cos_[k] * std::cos(arg) + sin_[k] * std::sin(arg));
  }
  return v;
}

PeriodicFunction PeriodicFunction::rotated(double theta0) const {
  PeriodicFunction g = *this;
  for (Eigen::Index k = 1; k < cos_.size(); ++k) {
    const double c = std::cos(static_cast<double>(k) * theta0);
    const double s = std::sin(static_cast<double>(k) * theta0);
    g.cos_[k] = cos_[k] * c + sin_[k] * s;
    g.sin_[k] = sin_[k] * c - cos_[k] * s;
  }
  if (samples_.size() > 0) {
    const auto n = samples_.size();
    for (Eigen::Index j = 0; j < n; ++j) {
      g.samples_[j] = (*this)(theta0 + 2.0 * pi * static_cast<double>(j) / static_cast<double>(n));
    }
  }
  return g;
}

FlatBundle FlatBundle::trivial(int rank) {
  return {rank, Matrix::Identity(rank, rank), Matrix::Identity(rank, rank)};
}

FlatBundle FlatBundle::rotation(double alpha) {
  Matrix r(2, 2);
  r << std::cos(alpha), -std::sin(alpha), std::sin(alpha), std::cos(alpha);
  return {2, r, Matrix::Identity(2, 2)};
}

bool FlatBundle::parallel(double tol) const {
  const Matrix defect = holonomy.transpose() * fiber_metric * holonomy - fiber_metric;
  return defect.norm() <= tol * std::max(1.0, fiber_metric.norm());
}

CircleModel CircleModel::trivial(int grid, double length) {
  CircleModel m;
  m.grid = grid;
  m.length = length;
  return m;
}

CircleModel CircleModel::rotation(double alpha, int grid, double length) {
  CircleModel m = trivial(grid, length);
  m.bundle = FlatBundle::rotation(alpha);
  return m;
}

bool CircleModel::self_indexing(double tol) const {
  const CriticalData c = critical_data(f);
  return std::abs(c.f_min) <= tol && std::abs(c.f_max - 1.0) <= tol;
}

CriticalData critical_data(const PeriodicFunction& f) {
  // Sign changes of f' on a grid fine enough to resolve every harmonic.
  const int m = std::max<int>(256, 16 * static_cast<int>(f.samples().size()));
  std::vector<double> roots;
  const auto th = [m](int j) { return 2.0 * pi * j / m; };
  double prev = f(th(0), 1);
  for (int j = 1; j <= m; ++j) {
    const double cur = f(th(j), 1);
    if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) {
      double lo = th(j - 1);
      double hi = th(j);
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = f(mid, 1);
        if ((v < 0.0) == (prev < 0.0) && v != 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      double x = 0.5 * (lo + hi);
      for (int it = 0; it < 3; ++it) {
        const double d2 = f(x, 2);
        if (d2 != 0.0) x -= f(x, 1) / d2;
      }
      roots.push_back(std::fmod(x + 2.0 * pi, 2.0 * pi));
    }
    prev = cur;
  }
  if (roots.size() != 2) {
    throw Error(ErrorKind::input, "f must have exactly two critical points, found " +
                                      std::to_string(roots.size()));
  }
  CriticalData c;
  const bool first_is_min = f(roots[0]) < f(roots[1]);
  c.theta_min = first_is_min ? roots[0] : roots[1];
  c.theta_max = first_is_min ? roots[1] : roots[0];
  c.f_min = f(c.theta_min);
  c.f_max = f(c.theta_max);
  const double scale = std::max(1e-300, c.f_max - c.f_min);
  if (f(c.theta_min, 2) <= 1e-8 * scale || f(c.theta_max, 2) >= -1e-8 * scale) {
    throw Error(ErrorKind::input, "critical points of f must be nondegenerate");
  }
  return c;
}

void validate(const CircleModel& model) {
  if (!(model.length > 0.0) || !std::isfinite(model.length)) {
    throw Error(ErrorKind::input, "circumference must be positive");
  }
  if (model.grid < 64 || model.grid % 2 != 0) {
    throw Error(ErrorKind::input, "grid size must be even and at least 64");
  }
  if (model.f.kind() == PeriodicFunction::Kind::samples && model.f.samples().size() != model.grid) {
    throw Error(ErrorKind::input, "f must be sampled at exactly N grid points");
  }
  const FlatBundle& b = model.bundle;
  if (b.rank < 1) throw Error(ErrorKind::input, "bundle rank must be at least 1");
  if (b.holonomy.rows() != b.rank || b.holonomy.cols() != b.rank ||
      b.fiber_metric.rows() != b.rank || b.fiber_metric.cols() != b.rank) {
    throw Error(ErrorKind::input, "holonomy and fiber metric must be rank x rank");
  }
  if ((b.fiber_metric - b.fiber_metric.transpose()).norm() > 1e-12 * b.fiber_metric.norm()) {
    throw Error(ErrorKind::input, "fiber metric is not symmetric");
  }
  if (Eigen::LLT<Matrix>(b.fiber_metric).info() != Eigen::Success) {
    throw Error(ErrorKind::input, "fiber metric is not positive definite");
  }
  Eigen::JacobiSVD<Matrix> svd(b.holonomy);
  if (svd.singularValues().minCoeff() <= 1e-12 * svd.singularValues().maxCoeff()) {
    throw Error(ErrorKind::input, "holonomy is not invertible");
  }
  critical_data(model.f);
}

CircleModel centered(const CircleModel& model) {
  CircleModel out = model;
  out.f = model.f.rotated(critical_data(model.f).theta_min);
  return out;
}

morse::MorseData canonical_morse_data(const CircleModel& model) {
  const CriticalData c = critical_data(model.f);
  const int r = model.bundle.rank;
  morse::MorseData d;
  d.n = 1;
  d.rank = r;
  d.parallel_metric = model.bundle.parallel();
  d.points = {{"min", 0, c.f_min}, {"max", 1, c.f_max}};
  d.fiber_metrics = {{"min", model.bundle.fiber_metric}, {"max", model.bundle.fiber_metric}};
  d.instantons = {{"min", "max", +1, model.bundle.holonomy},
                  {"min", "max", -1, Matrix::Identity(r, r)}};
  return d;
}

CircleModel model_from_json(const Json& j) {
  try {
    CircleModel m;
    m.length = j.value("L", 2.0 * pi);
    m.grid = j.value("N", 512);
    if (j.contains("f")) {
      const Json& jf = j["f"];
      const std::string kind = jf.value("kind", "one-minus-cos");
      if (kind == "one-minus-cos") {
        m.f = PeriodicFunction::one_minus_cos();
      } else if (kind == "samples") {
        const auto values = jf.at("values").get<std::vector<double>>();
        m.f = PeriodicFunction::from_samples(values);
      } else {
        throw Error(ErrorKind::input, "unknown f kind '" + kind + "'");
      }
    }
    if (j.contains("bundle")) {
      const Json& jb = j["bundle"];
      const int r = jb.value("rank", 1);
      if (r < 1) throw Error(ErrorKind::input, "bundle rank must be at least 1");
      m.bundle.rank = r;
      m.bundle.holonomy = jb.contains("holonomy") ? matrix_from_json(jb["holonomy"], r, r)
                                                  : Matrix(Matrix::Identity(r, r));
      m.bundle.fiber_metric = jb.contains("fiber_metric")
                                  ? matrix_from_json(jb["fiber_metric"], r, r)
                                  : Matrix(Matrix::Identity(r, r));
    }
    validate(m);
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::input, std::string("circle model: ") + e.what());
  }
}

Json model_to_json(const CircleModel& model) {
  Json j;
  j["L"] = model.length;
  j["N"] = model.grid;
  if (model.f.kind() == PeriodicFunction::Kind::one_minus_cos) {
    j["f"] = {{"kind", "one-minus-cos"}};
  } else {
    const Vector& v = model.f.samples();
    j["f"] = {{"kind", "samples"}, {"values", std::vector<double>(v.data(), v.data() + v.size())}};
  }
  j["bundle"] = {{"rank", model.bundle.rank},
                 {"holonomy", matrix_to_json(model.bundle.holonomy)},
                 {"fiber_metric", matrix_to_json(model.bundle.fiber_metric)}};
  return j;
}

}  // namespace torsionlab::circle
