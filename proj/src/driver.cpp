#include "torsionlab/driver.hpp"

#include "torsionlab/error.hpp"
#include "torsionlab/random_data.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace torsionlab::driver {

std::vector<double> sweep_grid(const SweepConfig& c) {
  if (c.samples < 0) throw Error(ErrorKind::input, "samples must be >= 0");
  if (c.samples == 0) return {};
  if (!(c.t_min >= 0.0) || !(c.t_max >= c.t_min) || !std::isfinite(c.t_max)) {
    throw Error(ErrorKind::input, "need 0 <= t_min <= t_max");
  }
  if (c.samples == 1) return {c.t_min};
  std::vector<double> ts(static_cast<std::size_t>(c.samples));
  if (c.spacing == Spacing::log) {
    if (!(c.t_min > 0.0)) throw Error(ErrorKind::input, "log spacing needs t_min > 0");
    const double lo = std::log(c.t_min);
    const double hi = std::log(c.t_max);
    for (int k = 0; k < c.samples; ++k) ts[k] = std::exp(lo + (hi - lo) * k / (c.samples - 1));
  } else {
    for (int k = 0; k < c.samples; ++k) {
      ts[k] = c.t_min + (c.t_max - c.t_min) * k / (c.samples - 1);
    }
  }
  ts.front() = c.t_min;
  ts.back() = c.t_max;
  return ts;
}

SweepRow sweep_row(const circle::CircleModel& model, double t, const spectral::ZetaOptions& opt) {
  SweepRow row;
  row.t = t;
  try {
    const spectral::TorsionReport rep = spectral::rs_torsion(model, t, opt);
    row.log_det0 = rep.det[0].log_det;
    row.log_det1 = rep.det[1].log_det;
    row.log_rho = rep.log_rho;
    row.m0 = rep.small_count[0];
    row.m1 = rep.small_count[1];
    row.smallest_positive = rep.smallest_positive;
    row.error = rep.error;
  } catch (const Error& e) {
    row.status = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return row;
}

SweepResult sweep(const SweepConfig& config) {
  circle::validate(config.model);
  const std::vector<double> ts = sweep_grid(config);
  SweepResult result;
  if (!ts.empty() && ts.front() < 1.0) {
    result.warnings.push_back("t_min < 1: the expansion is a large-t statement");
  }
  if (config.samples > 0 && config.samples < 8) {
    result.warnings.push_back("fewer than 8 samples: too few for a fit-grade sweep");
  }
  result.rows.resize(ts.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads =
      std::min<unsigned>(config.threads > 0 ? static_cast<unsigned>(config.threads) : hw,
                         static_cast<unsigned>(std::max<std::size_t>(ts.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < ts.size(); k = next++) {
      result.rows[k] = sweep_row(config.model, ts[k], config.zeta);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < nthreads; ++k) pool.emplace_back(work);
    work();
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.t < b.t; });
  for (const auto& row : result.rows) {
    if (!row.ok()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "t = %.17g: ", row.t);
      result.failures.push_back(buf + row.status);
    }
  }
  return result;
}

namespace {

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

constexpr const char* kHeader =
    "t,log_det0,log_det1,log_rho_rs,m0,m1,smallest_positive_eigenvalue,error_estimate,status";

}  // namespace

void write_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kHeader << "\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g,%.17g,", r.t, r.log_det0,
                  r.log_det1, r.log_rho, r.m0, r.m1, r.smallest_positive, r.error);
    out << buf << sanitize(r.status) << "\n";
  }
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::input, "empty CSV");
  const std::vector<std::string> header = split(line);
  if (header.size() < 8 || header[0] != "t" || header[3] != "log_rho_rs") {
    throw Error(ErrorKind::input, "unrecognized CSV header");
  }
  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() < 8) {
      throw Error(ErrorKind::input, "CSV line " + std::to_string(lineno) + " has too few columns");
    }
    try {
      SweepRow r;
      r.t = std::stod(cells[0]);
      r.log_det0 = std::stod(cells[1]);
      r.log_det1 = std::stod(cells[2]);
      r.log_rho = std::stod(cells[3]);
      r.m0 = std::stoi(cells[4]);
      r.m1 = std::stoi(cells[5]);
      r.smallest_positive = std::stod(cells[6]);
      r.error = std::stod(cells[7]);
      r.status = cells.size() > 8 ? cells[8] : "ok";
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::input, "CSV line " + std::to_string(lineno) + " is malformed");
    }
  }
  return rows;
}

FitResult fit_expansion(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw Error(ErrorKind::input, "t and y differ in length");
  std::vector<double> sorted(t.begin(), t.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::input, "duplicate t values in the fit table");
  }
  const auto m = static_cast<Eigen::Index>(t.size());
  if (m < 4) throw Error(ErrorKind::input, "fit needs at least 4 distinct t values");
  Matrix x(m, 3);
  Vector rhs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    if (!(t[k] > 0.0) || !std::isfinite(y[k])) {
      throw Error(ErrorKind::input, "fit needs t > 0 and finite values");
    }
    x(k, 0) = 1.0;
    x(k, 1) = t[k];
    x(k, 2) = std::log(t[k] / std::numbers::pi);
    rhs[k] = y[k];
  }
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  FitResult fit;
  fit.samples = static_cast<int>(m);
  fit.condition = sv[2] > 0.0 ? sv[0] / sv[2] : std::numeric_limits<double>::infinity();
  if (!(fit.condition <= 1e10)) {
    throw Error(ErrorKind::numeric, "t-range too narrow to separate t from log t");
  }
  const Vector beta = x.colPivHouseholderQr().solve(rhs);
  fit.a0 = beta[0];
  fit.a1 = beta[1];
  fit.b = beta[2];
  const Vector resid = rhs - x * beta;
  fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
  const double s2 = resid.squaredNorm() / static_cast<double>(m - 3);
  const Matrix v = svd.matrixV();
  const Matrix cov = s2 * v * sv.array().square().inverse().matrix().asDiagonal() * v.transpose();
  for (int k = 0; k < 3; ++k) fit.standard_error[k] = std::sqrt(cov(k, k));
  return fit;
}

FitResult fit_expansion(std::span<const SweepRow> rows) {
  std::vector<double> t;
  std::vector<double> y;
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    t.push_back(r.t);
    y.push_back(r.log_rho);
  }
  return fit_expansion(t, y);
}

Json fit_to_json(const FitResult& f) {
  return {{"a0", f.a0},
          {"a1", f.a1},
          {"b", f.b},
          {"standard_error", {{"a0", f.standard_error[0]}, {"a1", f.standard_error[1]}, {"b", f.standard_error[2]}}},
          {"residual_rms", f.residual_rms},
          {"condition", f.condition},
          {"samples", f.samples}};
}

FitResult fit_from_json(const Json& j) {
  try {
    FitResult f;
    f.a0 = j.at("a0").get<double>();
    f.a1 = j.at("a1").get<double>();
    f.b = j.at("b").get<double>();
    if (j.contains("standard_error")) {
      const Json& se = j["standard_error"];
      f.standard_error = {se.value("a0", 0.0), se.value("a1", 0.0), se.value("b", 0.0)};
    }
    f.residual_rms = j.value("residual_rms", 0.0);
    f.condition = j.value("condition", 0.0);
    f.samples = j.value("samples", 0);
    return f;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::input, std::string("fit file: ") + e.what());
  }
}

Comparison compare(const FitResult& fit, const anomaly::Prediction& p, const Tolerances& tol) {
  Comparison c;
  auto check = [&c](std::string name, double fitted, std::optional<double> predicted, double t) {
    CoefficientCheck k;
    k.name = std::move(name);
    k.fitted = fitted;
    k.predicted = predicted;
    k.tolerance = t;
    if (!predicted) {
      k.status = "not evaluated";
    } else {
      k.deviation = fitted - *predicted;
      k.status = std::abs(k.deviation) < t ? "pass" : "fail";
      if (k.status == "fail") c.pass = false;
    }
    c.checks.push_back(std::move(k));
  };
  check("a0", fit.a0, p.a0, tol.a0);
  check("a1", fit.a1, p.a1, tol.a1);
  check("b", fit.b, p.b, tol.b);
  return c;
}

Json comparison_to_json(const Comparison& c) {
  Json j;
  j["verdict"] = c.pass ? "pass" : "fail";
  j["coefficients"] = Json::array();
  for (const auto& k : c.checks) {
    j["coefficients"].push_back({{"name", k.name},
                                 {"fitted", k.fitted},
                                 {"predicted", k.predicted ? Json(*k.predicted) : Json(nullptr)},
                                 {"deviation", k.predicted ? Json(k.deviation) : Json(nullptr)},
                                 {"tolerance", k.tolerance},
                                 {"status", k.status}});
  }
  return j;
}

anomaly::Prediction prediction_from_json(const Json& j) {
  const Json& p = j.contains("prediction") ? j["prediction"] : j;
  auto opt = [&p](const char* key) -> std::optional<double> {
    if (!p.contains(key) || p[key].is_null()) return std::nullopt;
    return p[key].get<double>();
  };
  try {
    anomaly::Prediction out;
    out.a0 = opt("a0");
    out.a1 = opt("a1");
    out.b = p.at("b").get<double>();
    return out;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::input, std::string("prediction file: ") + e.what());
  }
}

VerifyReport verify_finite_suite(std::uint64_t seed, int count, double tolerance) {
  if (count < 0) throw Error(ErrorKind::input, "count must be >= 0");
  VerifyReport rep;
  rep.seed = seed;
  rep.count = count;
  rep.tolerance = tolerance;
  random::Engine rng(seed);
  auto fail = [&rep](const std::string& what, int k, double v) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "case %d: %s = %.3g", k, what.c_str(), v);
    rep.failures.emplace_back(buf);
  };

  for (int k = 0; k < count; ++k) {
    try {
      const complex::GradedComplex c = random::random_complex(rng);
      const complex::ReferenceClasses refs = random::random_references(rng, c);
      const double gap = std::abs(complex::metric_identity_gap(c, refs));
      rep.max_identity_gap = std::max(rep.max_identity_gap, gap);
      if (gap > tolerance) fail("identity gap", k, gap);

      const double tor = complex::torsion_log(c);
      const std::vector<Matrix> basis = random::gram_orthogonal_basis(rng, c);
      const double moved = complex::torsion_log(c.change_basis(basis));
      const double dev = std::abs(moved - tor);
      rep.max_basis_deviation = std::max(rep.max_basis_deviation, dev);
      if (dev > tolerance) fail("basis deviation", k, dev);

      const complex::ReferenceClasses other = random::random_references(rng, c);
      const double diff1 = complex::chain_det_line_lognorm(c, refs).combined -
                           complex::det_line_lognorm(c, refs).combined;
      const double diff2 = complex::chain_det_line_lognorm(c, other).combined -
                           complex::det_line_lognorm(c, other).combined;
      const double rdev = std::abs(diff1 - diff2);
      rep.max_reference_deviation = std::max(rep.max_reference_deviation, rdev);
      if (rdev > tolerance) fail("reference deviation", k, rdev);
    } catch (const Error& e) {
      rep.failures.push_back("case " + std::to_string(k) + ": " + e.what());
    }
    try {
      const morse::MorseData md = random::random_morse_data(rng);
      for (double t : {1.0, 2.5, 10.0}) {
        const morse::DeformationShift s = morse::deformed_milnor_lognorm_shift(md, t);
        const double dev = std::abs(s.shift - (-t * static_cast<double>(morse::tilde_chi_prime(md))));
        rep.max_deformation_deviation = std::max(rep.max_deformation_deviation, dev);
        if (dev > tolerance) fail("deformation deviation", k, dev);
      }
    } catch (const Error& e) {
      rep.failures.push_back("Morse case " + std::to_string(k) + ": " + e.what());
    }
  }

  rep.adversarial_total = count > 0 ? std::max(1, count / 10) : 0;
  for (int k = 0; k < rep.adversarial_total; ++k) {
    random::RawComplex raw = random::adversarial_complex(rng);
    try {
      complex::GradedComplex c(std::move(raw.grams), std::move(raw.boundaries));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::input) ++rep.adversarial_rejected;
    }
  }
  return rep;
}

Json verify_to_json(const VerifyReport& r) {
  return {{"seed", r.seed},
          {"count", r.count},
          {"tolerance", r.tolerance},
          {"max_identity_gap", r.max_identity_gap},
          {"max_basis_deviation", r.max_basis_deviation},
          {"max_reference_deviation", r.max_reference_deviation},
          {"max_deformation_deviation", r.max_deformation_deviation},
          {"adversarial_total", r.adversarial_total},
          {"adversarial_rejected", r.adversarial_rejected},
          {"failures", r.failures},
          {"verdict", r.pass() ? "pass" : "fail"}};
}

}  // namespace torsionlab::driver
