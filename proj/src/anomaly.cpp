#include "torsionlab/anomaly.hpp"

#include "torsionlab/error.hpp"

#include <cmath>
#include <numbers>

namespace torsionlab::anomaly {

using std::numbers::pi;

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::computed: return "computed";
    case Provenance::user_supplied: return "user_supplied";
    case Provenance::vanishes_by_assumption: return "vanishes_by_assumption";
    case Provenance::missing: return "missing";
  }
  return "missing";
}

void validate(const PredictionInputs& in) {
  if (in.n < 1) throw Error(ErrorKind::input, "dimension must be at least 1");
  if (in.rank < 1) throw Error(ErrorKind::input, "rank must be at least 1");
  if (in.n % 2 == 1 && in.f_euler_integral.value && *in.f_euler_integral.value != 0.0) {
    throw Error(ErrorKind::input, "the Euler form vanishes in odd dimension; got a nonzero integral");
  }
  if (in.parallel_metric && in.theta_psi_integral.value && *in.theta_psi_integral.value != 0.0) {
    throw Error(ErrorKind::input, "theta vanishes for a parallel metric; got a nonzero integral");
  }
}

Prediction predict_coefficients(const PredictionInputs& in) {
  validate(in);
  Prediction p;
  if (in.log_rho_milnor.value && in.theta_psi_integral.value) {
    p.a0 = *in.log_rho_milnor.value - 0.5 * *in.theta_psi_integral.value;
  }
  if (in.f_euler_integral.value) {
    p.a1 = -in.rank * *in.f_euler_integral.value + static_cast<double>(in.chi_prime);
  }
  p.b = 0.25 * in.n * static_cast<double>(in.chi) - 0.5 * static_cast<double>(in.chi_prime);
  return p;
}

PredictionInputs inputs_from_morse(const morse::MorseData& data,
                                   std::optional<double> theta_psi_integral,
                                   std::optional<double> f_euler_integral) {
  const morse::ThomSmaleComplex ts = morse::build_thom_smale(data);
  const complex::BettiResult b = complex::betti(ts.complex);
  if (!b.warnings.empty()) throw Error(ErrorKind::ambiguity, b.warnings.front());
  const complex::EulerCharacteristics e = complex::euler_characteristics(b.betti);
  PredictionInputs in;
  in.n = data.n;
  in.rank = data.rank;
  in.chi = e.chi;
  in.chi_prime = e.chi_prime;
  in.tilde_chi_prime = morse::tilde_chi_prime(data);
  in.parallel_metric = data.parallel_metric;
  in.log_rho_milnor = Term::computed(complex::torsion_log(ts.complex));
  if (data.n % 2 == 1) {
    in.f_euler_integral = Term::vanishing();
  } else if (f_euler_integral) {
    in.f_euler_integral = Term::user(*f_euler_integral);
  }
  if (data.parallel_metric) {
    in.theta_psi_integral = Term::vanishing();
  } else if (theta_psi_integral) {
    in.theta_psi_integral = Term::user(*theta_psi_integral);
  }
  return in;
}

namespace {

Json term_json(const Term& t) {
  Json j;
  j["value"] = t.value ? Json(*t.value) : Json(nullptr);
  j["provenance"] = to_string(t.provenance);
  return j;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json prediction_report(const PredictionInputs& in, const Prediction& p) {
  Json j;
  j["inputs"] = {{"n", in.n},
                 {"rank", in.rank},
                 {"chi", in.chi},
                 {"chi_prime", in.chi_prime},
                 {"tilde_chi_prime", in.tilde_chi_prime},
                 {"parallel_metric", in.parallel_metric},
                 {"log_rho_milnor", term_json(in.log_rho_milnor)},
                 {"f_euler_integral", term_json(in.f_euler_integral)},
                 {"theta_psi_integral", term_json(in.theta_psi_integral)}};
  j["prediction"] = {{"a0", optional_json(p.a0)}, {"a1", optional_json(p.a1)}, {"b", p.b}};
  return j;
}

Vector theta_form(std::span<const Matrix> metric_samples, double length) {
  const auto n = static_cast<Eigen::Index>(metric_samples.size());
  if (n < 4) throw Error(ErrorKind::input, "theta_form needs at least four samples");
  if (!(length > 0.0)) throw Error(ErrorKind::input, "period must be positive");
  std::vector<double> logdet(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Matrix& g = metric_samples[j];
    if (g.rows() != g.cols() || g.rows() != metric_samples[0].rows()) {
      throw Error(ErrorKind::input, "metric samples must be square and of equal size");
    }
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success || (g - g.transpose()).norm() > 1e-12 * g.norm()) {
      throw Error(ErrorKind::input, "metric sample " + std::to_string(j) + " is not SPD");
    }
    logdet[j] = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  // Tr[G^{-1} dG] = d log det G. Offsetting by the first value makes a
  // constant metric give exact zeros.
  const double base = logdet[0];
  for (double& v : logdet) v -= base;
  const circle::PeriodicFunction interp = circle::PeriodicFunction::from_samples(logdet);
  Vector out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out[j] = 2.0 * pi / length * interp(2.0 * pi * static_cast<double>(j) / n, 1);
  }
  return out;
}

Surface Surface::round_sphere(std::function<double(double, double)> f) {
  Surface s;
  s.kind = Kind::sphere;
  s.e = [](double, double) { return 1.0; };
  s.f_metric = [](double, double) { return 0.0; };
  s.g = [](double u, double) { return std::sin(u) * std::sin(u); };
  s.f = std::move(f);
  return s;
}

Surface Surface::flat_torus(std::function<double(double, double)> f) {
  Surface s;
  s.kind = Kind::torus;
  s.e = [](double, double) { return 1.0; };
  s.f_metric = [](double, double) { return 0.0; };
  s.g = [](double, double) { return 1.0; };
  s.f = std::move(f);
  return s;
}

Surface Surface::revolution_torus(double big, double small, std::function<double(double, double)> f) {
  if (!(big > small && small > 0.0)) throw Error(ErrorKind::input, "need big > small > 0");
  Surface s;
  s.kind = Kind::torus;
  // u around the tube, v around the axis.
  s.e = [small](double, double) { return small * small; };
  s.f_metric = [](double, double) { return 0.0; };
  s.g = [big, small](double u, double) {
    const double rho = big + small * std::cos(u);
    return rho * rho;
  };
  s.f = std::move(f);
  return s;
}

namespace {

void gauss_legendre(int n, Vector& x, Vector& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Collocation derivative on arbitrary distinct nodes (barycentric form).
Matrix lagrange_derivative(const Vector& x) {
  const Eigen::Index n = x.size();
  Vector bw = Vector::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != i) bw[i] /= (x[i] - x[k]);
    }
  }
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      d(i, k) = bw[k] / bw[i] / (x[i] - x[k]);
      d(i, i) -= d(i, k);
    }
  }
  return d;
}

// Spectral derivative for n equispaced points of period 2 pi (n even).
Matrix fourier_derivative(int n) {
  Matrix d = Matrix::Zero(n, n);
  const double h = 2.0 * pi / n;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      const int diff = i - k;
      d(i, k) = 0.5 * ((diff % 2 == 0) ? 1.0 : -1.0) / std::tan(0.5 * diff * h);
    }
  }
  return d;
}

double quadrature(const Surface& s, int nu, int nv) {
  Vector u;
  Vector wu;
  Matrix du;
  if (s.kind == Surface::Kind::sphere) {
    Vector x;
    gauss_legendre(nu, x, wu);
    u = (x.array() + 1.0) * (0.5 * pi);
    wu *= 0.5 * pi;
    du = lagrange_derivative(u);
  } else {
    u = Vector::LinSpaced(nu, 0.0, 2.0 * pi * (nu - 1) / nu);
    wu = Vector::Constant(nu, 2.0 * pi / nu);
    du = fourier_derivative(nu);
  }
  const Vector v = Vector::LinSpaced(nv, 0.0, 2.0 * pi * (nv - 1) / nv);
  const double wv = 2.0 * pi / nv;
  const Matrix dv = fourier_derivative(nv);

  Matrix e(nu, nv), fm(nu, nv), g(nu, nv), f(nu, nv);
  for (int i = 0; i < nu; ++i) {
    for (int k = 0; k < nv; ++k) {
      e(i, k) = s.e(u[i], v[k]);
      fm(i, k) = s.f_metric(u[i], v[k]);
      g(i, k) = s.g(u[i], v[k]);
      f(i, k) = s.f(u[i], v[k]);
    }
  }
  // Rows index u, columns index v.
  const Matrix e_u = du * e, e_v = e * dv.transpose(), e_vv = e_v * dv.transpose();
  const Matrix f_u = du * fm, f_v = fm * dv.transpose(), f_uv = f_u * dv.transpose();
  const Matrix g_u = du * g, g_v = g * dv.transpose(), g_uu = du * g_u;

  double total = 0.0;
  for (int i = 0; i < nu; ++i) {
    for (int k = 0; k < nv; ++k) {
      const double ee = e(i, k), ff = fm(i, k), gg = g(i, k);
      const double jac = ee * gg - ff * ff;
      if (!(jac > 0.0)) throw Error(ErrorKind::input, "metric is not positive definite on the grid");
      Eigen::Matrix3d a;
      a << -0.5 * e_vv(i, k) + f_uv(i, k) - 0.5 * g_uu(i, k), 0.5 * e_u(i, k),
          f_u(i, k) - 0.5 * e_v(i, k), f_v(i, k) - 0.5 * g_u(i, k), ee, ff, 0.5 * g_v(i, k), ff, gg;
      Eigen::Matrix3d b;
      b << 0.0, 0.5 * e_v(i, k), 0.5 * g_u(i, k), 0.5 * e_v(i, k), ee, ff, 0.5 * g_u(i, k), ff, gg;
      const double curvature = (a.determinant() - b.determinant()) / (jac * jac);
      total += wu[i] * wv * f(i, k) * curvature * std::sqrt(jac) / (2.0 * pi);
    }
  }
  return total;
}

}  // namespace

EulerIntegral f_euler_integral_2d(const Surface& s, int nu, int nv, double tolerance) {
  if (!s.e || !s.f_metric || !s.g || !s.f) throw Error(ErrorKind::input, "surface is incomplete");
  if (nu < 8 || nv < 8 || nv % 2 != 0 || (s.kind == Surface::Kind::torus && nu % 2 != 0)) {
    throw Error(ErrorKind::input, "grid must be at least 8 x 8 with even periodic sizes");
  }
  const auto coarser = [](int n) { return std::max(8, (3 * n / 4) / 2 * 2); };
  EulerIntegral out;
  out.nu = nu;
  out.nv = nv;
  out.value = quadrature(s, nu, nv);
  out.estimate = std::abs(out.value - quadrature(s, coarser(nu), coarser(nv)));
  if (!(out.estimate <= tolerance)) {
    throw Error(ErrorKind::numeric, "Euler integral not converged under refinement: estimate " +
                                        std::to_string(out.estimate));
  }
  return out;
}

}  // namespace torsionlab::anomaly
