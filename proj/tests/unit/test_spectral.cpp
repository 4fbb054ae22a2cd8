#include "torsionlab/circle_model.hpp"
#include "torsionlab/error.hpp"
#include "torsionlab/spectral.hpp"
#include "torsionlab/zeta.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

using namespace torsionlab;
using namespace torsionlab::spectral;
using circle::CircleModel;
using std::numbers::pi;

namespace {

// Bloch modes u_j = e^{i xi j h} diagonalize the stencil exactly; its symbol is
// (27 sin(xi h / 2) - sin(3 xi h / 2)) / (12 h). At t = 0 the eigenvalues are
// the squared symbols over xi = (2 pi k + phase) / L, k = 0..N-1.
std::vector<double> symbol_spectrum(int grid, double length, std::span<const double> phases) {
  const double h = length / grid;
  std::vector<double> out;
  for (double phase : phases) {
    for (int k = 0; k < grid; ++k) {
      const double xi = (2.0 * pi * k + phase) / length;
      const double s = (27.0 * std::sin(xi * h / 2) - std::sin(3.0 * xi * h / 2)) / (12.0 * h);
      out.push_back(s * s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double bessel_i0(double t) { return std::cyl_bessel_i(0.0, t); }

struct EnvGuard {
  explicit EnvGuard(const char* value) { ::setenv("TORSIONLAB_PRECISION_GUARD", value, 1); }
  ~EnvGuard() { ::unsetenv("TORSIONLAB_PRECISION_GUARD"); }
  EnvGuard(const EnvGuard&) = delete;
  EnvGuard& operator=(const EnvGuard&) = delete;
};

}  // namespace

TEST_CASE("t = 0 spectra match the stencil symbol") {
  const std::vector<double> zero{0.0};
  const auto oracle = symbol_spectrum(256, 2 * pi, zero);
  const WittenOperators ops = discretize(CircleModel::trivial(256), 0.0);
  const Spectrum s = spectrum(ops);
  CHECK(s.kernel_dim == 1);
  for (int i = 0; i <= 1; ++i) {
    REQUIRE(s.eigenvalues[i].size() == 256);
    for (int k = 0; k < 256; ++k) {
      CHECK(std::abs(s.eigenvalues[i][k] - oracle[k]) <= 1e-10 * std::max(1.0, oracle[k]));
    }
  }

  const double alpha = 2.0;
  const std::vector<double> phases{alpha, -alpha};
  const auto twisted = symbol_spectrum(128, 3.0, phases);
  const Spectrum r = spectrum(discretize(CircleModel::rotation(alpha, 128, 3.0), 0.0));
  CHECK(r.kernel_dim == 0);
  for (int k = 0; k < 256; ++k) {
    CHECK(std::abs(r.eigenvalues[1][k] - twisted[k]) <= 1e-10 * std::max(1.0, twisted[k]));
  }
}

// Leading error of the squared symbol: xi^2 - sigma^2 = (3 / 320) xi^2 (xi h)^4.
double truncation_bound(double xi, double h) {
  return 1.01 * 3.0 / 320.0 * xi * xi * std::pow(xi * h, 4) + 1e-12;
}

TEST_CASE("low eigenvalues approach k^2 at fourth order") {
  const Spectrum s = spectrum(discretize(CircleModel::trivial(1024), 0.0));
  const double mode[] = {0, 1, 1, 2, 2, 3, 3};
  const double h = 2 * pi / 1024;
  for (int k = 0; k < 7; ++k) {
    CHECK(std::abs(s.eigenvalues[0][k] - mode[k] * mode[k]) <= truncation_bound(mode[k], h));
  }

  auto error_at = [](int grid) {
    const Spectrum sp = spectrum(discretize(CircleModel::trivial(grid), 0.0));
    return std::abs(sp.eigenvalues[0][5] - 9.0);
  };
  const double ratio = error_at(128) / error_at(256);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("rotation bundle eigenvalues are (k + alpha / 2 pi)^2, doubled") {
  const double alpha = pi / 2;
  const Spectrum s = spectrum(discretize(CircleModel::rotation(alpha, 512), 0.0));
  std::vector<double> modes;
  for (int k = -4; k <= 4; ++k) {
    const double xi = std::abs(k + alpha / (2 * pi));
    modes.push_back(xi);
    modes.push_back(xi);
  }
  std::sort(modes.begin(), modes.end());
  for (int k = 0; k < 12; ++k) {
    CHECK(std::abs(s.eigenvalues[0][k] - modes[k] * modes[k]) <=
          truncation_bound(modes[k], 2 * pi / 512));
  }
}

TEST_CASE("assembled operator equals the conjugated raw stencil") {
  const int n = 128;
  const double t = 3.0;
  const WittenOperators ops = discretize(CircleModel::trivial(n), t);
  const double h = 2 * pi / n;
  Matrix raw = Matrix::Zero(n, n);
  const int offsets[] = {-1, 0, 1, 2};
  const double weights[] = {1, -27, 27, -1};
  for (int j = 0; j < n; ++j) {
    for (int s = 0; s < 4; ++s) raw(j, ((j + offsets[s]) % n + n) % n) += weights[s] / (24 * h);
  }
  Vector node(n);
  Vector mid(n);
  for (int j = 0; j < n; ++j) {
    node[j] = 0.5 * (1 - std::cos(2 * pi * j / n));
    mid[j] = 0.5 * (1 - std::cos(2 * pi * (j + 0.5) / n));
  }
  const Matrix expected = (-t * mid).array().exp().matrix().asDiagonal() * raw *
                          (t * node).array().exp().matrix().asDiagonal();
  CHECK((ops.d - expected).norm() <= 1e-12 * expected.norm());
  CHECK((ops.laplacian(0) - ops.d.transpose() * ops.d).norm() == 0.0);
}

TEST_CASE("spectrum depends only on the holonomy seen in an orthonormal fiber frame") {
  const int n = 128;
  Matrix g(2, 2);
  g << 2.0, 0.4, 0.4, 0.7;
  const Matrix c = Eigen::LLT<Matrix>(g).matrixL();
  const CircleModel rot = CircleModel::rotation(1.1, n);
  CircleModel gauged = rot;
  gauged.bundle.fiber_metric = g;
  gauged.bundle.holonomy = c.transpose().inverse() * rot.bundle.holonomy * c.transpose();
  CHECK(gauged.bundle.parallel());
  for (double t : {0.0, 4.0}) {
    const Spectrum a = spectrum(discretize(rot, t));
    const Spectrum b = spectrum(discretize(gauged, t));
    CHECK((a.eigenvalues[0] - b.eigenvalues[0]).norm() <= 1e-10 * a.eigenvalues[0].norm());
  }
}

TEST_CASE("kernel dimension is stable in t") {
  for (double t : {0.0, 5.0, 15.0}) {
    CHECK(spectrum(discretize(CircleModel::trivial(256), t)).kernel_dim == 1);
    CHECK(spectrum(discretize(CircleModel::rotation(2.0, 256), t)).kernel_dim == 0);
  }
  const Spectrum s = spectrum(discretize(CircleModel::trivial(256), 15.0), true);
  CHECK(s.eigenvalues[0][0] < s.noise_floor);
  CHECK(s.eigenvalues[0][1] > 1e3 * s.noise_floor);
}

TEST_CASE("Hurwitz sums") {
  for (double c : {1.0, 0.3, 7.0}) {
    for (double q : {0.25, 1.0, 2.5}) {
      CHECK(zeta::hurwitz_log_sum(c, q) - zeta::hurwitz_log_sum(c, q + 1) ==
            doctest::Approx(std::log(c * q * q)).epsilon(1e-12));
    }
  }
  // zeta'(0) = -log(2 pi) / 2 and zeta(0) = -1/2 at q = 1.
  CHECK(zeta::hurwitz_log_sum(1.0, 1.0) == doctest::Approx(std::log(2 * pi)));
  CHECK(zeta::twisted_mode_log_sum(5.0, 0.25) == doctest::Approx(std::log(2.0)));
  CHECK(zeta::untwisted_mode_log_sum(1.0) == doctest::Approx(2 * std::log(2 * pi)));
  CHECK(zeta::untwisted_mode_log_sum(4.0) == doctest::Approx(2 * std::log(pi)));
}

TEST_CASE("zeta determinants at t = 0") {
  const auto trivial = zeta_log_dets(discretize(CircleModel::trivial(512), 0.0));
  for (int i = 0; i <= 1; ++i) {
    CHECK(trivial[i].log_det == doctest::Approx(std::log(4 * pi * pi)).epsilon(1e-10));
    CHECK(trivial[i].spectral_available);
    CHECK(std::abs(trivial[i].spectral_value - std::log(4 * pi * pi)) <=
          5 * trivial[i].spectral_error + 1e-12);
  }
  const auto longer = zeta_log_dets(discretize(CircleModel::trivial(512, 5.0), 0.0));
  CHECK(longer[1].log_det == doctest::Approx(2 * std::log(5.0)).epsilon(1e-10));

  for (double alpha : {pi / 2, 2.0}) {
    const auto rot = zeta_log_dets(discretize(CircleModel::rotation(alpha, 512), 0.0));
    const double oracle = 2 * std::log(4 * std::sin(alpha / 2) * std::sin(alpha / 2));
    CHECK(rot[0].log_det == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(rot[1].log_det == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("monodromy of the free operator") {
  const CircleModel m = circle::centered(CircleModel::trivial(64));
  const MonodromyTrace tr = monodromy_trace(m, 0.0, 1);
  CHECK(tr.trace == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tr.derivative == doctest::Approx(4 * pi * pi).epsilon(1e-11));
  CHECK(tr.relative_error < 1e-12);
}

TEST_CASE("torsion of the trivial bundle against the Bessel closed form") {
  for (double t : {1.0, 8.0, 20.0}) {
    const TorsionReport r = rs_torsion(CircleModel::trivial(512), t);
    const double oracle = -std::log(2 * pi * bessel_i0(t));
    CHECK(std::abs(r.log_rho - oracle) < 1e-9);
    CHECK(r.small_count[0] == 1);
    CHECK(r.small_count[1] == 1);
  }
  // Doubling the length adds -log 2 at fixed t.
  const double a = rs_torsion_log(CircleModel::trivial(512, 3.0), 6.0);
  const double b = rs_torsion_log(CircleModel::trivial(512, 6.0), 6.0);
  CHECK(b - a == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("spectral split") {
  const WittenOperators cold = discretize(CircleModel::trivial(256), 0.0);
  const SpectralSplit s0 = spectral_split(cold);
  CHECK(s0.count[0] == 3);
  CHECK(s0.count[1] == 3);
  CHECK_FALSE(s0.warnings.empty());

  const WittenOperators hot = discretize(CircleModel::trivial(512), 15.0);
  const SpectralSplit s1 = spectral_split(hot);
  CHECK(s1.count[0] == 1);
  CHECK(s1.count[1] == 1);
  CHECK(s1.warnings.empty());
  CHECK(s1.large[0][0] > 1.0);
}

TEST_CASE("integration map against closed forms") {
  const double t = 15.0;
  const double length = 2 * pi;
  const WittenOperators ops = discretize(CircleModel::trivial(512), t);
  const SpectralSplit split = spectral_split(ops);
  const auto morse = circle::canonical_morse_data(CircleModel::trivial(512));
  const IntegrationMap map = unstable_integration_map(ops, split, morse);
  const auto norms = image_norms(map, morse);
  // Unit constant function: value (L e^{-t} I0(t))^{-1/2} at the minimum.
  // Unit form c e^{2tf} ds: integral (L e^{t} I0(t))^{1/2}.
  const double p0 = std::pow(length * std::exp(-t) * bessel_i0(t), -0.5);
  const double p1 = std::pow(length * std::exp(t) * bessel_i0(t), 0.5);
  CHECK(norms[0][0] == doctest::Approx(p0).epsilon(1e-10));
  CHECK(norms[1][0] == doctest::Approx(p1).epsilon(1e-6));
  CHECK(map.chain_defect < 1e-10);
  CHECK(map.condition[0] == 1.0);
}

TEST_CASE("integration map is degenerate at t = 0") {
  const WittenOperators ops = discretize(CircleModel::trivial(128), 0.0);
  const auto morse = circle::canonical_morse_data(CircleModel::trivial(128));
  try {
    (void)unstable_integration_map(ops, spectral_split(ops), morse);
    FAIL("expected a degenerate error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate);
    CHECK(std::string(e.what()) == "comparison map degenerate; increase t or N");
  }
}

TEST_CASE("L2 metric on cohomology") {
  const double length = 2 * pi;
  const Matrix one = Matrix::Ones(1, 1);
  const auto m0 = rs_metric_lognorm(CircleModel::trivial(256), 0.0, {one, one});
  CHECK(m0.log_volume[0] == doctest::Approx(0.5 * std::log(length)).epsilon(1e-12));
  CHECK(m0.log_volume[1] == doctest::Approx(-0.5 * std::log(length)).epsilon(1e-12));

  const auto scaled = rs_metric_lognorm(CircleModel::trivial(256), 0.0, {3 * one, one});
  CHECK(scaled.log_volume[0] - m0.log_volume[0] == doctest::Approx(std::log(3.0)));

  for (double t : {2.0, 10.0}) {
    CHECK(metric_ratio_log(CircleModel::trivial(512), t) ==
          doctest::Approx(-std::log(length * bessel_i0(t))).epsilon(1e-8));
  }
  // Acyclic bundle: nothing to compare.
  CHECK(metric_ratio_log(CircleModel::rotation(2.0, 128), 5.0) == 0.0);
}

TEST_CASE("precision guard refuses under-resolved grids") {
  {
    EnvGuard env("10");
    try {
      (void)discretize(CircleModel::trivial(128), 30.0);
      FAIL("expected a numeric error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::numeric);
      CHECK(std::string(e.what()).find("use N >=") != std::string::npos);
    }
  }
  CHECK_NOTHROW(discretize(CircleModel::trivial(128), 30.0));
  CHECK_THROWS_AS(discretize(CircleModel::trivial(512), 400.0), Error);
  {
    EnvGuard env("garbage");
    CHECK_THROWS_AS(PrecisionGuard::from_environment(), Error);
  }
}

TEST_CASE("invalid models are rejected") {
  CHECK_THROWS_AS(discretize(CircleModel::trivial(63), 1.0), Error);
  CHECK_THROWS_AS(discretize(CircleModel::trivial(32), 1.0), Error);
  CHECK_THROWS_AS(discretize(CircleModel::trivial(64), -1.0), Error);
  CircleModel bad = CircleModel::trivial(64);
  bad.bundle.fiber_metric = -Matrix::Identity(1, 1);
  CHECK_THROWS_AS(discretize(bad, 1.0), Error);
  std::vector<double> three_wells(64);
  for (int j = 0; j < 64; ++j) three_wells[j] = std::cos(3 * 2 * pi * j / 64);
  bad = CircleModel::trivial(64);
  bad.f = circle::PeriodicFunction::from_samples(three_wells);
  CHECK_THROWS_AS(discretize(bad, 1.0), Error);
}

TEST_CASE("centering moves the minimum to the origin without changing the torsion") {
  std::vector<double> shifted(128);
  for (int j = 0; j < 128; ++j) shifted[j] = 0.5 * (1 - std::cos(2 * pi * j / 128 - 1.3));
  CircleModel m = CircleModel::trivial(128);
  m.f = circle::PeriodicFunction::from_samples(shifted);
  const circle::CriticalData c = circle::critical_data(m.f);
  CHECK(c.theta_min == doctest::Approx(1.3).epsilon(1e-10));
  CHECK(c.f_max == doctest::Approx(1.0).epsilon(1e-12));
  const double a = rs_torsion_log(m, 4.0);
  CHECK(a == doctest::Approx(rs_torsion_log(CircleModel::trivial(128), 4.0)).epsilon(1e-9));
}

TEST_CASE("integration normalizations at t = 0") {
  const int n = 128;
  const WittenOperators ops = discretize(CircleModel::trivial(n), 0.0);
  // Frame coordinates are sqrt(h) times the function or form coefficient.
  const Matrix constant = Matrix::Constant(n, 1, std::sqrt(ops.step));
  CHECK(integrate(ops, 0, constant)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  // d theta / 2 pi = ds / L.
  const Matrix unit_form = Matrix::Constant(n, 1, std::sqrt(ops.step) / (2 * pi));
  CHECK(integrate(ops, 1, unit_form)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Ray-Singer torsion at t = 0") {
  CHECK(rs_torsion_log(CircleModel::trivial(512), 0.0) == doctest::Approx(-std::log(2 * pi)).epsilon(1e-10));
  CHECK(rs_torsion_log(CircleModel::rotation(pi / 2, 512), 0.0) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-10));
}
