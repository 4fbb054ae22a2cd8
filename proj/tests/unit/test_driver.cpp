#include "torsionlab/driver.hpp"
#include "torsionlab/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace torsionlab;
using namespace torsionlab::driver;
using std::numbers::pi;

namespace {

std::vector<double> range(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * k / (count - 1));
  return out;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream os;
  write_csv(os, r.rows);
  return os.str();
}

}  // namespace

TEST_CASE("sweep grid") {
  SweepConfig c;
  c.samples = 0;
  CHECK(sweep_grid(c).empty());
  c.samples = 1;
  c.t_min = 3.0;
  CHECK(sweep_grid(c) == std::vector<double>{3.0});
  c.samples = 5;
  c.t_min = 1.0;
  c.t_max = 16.0;
  const auto g = sweep_grid(c);
  CHECK(g.size() == 5);
  CHECK(g[2] == doctest::Approx(4.0));
  CHECK(g.back() == 16.0);
  c.spacing = Spacing::uniform;
  CHECK(sweep_grid(c)[1] == doctest::Approx(4.75));
  c.t_min = 20.0;
  CHECK_THROWS_AS(sweep_grid(c), Error);
  c.t_min = 0.0;
  c.spacing = Spacing::log;
  CHECK_THROWS_AS(sweep_grid(c), Error);
}

TEST_CASE("sweep at t = 0 and an empty sweep") {
  SweepConfig c;
  c.model = circle::CircleModel::trivial(256);
  c.samples = 1;
  c.t_min = 0.0;
  c.t_max = 0.0;
  const SweepResult r = sweep(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].ok());
  CHECK(r.rows[0].log_rho == doctest::Approx(-std::log(2 * pi)).epsilon(1e-10));
  CHECK(r.warnings.size() == 2);

  c.samples = 0;
  const SweepResult empty = sweep(c);
  CHECK(empty.rows.empty());
  CHECK(empty.failures.empty());
}

TEST_CASE("failed rows are recorded and the sweep continues") {
  SweepConfig c;
  c.model = circle::CircleModel::trivial(64);
  c.spacing = Spacing::uniform;
  c.t_min = 1.0;
  c.t_max = 400.0;
  c.samples = 3;
  const SweepResult r = sweep(c);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].ok());
  CHECK_FALSE(r.rows[2].ok());
  CHECK(r.rows[2].status.rfind("numeric:", 0) == 0);
  CHECK(r.failures.size() >= 1);
}

TEST_CASE("log rho + t stays bounded on the trivial circle") {
  SweepConfig c;
  c.model = circle::CircleModel::trivial(256);
  c.t_min = 8.0;
  c.t_max = 40.0;
  c.samples = 9;
  c.zeta.cross_check = false;
  const SweepResult r = sweep(c);
  REQUIRE(r.failures.empty());
  double lo = 1e300;
  double hi = -1e300;
  for (const auto& row : r.rows) {
    lo = std::min(lo, row.log_rho + row.t);
    hi = std::max(hi, row.log_rho + row.t);
  }
  CHECK(hi - lo < 1.0);
  CHECK(std::abs(lo) < 3.0);
}

TEST_CASE("sweep output is deterministic and survives a CSV round trip") {
  SweepConfig c;
  c.model = circle::CircleModel::rotation(2.0, 64);
  c.t_min = 1.0;
  c.t_max = 4.0;
  c.samples = 4;
  c.threads = 3;
  const std::string a = csv_of(sweep(c));
  c.threads = 1;
  const std::string b = csv_of(sweep(c));
  CHECK(a == b);
  CHECK(a.rfind("t,log_det0,log_det1,log_rho_rs,", 0) == 0);

  std::istringstream is(a);
  const auto rows = read_csv(is);
  REQUIRE(rows.size() == 4);
  std::ostringstream again;
  write_csv(again, rows);
  CHECK(again.str() == a);

  std::istringstream junk("nonsense\n1,2\n");
  CHECK_THROWS_AS(read_csv(junk), Error);
}

TEST_CASE("fit recovers an exact model") {
  const auto t = range(5.0, 20.0, 16);
  std::vector<double> y;
  for (double v : t) y.push_back(2.0 - 3.0 * v + 0.5 * std::log(v / pi));
  const FitResult f = fit_expansion(t, y);
  CHECK(std::abs(f.a0 - 2.0) < 1e-10);
  CHECK(std::abs(f.a1 + 3.0) < 1e-10);
  CHECK(std::abs(f.b - 0.5) < 1e-10);
  CHECK(f.residual_rms < 1e-12);
  CHECK(f.samples == 16);

  const FitResult back = fit_from_json(Json::parse(fit_to_json(f).dump()));
  CHECK(back.a1 == f.a1);
  CHECK(back.condition == f.condition);
}

TEST_CASE("fit bias from a 1/t term shrinks as the window moves right") {
  auto bias = [](double t_min) {
    const auto t = range(t_min, 4 * t_min, 24);
    std::vector<double> y;
    for (double v : t) y.push_back(-v + 0.5 * std::log(v / pi) + 0.7 / v);
    const FitResult f = fit_expansion(t, y);
    return std::abs(f.a0) + std::abs(f.a1 + 1.0) + std::abs(f.b - 0.5);
  };
  const double b10 = bias(10.0);
  const double b20 = bias(20.0);
  CHECK(b10 < 2.0);
  CHECK(b20 < 0.75 * b10);
}

TEST_CASE("fit error paths") {
  const std::vector<double> t{1, 2, 2, 3, 4};
  const std::vector<double> y{0, 0, 0, 0, 0};
  CHECK_THROWS_AS(fit_expansion(t, y), Error);
  const std::vector<double> few{1, 2, 3};
  CHECK_THROWS_AS(fit_expansion(few, std::vector<double>{0, 0, 0}), Error);
  const auto narrow = range(1000.0, 1000.0 + 1e-5, 6);
  try {
    (void)fit_expansion(narrow, std::vector<double>(6, 0.0));
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
    CHECK(std::string(e.what()) == "t-range too narrow to separate t from log t");
  }
}

TEST_CASE("fit skips failed rows") {
  std::vector<SweepRow> rows;
  for (double v : range(5.0, 20.0, 6)) {
    SweepRow r;
    r.t = v;
    r.log_rho = 1.0 - v + 0.5 * std::log(v / pi);
    rows.push_back(r);
  }
  rows[2].status = "numeric: boom";
  rows[2].log_rho = 1e9;
  const FitResult f = fit_expansion(rows);
  CHECK(f.samples == 5);
  CHECK(f.a0 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("comparison verdicts") {
  FitResult f;
  f.a0 = 0.01;
  f.a1 = -1.002;
  f.b = 0.49;
  anomaly::Prediction p{0.0, -1.0, 0.5};
  Comparison c = compare(f, p, {});
  CHECK(c.pass);
  CHECK(comparison_to_json(c)["verdict"] == "pass");

  f.b = 0.7;
  c = compare(f, p, {});
  CHECK_FALSE(c.pass);
  CHECK(c.checks[2].name == "b");
  CHECK(c.checks[2].status == "fail");
  CHECK(c.checks[0].status == "pass");

  f.b = 0.49;
  p.a0.reset();
  c = compare(f, p, {});
  CHECK(c.pass);
  CHECK(c.checks[0].status == "not evaluated");
  CHECK(c.checks[1].status == "pass");
  CHECK(comparison_to_json(c)["coefficients"][0]["predicted"].is_null());

  const Json wrapped = Json::parse(R"({"prediction": {"a0": null, "a1": -1, "b": 0.5}})");
  const anomaly::Prediction q = prediction_from_json(wrapped);
  CHECK_FALSE(q.a0);
  CHECK(*q.a1 == -1.0);
  CHECK_THROWS_AS(prediction_from_json(Json::parse(R"({"a0": 0})")), Error);
}

TEST_CASE("finite identity suite") {
  const VerifyReport r = verify_finite_suite(1, 100);
  CHECK(r.pass());
  CHECK(r.max_identity_gap < 1e-10);
  CHECK(r.max_basis_deviation < 1e-10);
  CHECK(r.max_deformation_deviation < 1e-10);
  CHECK(r.adversarial_total == 10);
  CHECK(r.adversarial_rejected == 10);
  CHECK(verify_to_json(r).dump() == verify_to_json(verify_finite_suite(1, 100)).dump());

  const VerifyReport empty = verify_finite_suite(7, 0);
  CHECK(empty.pass());
  CHECK(empty.adversarial_total == 0);
  CHECK(empty.max_identity_gap == 0.0);
  CHECK_THROWS_AS(verify_finite_suite(1, -1), Error);
}
