#include "torsionlab/circle_model.hpp"
#include "torsionlab/error.hpp"
#include "torsionlab/random_data.hpp"
#include "torsionlab/thom_smale.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace torsionlab;
using namespace torsionlab::morse;

namespace {

Matrix rotation(double a) {
  Matrix r(2, 2);
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

MorseData circle_data(const Matrix& holonomy) {
  MorseData d;
  d.n = 1;
  d.rank = static_cast<int>(holonomy.rows());
  d.parallel_metric = true;
  d.points = {{"min", 0, 0.0}, {"max", 1, 1.0}};
  d.instantons = {{"min", "max", 1, holonomy},
                  {"min", "max", -1, Matrix::Identity(d.rank, d.rank)}};
  return d;
}

// Sphere S^2 with two minima, one saddle and one maximum, trivial coefficients.
MorseData sphere_data() {
  MorseData d;
  d.n = 2;
  d.points = {{"a", 0, 0.0}, {"b", 0, 0.0}, {"s", 1, 1.0}, {"m", 2, 2.0}};
  const Matrix one = Matrix::Identity(1, 1);
  d.instantons = {{"a", "s", 1, one}, {"b", "s", -1, one}, {"s", "m", 1, one}, {"s", "m", -1, one}};
  return d;
}

// Direct oracle: scale every fiber gram by exp(-2 t f) with no centering.
double raw_deformed_lognorm(const MorseData& d, double t, const complex::ReferenceClasses& refs) {
  MorseData scaled = d;
  scaled.parallel_metric = false;
  for (const auto& p : d.points) {
    scaled.fiber_metrics[p.id] = std::exp(-2.0 * t * p.f) * d.fiber_metric(p.id);
  }
  return complex::chain_det_line_lognorm(build_thom_smale(scaled).complex, refs).combined;
}

}  // namespace

TEST_CASE("circle with trivial coefficients") {
  const MorseData d = circle_data(Matrix::Identity(1, 1));
  const ThomSmaleComplex ts = build_thom_smale(d);
  CHECK(ts.complex.boundary(0).norm() == 0.0);
  CHECK(complex::betti(ts.complex).betti == std::vector<int>{1, 1});
  CHECK(milnor_torsion_log(d) == 0.0);
  CHECK(tilde_chi_prime(d) == -1);
  CHECK(signed_morse_sum(d) == -1.0);
  CHECK(d.self_indexing());
}

TEST_CASE("circle with a rotation holonomy is acyclic") {
  for (double a : {std::numbers::pi / 2, 2.0, 0.3}) {
    const MorseData d = circle_data(rotation(a));
    const ThomSmaleComplex ts = build_thom_smale(d);
    CHECK((ts.complex.boundary(0) - (rotation(a) - Matrix::Identity(2, 2))).norm() == 0.0);
    CHECK(complex::betti(ts.complex).betti == std::vector<int>{0, 0});
    // det(R - I) = 2 - 2 cos a.
    CHECK(milnor_torsion_log(d) == doctest::Approx(-std::log(2.0 - 2.0 * std::cos(a))).epsilon(1e-13));
  }
}

TEST_CASE("canonical circle data matches the hand-built complex") {
  const circle::CircleModel m = circle::CircleModel::rotation(2.0, 64);
  const MorseData d = circle::canonical_morse_data(m);
  CHECK(d.points.size() == 2);
  CHECK(milnor_torsion_log(d) == doctest::Approx(milnor_torsion_log(circle_data(rotation(2.0)))));
}

TEST_CASE("sphere with four critical points") {
  const MorseData d = sphere_data();
  const ThomSmaleComplex ts = build_thom_smale(d);
  CHECK(complex::betti(ts.complex).betti == std::vector<int>{1, 0, 1});
  CHECK(tilde_chi_prime(d) == 1);
  CHECK(signed_morse_sum(d) == doctest::Approx(1.0));
  // d0 = (1, -1) with unit grams: Delta_1 = 2 on the single saddle.
  CHECK(milnor_torsion_log(d) == doctest::Approx(-0.5 * std::log(2.0)));
}

TEST_CASE("boundary that does not square to zero names the offending pair") {
  MorseData d = sphere_data();
  d.instantons[3].sign = 1;
  try {
    (void)build_thom_smale(d);
    FAIL("expected an input error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::input);
    const std::string msg = e.what();
    CHECK(msg.find("Morse data not a complex") == 0);
    CHECK(msg.find("a -> m") != std::string::npos);
  }
}

TEST_CASE("validation of Morse data") {
  MorseData d = circle_data(Matrix::Identity(1, 1));
  d.instantons[0].to = "nowhere";
  CHECK_THROWS_AS(build_thom_smale(d), Error);

  d = circle_data(Matrix::Identity(1, 1));
  d.instantons[0].transport = Matrix::Zero(1, 1);
  CHECK_THROWS_AS(build_thom_smale(d), Error);

  d = circle_data(Matrix::Identity(1, 1));
  d.instantons[0].transport = Matrix::Constant(1, 1, 2.0);
  CHECK_THROWS_AS(build_thom_smale(d), Error);  // parallel but not isometric
  d.parallel_metric = false;
  CHECK_NOTHROW(build_thom_smale(d));

  d = sphere_data();
  d.instantons.push_back({"a", "m", 1, Matrix::Identity(1, 1)});
  CHECK_THROWS_AS(build_thom_smale(d), Error);  // index jump of two
}

TEST_CASE("random Morse data: torsion agrees with the finite core") {
  random::Engine rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const MorseData d = random::random_morse_data(rng);
    const ThomSmaleComplex ts = build_thom_smale(d);
    CHECK(milnor_torsion_log(d) == doctest::Approx(complex::torsion_log(ts.complex)).epsilon(1e-14));
    CHECK(d.self_indexing());
    CHECK(static_cast<double>(tilde_chi_prime(d)) == doctest::Approx(signed_morse_sum(d)));
  }
}

TEST_CASE("Milnor torsion is invariant under fiber gauge transformations") {
  random::Engine rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const MorseData d = random::random_morse_data(rng);
    MorseData g = d;
    g.parallel_metric = false;
    std::map<std::string, Matrix> gauge;
    for (const auto& p : d.points) {
      gauge[p.id] = random::invertible(rng, d.rank);
      g.fiber_metrics[p.id] = gauge[p.id].transpose() * d.fiber_metric(p.id) * gauge[p.id];
    }
    for (auto& inst : g.instantons) {
      inst.transport = gauge[inst.to].inverse() * inst.transport * gauge[inst.from];
    }
    CHECK(std::abs(milnor_torsion_log(g) - milnor_torsion_log(d)) < 1e-9);
  }
}

TEST_CASE("deformed metric shift equals -t times the signed Morse sum") {
  random::Engine rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const MorseData d = random::random_morse_data(rng);
    const ThomSmaleComplex ts = build_thom_smale(d);
    const auto refs = random::random_references(rng, ts.complex);
    for (double t : {0.5, 2.5, 10.0}) {
      const DeformationShift s = deformed_milnor_lognorm_shift(d, t, refs);
      CHECK(std::abs(s.shift - s.expected) < 1e-10 * std::max(1.0, std::abs(s.expected)));
      CHECK(s.expected == doctest::Approx(-t * static_cast<double>(tilde_chi_prime(d))));
      const double oracle = raw_deformed_lognorm(d, t, refs) - raw_deformed_lognorm(d, 0.0, refs);
      CHECK(std::abs(s.shift - oracle) < 1e-9 * std::max(1.0, std::abs(oracle)));
    }
  }
}

TEST_CASE("deformation shift for non-self-indexing data") {
  MorseData d = sphere_data();
  d.points[0].f = -0.3;
  d.points[3].f = 2.7;
  CHECK_FALSE(d.self_indexing());
  const DeformationShift s = deformed_milnor_lognorm_shift(d, 4.0);
  CHECK_FALSE(s.self_indexing);
  CHECK(s.expected == doctest::Approx(-4.0 * (-0.3 + 0.0 - 1.0 + 2.7)));
  CHECK(s.shift == doctest::Approx(s.expected).epsilon(1e-12));
}

TEST_CASE("deformation keeps grams well scaled at large t") {
  const MorseData d = sphere_data();
  const ThomSmaleComplex ts = build_thom_smale(d);
  const DeformedMilnorState st = deform(d, ts, 300.0);
  for (int i = 0; i <= 2; ++i) CHECK(std::isfinite(st.complex.gram(i).norm()));
  const DeformationShift s = deformed_milnor_lognorm_shift(d, 300.0);
  CHECK(s.shift == doctest::Approx(-300.0).epsilon(1e-12));
}

TEST_CASE("Morse JSON round trip") {
  random::Engine rng(43);
  const MorseData d = random::random_morse_data(rng);
  const MorseData back = morse_from_json(Json::parse(morse_to_json(d).dump()));
  CHECK(milnor_torsion_log(back) == doctest::Approx(milnor_torsion_log(d)).epsilon(1e-14));
  CHECK(back.points.size() == d.points.size());
  CHECK_THROWS_AS(morse_from_json(Json::parse(R"({"rank": 1})")), Error);
}
