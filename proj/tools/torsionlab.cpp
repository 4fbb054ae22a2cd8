// Command-line front end. Exit codes: 0 pass, 2 numeric failure,
// 3 comparison failure, 4 input error.

#include "torsionlab/anomaly.hpp"
#include "torsionlab/complex_io.hpp"
#include "torsionlab/driver.hpp"
#include "torsionlab/error.hpp"
#include "torsionlab/thom_smale.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace torsionlab;

constexpr int kPass = 0;
constexpr int kNumeric = 2;
constexpr int kComparison = 3;
constexpr int kInput = 4;

int exit_code(ErrorKind kind) { return kind == ErrorKind::input ? kInput : kNumeric; }

void emit(const Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(out, j);
  }
}

Json betti_json(const complex::GradedComplex& c) {
  const complex::BettiResult b = complex::betti(c);
  const complex::EulerCharacteristics e = complex::euler_characteristics(b.betti);
  return {{"betti", b.betti}, {"chi", e.chi}, {"chi_prime", e.chi_prime}, {"warnings", b.warnings}};
}

int complex_torsion(const std::string& file) {
  const complex::GradedComplex c = complex::complex_from_json(read_json_file(file));
  Json j = betti_json(c);
  j["torsion_log"] = complex::torsion_log(c);
  emit(j, {});
  return kPass;
}

int morse_build(const std::string& file) {
  const morse::MorseData d = morse::morse_from_json(read_json_file(file));
  const morse::ThomSmaleComplex ts = morse::build_thom_smale(d);
  Json j = betti_json(ts.complex);
  j["complex"] = complex::complex_to_json(ts.complex);
  j["self_indexing"] = d.self_indexing();
  emit(j, {});
  return kPass;
}

int morse_torsion(const std::string& file) {
  const morse::MorseData d = morse::morse_from_json(read_json_file(file));
  const morse::ThomSmaleComplex ts = morse::build_thom_smale(d);
  Json j = betti_json(ts.complex);
  j["milnor_torsion_log"] = complex::torsion_log(ts.complex);
  j["tilde_chi_prime"] = morse::tilde_chi_prime(d);
  j["self_indexing"] = d.self_indexing();
  emit(j, {});
  return kPass;
}

struct SweepArgs {
  std::string model;
  double t_min = 8.0;
  double t_max = 40.0;
  int samples = 33;
  std::string spacing = "log";
  std::string out;
  int threads = 0;
  bool no_cross_check = false;
};

int run_sweep(const SweepArgs& a) {
  driver::SweepConfig cfg;
  cfg.model = circle::model_from_json(read_json_file(a.model));
  cfg.t_min = a.t_min;
  cfg.t_max = a.t_max;
  cfg.samples = a.samples;
  cfg.spacing = a.spacing == "uniform" ? driver::Spacing::uniform : driver::Spacing::log;
  cfg.threads = a.threads;
  cfg.zeta.cross_check = !a.no_cross_check;
  const driver::SweepResult res = driver::sweep(cfg);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  if (a.out.empty() || a.out == "-") {
    driver::write_csv(std::cout, res.rows);
  } else {
    std::ofstream os(a.out);
    if (!os) throw Error(ErrorKind::input, "cannot write " + a.out);
    driver::write_csv(os, res.rows);
  }
  for (const auto& f : res.failures) std::cerr << "failed: " << f << "\n";
  std::cerr << res.rows.size() << " rows, " << res.failures.size() << " failed\n";
  return res.failures.empty() ? kPass : kNumeric;
}

int run_fit(const std::string& in, const std::string& out) {
  std::ifstream is(in);
  if (!is) throw Error(ErrorKind::input, "cannot open " + in);
  const std::vector<driver::SweepRow> rows = driver::read_csv(is);
  emit(driver::fit_to_json(driver::fit_expansion(rows)), out);
  return kPass;
}

int run_predict(const std::string& model_file, const std::string& morse_file, const std::string& out,
                std::optional<double> theta_psi, std::optional<double> f_euler) {
  morse::MorseData d;
  if (!morse_file.empty()) {
    d = morse::morse_from_json(read_json_file(morse_file));
  } else if (!model_file.empty()) {
    d = circle::canonical_morse_data(circle::model_from_json(read_json_file(model_file)));
  } else {
    throw Error(ErrorKind::input, "predict needs --morse or --model");
  }
  if (!model_file.empty() && !morse_file.empty()) {
    // The model decides whether the fiber metric is parallel.
    d.parallel_metric = circle::model_from_json(read_json_file(model_file)).bundle.parallel();
  }
  const anomaly::PredictionInputs in = anomaly::inputs_from_morse(d, theta_psi, f_euler);
  emit(anomaly::prediction_report(in, anomaly::predict_coefficients(in)), out);
  return kPass;
}

int run_compare(const std::string& fit, const std::string& predict, const driver::Tolerances& tol,
                const std::string& out) {
  const driver::FitResult f = driver::fit_from_json(read_json_file(fit));
  const anomaly::Prediction p = driver::prediction_from_json(read_json_file(predict));
  const driver::Comparison c = driver::compare(f, p, tol);
  emit(driver::comparison_to_json(c), out);
  return c.pass ? kPass : kComparison;
}

int run_verify(std::uint64_t seed, int count) {
  const driver::VerifyReport r = driver::verify_finite_suite(seed, count);
  emit(driver::verify_to_json(r), {});
  return r.pass() ? kPass : kComparison;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Torsion laboratory: finite and spectral torsion, Witten deformation, fits"};
  app.require_subcommand(1);

  std::string file;
  auto* cx = app.add_subcommand("complex", "finite graded complexes");
  cx->require_subcommand(1);
  auto* cx_torsion = cx->add_subcommand("torsion", "Betti numbers and log torsion");
  cx_torsion->add_option("file", file, "complex JSON")->required();

  auto* mo = app.add_subcommand("morse", "Thom-Smale complexes");
  mo->require_subcommand(1);
  auto* mo_build = mo->add_subcommand("build", "assemble the complex");
  mo_build->add_option("file", file, "Morse data JSON")->required();
  auto* mo_torsion = mo->add_subcommand("torsion", "Milnor torsion");
  mo_torsion->add_option("file", file, "Morse data JSON")->required();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "log rho^RS(t) over a t grid, as CSV");
  sweep->add_option("--model", sw.model, "circle model JSON")->required();
  sweep->add_option("--t-min", sw.t_min);
  sweep->add_option("--t-max", sw.t_max);
  sweep->add_option("--samples", sw.samples);
  sweep->add_option("--spacing", sw.spacing)->check(CLI::IsMember({"uniform", "log"}));
  sweep->add_option("--out", sw.out, "CSV path, '-' for stdout");
  sweep->add_option("--threads", sw.threads, "0 for hardware concurrency");
  sweep->add_flag("--no-cross-check", sw.no_cross_check, "skip the eigenvalue-sum estimator");

  std::string in;
  std::string out;
  auto* fit = app.add_subcommand("fit", "least-squares fit of a sweep CSV");
  fit->add_option("--in", in)->required();
  fit->add_option("--out", out);

  std::string model;
  std::string morse_file;
  std::optional<double> theta_psi;
  std::optional<double> f_euler;
  auto* predict = app.add_subcommand("predict", "predicted expansion coefficients");
  predict->add_option("--model", model);
  predict->add_option("--morse", morse_file);
  predict->add_option("--out", out);
  predict->add_option("--theta-psi", theta_psi, "user-supplied theta-psi integral");
  predict->add_option("--f-euler", f_euler, "user-supplied f-weighted Euler integral");

  std::string fit_file;
  std::string predict_file;
  driver::Tolerances tol;
  auto* cmp = app.add_subcommand("compare", "fit vs prediction");
  cmp->add_option("--fit", fit_file)->required();
  cmp->add_option("--predict", predict_file)->required();
  cmp->add_option("--tol-a0", tol.a0);
  cmp->add_option("--tol-a1", tol.a1);
  cmp->add_option("--tol-b", tol.b);
  cmp->add_option("--out", out);

  std::uint64_t seed = 1;
  int count = 100;
  auto* verify = app.add_subcommand("verify", "randomized finite identity suite");
  verify->add_option("--seed", seed);
  verify->add_option("--count", count);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInput;
  }

  try {
    if (*cx_torsion) return complex_torsion(file);
    if (*mo_build) return morse_build(file);
    if (*mo_torsion) return morse_torsion(file);
    if (*sweep) return run_sweep(sw);
    if (*fit) return run_fit(in, out);
    if (*predict) return run_predict(model, morse_file, out, theta_psi, f_euler);
    if (*cmp) return run_compare(fit_file, predict_file, tol, out);
    if (*verify) return run_verify(seed, count);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kInput;
}
