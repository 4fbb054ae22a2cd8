#include "torsionlab/thom_smale.hpp"

#include "torsionlab/error.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

namespace torsionlab::morse {

bool MorseData::self_indexing() const {
  for (const auto& p : points) {
    if (p.f != static_cast<double>(p.index)) return false;
  }
  return true;
}

Matrix MorseData::fiber_metric(const std::string& id) const {
  auto it = fiber_metrics.find(id);
  if (it == fiber_metrics.end()) return Matrix::Identity(rank, rank);
  return it->second;
}

namespace {

std::unordered_map<std::string, int> index_points(const MorseData& data) {
  std::unordered_map<std::string, int> ids;
  for (int k = 0; k < static_cast<int>(data.points.size()); ++k) {
    if (!ids.emplace(data.points[k].id, k).second) {
      throw Error(ErrorKind::input, "duplicate critical point id '" + data.points[k].id + "'");
    }
  }
  return ids;
}

}  // namespace

void validate(const MorseData& data) {
  if (data.n < 0) throw Error(ErrorKind::input, "negative dimension");
  if (data.rank < 1) throw Error(ErrorKind::input, "bundle rank must be at least 1");
  const auto ids = index_points(data);
  for (const auto& p : data.points) {
    if (p.index < 0 || p.index > data.n) {
      throw Error(ErrorKind::input, "critical point '" + p.id + "' has index out of range");
    }
    if (!std::isfinite(p.f)) throw Error(ErrorKind::input, "critical value is not finite");
  }
  for (const auto& [id, g] : data.fiber_metrics) {
    if (!ids.contains(id)) throw Error(ErrorKind::input, "fiber metric for unknown point '" + id + "'");
    if (g.rows() != data.rank || g.cols() != data.rank) {
      throw Error(ErrorKind::input, "fiber metric at '" + id + "' has the wrong shape");
    }
  }
  for (const auto& inst : data.instantons) {
    auto from = ids.find(inst.from);
    auto to = ids.find(inst.to);
    if (from == ids.end() || to == ids.end()) {
      throw Error(ErrorKind::input, "instanton " + inst.from + " -> " + inst.to +
                                        " refers to an unknown point");
    }
    const auto& a = data.points[from->second];
    const auto& b = data.points[to->second];
    if (b.index != a.index + 1) {
      throw Error(ErrorKind::input, "instanton " + inst.from + " -> " + inst.to +
                                        " does not raise the index by one");
    }
    if (inst.sign != 1 && inst.sign != -1) throw Error(ErrorKind::input, "instanton sign must be +1 or -1");
    if (inst.transport.rows() != data.rank || inst.transport.cols() != data.rank) {
      throw Error(ErrorKind::input, "instanton transport has the wrong shape");
    }
    Eigen::JacobiSVD<Matrix> svd(inst.transport);
    const Vector& s = svd.singularValues();
    if (s.minCoeff() <= 1e-12 * s.maxCoeff()) {
      throw Error(ErrorKind::input, "instanton transport " + inst.from + " -> " + inst.to +
                                        " is not invertible");
    }
    if (data.parallel_metric) {
      const Matrix ga = data.fiber_metric(a.id);
      const Matrix gb = data.fiber_metric(b.id);
      const Matrix defect = inst.transport.transpose() * gb * inst.transport - ga;
      if (defect.norm() > 1e-10 * std::max(1.0, ga.norm())) {
        throw Error(ErrorKind::input, "parallel_metric set but transport " + inst.from + " -> " +
                                          inst.to + " is not an isometry");
      }
    }
  }
}

ThomSmaleComplex build_thom_smale(const MorseData& data) {
  validate(data);
  const int r = data.rank;
  const auto ids = index_points(data);
  std::vector<std::vector<int>> by_degree(data.n + 1);
  std::vector<int> offset(data.points.size());
  for (int k = 0; k < static_cast<int>(data.points.size()); ++k) {
    auto& bucket = by_degree[data.points[k].index];
    offset[k] = r * static_cast<int>(bucket.size());
    bucket.push_back(k);
  }

  std::vector<Matrix> grams;
  for (const auto& bucket : by_degree) {
    const int dim = r * static_cast<int>(bucket.size());
    Matrix g = Matrix::Zero(dim, dim);
    for (int k : bucket) g.block(offset[k], offset[k], r, r) = data.fiber_metric(data.points[k].id);
    grams.push_back(std::move(g));
  }
  std::vector<Matrix> bds;
  for (int i = 0; i < data.n; ++i) bds.emplace_back(Matrix::Zero(grams[i + 1].rows(), grams[i].rows()));
  for (const auto& inst : data.instantons) {
    const int a = ids.at(inst.from);
    const int b = ids.at(inst.to);
    const int i = data.points[a].index;
    bds[i].block(offset[b], offset[a], r, r) += inst.sign * inst.transport;
  }

  for (int i = 0; i + 1 < data.n; ++i) {
    const Matrix composite = bds[i + 1] * bds[i];
    const double scale = std::max(1.0, bds[i + 1].norm() * bds[i].norm());
    if (composite.cwiseAbs().maxCoeff() <= 1e-12 * scale) continue;
    std::ostringstream os;
    os << "Morse data not a complex:";
    for (int x : by_degree[i]) {
      for (int z : by_degree[i + 2]) {
        const double v = composite.block(offset[z], offset[x], r, r).norm();
        if (v > 1e-12 * scale) {
          os << " " << data.points[x].id << " -> " << data.points[z].id << " (norm " << v << ")";
        }
      }
    }
    throw Error(ErrorKind::input, os.str());
  }
  return {complex::GradedComplex(std::move(grams), std::move(bds)), std::move(by_degree),
          std::move(offset)};
}

long tilde_chi_prime(const MorseData& data) {
  long s = 0;
  for (const auto& p : data.points) s += (p.index % 2 == 0 ? 1 : -1) * static_cast<long>(p.index);
  return data.rank * s;
}

double signed_morse_sum(const MorseData& data) {
  double s = 0.0;
  for (const auto& p : data.points) s += (p.index % 2 == 0 ? 1.0 : -1.0) * p.f;
  return data.rank * s;
}

double milnor_torsion_log(const MorseData& data) {
  return complex::torsion_log(build_thom_smale(data).complex);
}

DeformedMilnorState deform(const MorseData& data, const ThomSmaleComplex& ts, double t) {
  const int r = data.rank;
  std::vector<Matrix> grams;
  std::vector<double> offsets;
  for (int i = 0; i <= data.n; ++i) {
    const auto& bucket = ts.points_by_degree[i];
    double mean = 0.0;
    for (int k : bucket) mean += data.points[k].f;
    if (!bucket.empty()) mean /= static_cast<double>(bucket.size());
    Matrix g = ts.complex.gram(i);
    for (int k : bucket) {
      const double w = std::exp(-2.0 * t * (data.points[k].f - mean));
      g.block(ts.offset[k], ts.offset[k], r, r) *= w;
    }
    grams.push_back(std::move(g));
    // Scaling a dim-d gram by c adds (d/2) log c to the log-volume.
    offsets.push_back(-t * mean * static_cast<double>(ts.complex.dim(i)));
  }
  return {t, ts.complex.with_grams(std::move(grams)), std::move(offsets)};
}

double deformed_milnor_lognorm(const DeformedMilnorState& state,
                               const complex::ReferenceClasses& refs) {
  double v = complex::chain_det_line_lognorm(state.complex, refs).combined;
  for (std::size_t i = 0; i < state.log_volume_offset.size(); ++i) {
    v += (i % 2 == 0 ? 1.0 : -1.0) * state.log_volume_offset[i];
  }
  return v;
}

DeformationShift deformed_milnor_lognorm_shift(const MorseData& data, double t,
                                               const complex::ReferenceClasses& refs) {
  const ThomSmaleComplex ts = build_thom_smale(data);
  const double base = deformed_milnor_lognorm(deform(data, ts, 0.0), refs);
  const double moved = deformed_milnor_lognorm(deform(data, ts, t), refs);
  return {moved - base, -t * signed_morse_sum(data), data.self_indexing()};
}

DeformationShift deformed_milnor_lognorm_shift(const MorseData& data, double t) {
  const ThomSmaleComplex ts = build_thom_smale(data);
  return deformed_milnor_lognorm_shift(data, t, complex::harmonic_basis(ts.complex));
}

MorseData morse_from_json(const Json& j) {
  try {
    MorseData d;
    d.n = j.at("n").get<int>();
    d.rank = j.value("rank", 1);
    d.parallel_metric = j.value("parallel_metric", false);
    for (const Json& p : j.at("critical_points")) {
      d.points.push_back({p.at("id").get<std::string>(), p.at("index").get<int>(),
                          p.at("f").get<double>()});
    }
    if (j.contains("fiber_metrics")) {
      for (const auto& [id, g] : j["fiber_metrics"].items()) {
        d.fiber_metrics[id] = matrix_from_json(g, d.rank, d.rank);
      }
    }
    if (j.contains("instantons")) {
      for (const Json& inst : j["instantons"]) {
        Matrix tr = inst.contains("transport") ? matrix_from_json(inst["transport"], d.rank, d.rank)
                                               : Matrix(Matrix::Identity(d.rank, d.rank));
        d.instantons.push_back({inst.at("from").get<std::string>(), inst.at("to").get<std::string>(),
                                inst.at("sign").get<int>(), std::move(tr)});
      }
    }
    validate(d);
    return d;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::input, std::string("Morse file: ") + e.what());
  }
}

Json morse_to_json(const MorseData& data) {
  Json j;
  j["n"] = data.n;
  j["rank"] = data.rank;
  j["parallel_metric"] = data.parallel_metric;
  j["critical_points"] = Json::array();
  for (const auto& p : data.points) {
    j["critical_points"].push_back({{"id", p.id}, {"index", p.index}, {"f", p.f}});
  }
  j["fiber_metrics"] = Json::object();
  for (const auto& [id, g] : data.fiber_metrics) j["fiber_metrics"][id] = matrix_to_json(g);
  j["instantons"] = Json::array();
  for (const auto& inst : data.instantons) {
    j["instantons"].push_back({{"from", inst.from},
                               {"to", inst.to},
                               {"sign", inst.sign},
                               {"transport", matrix_to_json(inst.transport)}});
  }
  return j;
}

}  // namespace torsionlab::morse
