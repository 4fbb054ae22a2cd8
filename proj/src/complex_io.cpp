#include "torsionlab/complex_io.hpp"

#include "torsionlab/error.hpp"

#include <fstream>

namespace torsionlab {

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) throw Error(ErrorKind::input, "matrix must be an array of rows");
  const auto r = static_cast<Eigen::Index>(j.size());
  if (r == 0) {
    if (rows > 0 && cols > 0) throw Error(ErrorKind::input, "matrix is empty");
    return Matrix::Zero(std::max<Eigen::Index>(rows, 0), std::max<Eigen::Index>(cols, 0));
  }
  const auto c = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  if (rows >= 0 && r != rows) {
    throw Error(ErrorKind::input, "matrix has " + std::to_string(r) + " rows, expected " +
                                      std::to_string(rows));
  }
  if (cols >= 0 && c != cols) {
    throw Error(ErrorKind::input, "matrix has " + std::to_string(c) + " columns, expected " +
                                      std::to_string(cols));
  }
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      throw Error(ErrorKind::input, "matrix rows have unequal length");
    }
    for (Eigen::Index k = 0; k < c; ++k) {
      const Json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw Error(ErrorKind::input, "matrix entry is not a number");
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::input, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::input, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

namespace complex {

GradedComplex complex_from_json(const Json& j) {
  try {
    const int n = j.at("n").get<int>();
    const Json& degrees = j.at("degrees");
    if (n < 0 || static_cast<int>(degrees.size()) != n + 1) {
      throw Error(ErrorKind::input, "expected n+1 degree entries");
    }
    std::vector<Matrix> grams;
    std::vector<int> dims;
    for (const Json& d : degrees) {
      const int dim = d.at("dim").get<int>();
      if (dim < 0) throw Error(ErrorKind::input, "negative dimension");
      dims.push_back(dim);
      grams.push_back(d.contains("gram") ? matrix_from_json(d["gram"], dim, dim)
                                         : Matrix(Matrix::Identity(dim, dim)));
    }
    std::vector<Matrix> bds;
    const Json empty = Json::array();
    const Json& jb = j.contains("boundaries") ? j["boundaries"] : empty;
    if (static_cast<int>(jb.size()) != n) {
      throw Error(ErrorKind::input, "expected n boundary maps");
    }
    for (int i = 0; i < n; ++i) bds.push_back(matrix_from_json(jb[i], dims[i + 1], dims[i]));
    return GradedComplex(std::move(grams), std::move(bds));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::input, std::string("complex file: ") + e.what());
  }
}

Json complex_to_json(const GradedComplex& c) {
  Json j;
  j["n"] = c.top_degree();
  j["degrees"] = Json::array();
  for (int i = 0; i <= c.top_degree(); ++i) {
    j["degrees"].push_back({{"dim", c.dim(i)}, {"gram", matrix_to_json(c.gram(i))}});
  }
  j["boundaries"] = Json::array();
  for (int i = 0; i < c.top_degree(); ++i) j["boundaries"].push_back(matrix_to_json(c.boundary(i)));
  return j;
}

}  // namespace complex

}  // namespace torsionlab
