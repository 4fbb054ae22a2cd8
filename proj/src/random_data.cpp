#include "torsionlab/random_data.hpp"

#include <string>

namespace torsionlab::random {

namespace {

int uniform_int(Engine& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

Matrix gaussian(Engine& rng, int rows, int cols) {
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = nd(rng);
  }
  return m;
}

Matrix spd(Engine& rng, int dim) {
  const Matrix a = gaussian(rng, dim, dim);
  return a * a.transpose() + 0.5 * Matrix::Identity(dim, dim);
}

Matrix invertible(Engine& rng, int dim) {
  return gaussian(rng, dim, dim) / std::sqrt(std::max(dim, 1)) + 2.0 * Matrix::Identity(dim, dim);
}

Matrix orthogonal(Engine& rng, int dim) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, dim, dim));
  Matrix q = qr.householderQ();
  // Fix column signs so the distribution does not depend on QR conventions.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  return q;
}

complex::GradedComplex random_complex(Engine& rng, int max_top, int max_dim) {
  const int top = uniform_int(rng, 1, max_top);
  std::vector<int> dims(top + 1);
  for (int& d : dims) d = uniform_int(rng, 0, max_dim);
  // ranks[i] = rank of boundary_i, limited by what is left over in degree i.
  std::vector<int> ranks(top, 0);
  for (int i = 0; i < top; ++i) {
    const int incoming = i > 0 ? ranks[i - 1] : 0;
    ranks[i] = uniform_int(rng, 0, std::min(dims[i] - incoming, dims[i + 1]));
  }
  // In the basis q_i, degree i splits as [image (ranks[i-1]) | rest | source (ranks[i])]
  // with the source block mapped onto the image block of degree i+1.
  std::vector<Matrix> q;
  for (int d : dims) q.push_back(invertible(rng, d));
  std::vector<Matrix> bds;
  for (int i = 0; i < top; ++i) {
    Matrix s = Matrix::Zero(dims[i + 1], dims[i]);
    if (ranks[i] > 0) {
      s.block(0, dims[i] - ranks[i], ranks[i], ranks[i]) = invertible(rng, ranks[i]);
    }
    bds.push_back(q[i + 1] * s * q[i].inverse());
  }
  std::vector<Matrix> grams;
  for (int d : dims) grams.push_back(spd(rng, d));
  complex::Tolerances tol;
  tol.boundary = 1e-11;
  return complex::GradedComplex(std::move(grams), std::move(bds), tol);
}

RawComplex adversarial_complex(Engine& rng) {
  RawComplex raw;
  const int dims[3] = {uniform_int(rng, 1, 4), uniform_int(rng, 1, 4), uniform_int(rng, 1, 4)};
  for (int d : dims) raw.grams.push_back(spd(rng, d));
  raw.boundaries.push_back(gaussian(rng, dims[1], dims[0]));
  raw.boundaries.push_back(gaussian(rng, dims[2], dims[1]));
  return raw;
}

complex::ReferenceClasses random_references(Engine& rng, const complex::GradedComplex& c) {
  const std::vector<Matrix> h = complex::harmonic_basis(c);
  complex::ReferenceClasses refs;
  for (int i = 0; i <= c.top_degree(); ++i) {
    const int b = static_cast<int>(h[i].cols());
    Matrix r = h[i] * invertible(rng, b);
    if (i > 0 && c.dim(i - 1) > 0 && b > 0) r += c.boundary(i - 1) * gaussian(rng, c.dim(i - 1), b);
    refs.push_back(std::move(r));
  }
  return refs;
}

std::vector<Matrix> gram_orthogonal_basis(Engine& rng, const complex::GradedComplex& c) {
  std::vector<Matrix> out;
  for (int i = 0; i <= c.top_degree(); ++i) {
    const int d = c.dim(i);
    if (d == 0) {
      out.emplace_back(0, 0);
      continue;
    }
    // B = L^{-T} O L^T preserves L L^T.
    const Matrix& l = c.gram_factor(i);
    const Matrix lt = l.transpose();
    out.push_back(lt.triangularView<Eigen::Upper>().solve(Matrix(orthogonal(rng, d) * lt)));
  }
  return out;
}

morse::MorseData random_morse_data(Engine& rng, int max_top, int max_rank) {
  morse::MorseData d;
  d.n = uniform_int(rng, 1, max_top);
  d.rank = uniform_int(rng, 1, max_rank);
  std::vector<std::vector<std::string>> by_index(d.n + 1);
  for (int i = 0; i <= d.n; ++i) {
    const int count = uniform_int(rng, 1, 3);
    for (int k = 0; k < count; ++k) {
      const std::string id = "x" + std::to_string(i) + "_" + std::to_string(k);
      d.points.push_back({id, i, static_cast<double>(i)});
      d.fiber_metrics[id] = spd(rng, d.rank);
      by_index[i].push_back(id);
    }
  }
  // role[i][k]: 0 receives only, 1 emits only (interior indices).
  std::vector<std::vector<int>> role(d.n + 1);
  for (int i = 0; i <= d.n; ++i) {
    for (std::size_t k = 0; k < by_index[i].size(); ++k) {
      role[i].push_back(i == 0 ? 1 : (i == d.n ? 0 : uniform_int(rng, 0, 1)));
    }
  }
  std::bernoulli_distribution coin(0.6);
  for (int i = 0; i < d.n; ++i) {
    for (std::size_t a = 0; a < by_index[i].size(); ++a) {
      if (role[i][a] != 1) continue;
      for (std::size_t b = 0; b < by_index[i + 1].size(); ++b) {
        if (role[i + 1][b] != 0 || !coin(rng)) continue;
        const int sign = coin(rng) ? 1 : -1;
        d.instantons.push_back({by_index[i][a], by_index[i + 1][b], sign, invertible(rng, d.rank)});
      }
    }
  }
  return d;
}

}  // namespace torsionlab::random
