#pragma once

// Seeded generators for the randomized identity suites.

#include "torsionlab/complex_core.hpp"
#include "torsionlab/thom_smale.hpp"

#include <random>

namespace torsionlab::random {

using Engine = std::mt19937_64;

Matrix gaussian(Engine& rng, int rows, int cols);
/// A A^T + I / 2 with A Gaussian.
Matrix spd(Engine& rng, int dim);
/// Gaussian plus a diagonal shift; condition number stays moderate.
Matrix invertible(Engine& rng, int dim);
Matrix orthogonal(Engine& rng, int dim);

/// Top degree in [1, max_top], dims in [0, max_dim], random ranks, random SPD
/// grams. The boundary squares to zero up to rounding.
complex::GradedComplex random_complex(Engine& rng, int max_top = 4, int max_dim = 8);

/// Boundary maps chosen independently, so that boundary^2 != 0 (top >= 2).
struct RawComplex {
  std::vector<Matrix> grams;
  std::vector<Matrix> boundaries;
};
RawComplex adversarial_complex(Engine& rng);

/// Cocycles representing a basis of each cohomology group, mixed with
/// coboundaries so they are not harmonic.
complex::ReferenceClasses random_references(Engine& rng, const complex::GradedComplex& c);

/// Per degree, a basis change B with B^T gram B = gram.
std::vector<Matrix> gram_orthogonal_basis(Engine& rng, const complex::GradedComplex& c);

/// Self-indexing data (f = index) with random fiber metrics and transports.
/// Every interior point either receives or emits instantons, never both, so
/// the boundary squares to zero.
morse::MorseData random_morse_data(Engine& rng, int max_top = 3, int max_rank = 3);

}  // namespace torsionlab::random
