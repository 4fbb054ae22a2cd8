#pragma once

// JSON interchange for matrices and graded complexes.

#include "torsionlab/complex_core.hpp"

#include <json.hpp>

#include <filesystem>

namespace torsionlab {

using Json = nlohmann::json;

/// Row-major nested arrays. An empty array is a 0x0 matrix unless the caller
/// supplies the expected shape.
Matrix matrix_from_json(const Json& j, Eigen::Index rows = -1, Eigen::Index cols = -1);
Json matrix_to_json(const Matrix& m);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

namespace complex {

/// { "n": int, "degrees": [{ "dim": int, "gram": [[...]] }], "boundaries": [[[...]]] }.
/// A missing gram means the identity.
GradedComplex complex_from_json(const Json& j);
Json complex_to_json(const GradedComplex& c);

}  // namespace complex

}  // namespace torsionlab
