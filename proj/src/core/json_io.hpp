#pragma once

// JSON schemas for matrices, vectors and counterexample fixtures.
//
// Matrix:  {"dim": n, "entries": [[[re, im], ...], ...], "factors": [d1, d2]}
// "factors" is optional; when present its product must equal dim. Real
// entries may be given as plain numbers. Any violation is kSchema.

#include <optional>
#include <string>

#include <json.hpp>

#include "core/convexity.hpp"
#include "core/matcore.hpp"
#include "core/tensor.hpp"

namespace tracecvx {

using Json = nlohmann::json;

struct ParsedMatrix {
  Matrix matrix;
  std::optional<TensorSpace> space;
};

Json matrix_to_json(const Matrix& m, const std::optional<TensorSpace>& space = std::nullopt);
ParsedMatrix matrix_from_json(const Json& j);

Json vector_to_json(const Eigen::VectorXcd& v);
Eigen::VectorXcd vector_from_json(const Json& j);

Json real_vector_to_json(const RealVector& v);

Json counterexample_to_json(const Counterexample& ce, Index dim, std::uint64_t seed);
Counterexample counterexample_from_json(const Json& j);

/// kIo if the file cannot be read, kSchema if it is not JSON.
Json read_json_file(const std::string& path);
/// kIo on failure. Writes dump(2) plus a newline.
void write_json_file(const std::string& path, const Json& j);

/// kSchema unless `j` is an object holding `key` of the expected kind.
double require_number(const Json& j, const char* key);
Index require_index(const Json& j, const char* key);

}  // namespace tracecvx
