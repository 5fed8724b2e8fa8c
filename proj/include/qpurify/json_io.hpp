#ifndef QPURIFY_JSON_IO_HPP
#define QPURIFY_JSON_IO_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "qpurify/fixtures.hpp"
#include "qpurify/linalg.hpp"

namespace qpurify {

using Json = nlohmann::json;

/// Matrix as nested arrays of [re, im] pairs.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// Fixture description: {"name": ..., "ambient_dims": [...],
/// "generators": [matrix, ...]}.
AlgebraFixture fixture_from_json(const Json& j);
std::vector<AlgebraFixture> fixtures_from_file(const std::string& path);

}  // namespace qpurify

#endif
