#include "qpurify/json_io.hpp"

#include <fstream>

namespace qpurify {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw InvalidInput("matrix_from_json: expected a non-empty array of rows");
  Index rows = static_cast<Index>(j.size());
  Index cols = static_cast<Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j.at(r);
    if (static_cast<Index>(row.size()) != cols)
      throw InvalidInput("matrix_from_json: ragged rows");
    for (Index c = 0; c < cols; ++c) {
      const Json& e = row.at(c);
      if (!e.is_array() || e.size() != 2)
        throw InvalidInput("matrix_from_json: entries must be [re, im]");
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

AlgebraFixture fixture_from_json(const Json& j) {
  Dims dims;
  for (const auto& d : j.at("ambient_dims")) dims.push_back(d.get<Index>());
  std::vector<Matrix> gens;
  for (const auto& g : j.at("generators")) gens.push_back(matrix_from_json(g));
  std::string name = j.value("name", std::string("custom"));
  Index total = product_dim(dims);
  for (const Matrix& g : gens)
    if (g.rows() != total || g.cols() != total)
      throw DimensionMismatch("fixture_from_json: generator size vs ambient_dims");
  return fixture_from_generators(name, dims, gens);
}

std::vector<AlgebraFixture> fixtures_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("fixtures_from_file: cannot open " + path);
  Json j;
  in >> j;
  std::vector<AlgebraFixture> out;
  if (j.is_array()) {
    for (const auto& item : j) out.push_back(fixture_from_json(item));
  } else {
    out.push_back(fixture_from_json(j));
  }
  return out;
}

}  // namespace qpurify
