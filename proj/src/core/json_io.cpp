#include "core/json_io.hpp"

#include <fstream>
#include <sstream>

namespace tracecvx {

namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrorCode::kSchema, what); }

Complex entry_from_json(const Json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  schema("matrix entries must be numbers or [re, im] pairs");
}

Json entry_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

double require_number(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number()) {
    schema(std::string("expected numeric field \"") + key + "\"");
  }
  return j[key].get<double>();
}

Index require_index(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 1) {
    schema(std::string("expected positive integer field \"") + key + "\"");
  }
  return static_cast<Index>(j[key].get<long long>());
}

Json matrix_to_json(const Matrix& m, const std::optional<TensorSpace>& space) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(entry_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  Json out = {{"dim", m.rows()}, {"entries", std::move(rows)}};
  if (space) out["factors"] = space->factor_dims();
  return out;
}

ParsedMatrix matrix_from_json(const Json& j) {
  const Index n = require_index(j, "dim");
  if (!j.contains("entries") || !j["entries"].is_array() ||
      j["entries"].size() != static_cast<size_t>(n)) {
    schema("\"entries\" must be an array of dim rows");
  }
  ParsedMatrix out;
  out.matrix.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    const Json& row = j["entries"][i];
    if (!row.is_array() || row.size() != static_cast<size_t>(n)) {
      schema("every matrix row must have dim entries");
    }
    for (Index k = 0; k < n; ++k) out.matrix(i, k) = entry_from_json(row[k]);
  }
  if (j.contains("factors")) {
    const Json& f = j["factors"];
    if (!f.is_array() || f.empty() || f.size() > 3) schema("\"factors\" must list 1 to 3 dimensions");
    std::vector<Index> dims;
    Index prod = 1;
    for (const Json& d : f) {
      if (!d.is_number_integer() || d.get<long long>() < 1) {
        schema("factor dimensions must be positive integers");
      }
      dims.push_back(static_cast<Index>(d.get<long long>()));
      prod *= dims.back();
    }
    if (prod != n) schema("product of \"factors\" must equal dim");
    out.space = TensorSpace(std::move(dims));
  }
  return out;
}

Json vector_to_json(const Eigen::VectorXcd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(entry_to_json(v(i)));
  return out;
}

Eigen::VectorXcd vector_from_json(const Json& j) {
  if (!j.is_array()) schema("vectors are arrays of [re, im] pairs");
  Eigen::VectorXcd v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = entry_from_json(j[i]);
  return v;
}

Json real_vector_to_json(const RealVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json counterexample_to_json(const Counterexample& ce, Index dim, std::uint64_t seed) {
  return {
      {"p", ce.exps.p()},
      {"q", ce.exps.q()},
      {"dim", dim},
      {"seed", seed},
      {"epsilon", ce.epsilon},
      {"t_negative", ce.t_negative},
      {"t_positive", ce.t_positive},
      {"gap_negative", ce.gap_negative},
      {"gap_positive", ce.gap_positive},
      {"tol_negative", ce.tol_negative},
      {"tol_positive", ce.tol_positive},
      {"pairs_tried", ce.pairs_tried},
      {"a1", matrix_to_json(ce.a1.matrix())},
      {"a2", matrix_to_json(ce.a2.matrix())},
      {"b_negative", matrix_to_json(ce.b_negative.matrix())},
      {"b_positive", matrix_to_json(ce.b_positive.matrix())},
      {"v", vector_to_json(ce.v)},
      {"w", vector_to_json(ce.w)},
  };
}

Counterexample counterexample_from_json(const Json& j) {
  if (!j.is_object()) schema("counterexample fixture must be an object");
  auto psd = [&](const char* key) {
    if (!j.contains(key)) schema(std::string("missing matrix \"") + key + "\"");
    return clamp_to_psd(matrix_from_json(j[key]).matrix);
  };
  Counterexample ce;
  ce.exps = ExponentPair(require_number(j, "p"), require_number(j, "q"));
  ce.epsilon = require_number(j, "epsilon");
  ce.t_negative = require_number(j, "t_negative");
  ce.t_positive = require_number(j, "t_positive");
  ce.gap_negative = require_number(j, "gap_negative");
  ce.gap_positive = require_number(j, "gap_positive");
  ce.tol_negative = require_number(j, "tol_negative");
  ce.tol_positive = require_number(j, "tol_positive");
  ce.pairs_tried = static_cast<int>(require_number(j, "pairs_tried"));
  ce.a1 = psd("a1");
  ce.a2 = psd("a2");
  ce.b_negative = psd("b_negative");
  ce.b_positive = psd("b_positive");
  if (!j.contains("v") || !j.contains("w")) schema("missing witness vectors");
  ce.v = vector_from_json(j["v"]);
  ce.w = vector_from_json(j["w"]);
  return ce;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    schema(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace tracecvx
