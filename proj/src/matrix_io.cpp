#include "ncstein/matrix_io.hpp"

#include <fstream>
#include <sstream>

namespace ncstein {

nlohmann::json operator_to_json(const Operator& x) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      entries.push_back({x(i, j).real(), x(i, j).imag()});
    }
  }
  return {{"dim", x.rows()}, {"entries", std::move(entries)}};
}

Operator operator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw Rejection("matrix JSON needs \"dim\" and \"entries\"");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    throw Rejection("matrix JSON: \"dim\" must be a positive integer");
  }
  const auto d = static_cast<Eigen::Index>(j["dim"].get<long long>());
  const nlohmann::json& entries = j["entries"];
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != d * d) {
    throw Rejection("matrix JSON: \"entries\" must hold dim*dim pairs");
  }
  Operator x(d, d);
  for (Eigen::Index k = 0; k < d * d; ++k) {
    const nlohmann::json& e = entries[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw Rejection("matrix JSON: entry " + std::to_string(k) + " is not a [re, im] pair");
    }
    x(k / d, k % d) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return x;
}

nlohmann::json sequence_to_json(const OperatorSequence& seq) {
  nlohmann::json out = nlohmann::json::array();
  for (const Operator& x : seq) out.push_back(operator_to_json(x));
  return out;
}

OperatorSequence sequence_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Rejection("sequence JSON must be an array of matrices");
  OperatorSequence out;
  for (const nlohmann::json& m : j) out.push_back(operator_from_json(m));
  return out;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << j.dump(1) << '\n';
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return nlohmann::json::parse(ss.str());
}

}  // namespace ncstein
