#pragma once

// Matrix JSON: {"dim": d, "entries": [[re, im], ...]} in row-major order.

#include "ncstein/opcore.hpp"

#include "json.hpp"

#include <string>

namespace ncstein {

nlohmann::json operator_to_json(const Operator& x);
Operator operator_from_json(const nlohmann::json& j);

nlohmann::json sequence_to_json(const OperatorSequence& seq);
OperatorSequence sequence_from_json(const nlohmann::json& j);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace ncstein
