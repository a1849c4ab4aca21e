#pragma once

#include <string>

#include "json.hpp"

namespace buckpass {

// Deterministic serialization: object keys in sorted order (nlohmann's default
// std::map storage), floating-point numbers printed with 17 significant digits so
// identical inputs produce byte-identical reports.
std::string dump_deterministic(const nlohmann::json& j, int indent = -1);

// Parse with errors reported as ValidationError naming the source (a filename or
// a short tag for in-memory text).
nlohmann::json parse_json_text(const std::string& text, const std::string& source);
nlohmann::json parse_json_file(const std::string& path);

} // namespace buckpass
