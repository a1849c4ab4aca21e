#include "buckpass/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "buckpass/errors.hpp"

namespace buckpass {

namespace {

void emit(const nlohmann::json& j, std::string& out, int indent, int depth) {
    const auto pad = [&](int d) {
        if (indent >= 0) {
            out += '\n';
            out.append(static_cast<size_t>(indent * d), ' ');
        }
    };
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) { out += "{}"; break; }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) { // std::map order: sorted keys
                if (!first) out += ',';
                first = false;
                pad(depth + 1);
                out += nlohmann::json(it.key()).dump();
                out += indent >= 0 ? ": " : ":";
                emit(it.value(), out, indent, depth + 1);
            }
            pad(depth);
            out += '}';
            break;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) { out += "[]"; break; }
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                pad(depth + 1);
                emit(v, out, indent, depth + 1);
            }
            pad(depth);
            out += ']';
            break;
        }
        case nlohmann::json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x))
                throw InternalError("refusing to serialize a non-finite number");
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out += buf;
            break;
        }
        default:
            out += j.dump(); // integers, booleans, strings, null
    }
}

} // namespace

std::string dump_deterministic(const nlohmann::json& j, int indent) {
    std::string out;
    emit(j, out, indent, 0);
    return out;
}

nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(source + ": invalid JSON: " + e.what());
    }
}

nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

} // namespace buckpass
