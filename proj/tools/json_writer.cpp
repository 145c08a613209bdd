#include "json_writer.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace blochchi {

namespace {

void write_number(double v, std::ostream& out) {
    if (!std::isfinite(v)) {
        out << "null";  // JSON has no inf/nan
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // Keep the value recognisably floating point.
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    out << s;
}

void write(const nlohmann::json& v, std::ostream& out, int depth) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (v.type()) {
        case nlohmann::json::value_t::object: {
            if (v.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {  // nlohmann objects iterate in sorted key order
                if (!first) out << ",\n";
                first = false;
                out << pad << nlohmann::json(it.key()).dump() << ": ";
                write(it.value(), out, depth + 1);
            }
            out << "\n" << close << "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (v.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out << ",\n";
                out << pad;
                write(v[i], out, depth + 1);
            }
            out << "\n" << close << "]";
            return;
        }
        case nlohmann::json::value_t::number_float:
            write_number(v.get<double>(), out);
            return;
        default:
            out << v.dump();
    }
}

}  // namespace

void write_json(const nlohmann::json& value, std::ostream& out) {
    write(value, out, 0);
    out << "\n";
}

}  // namespace blochchi
