#pragma once
/// JSON serialisation with every floating-point number written with 17 significant digits
/// (round-trip exact), keys in insertion-independent sorted order, two-space indentation.

#include <ostream>

#include "json.hpp"

namespace blochchi {

void write_json(const nlohmann::json& value, std::ostream& out);

}  // namespace blochchi
