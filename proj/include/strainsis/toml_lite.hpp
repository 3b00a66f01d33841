#pragma once

#include <string_view>

#include <json.hpp>

namespace strainsis::toml_lite {

/// Parses the TOML subset the scenario files use -- [table.path] headers,
/// bare and dotted keys, strings, numbers, booleans, (nested, multi-line)
/// arrays, and inline tables -- into a json object tree. Arrays of tables
/// and datetime values are not supported. Throws validation_error on
/// malformed input.
nlohmann::json parse(std::string_view text);

} // namespace strainsis::toml_lite
