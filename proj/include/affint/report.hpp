#pragma once

// Report emission: JSON with every double printed to 17 significant digits,
// and atomic file writes.

#include <cstdint>
#include <string>

#include <json.hpp>

namespace affint {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Serialises j; floating-point values use %.17g, non-finite ones become null.
std::string dump_json(const Json& j, int indent = 2);

// Writes to a temporary file in the same directory, then renames.
// Throws std::runtime_error on failure.
void write_file_atomic(const std::string& path, const std::string& content);

std::string fnv1a_hex(const std::string& data);

}  // namespace affint
