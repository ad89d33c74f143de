#pragma once

// JSON system configurations: {"d", "maps": [{"matrix", "translation"}],
// "seed", optional "labels"}.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "affint/dimension.hpp"
#include "affint/geometry.hpp"

namespace affint {

enum class ConfigErrorCode {
  Io = 10,
  MalformedJson = 11,
  MissingField = 12,
  WrongType = 13,
  ArityMismatch = 14,
  NonFinite = 15,
  SingularMatrix = 16,
  NotContracting = 17,
  BadValue = 18,
};

const char* config_error_name(ConfigErrorCode code);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorCode code, std::string context, const std::string& message);
  ConfigErrorCode code() const { return code_; }
  // "line 3, column 7" or a field path such as "maps[2].matrix".
  const std::string& context() const { return context_; }

 private:
  ConfigErrorCode code_;
  std::string context_;
};

struct MapSpec {
  Matrix matrix;
  Vec translation;
};

// Hypothesis gate values computed at load time.
struct ConfigGates {
  double delta = 0.0;
  double det_squared_sum = 0.0;
  double max_commutator = 0.0;
  double conformal_sum = 0.0;  // sum alpha_d(T_i)^d |det T_i|
};

struct SystemConfig {
  int d = 0;
  std::vector<MapSpec> maps;
  std::uint64_t seed = 0;
  std::optional<std::vector<std::string>> labels;
  ConfigGates gates;

  MapTuple tuple() const;
  IfsInstance ifs() const;
};

// Throws ConfigError.
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);

// Canonical JSON (17 significant digits, fixed key order).
std::string serialize_config(const SystemConfig& config);
// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const SystemConfig& config);

}  // namespace affint
