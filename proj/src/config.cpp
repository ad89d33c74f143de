#include "affint/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "affint/report.hpp"

namespace affint {

const char* config_error_name(ConfigErrorCode code) {
  switch (code) {
    case ConfigErrorCode::Io: return "io";
    case ConfigErrorCode::MalformedJson: return "malformed-json";
    case ConfigErrorCode::MissingField: return "missing-field";
    case ConfigErrorCode::WrongType: return "wrong-type";
    case ConfigErrorCode::ArityMismatch: return "arity-mismatch";
    case ConfigErrorCode::NonFinite: return "non-finite";
    case ConfigErrorCode::SingularMatrix: return "singular-matrix";
    case ConfigErrorCode::NotContracting: return "not-contracting";
    case ConfigErrorCode::BadValue: return "bad-value";
  }
  return "unknown";
}

ConfigError::ConfigError(ConfigErrorCode code, std::string context, const std::string& message)
    : std::runtime_error(std::string("config error [") + config_error_name(code) + "] at " + context + ": " + message),
      code_(code),
      context_(std::move(context)) {}

namespace {

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(ConfigErrorCode::WrongType, field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(ConfigErrorCode::NonFinite, field, "value is not finite");
  return v;
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(ConfigErrorCode::MissingField, where.empty() ? key : where + "." + key, "required");
  return *it;
}

}  // namespace

MapTuple SystemConfig::tuple() const {
  std::vector<Matrix> ms;
  for (const auto& m : maps) ms.push_back(m.matrix);
  return MapTuple(std::move(ms));
}

IfsInstance SystemConfig::ifs() const {
  std::vector<Vec> a;
  for (const auto& m : maps) a.push_back(m.translation);
  return IfsInstance(tuple(), std::move(a));
}

SystemConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ConfigErrorCode::MalformedJson, line_column(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  } catch (const nlohmann::json::out_of_range& e) {
    throw ConfigError(ConfigErrorCode::NonFinite, "document", e.what());
  }
  if (!doc.is_object()) throw ConfigError(ConfigErrorCode::WrongType, "document", "top level must be an object");

  SystemConfig cfg;
  const auto& jd = require(doc, "d", "");
  if (!jd.is_number_integer()) throw ConfigError(ConfigErrorCode::WrongType, "d", "expected an integer");
  cfg.d = jd.get<int>();
  if (cfg.d < 1 || cfg.d > kMaxDim) {
    throw ConfigError(ConfigErrorCode::BadValue, "d", "must be between 1 and " + std::to_string(kMaxDim));
  }
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      throw ConfigError(ConfigErrorCode::WrongType, "seed", "expected an unsigned 64-bit integer");
    }
    cfg.seed = it->get<std::uint64_t>();
  }
  const auto& jmaps = require(doc, "maps", "");
  if (!jmaps.is_array()) throw ConfigError(ConfigErrorCode::WrongType, "maps", "expected an array");
  if (jmaps.empty()) throw ConfigError(ConfigErrorCode::ArityMismatch, "maps", "need at least one map");
  const int d = cfg.d;
  for (std::size_t i = 0; i < jmaps.size(); ++i) {
    const std::string where = "maps[" + std::to_string(i) + "]";
    const auto& jm = jmaps[i];
    if (!jm.is_object()) throw ConfigError(ConfigErrorCode::WrongType, where, "expected an object");
    const auto& jmat = require(jm, "matrix", where);
    const std::string mwhere = where + ".matrix";
    if (!jmat.is_array()) throw ConfigError(ConfigErrorCode::WrongType, mwhere, "expected an array");
    std::vector<double> entries;
    if (!jmat.empty() && jmat[0].is_array()) {
      if (static_cast<int>(jmat.size()) != d) {
        throw ConfigError(ConfigErrorCode::ArityMismatch, mwhere,
                          "map " + std::to_string(i + 1) + " has " + std::to_string(jmat.size()) + " rows, d = " +
                              std::to_string(d));
      }
      for (std::size_t r = 0; r < jmat.size(); ++r) {
        const std::string rwhere = mwhere + "[" + std::to_string(r) + "]";
        if (!jmat[r].is_array() || static_cast<int>(jmat[r].size()) != d) {
          throw ConfigError(ConfigErrorCode::ArityMismatch, rwhere,
                            "map " + std::to_string(i + 1) + ": each row needs " + std::to_string(d) + " entries");
        }
        for (std::size_t c = 0; c < jmat[r].size(); ++c) {
          entries.push_back(number(jmat[r][c], rwhere + "[" + std::to_string(c) + "]"));
        }
      }
    } else {
      if (static_cast<int>(jmat.size()) != d * d) {
        throw ConfigError(ConfigErrorCode::ArityMismatch, mwhere,
                          "map " + std::to_string(i + 1) + " has " + std::to_string(jmat.size()) +
                              " entries, expected d*d = " + std::to_string(d * d));
      }
      for (std::size_t k = 0; k < jmat.size(); ++k) entries.push_back(number(jmat[k], mwhere + "[" + std::to_string(k) + "]"));
    }
    MapSpec spec;
    spec.matrix = Matrix::from_row_major(d, entries);
    const double scale = std::max(spec.matrix.max_abs_entry(), 1e-300);
    if (!(std::abs(spec.matrix.determinant()) > 1e-12 * std::pow(scale, d))) {
      throw ConfigError(ConfigErrorCode::SingularMatrix, mwhere, "map " + std::to_string(i + 1) + " is singular");
    }
    const std::string twhere = where + ".translation";
    const auto& jt = require(jm, "translation", where);
    if (!jt.is_array()) throw ConfigError(ConfigErrorCode::WrongType, twhere, "expected an array");
    if (static_cast<int>(jt.size()) != d) {
      throw ConfigError(ConfigErrorCode::ArityMismatch, twhere,
                        "map " + std::to_string(i + 1) + " translation has " + std::to_string(jt.size()) +
                            " entries, d = " + std::to_string(d));
    }
    spec.translation = Vec(d);
    for (int k = 0; k < d; ++k) spec.translation[k] = number(jt[static_cast<std::size_t>(k)], twhere + "[" + std::to_string(k) + "]");
    cfg.maps.push_back(spec);
  }
  if (auto it = doc.find("labels"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw ConfigError(ConfigErrorCode::WrongType, "labels", "expected an array of strings");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) throw ConfigError(ConfigErrorCode::WrongType, "labels[" + std::to_string(i) + "]", "expected a string");
      labels.push_back((*it)[i].get<std::string>());
    }
    if (labels.size() != cfg.maps.size()) throw ConfigError(ConfigErrorCode::ArityMismatch, "labels", "one label per map");
    cfg.labels = std::move(labels);
  }

  const MapTuple tuple = cfg.tuple();
  if (!(tuple.delta() < 1.0)) {
    throw ConfigError(ConfigErrorCode::NotContracting, "maps", "max ||T_i|| = " + std::to_string(tuple.delta()) + " >= 1");
  }
  cfg.gates.delta = tuple.delta();
  const Corollary12Report c12 = check_corollary12(tuple);
  cfg.gates.det_squared_sum = c12.det_squared_sum;
  cfg.gates.conformal_sum = c12.condition_i_sum;
  cfg.gates.max_commutator = check_theorem13(tuple).max_commutator;
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigErrorCode::Io, path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SystemConfig& config) {
  Json j;
  j["d"] = config.d;
  Json maps = Json::array();
  for (const auto& m : config.maps) {
    Json jm;
    jm["matrix"] = m.matrix.row_major();
    jm["translation"] = std::vector<double>(m.translation.values().begin(), m.translation.values().end());
    maps.push_back(jm);
  }
  j["maps"] = maps;
  j["seed"] = config.seed;
  if (config.labels) j["labels"] = *config.labels;
  return dump_json(j);
}

std::string config_hash(const SystemConfig& config) { return fnv1a_hex(serialize_config(config)); }

}  // namespace affint
