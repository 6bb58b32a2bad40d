#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "choicealloc/model.hpp"

namespace choicealloc {

/// Text is not valid JSON, or the file cannot be read.
class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Valid JSON with the wrong shape (missing key, wrong type, unknown key,
/// unsupported schema_version).
class SchemaError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

inline constexpr int kSchemaVersion = 1;

/// On-disk form:
///
///   {
///     "schema_version": 1,
///     "budget": 30,
///     "locations": [{"id": "louvre", "alpha": 6.591673732008658}, ...],
///     "local_resources": [{"id": "cameras", "beta": 3}, ...],
///     "central_resources": [{"id": "campaign", "beta": 1}],
///     "allocations": {
///       "example": {"central": {"campaign": 15}, "local": {"louvre/cameras": 3, ...}}
///     }
///   }
///
/// local_resources, central_resources and allocations may be omitted.
struct ScenarioFile {
  int schema_version = kSchemaVersion;
  Scenario scenario;
  std::map<std::string, Allocation> allocations;
};

/// `source` names the input in error messages.
ScenarioFile parse_scenario(std::string_view text, std::string_view source = "<input>");
ScenarioFile load_scenario(const std::filesystem::path& path);

std::string dump_scenario(const ScenarioFile& file);
void save_scenario(const ScenarioFile& file, const std::filesystem::path& path);

}  // namespace choicealloc
