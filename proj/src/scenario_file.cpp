#include "choicealloc/scenario_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace choicealloc {

namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(std::string_view source) : source_(source) {}

  [[noreturn]] void schema(const std::string& path, const std::string& message) const {
    throw SchemaError(source_ + ": " + path + ": " + message);
  }

  void only_keys(const json& object, const std::string& path, std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, value] : object.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) schema(path.empty() ? key : path + "." + key, "unknown key");
    }
  }

  const json& require(const json& object, const std::string& path, const char* key) const {
    if (!object.contains(key)) schema(join(path, key), "missing required key");
    return object.at(key);
  }

  double number(const json& value, const std::string& path) const {
    if (!value.is_number()) schema(path, "expected a number");
    return value.get<double>();
  }

  std::string string(const json& value, const std::string& path) const {
    if (!value.is_string()) schema(path, "expected a string");
    return value.get<std::string>();
  }

  const json& object(const json& value, const std::string& path) const {
    if (!value.is_object()) schema(path, "expected an object");
    return value;
  }

  const json& array(const json& value, const std::string& path) const {
    if (!value.is_array()) schema(path, "expected an array");
    return value;
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

template <class Item>
std::vector<Item> read_list(const Reader& reader, const json& root, const char* key, const char* value_key,
                            bool required) {
  std::vector<Item> items;
  if (!root.contains(key)) {
    if (required) reader.schema(key, "missing required key");
    return items;
  }
  const auto& list = reader.array(root.at(key), key);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
    const auto& entry = reader.object(list[i], path);
    reader.only_keys(entry, path, {"id", value_key});
    Item item;
    item.id = reader.string(reader.require(entry, path, "id"), path + ".id");
    const double v = reader.number(reader.require(entry, path, value_key), path + "." + value_key);
    if constexpr (std::is_same_v<Item, Location>) {
      item.alpha = v;
    } else {
      item.beta = v;
    }
    items.push_back(std::move(item));
  }
  return items;
}

Allocation read_allocation(const Reader& reader, const json& value, const std::string& path) {
  reader.object(value, path);
  reader.only_keys(value, path, {"central", "local"});
  Allocation allocation;
  if (value.contains("central")) {
    const auto& central = reader.object(value.at("central"), path + ".central");
    for (const auto& [id, v] : central.items()) {
      allocation.central[id] = reader.number(v, path + ".central." + id);
    }
  }
  if (value.contains("local")) {
    const auto& local = reader.object(value.at("local"), path + ".local");
    for (const auto& [key, v] : local.items()) {
      const auto slash = key.find('/');
      if (slash == std::string::npos || key.find('/', slash + 1) != std::string::npos) {
        reader.schema(path + ".local." + key, "key must have the form \"location/resource\"");
      }
      allocation.local[LocalKey{key.substr(0, slash), key.substr(slash + 1)}] =
          reader.number(v, path + ".local." + key);
    }
  }
  return allocation;
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, std::string_view source) {
  const Reader reader(source);
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(source) + ": invalid JSON: " + e.what());
  }
  reader.object(root, "<root>");
  reader.only_keys(root, "",
                   {"schema_version", "budget", "locations", "local_resources", "central_resources", "allocations"});

  const auto& version = reader.require(root, "", "schema_version");
  if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion) {
    reader.schema("schema_version", "unsupported value (expected " + std::to_string(kSchemaVersion) + ")");
  }
  const double budget = reader.number(reader.require(root, "", "budget"), "budget");
  auto locations = read_list<Location>(reader, root, "locations", "alpha", true);
  auto local = read_list<Resource>(reader, root, "local_resources", "beta", false);
  auto central = read_list<Resource>(reader, root, "central_resources", "beta", false);

  try {
    ScenarioFile file{kSchemaVersion, Scenario(std::move(locations), std::move(local), std::move(central), budget), {}};
    if (root.contains("allocations")) {
      const auto& allocations = reader.object(root.at("allocations"), "allocations");
      for (const auto& [name, value] : allocations.items()) {
        const std::string path = "allocations." + name;
        auto allocation = read_allocation(reader, value, path);
        try {
          check_feasible(file.scenario, flatten(file.scenario, allocation));
        } catch (const InvalidInput& e) {
          throw InvalidInput(path + ": " + e.what());
        }
        file.allocations.emplace(name, std::move(allocation));
      }
    }
    return file;
  } catch (const SchemaError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string(source) + ": " + e.what());
  }
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

std::string dump_scenario(const ScenarioFile& file) {
  const auto& s = file.scenario;
  json root;
  root["schema_version"] = file.schema_version;
  root["budget"] = s.budget();
  root["locations"] = json::array();
  for (const auto& loc : s.locations()) root["locations"].push_back({{"id", loc.id}, {"alpha", loc.alpha}});
  root["local_resources"] = json::array();
  for (const auto& r : s.local_resources()) root["local_resources"].push_back({{"id", r.id}, {"beta", r.beta}});
  root["central_resources"] = json::array();
  for (const auto& r : s.central_resources()) root["central_resources"].push_back({{"id", r.id}, {"beta", r.beta}});
  if (!file.allocations.empty()) {
    json allocations = json::object();
    for (const auto& [name, allocation] : file.allocations) {
      json central = json::object();
      for (const auto& [id, v] : allocation.central) central[id] = v;
      json local = json::object();
      for (const auto& [key, v] : allocation.local) local[key.location + "/" + key.resource] = v;
      allocations[name] = {{"central", std::move(central)}, {"local", std::move(local)}};
    }
    root["allocations"] = std::move(allocations);
  }
  return root.dump(2) + "\n";
}

void save_scenario(const ScenarioFile& file, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput(path.string() + ": cannot open for writing");
  out << dump_scenario(file);
}

}  // namespace choicealloc
