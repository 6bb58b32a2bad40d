#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "choicealloc/cli.hpp"
#include "test_support.hpp"

using namespace choicealloc;

namespace {

const std::string kParis = std::string(CHOICEALLOC_DATA_DIR) + "/paris.json";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    result.push_back(line);
  }
  return result;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> result;
  std::stringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) result.push_back(cell);
  return result;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "choicealloc_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("solve prints the optimal row") {
  const auto r = run({"solve", kParis});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "label,louvre/cameras,louvre/billboards,eiffel/cameras,eiffel/billboards,campaign,"
                   "p_louvre,p_eiffel,p_opt_out,p_overall");
  const auto values = cells(rows[1]);
  CHECK(values[0] == "OPTIMAL");
  const std::vector<double> expected{9, 6, 6, 4, 5};
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK(std::abs(std::stod(values[k + 1]) - expected[k]) < 1e-12);
  CHECK(std::abs(std::stod(values.back()) - 1.0 / 109) < 1e-15);
  CHECK(r.out.find("\r\n") != std::string::npos);
}

TEST_CASE("json output") {
  const auto r = run({"--output", "json", "solve", kParis});
  REQUIRE(r.code == cli::kOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["rows"][0]["label"] == "OPTIMAL");
  CHECK(std::abs(j["multiplier"].get<double>() + 1.0 / 540) < 1e-15);
  CHECK(run({"--output", "xml", "solve", kParis}).code == cli::kUsage);
}

TEST_CASE("evaluate named allocations") {
  auto r = run({"evaluate", kParis, "--allocation", "example"});
  REQUIRE(r.code == cli::kOk);
  auto values = cells(lines(r.out)[1]);
  CHECK(std::abs(std::stod(values.back()) - 1.0 / 13) < 1e-14);
  r = run({"evaluate", kParis, "--allocation", "improved"});
  values = cells(lines(r.out)[1]);
  CHECK(std::abs(std::stod(values.back()) - 1.0 / 19) < 1e-14);
  r = run({"evaluate", kParis, "--allocation", "optimal"});
  CHECK(r.code == cli::kOk);
  CHECK(run({"evaluate", kParis, "--allocation", "missing"}).code == cli::kInvalidInput);
  CHECK(run({"evaluate", kParis}).code == cli::kUsage);
}

TEST_CASE("compare gives the six heuristic rows") {
  const auto r = run({"compare", kParis, "--rules", "cle,celp", "--gamma", "0.25,0.5,0.75"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 7);
  const std::vector<std::pair<std::string, double>> expected{
      {"CLE(0.25)", 1.84}, {"CLE(0.5)", 6.65},  {"CLE(0.75)", 60.33},
      {"CELP(0.25)", 1.16}, {"CELP(0.5)", 4.25}, {"CELP(0.75)", 48.64}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto values = cells(rows[i + 1]);
    CHECK(values[0] == expected[i].first);
    CHECK(std::abs(100 * std::stod(values.back()) - expected[i].second) <= 0.01);
  }

  const auto grid = run({"compare", kParis, "--rules", "celp", "--gamma", "grid"});
  REQUIRE(grid.code == cli::kOk);
  CHECK(grid.out.find("CELP(0.17)") != std::string::npos);

  CHECK(run({"compare", kParis, "--rules", "equal", "--gamma", "0.5"}).code == cli::kInvalidInput);
  CHECK(run({"compare", kParis, "--rules", "cle", "--gamma", "1.5"}).code == cli::kInvalidInput);
}

TEST_CASE("sweep, scale and budget-for") {
  auto r = run({"sweep", kParis, "--alpha1", "1,5"});
  REQUIRE(r.code == cli::kOk);
  CHECK(lines(r.out).size() == 3);
  CHECK(run({"sweep", kParis, "--alpha1", "11"}).code == cli::kInvalidInput);

  r = run({"scale", kParis, "--k", "1,1.1"});
  REQUIRE(r.code == cli::kOk);
  CHECK(lines(r.out).size() == 3);

  r = run({"budget-for", kParis, "--target", "0.0092", "--k", "1,1.4"});
  REQUIRE(r.code == cli::kOk);
  CHECK(lines(r.out).size() == 3);
  CHECK(run({"budget-for", kParis, "--target", "1"}).code == cli::kInvalidInput);
}

TEST_CASE("simulate conserves counts and is deterministic") {
  const std::vector<std::string> args{"simulate", kParis, "--allocation", "optimal", "--draws", "1000000",
                                      "--seed", "42"};
  const auto a = run(args);
  REQUIRE(a.code == cli::kOk);
  const auto rows = lines(a.out);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == "label,louvre,eiffel,opt_out");
  const auto counts = cells(rows[1]);
  CHECK(counts[0] == "count");
  long long total = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) total += std::stoll(counts[c]);
  CHECK(total == 1'000'000);
  CHECK(run(args).out == a.out);

  CHECK(run({"simulate", kParis, "--allocation", "optimal", "--draws", "0"}).code == cli::kUsage);
}

TEST_CASE("verify agrees on the bundled scenario") {
  const auto r = run({"verify", kParis});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("kkt_residual") != std::string::npos);
  CHECK(run({"--tolerance", "0", "verify", kParis}).code != cli::kOk);
}

TEST_CASE("input errors map to distinct exit codes") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"solve"}).code == cli::kUsage);

  const auto missing = run({"solve", "/nonexistent/scenario.json"});
  CHECK(missing.code == cli::kParseError);
  CHECK_FALSE(missing.err.empty());
  CHECK(missing.out.empty());

  CHECK(run({"solve", write_temp("broken.json", "{").string()}).code == cli::kParseError);
  CHECK(run({"solve", write_temp("schema.json", R"({"schema_version": 1})").string()}).code == cli::kSchemaError);
  const auto zero_beta = write_temp("zero_beta.json", R"({"schema_version": 1, "budget": 1,
      "locations": [{"id": "a", "alpha": 1}], "local_resources": [{"id": "r", "beta": 0}]})");
  const auto r = run({"solve", zero_beta.string()});
  CHECK(r.code == cli::kInvalidInput);
  CHECK(r.err.find("beta") != std::string::npos);
  std::filesystem::remove_all(zero_beta.parent_path());
}
