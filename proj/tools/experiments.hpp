#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace sie::cli {

using nlohmann::json;

enum class Kind { Number, Integer, Boolean, NumberList, IntegerList };

struct ParamSpec {
  std::string key;
  Kind kind;
  json fallback;
  std::string doc;
};

struct RunContext {
  std::uint64_t seed = 1;
  int threads = 1;
};

struct ExperimentResult {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  json derived = json::object();
  std::vector<std::pair<std::string, bool>> invariants;
  // Extra artifacts written next to results.csv (file name, JSON body).
  std::vector<std::pair<std::string, json>> attachments;

  void check(const std::string& name, bool ok) { invariants.emplace_back(name, ok); }
  bool pass() const;
};

struct Experiment {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> schema;
  std::function<ExperimentResult(const json& params, const RunContext& ctx)> run;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<Experiment>& registry();
const Experiment* find_experiment(const std::string& name);

/// Checks keys and types against the schema and fills defaults.
json validate_params(const Experiment& e, const json& params);

struct RunOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

/// Exit codes: 0 pass, 1 invariant failure or runtime error, 2 bad config.
int run_config(const std::filesystem::path& config, const RunOverrides& o, std::ostream& log);

/// Runs one experiment and writes results.csv and summary.json into `out`.
int run_experiment(const Experiment& e, const json& params, std::uint64_t seed, int threads,
                   const std::filesystem::path& out, const std::string& config_hash, std::ostream& log);

struct SelftestOptions {
  std::filesystem::path out = "selftest_out";
  int threads = 1;
  std::uint64_t seed = 1;
  std::string inject;  // "" or "lambda-order"
};
int selftest(const SelftestOptions& o, std::ostream& log);

/// Markdown description of every experiment schema.
std::string schema_markdown();

}  // namespace sie::cli
