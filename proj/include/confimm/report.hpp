#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace confimm {

using Json = nlohmann::ordered_json;

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Experiment report, schema 1. Everything except the "timestamp" object
/// (wall-clock time and runtime) is a deterministic function of the inputs.
class Report {
 public:
  explicit Report(std::string experiment) : experiment_(std::move(experiment)) {}

  void input(const std::string& key, Json value) { inputs_[key] = std::move(value); }
  void result(const std::string& key, Json value) { results_[key] = std::move(value); }
  void provenance(const std::string& key, Json value) { provenance_[key] = std::move(value); }
  void check(const std::string& name, bool pass, double value, double tolerance,
             std::string detail = {});
  void set_runtime(double seconds) { runtime_ = seconds; }

  const std::string& experiment() const { return experiment_; }
  const std::vector<Check>& checks() const { return checks_; }
  const Json& results() const { return results_; }
  bool all_pass() const;

  /// timestamp = false omits the non-deterministic part.
  Json to_json(bool timestamp = true) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::string experiment_;
  Json inputs_ = Json::object(), results_ = Json::object(), provenance_ = Json::object();
  std::vector<Check> checks_;
  double runtime_ = 0.0;
};

/// Writes a CSV table with a fixed header row.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace confimm
