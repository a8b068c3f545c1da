#include "confimm/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "confimm/error.hpp"

namespace confimm {

namespace {

// JSON has no inf/nan; encode them as strings so reports stay valid.
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

}  // namespace

void Report::check(const std::string& name, bool pass, double value, double tolerance,
                   std::string detail) {
  checks_.push_back({name, pass, value, tolerance, std::move(detail)});
}

bool Report::all_pass() const {
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return true;
}

Json Report::to_json(bool timestamp) const {
  Json j;
  j["schema"] = 1;
  j["experiment"] = experiment_;
  j["inputs"] = inputs_;
  j["results"] = results_;
  Json checks = Json::array();
  for (const auto& c : checks_) {
    Json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["value"] = number(c.value);
    e["tolerance"] = number(c.tolerance);
    if (!c.detail.empty()) e["detail"] = c.detail;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["all_pass"] = all_pass();
  j["provenance"] = provenance_;
  if (timestamp) j["timestamp"] = {{"utc", utc_now()}, {"runtime_s", runtime_}};
  return j;
}

void Report::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write report '" + path.string() + "'");
  out << to_json().dump(2) << "\n";
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write csv '" + path.string() + "'");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n" << std::setprecision(17);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << "\n";
  }
}

}  // namespace confimm
