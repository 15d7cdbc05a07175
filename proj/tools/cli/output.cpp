#include "output.hpp"

#include <fstream>

#include <fmt/format.h>

#include "config.hpp"
#include "json.hpp"

namespace smarena::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write {}", tmp.string()));
    out << content;
    out.flush();
    if (!out) throw IoError(fmt::format("write failed on {}", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot replace {}: {}", path.string(), ec.message()));
}

CsvTable::CsvTable(std::uint64_t seed, const std::string& config_hash, std::vector<std::string> columns)
    : width_(columns.size()) {
  text_ = fmt::format("# sm-arena {} schema={} seed={} config={}\n", kToolVersion, kSchemaVersion,
                      seed, config_hash);
  raw_row(columns);
}

void CsvTable::raw_row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_ += ',';
    text_ += fields[i];
  }
  text_ += '\n';
}

std::string cell(double v) { return fmt::format("{}", v); }
std::string cell(const std::string& v) { return v; }
std::string cell(const char* v) { return v; }
std::string cell(std::string_view v) { return std::string(v); }

std::string result_line(const std::string& key, const SimResult& r) {
  json j;
  j["key"] = key;
  j["mean_rewards"] = r.mean_rewards;
  j["sem"] = r.sem;
  j["converged_fraction"] = r.converged_fraction;
  j["steps_used"] = r.steps_used;
  return j.dump() + "\n";
}

ResultStore load_results(const fs::path& path) {
  ResultStore store;
  std::ifstream in(path);
  if (!in) return store;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("key")) continue;  // torn tail of an interrupted run
    SimResult r;
    r.mean_rewards = j.at("mean_rewards").get<std::vector<double>>();
    r.sem = j.at("sem").get<std::vector<double>>();
    r.converged_fraction = j.at("converged_fraction").get<double>();
    r.steps_used = j.at("steps_used").get<std::vector<std::uint64_t>>();
    store.insert_or_assign(j.at("key").get<std::string>(), std::move(r));
  }
  return store;
}

}  // namespace smarena::cli
