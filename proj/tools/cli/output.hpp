#ifndef SMARENA_CLI_OUTPUT_HPP
#define SMARENA_CLI_OUTPUT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "smarena/sweep.hpp"

namespace smarena::cli {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr int kSchemaVersion = 1;

/// Writes to `path.tmp` and renames over `path`, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV text with the provenance comment line on top.
class CsvTable {
 public:
  CsvTable(std::uint64_t seed, const std::string& config_hash, std::vector<std::string> columns);

  template <class... Ts>
  void row(const Ts&... fields);
  void raw_row(const std::vector<std::string>& fields);

  [[nodiscard]] std::string str() const { return text_; }
  void save(const std::filesystem::path& path) const { write_atomic(path, text_); }

 private:
  std::size_t width_;
  std::string text_;
};

std::string cell(double v);
std::string cell(const std::string& v);
std::string cell(const char* v);
std::string cell(std::string_view v);
template <class T>
  requires std::is_integral_v<T>
std::string cell(T v) {
  return std::to_string(v);
}

template <class... Ts>
void CsvTable::row(const Ts&... fields) {
  raw_row({cell(fields)...});
}

// ---- per-task result log ------------------------------------------------------

/// One JSON object per line; a torn final line (interrupted write) is ignored.
ResultStore load_results(const std::filesystem::path& path);
std::string result_line(const std::string& key, const SimResult& result);

}  // namespace smarena::cli

#endif  // SMARENA_CLI_OUTPUT_HPP
