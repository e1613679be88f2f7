#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hhg::runner {

/// Provenance shared by every artifact of one invocation.
struct Provenance {
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string created;  ///< UTC timestamp; the only non-reproducible field
};

std::string utc_timestamp();

/// Shortest decimal form that round-trips; "nan", "inf", "-inf" otherwise.
std::string format_number(double value);

/// A CSV table: first line "# {json metadata}", second line the column names,
/// then one row per record. Only the metadata line may differ between
/// reruns of the same config and seed.
class CsvTable {
 public:
  CsvTable(std::string kind, std::vector<std::string> columns);

  void add_row(const std::vector<double>& values);
  nlohmann::json& extras() { return extras_; }

  std::size_t rows() const noexcept { return rows_.size(); }
  std::string render(const Provenance& provenance) const;
  void write(const std::filesystem::path& path, const Provenance& provenance) const;

 private:
  std::string kind_;
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
  nlohmann::json extras_ = nlohmann::json::object();
};

/// Parsed CSV artifact.
struct CsvData {
  nlohmann::json metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Values of one column; ShapeError naming the column when absent.
  std::vector<double> column(std::string_view name) const;
};

CsvData read_csv(const std::filesystem::path& path);

/// Writes JSON with the provenance block under "provenance".
void write_json(const std::filesystem::path& path, nlohmann::json body, const Provenance& provenance,
                std::string_view kind);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hhg::runner
