#include "artifacts.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "hhg/errors.hpp"
#include "hhg/quantum_light.hpp"

namespace hhg::runner {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

CsvTable::CsvTable(std::string kind, std::vector<std::string> columns)
    : kind_(std::move(kind)), columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) {
    throw ShapeError(kind_ + ": row has " + std::to_string(values.size()) + " values for " +
                     std::to_string(columns_.size()) + " columns");
  }
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_number(values[i]);
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::render(const Provenance& p) const {
  nlohmann::json meta = {
      {"kind", kind_},
      {"version", p.version},
      {"config_hash", p.config_hash},
      {"seed", p.seed},
      {"rng", std::string(sampler_algorithm)},
      {"created", p.created},
      {"columns", columns_},
  };
  for (const auto& [key, value] : extras_.items()) meta[key] = value;
  std::string out = "# " + meta.dump() + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& row : rows_) {
    out += row;
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path, const Provenance& provenance) const {
  write_text(path, render(provenance));
}

std::vector<double> CsvData::column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[c]);
    return out;
  }
  throw ShapeError("missing column '" + std::string(name) + "'");
}

namespace {

double parse_cell(const std::string& cell, const std::filesystem::path& path) {
  if (cell == "nan") return std::nan("");
  if (cell == "inf") return INFINITY;
  if (cell == "-inf") return -INFINITY;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || end != cell.data() + cell.size()) {
    throw IoError(path.string() + ": cannot parse '" + cell + "' as a number");
  }
  return value;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  CsvData data;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw IoError(path.string() + ": missing metadata header");
  }
  try {
    data.metadata = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::parse_error&) {
    throw IoError(path.string() + ": metadata header is not valid JSON");
  }
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing column header");
  data.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != data.columns.size()) throw IoError(path.string() + ": ragged row");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, path));
    data.rows.push_back(std::move(row));
  }
  return data;
}

void write_json(const std::filesystem::path& path, nlohmann::json body, const Provenance& p, std::string_view kind) {
  body["provenance"] = {
      {"kind", kind}, {"version", p.version}, {"config_hash", p.config_hash},
      {"seed", p.seed}, {"rng", std::string(sampler_algorithm)}, {"created", p.created},
  };
  write_text(path, body.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace hhg::runner
