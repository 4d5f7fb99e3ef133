#include "fpl/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fpl::io {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) +
                                " cells, header has " + std::to_string(header_.size()));
  rows_.push_back(cells);
}

std::string CsvTable::str() const {
  std::string out;
  auto append_line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append_line(header_);
  for (const auto& row : rows_) append_line(row);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_plot_data(const std::filesystem::path& path, const std::vector<double>& x,
                     const std::vector<double>& y, const std::string& comment) {
  if (x.size() != y.size()) throw std::invalid_argument("plot data columns differ in length");
  std::string out;
  if (!comment.empty()) out += "# " + comment + '\n';
  for (std::size_t i = 0; i < x.size(); ++i)
    out += format_double(x[i]) + ' ' + format_double(y[i]) + '\n';
  write_text(path, out);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  write_text(path, value.dump(2) + '\n');
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

std::vector<double> read_csv_column(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string cell = line.substr(0, line.find(','));
    std::size_t used = 0;
    try {
      const double v = std::stod(cell, &used);
      values.push_back(v);
    } catch (const std::exception&) {
      if (!first) throw std::runtime_error("non-numeric cell '" + cell + "' in " + path.string());
    }
    first = false;
  }
  return values;
}

nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace fpl::io
