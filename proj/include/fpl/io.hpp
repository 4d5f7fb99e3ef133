#ifndef FPL_IO_HPP_
#define FPL_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace fpl::io {

/// 17 significant digits: exact round trip for doubles.
std::string format_double(double value);

/// Comma-separated, header row, LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Whitespace-separated "x y" lines for gnuplot.
void write_plot_data(const std::filesystem::path& path, const std::vector<double>& x,
                     const std::vector<double>& y, const std::string& comment = {});

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Reads a single column of numbers (optional header row) from a CSV file.
std::vector<double> read_csv_column(const std::filesystem::path& path);

nlohmann::json to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace fpl::io

#endif  // FPL_IO_HPP_
