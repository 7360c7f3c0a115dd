#include "sieve/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "sieve/error.hpp"

namespace sieve {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  out.push_back(trim(cell));
  return out;
}

double parse_cell(const std::string& s, std::size_t line_no, std::size_t col) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw InputError("CSV line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                     ": not a finite number: '" + s + "'");
  }
  return v;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty() || line[0] == '#') continue;
    auto cells = split_line(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw InputError("CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " +
                       std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_cell(cells[c], line_no, c);
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw InputError("CSV input has no header row");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open CSV file: " + path.string());
  return read_csv(in);
}

Dataset dataset_from_table(const CsvTable& table, const std::string& outcome) {
  auto it = std::find(table.header.begin(), table.header.end(), outcome);
  if (it == table.header.end()) throw InputError("outcome column '" + outcome + "' not found in CSV header");
  const auto target = static_cast<std::size_t>(it - table.header.begin());
  Dataset data;
  data.features = features_from_table(table, outcome);
  data.outcome.resize(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) data.outcome(static_cast<Eigen::Index>(i)) = table.rows[i][target];
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != target) data.feature_names.push_back(table.header[c]);
  }
  return data;
}

Eigen::MatrixXd features_from_table(const CsvTable& table, const std::string& drop) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (drop.empty() || table.header[c] != drop) keep.push_back(c);
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t k = 0; k < keep.size(); ++k) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = table.rows[i][keep[k]];
    }
  }
  return x;
}

void write_dataset_csv(std::ostream& out, const Dataset& data, const std::string& outcome_name) {
  for (Eigen::Index k = 0; k < data.d(); ++k) {
    if (static_cast<std::size_t>(k) < data.feature_names.size()) {
      out << data.feature_names[static_cast<std::size_t>(k)];
    } else {
      out << 'x' << (k + 1);
    }
    out << ',';
  }
  out << outcome_name << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index k = 0; k < data.d(); ++k) out << format_double(data.features(i, k)) << ',';
    out << format_double(data.outcome(i)) << '\n';
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace sieve
