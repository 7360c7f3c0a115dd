#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sieve/model.hpp"

namespace sieve {

// Numeric CSV with a header row. Quoted header fields are unquoted; data
// cells must parse as finite doubles.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

// Splits a table into features and outcome. Throws InputError naming the
// column when `outcome` is not in the header.
Dataset dataset_from_table(const CsvTable& table, const std::string& outcome);

// All columns become features, except `drop` when it is present.
Eigen::MatrixXd features_from_table(const CsvTable& table, const std::string& drop = {});

void write_dataset_csv(std::ostream& out, const Dataset& data, const std::string& outcome_name);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace sieve
