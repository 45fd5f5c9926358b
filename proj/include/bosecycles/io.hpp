#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bosecycles/cycle_engine.hpp"
#include "bosecycles/potentials.hpp"

namespace bosecycles {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" otherwise.
std::string format_double(double v);
std::string format_cell(const Cell& c);

/// Output table with a provenance block.
///
/// CSV: "# key = value" lines for `config`, then "# summary.key = value" lines,
/// then a header row and data rows.  JSON: {"config", "summary", "columns",
/// "rows"} with one object per row keyed by column name.
struct Table {
  std::vector<std::pair<std::string, Cell>> config;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void set_config(const std::string& key, Cell value);
  void set_summary(const std::string& key, Cell value);
  void add_row(std::vector<Cell> row);
};

enum class Format { csv, json };

Format parse_format(const std::string& s);
const char* to_string(Format f);

void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Table& t);
void write_table(std::ostream& os, const Table& t, Format f);

/// `key = value` lines; '#' starts a comment, blank lines are skipped.
/// ArgumentError names the offending line.
std::map<std::string, std::string> parse_config(std::istream& is, const std::string& source = "config");
std::map<std::string, std::string> read_config_file(const std::string& path);

/// CSV with a header naming `n` and one of `w` or `log_w`; n must run 1..N.
WeightSequence read_weights_csv(const std::string& path);

/// Two numeric columns (r, value); a non-numeric first line is taken as header.
std::pair<std::vector<double>, std::vector<double>> read_radial_table(const std::string& path);

/// Key-value potential definition:
///   kind = gaussian        g, sigma
///   kind = tabulated       table = <csv of r, u>
///   kind = autocorrelation v_table = <csv of r, v>, or shape = indicator with
///                          radius and height
/// plus optional d and superstability.  Paths are relative to the file.
PairPotential read_potential_file(const std::string& path, int d);

/// "gaussian:g,sigma" or a potential file path.
PairPotential load_potential(const std::string& spec, int d);

}  // namespace bosecycles
