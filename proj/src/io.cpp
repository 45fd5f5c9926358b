#include "bosecycles/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "bosecycles/errors.hpp"

namespace bosecycles {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& v) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  return res.ec == std::errc() && res.ptr == last;
}

double require_number(const std::map<std::string, std::string>& kv, const std::string& key, const std::string& src) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ArgumentError(src + ": missing key '" + key + "'");
  double v;
  if (!parse_number(it->second, v)) throw ArgumentError(src + ": '" + key + "' is not a number");
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  return in;
}

nlohmann::ordered_json to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_double(v);
        }
        return v;
      },
      c);
}

void upsert(std::vector<std::pair<std::string, Cell>>& list, const std::string& key, Cell value) {
  for (auto& [k, v] : list)
    if (k == key) {
      v = std::move(value);
      return;
    }
  list.emplace_back(key, std::move(value));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return std::to_string(v);
      },
      c);
}

void Table::set_config(const std::string& key, Cell value) { upsert(config, key, std::move(value)); }

void Table::set_summary(const std::string& key, Cell value) { upsert(summary, key, std::move(value)); }

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ArgumentError("row width does not match the header");
  rows.push_back(std::move(row));
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw ArgumentError("unknown format '" + s + "' (csv or json)");
}

const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

void write_csv(std::ostream& os, const Table& t) {
  for (const auto& [k, v] : t.config) os << "# " << k << " = " << format_cell(v) << '\n';
  for (const auto& [k, v] : t.summary) os << "# summary." << k << " = " << format_cell(v) << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(format_cell(row[i]));
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& t) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.config) j["config"][k] = to_json(v);
  j["summary"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.summary) j["summary"][k] = to_json(v);
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = to_json(row[i]);
    j["rows"].push_back(std::move(r));
  }
  os << j.dump(2) << '\n';
}

void write_table(std::ostream& os, const Table& t, Format f) {
  if (f == Format::csv) write_csv(os, t);
  else write_json(os, t);
}

std::map<std::string, std::string> parse_config(std::istream& is, const std::string& source) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ArgumentError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ArgumentError(where + ": empty key");
    if (!out.emplace(key, value).second) throw ArgumentError(where + ": duplicate key '" + key + "'");
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  auto in = open_input(path);
  return parse_config(in, path);
}

WeightSequence read_weights_csv(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  int n_col = -1, w_col = -1;
  bool log_scale = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto head = split(line, ',');
    for (std::size_t i = 0; i < head.size(); ++i) {
      if (head[i] == "n") n_col = static_cast<int>(i);
      if (head[i] == "w") w_col = static_cast<int>(i);
      if (head[i] == "log_w") {
        w_col = static_cast<int>(i);
        log_scale = true;
      }
    }
    break;
  }
  if (n_col < 0 || w_col < 0) throw ArgumentError(path + ": header must name 'n' and 'w' or 'log_w'");

  std::vector<double> log_w;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (static_cast<int>(f.size()) <= std::max(n_col, w_col)) throw ArgumentError(where + ": missing column");
    double n, w;
    if (!parse_number(f[static_cast<std::size_t>(n_col)], n) || !parse_number(f[static_cast<std::size_t>(w_col)], w))
      throw ArgumentError(where + ": not a number");
    if (n != static_cast<double>(log_w.size() + 1)) throw ArgumentError(where + ": n must run 1, 2, 3, ...");
    if (!log_scale && !(w > 0)) throw ArgumentError(where + ": weights must be positive");
    if (!std::isfinite(w) && !(log_scale && w == -INFINITY)) throw ArgumentError(where + ": weight not finite");
    log_w.push_back(log_scale ? w : std::log(w));
  }
  if (log_w.empty()) throw ArgumentError(path + ": no weights");
  return WeightSequence(std::move(log_w), WeightProvenance::custom);
}

std::pair<std::vector<double>, std::vector<double>> read_radial_table(const std::string& path) {
  auto in = open_input(path);
  std::vector<double> r, v;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    double a, b;
    const bool numeric = f.size() >= 2 && parse_number(f[0], a) && parse_number(f[1], b);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ArgumentError(path + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    first = false;
    r.push_back(a);
    v.push_back(b);
  }
  if (r.size() < 2) throw ArgumentError(path + ": need at least two rows");
  return {std::move(r), std::move(v)};
}

PairPotential read_potential_file(const std::string& path, int d) {
  const auto kv = read_config_file(path);
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : dir / fp).string();
  };

  if (const auto it = kv.find("d"); it != kv.end()) {
    double fd;
    if (!parse_number(it->second, fd) || fd != d)
      throw ArgumentError(path + ": d = " + it->second + " does not match the run's d = " + std::to_string(d));
  }
  const auto kind_it = kv.find("kind");
  if (kind_it == kv.end()) throw ArgumentError(path + ": missing key 'kind'");
  const std::string& kind = kind_it->second;

  PairPotential pot;
  if (kind == "gaussian") {
    pot = gaussian_potential(require_number(kv, "g", path), require_number(kv, "sigma", path), d);
  } else if (kind == "tabulated") {
    const auto it = kv.find("table");
    if (it == kv.end()) throw ArgumentError(path + ": tabulated potential needs 'table'");
    auto [r, u] = read_radial_table(resolve(it->second));
    pot = tabulated_potential(std::move(r), std::move(u), d);
  } else if (kind == "autocorrelation") {
    if (const auto it = kv.find("v_table"); it != kv.end()) {
      auto [r, v] = read_radial_table(resolve(it->second));
      const double support = r.back();
      auto profile = [r = std::move(r), v = std::move(v)](double x) {
        if (x < r.front() || x > r.back()) return 0.0;
        const auto hi = std::upper_bound(r.begin(), r.end(), x);
        if (hi == r.end()) return v.back();
        const auto i = static_cast<std::size_t>(hi - r.begin());
        const double t = (x - r[i - 1]) / (r[i] - r[i - 1]);
        return v[i - 1] + t * (v[i] - v[i - 1]);
      };
      pot = autocorrelation_potential(profile, support, d);
    } else {
      const auto shape = kv.find("shape");
      if (shape == kv.end() || shape->second != "indicator")
        throw ArgumentError(path + ": autocorrelation potential needs 'v_table' or 'shape = indicator'");
      const double radius = require_number(kv, "radius", path);
      const double height = require_number(kv, "height", path);
      pot = autocorrelation_potential([radius, height](double x) { return x <= radius ? height : 0.0; }, radius, d);
    }
  } else {
    throw ArgumentError(path + ": unknown kind '" + kind + "'");
  }
  if (kv.count("superstability")) pot.superstability = require_number(kv, "superstability", path);
  return pot;
}

PairPotential load_potential(const std::string& spec, int d) {
  if (spec.rfind("gaussian:", 0) == 0) return parse_potential_shorthand(spec, d);
  return read_potential_file(spec, d);
}

}  // namespace bosecycles
