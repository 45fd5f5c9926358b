#include "bosecycles/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "bosecycles/coupling.hpp"
#include "bosecycles/cycle_engine.hpp"
#include "bosecycles/errors.hpp"
#include "bosecycles/io.hpp"
#include "bosecycles/potentials.hpp"
#include "bosecycles/special_functions.hpp"
#include "bosecycles/thermo.hpp"
#include "bosecycles/wavefunctions.hpp"

namespace bosecycles {

namespace {

class Args {
 public:
  Args(std::string command, const std::map<std::string, std::string>& raw) : command_(std::move(command)), raw_(raw) {}

  const std::string& command() const { return command_; }
  bool has(const std::string& key) const {
    const auto it = raw_.find(key);
    return it != raw_.end() && !it->second.empty();
  }
  const std::string& str(const std::string& key) const {
    if (!has(key)) throw ArgumentError(command_ + ": --" + key + " is required");
    return raw_.at(key);
  }
  std::string str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw_.at(key) : fallback;
  }
  double num(const std::string& key) const { return to_double(key, str(key)); }
  double num_or(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }
  long long integer(const std::string& key) const { return to_integer(key, str(key)); }
  long long integer_or(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  std::uint64_t seed() const {
    if (!has("seed")) return 1;
    std::uint64_t v = 0;
    const std::string& s = raw_.at("seed");
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw ArgumentError("--seed: expected an unsigned 64-bit integer, got '" + s + "'");
    return v;
  }
  bool flag(const std::string& key) const {
    if (!has(key)) return false;
    const std::string& v = raw_.at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ArgumentError("--" + key + ": expected true or false, got '" + v + "'");
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::string item;
    std::istringstream is(str(key));
    while (std::getline(is, item, ',')) out.push_back(to_double(key, item));
    return out;
  }

 private:
  static std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  static double to_double(const std::string& key, const std::string& s0) {
    const std::string s = trimmed(s0);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
      throw ArgumentError("--" + key + ": expected a number, got '" + s0 + "'");
    return v;
  }
  static long long to_integer(const std::string& key, const std::string& s0) {
    const std::string s = trimmed(s0);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw ArgumentError("--" + key + ": expected an integer, got '" + s0 + "'");
    return v;
  }

  std::string command_;
  const std::map<std::string, std::string>& raw_;
};

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;
  std::vector<std::string> flags;
  std::function<int(const Args&, std::ostream&, std::ostream&)> run;

  void option(const std::string& key, const std::string& help) {
    options[key] = app->add_option("--" + key, raw[key], help);
  }
  void flag(const std::string& key, const std::string& help) {
    options[key] = app->add_flag("--" + key, help);
    flags.push_back(key);
  }
};

// ---------------------------------------------------------------- helpers

int positive_int(const Args& a, const std::string& key, long long fallback = -1) {
  const long long v = fallback > 0 ? a.integer_or(key, fallback) : a.integer(key);
  if (v < 1 || v > 100000000) throw ArgumentError("--" + key + " must be a positive integer");
  return static_cast<int>(v);
}

double positive(const Args& a, const std::string& key) {
  const double v = a.num(key);
  if (!(v > 0)) throw ArgumentError("--" + key + " must be positive");
  return v;
}

int dimension(const Args& a) {
  const long long d = a.integer_or("d", 3);
  if (d < 1 || d > 64) throw ArgumentError("--d must lie in 1..64");
  return static_cast<int>(d);
}

double resolve_beta(const Args& a, Table& t) {
  if (a.has("beta") && a.has("lambda")) throw ArgumentError("give at most one of --beta and --lambda");
  double beta = 1.0;
  std::string source = "default";
  if (a.has("beta")) {
    beta = positive(a, "beta");
    source = "beta";
  } else if (a.has("lambda")) {
    const double lambda = positive(a, "lambda");
    beta = lambda * lambda / (2 * std::numbers::pi);
    source = "lambda";
  }
  t.set_config("beta", beta);
  t.set_config("beta_source", source);
  t.set_config("lambda", thermal_wavelength(beta));
  return beta;
}

// Density from --rho or --rho-lambda3 (rho lambda^d).
double resolve_density(const Args& a, int d, double beta, Table& t) {
  if (a.has("rho") == a.has("rho-lambda3"))
    throw ArgumentError(a.command() + ": give exactly one of --rho and --rho-lambda3");
  const double rho = a.has("rho") ? positive(a, "rho") : positive(a, "rho-lambda3") / std::pow(thermal_wavelength(beta), d);
  t.set_config("rho", rho);
  t.set_config("rho_lambda_d", rho * std::pow(thermal_wavelength(beta), d));
  return rho;
}

SystemParams resolve_system(const Args& a, Table& t) {
  const int d = dimension(a);
  const int N = positive_int(a, "N");
  const double beta = resolve_beta(a, t);
  const int given = int(a.has("L")) + int(a.has("rho")) + int(a.has("rho-lambda3"));
  if (given != 1) throw ArgumentError(a.command() + ": give exactly one of --L, --rho and --rho-lambda3");
  SystemParams sp = a.has("L") ? SystemParams::from_box(d, positive(a, "L"), N, beta)
                               : SystemParams::from_density(d, resolve_density(a, d, beta, t), N, beta);
  t.set_config("d", std::int64_t{d});
  t.set_config("N", std::int64_t{N});
  t.set_config("L", sp.L());
  t.set_config("rho", sp.rho());
  t.set_config("rho_lambda_d", sp.degeneracy());
  return sp;
}

std::optional<DcpModel> resolve_dcp(const Args& a, double beta, Table& t) {
  if (a.has("dcp") && a.has("dcp-table")) throw ArgumentError("give at most one of --dcp and --dcp-table");
  if (a.has("dcp")) {
    const auto v = a.list("dcp");
    if (v.size() != 3) throw ArgumentError("--dcp expects c,eps,gamma");
    t.set_config("dcp", a.str("dcp"));
    return DcpModel::family(v[0], v[1], v[2], beta);
  }
  if (a.has("dcp-table")) {
    std::optional<double> rate;
    if (a.has("dcp-rate")) rate = a.num("dcp-rate");
    const bool extrapolate = a.flag("dcp-extrapolate");
    t.set_config("dcp_table", a.str("dcp-table"));
    t.set_config("dcp_extrapolate", extrapolate);
    auto model = DcpModel::tabulated(read_weights_csv(a.str("dcp-table")), rate, extrapolate);
    t.set_config("dcp_rate", model.rate());
    return model;
  }
  return std::nullopt;
}

WeightSequence resolve_weights(const Args& a, const SystemParams& sp, Table& t) {
  if (a.has("weights")) {
    if (a.has("dcp") || a.has("dcp-table")) throw ArgumentError("--weights excludes --dcp and --dcp-table");
    WeightSequence w = read_weights_csv(a.str("weights"));
    if (w.size() < sp.N())
      throw ArgumentError("--weights covers n <= " + std::to_string(w.size()) + " but N = " + std::to_string(sp.N()));
    t.set_config("weights", "custom:" + a.str("weights"));
    return w;
  }
  if (auto model = resolve_dcp(a, sp.beta(), t)) {
    t.set_config("weights", std::string("dcp_surrogate"));
    return model->surrogate_weights(sp);
  }
  t.set_config("weights", std::string("ideal"));
  return WeightSequence::ideal(sp);
}

std::filesystem::path destination(const Args& a, Format f) {
  if (a.has("out")) return a.str("out");
  if (const char* dir = std::getenv("BOSECYCLES_OUT_DIR"); dir != nullptr && *dir != '\0')
    return std::filesystem::path(dir) / (a.command() + "." + to_string(f));
  return {};
}

int emit(const Args& a, Table& t, std::ostream& out) {
  const Format f = parse_format(a.str_or("format", "csv"));
  t.set_config("format", std::string(to_string(f)));
  const std::filesystem::path path = destination(a, f);
  if (path.empty()) {
    write_table(out, t, f);
    return kExitOk;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ArgumentError("cannot write '" + path.string() + "'");
  write_table(file, t, f);
  file.close();
  if (!file) throw ArgumentError("failed writing '" + path.string() + "'");
  out << "wrote " << path.string() << '\n';
  for (const auto& [k, v] : t.summary) out << k << " = " << format_cell(v) << '\n';
  return kExitOk;
}

Table start_table(const Args& a) {
  Table t;
  t.set_config("command", a.command());
  return t;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

// --------------------------------------------------------------- commands

int cmd_spectrum(const Args& a, std::ostream& out, std::ostream&) {
  Table t = start_table(a);
  const SystemParams sp = resolve_system(a, t);
  const double eps = a.num_or("eps", 0.01);
  std::optional<double> band_eps;
  if (a.has("band-eps")) band_eps = a.num("band-eps");
  t.set_config("eps", eps);
  t.set_config("band_eps", band_eps.value_or(eps));
  const WeightSequence w = resolve_weights(a, sp, t);

  const LogPartitionTable table = build_partition_table(sp, w);
  const CycleSpectrum s = cycle_density_spectrum(table);
  const MacroscopicAggregate agg = aggregate_macroscopic(s, eps, band_eps);

  double total = 0.0;
  for (double r : s.rho_n) total += r;
  t.set_summary("log_Q_N", table.logQ.back());
  t.set_summary("normalization", total / s.rho);
  t.set_summary("macro_fraction", agg.macro_density / s.rho);
  t.set_summary("band_fraction", agg.band_density / s.rho);
  t.set_summary("macro_start", std::int64_t{agg.macro_start});
  t.set_summary("band_lower", std::int64_t{agg.band_lower});
  t.set_summary("band_upper", std::int64_t{agg.band_upper});

  t.columns = {"n", "rho_n", "fraction"};
  for (int n = 1; n <= s.N; ++n)
    t.add_row({std::int64_t{n}, s.rho_n[static_cast<std::size_t>(n - 1)], s.fraction[static_cast<std::size_t>(n - 1)]});
  return emit(a, t, out);
}

int cmd_scan(const Args& a, std::ostream& out, std::ostream&) {
  Table t = start_table(a);
  if (a.has("L")) throw ArgumentError("scan: L follows from N and the density; give --rho or --rho-lambda3");
  const int d = dimension(a);
  t.set_config("d", std::int64_t{d});
  const double beta = resolve_beta(a, t);
  const double rho = resolve_density(a, d, beta, t);
  if (!a.has("N-list") || a.str("N-list").empty()) throw ArgumentError("scan: --N-list must name at least one N");
  std::vector<int> Ns;
  for (double v : a.list("N-list")) {
    if (v < 1 || v != std::floor(v)) throw ArgumentError("--N-list entries must be positive integers");
    Ns.push_back(static_cast<int>(v));
  }
  if (Ns.empty()) throw ArgumentError("scan: --N-list must name at least one N");
  t.set_config("N_list", a.str("N-list"));

  ScanOptions opt;
  opt.eps = a.num_or("eps", 0.01);
  if (a.has("band-eps")) opt.band_eps = a.num("band-eps");
  opt.parallel = !a.flag("serial");
  t.set_config("eps", opt.eps);
  t.set_config("band_eps", opt.band_eps.value_or(opt.eps));
  const auto model = resolve_dcp(a, beta, t);
  t.set_config("weights", std::string(model ? "dcp_surrogate" : "ideal"));
  if (model) opt.model = &*model;

  const auto rows = finite_size_scan(rho, beta, d, Ns, opt);
  if (d >= 3) {
    const double mu = model ? dcp_mu(rho, beta, *model, d) : ideal_mu(rho, beta, d);
    t.set_summary("beta_mu", beta * mu);
    t.set_summary("condensate_fraction", condensate_fraction(rho, beta, d, model ? &*model : nullptr));
  }
  t.columns = {"N", "L", "macro_fraction", "band_fraction", "condensate_estimate"};
  for (const ScanRow& r : rows)
    t.add_row({std::int64_t{r.N}, r.L, r.macro_fraction, r.band_fraction, r.condensate_estimate});
  return emit(a, t, out);
}

int cmd_mu(const Args& a, std::ostream& out, std::ostream&) {
  Table t = start_table(a);
  const int d = dimension(a);
  t.set_config("d", std::int64_t{d});
  const double beta = resolve_beta(a, t);
  const double rho = resolve_density(a, d, beta, t);
  const auto model = resolve_dcp(a, beta, t);
  t.set_config("weights", std::string(model ? "dcp_surrogate" : "ideal"));

  if (!model) {
    const ThermoPoint p = ideal_thermo_point(rho, beta, d);
    t.columns = {"rho", "beta", "d", "mu", "beta_mu", "rho_lambda_d", "f0", "condensate_fraction", "critical_density"};
    t.add_row({p.rho, p.beta, std::int64_t{p.d}, p.mu, p.beta_mu, p.rho_lambda_d, p.f0, p.condensate_fraction,
               p.critical_density});
  } else {
    const double mu = dcp_mu(rho, beta, *model, d);
    const double lambda_d = std::pow(thermal_wavelength(beta), d);
    t.columns = {"rho", "beta", "d", "mu", "beta_mu", "rho_lambda_d", "condensate_fraction", "critical_density"};
    t.add_row({rho, beta, std::int64_t{d}, mu, beta * mu, rho * lambda_d, condensate_fraction(rho, beta, d, &*model),
               dcp_critical_density(beta, *model, d)});
  }
  return emit(a, t, out);
}

int cmd_bounds(const Args& a, std::ostream& out, std::ostream& err) {
  Table t = start_table(a);
  const int d = dimension(a);
  t.set_config("d", std::int64_t{d});
  const double beta = resolve_beta(a, t);
  const double rho = resolve_density(a, d, beta, t);
  const PairPotential pot = load_potential(a.str("potential"), d);
  t.set_config("potential", a.str("potential"));
  t.set_config("potential_description", pot.description);

  const FreeEnergyBounds fb = free_energy_bounds(rho, beta, pot);
  t.set_summary("f0", fb.f0);
  t.set_summary("superstability", fb.superstability);
  t.set_summary("uhat0", pot.uhat0);
  t.set_summary("norm1", pot.norm1);

  t.columns = {"quantity", "lower", "upper"};
  bool ordered = fb.f.lower <= fb.f.upper;
  t.add_row({std::string("f"), fb.f.lower, fb.f.upper});
  if (fb.f_tilde) {
    ordered = ordered && fb.f_tilde->lower <= fb.f_tilde->upper;
    t.add_row({std::string("f_tilde"), fb.f_tilde->lower, fb.f_tilde->upper});
    t.add_row({std::string("f_tilde_over_rho2"), fb.f_tilde->lower / (rho * rho), fb.f_tilde->upper / (rho * rho)});
  }
  if (a.has("N")) {
    const int N = positive_int(a, "N");
    const double L = std::pow(N / rho, 1.0 / d);
    const int surrogates = static_cast<int>(a.integer_or("surrogates", 3));
    t.set_config("N", std::int64_t{N});
    t.set_config("L", L);
    t.set_config("surrogates", std::int64_t{surrogates});
    t.set_config("seed", std::to_string(a.seed()));
    const DcpSandwich s = dcp_partition_sandwich(N, L, beta, pot, surrogates, a.seed());
    ordered = ordered && s.bounds.lower <= s.bounds.upper && s.inside;
    t.add_row({std::string("log_Qdcp_over_Q0"), s.bounds.lower, s.bounds.upper});
    t.add_row({std::string("recursion"), s.recursion_lower, s.recursion_upper});
    for (std::size_t i = 0; i < s.surrogates.size(); ++i)
      t.add_row({"surrogate_" + std::to_string(i), s.surrogates[i], s.surrogates[i]});
    t.set_summary("surrogates_inside", s.inside);
  }
  t.set_summary("lower_le_upper", ordered);
  const int rc = emit(a, t, out);
  if (!ordered) {
    err << "bounds: lower bound exceeds upper bound\n";
    return kExitNumeric;
  }
  return rc;
}

int cmd_sample(const Args& a, std::ostream& out, std::ostream&) {
  Table t = start_table(a);
  const SystemParams sp = resolve_system(a, t);
  const WeightSequence w = resolve_weights(a, sp, t);
  const int samples = positive_int(a, "samples", 1);
  const std::string what = a.str_or("what", "type");
  if (what != "type" && what != "first") throw ArgumentError("--what must be type or first");
  t.set_config("seed", std::to_string(a.seed()));
  t.set_config("samples", std::int64_t{samples});
  t.set_config("what", what);

  const LogPartitionTable table = build_partition_table(sp, w);
  CycleSampler sampler(table, a.seed());
  if (what == "type") {
    t.columns = {"draw", "cycles", "cycle_type"};
    for (int i = 0; i < samples; ++i) {
      const CycleType c = sampler.cycle_type();
      t.add_row({std::int64_t{i}, static_cast<std::int64_t>(c.size()), join_ints(c)});
    }
  } else {
    t.columns = {"draw", "length"};
    double mean = 0.0;
    for (int i = 0; i < samples; ++i) {
      const int n = sampler.first_cycle_length();
      mean += n;
      t.add_row({std::int64_t{i}, std::int64_t{n}});
    }
    t.set_summary("mean_length", mean / samples);
  }
  return emit(a, t, out);
}

int cmd_merger(const Args& a, std::ostream& out, std::ostream& err) {
  Table t = start_table(a);
  const int vertices = static_cast<int>(a.integer_or("vertices", 3));
  const int max_mult = static_cast<int>(a.integer_or("max-mult", 3));
  const bool all = a.flag("all");
  t.set_config("vertices", std::int64_t{vertices});
  t.set_config("max_mult", std::int64_t{max_mult});
  t.set_config("all", all);

  const MergerCensus c = enumerate_merger_graphs(vertices, max_mult, all);
  t.set_summary("total", c.total);
  t.set_summary("delta_one", c.delta_one);
  t.set_summary("delta_mismatches", c.delta_mismatches);
  t.set_summary("k_mismatches", c.k_mismatches);
  if (all) {
    t.columns = {"multiplicities", "delta", "K"};
    for (const CensusRow& r : c.rows)
      t.add_row({join_ints(r.multiplicities), std::int64_t{r.delta},
                 r.delta == 1 ? Cell{std::int64_t{r.k}} : Cell{std::string()}});
  } else {
    t.columns = {"K", "count"};
    for (const auto& [k, n] : c.k_histogram) t.add_row({std::int64_t{k}, n});
  }
  const int rc = emit(a, t, out);
  if (c.delta_mismatches != 0 || c.k_mismatches != 0) {
    err << "merger: census found mismatches\n";
    return kExitNumeric;
  }
  return rc;
}

int cmd_gain(const Args& a, std::ostream& out, std::ostream& err) {
  Table t = start_table(a);
  CouplingParams p;
  p.d = dimension(a);
  t.set_config("d", std::int64_t{p.d});
  const double beta = resolve_beta(a, t);
  p.lambda = thermal_wavelength(beta);
  p.rho = resolve_density(a, p.d, beta, t);
  p.c = a.num_or("c", 0.5);
  p.eps = a.num_or("coupling-eps", 0.25);
  p.c1 = a.num_or("c1", 1.0);
  p.rho_v = a.num_or("rho-v", 1.0);
  p.a = p.c;
  p.validate();
  const int points = positive_int(a, "points", 101);
  t.set_config("c", p.c);
  t.set_config("coupling_eps", p.eps);
  t.set_config("c1", p.c1);
  t.set_config("rho_v", p.rho_v);
  t.set_config("points", std::int64_t{points});

  const CouplingOptimum opt = optimize_coupling(p);
  t.set_summary("a_star", opt.a_star);
  t.set_summary("gap", opt.gap);
  t.set_summary("C", opt.C);
  t.set_summary("clamped", opt.clamped);
  t.set_summary("numeric_truncated_argmax", opt.numeric_truncated_argmax);
  t.set_summary("numeric_full_argmax", opt.numeric_full_argmax);
  t.set_summary("truncated_at_a_star", opt.truncated_at_a_star);
  t.set_summary("full_max", opt.full_max);
  t.set_summary("full_exceeds_truncated", opt.full_exceeds_truncated);
  if (opt.clamped) err << "gain: warning: " << opt.warning << '\n';

  if (a.has("a")) {
    CouplingParams q = p;
    q.a = a.num("a");
    q.validate();
    t.set_config("a", q.a);
    t.set_summary("gain_at_a", coupling_gain_rate(q));
    t.set_summary("penalty_at_a", fluctuation_penalty(q));
    if (a.has("N")) {
      const int N = positive_int(a, "N");
      t.set_config("N", std::int64_t{N});
      const double exact = exact_gain_log(N, q.c, q.a, q.eps, q.rho_v) / N;
      t.set_summary("exact_rate_at_a", exact);
      t.set_summary("exact_minus_stirling", exact - coupling_gain_rate(q));
    }
  }

  t.columns = {"a", "gain", "penalty", "total"};
  for (const auto& r : coupling_sweep(p, points)) t.add_row({r.a, r.gain, r.penalty, r.total});
  return emit(a, t, out);
}

int cmd_oracle(const Args& a, std::ostream& out, std::ostream& err) {
  Table t = start_table(a);
  const int max_n = static_cast<int>(a.integer_or("max-n", 8));
  if (max_n < 1 || max_n > kBruteForceMaxN)
    throw ArgumentError("--max-n must lie in 1.." + std::to_string(kBruteForceMaxN));
  const int trials = positive_int(a, "trials", 5);
  const double tol = a.num_or("tol", 1e-10);
  t.set_config("max_n", std::int64_t{max_n});
  t.set_config("trials", std::int64_t{trials});
  t.set_config("tol", tol);
  t.set_config("seed", std::to_string(a.seed()));

  std::mt19937_64 rng(a.seed());
  const SystemParams box = SystemParams::from_degeneracy(3, 1.0, max_n, 1.0);
  std::vector<std::pair<std::string, WeightSequence>> cases;
  for (int k = 0; k < trials; ++k) {
    std::vector<double> log_w(static_cast<std::size_t>(max_n));
    for (double& v : log_w) v = 4.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 2.0;
    cases.emplace_back("random_" + std::to_string(k), WeightSequence(log_w, WeightProvenance::custom));
  }
  cases.emplace_back("ideal", WeightSequence::ideal(box));

  t.columns = {"weights", "N", "recursion", "brute_force", "rel_error"};
  double worst = 0.0;
  for (const auto& [label, w] : cases) {
    const LogPartitionTable table = build_partition_table(box, w);
    for (int N = 1; N <= max_n; ++N) {
      const double rec = std::exp(table.logQ[static_cast<std::size_t>(N)]);
      const double bf = brute_force_partition_fn(w, N);
      const double rel = std::abs(rec - bf) / std::abs(bf);
      worst = std::max(worst, rel);
      t.add_row({label, std::int64_t{N}, rec, bf, rel});
    }
  }
  const bool pass = worst <= tol;
  t.set_summary("max_rel_error", worst);
  t.set_summary("pass", pass);
  const int rc = emit(a, t, out);
  if (!pass) {
    err << "oracle: deviation " << format_double(worst) << " exceeds " << format_double(tol) << '\n';
    return kExitNumeric;
  }
  return rc;
}

int cmd_wavefn(const Args& a, std::ostream& out, std::ostream&) {
  Table t = start_table(a);
  const int d = static_cast<int>(a.integer_or("d", 1));
  if (d < 1 || d > 3) throw ArgumentError("wavefn: --d must lie in 1..3");
  const double beta = resolve_beta(a, t);
  CycleWaveParams p;
  p.n = positive_int(a, "n");
  p.L = positive(a, "L");
  p.lambda = thermal_wavelength(beta);
  p.y = a.has("y") ? a.list("y") : std::vector<double>(static_cast<std::size_t>(d), 0.0);
  p.xbar = a.has("xbar") ? a.list("xbar") : std::vector<double>(static_cast<std::size_t>(d), 0.0);
  if (static_cast<int>(p.y.size()) != d || static_cast<int>(p.xbar.size()) != d)
    throw ArgumentError("wavefn: --y and --xbar need d comma-separated values");
  p.validate();
  const int axis = static_cast<int>(a.integer_or("axis", 0));
  const int points = positive_int(a, "points", 200);
  t.set_config("d", std::int64_t{d});
  t.set_config("n", std::int64_t{p.n});
  t.set_config("L", p.L);
  t.set_config("y", a.str_or("y", "0"));
  t.set_config("xbar", a.str_or("xbar", "0"));
  t.set_config("axis", std::int64_t{axis});
  t.set_config("points", std::int64_t{points});

  const auto rows = wave_profile(p, axis, points);
  double norm = 1.0;
  for (int i = 0; i < d; ++i) norm *= normalization_1d(p.n, p.L, p.lambda, p.xbar[static_cast<std::size_t>(i)]);
  t.set_summary("n_lambda2_over_L2", p.n * p.lambda * p.lambda / (p.L * p.L));
  t.set_summary("normalization", norm);
  try {
    double dev = 0.0;
    std::vector<double> x = p.y;
    for (const auto& r : rows) {
      x[static_cast<std::size_t>(axis)] = r.x;
      dev = std::max(dev, std::abs(psi_shifted(p, x) - std::complex<double>(r.re, r.im)));
    }
    t.set_summary("max_form_deviation", dev);
  } catch (const NumericError& e) {
    t.set_summary("max_form_deviation", std::string("unavailable: ") + e.what());
  }

  t.columns = {"x", "re", "im", "abs2"};
  for (const auto& r : rows) t.add_row({r.x, r.re, r.im, r.abs2});
  return emit(a, t, out);
}

// ------------------------------------------------------------- assembly

void add_common(Command& c) {
  c.option("config", "key = value file; command-line flags win");
  c.option("format", "csv (default) or json");
  c.option("out", "output file (default: $BOSECYCLES_OUT_DIR/<command>.<format>, else stdout)");
}

void add_thermal(Command& c) {
  c.option("beta", "inverse temperature (default 1)");
  c.option("lambda", "thermal wavelength sqrt(2 pi beta), instead of --beta");
}

void add_density(Command& c) {
  c.option("rho", "number density");
  c.option("rho-lambda3", "degeneracy rho*lambda^d, instead of --rho");
}

void add_weights(Command& c, bool custom) {
  if (custom) c.option("weights", "CSV of cycle weights (n, w or n, log_w)");
  c.option("dcp", "decoupled-cycle family c,eps,gamma: phi_n = exp(c e^{-eps beta} n) n^{-gamma}");
  c.option("dcp-table", "CSV of phi_n (n, w or n, log_w)");
  c.option("dcp-rate", "growth rate b of the phi table (default: fitted)");
  c.flag("dcp-extrapolate", "continue the phi table past its end");
}

void apply_config(Command& c) {
  const auto it = c.raw.find("config");
  if (it == c.raw.end() || it->second.empty()) return;
  for (const auto& [key0, value] : read_config_file(it->second)) {
    std::string key = key0;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") throw ArgumentError("config files cannot nest");
    const auto opt = c.options.find(key);
    if (opt == c.options.end()) throw ArgumentError(c.name + ": unknown config key '" + key0 + "'");
    if (opt->second->count() > 0) continue;
    c.raw[key] = value;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle statistics of the Bose gas on the torus"};
  app.name("bosecycles");
  app.require_subcommand(1);

  std::deque<Command> commands;
  auto make = [&](const std::string& name, const std::string& help, auto run) -> Command& {
    Command& c = commands.emplace_back();
    c.name = name;
    c.app = app.add_subcommand(name, help);
    c.run = run;
    add_common(c);
    return c;
  };

  {
    Command& c = make("spectrum", "cycle density spectrum rho_n", cmd_spectrum);
    c.option("d", "dimension (default 3)");
    c.option("N", "particle number");
    c.option("L", "box side, instead of a density");
    add_density(c);
    add_thermal(c);
    c.option("eps", "macroscopic threshold n >= eps N (default 0.01)");
    c.option("band-eps", "band lower edge band_eps N^{2/d} (default eps)");
    add_weights(c, true);
  }
  {
    Command& c = make("scan", "finite-size scan over N", cmd_scan);
    c.option("d", "dimension (default 3)");
    c.option("N-list", "comma-separated particle numbers");
    c.option("L", "not accepted; L follows from N and the density");
    add_density(c);
    add_thermal(c);
    c.option("eps", "macroscopic threshold (default 0.01)");
    c.option("band-eps", "band lower edge coefficient (default eps)");
    c.flag("serial", "run the N values one after another");
    add_weights(c, false);
  }
  {
    Command& c = make("mu", "chemical potential and free energy density", cmd_mu);
    c.option("d", "dimension (default 3)");
    add_density(c);
    add_thermal(c);
    add_weights(c, false);
  }
  {
    Command& c = make("bounds", "free-energy and decoupled partition bounds for a pair potential", cmd_bounds);
    c.option("d", "dimension (default 3)");
    c.option("potential", "gaussian:g,sigma or a potential file");
    add_density(c);
    add_thermal(c);
    c.option("N", "particle number for the decoupled sandwich (optional)");
    c.option("surrogates", "random weight sets inside the sandwich (default 3)");
    c.option("seed", "64-bit seed (default 1)");
  }
  {
    Command& c = make("sample", "exact draws of cycle types", cmd_sample);
    c.option("d", "dimension (default 3)");
    c.option("N", "particle number");
    c.option("L", "box side, instead of a density");
    add_density(c);
    add_thermal(c);
    c.option("seed", "64-bit seed (default 1)");
    c.option("samples", "number of draws (default 1)");
    c.option("what", "type (full cycle type) or first (cycle length of a tagged particle)");
    add_weights(c, true);
  }
  {
    Command& c = make("merger", "census of merger multigraphs", cmd_merger);
    c.option("vertices", "vertex count, at most 5 (default 3)");
    c.option("max-mult", "largest edge multiplicity, at most 3 (default 3)");
    c.flag("all", "one row per graph instead of the K histogram");
  }
  {
    Command& c = make("gain", "cycle-coupling gain, penalty and optimum", cmd_gain);
    c.option("d", "dimension (default 3)");
    add_density(c);
    add_thermal(c);
    c.option("c", "cycles per particle (default 0.5)");
    c.option("a", "uncoupled cycles per particle to evaluate");
    c.option("coupling-eps", "combinatorial damping (default 0.25)");
    c.option("c1", "penalty constant (default 1)");
    c.option("rho-v", "dimensionless rho*v (default 1)");
    c.option("points", "sweep points over a in [0, c] (default 101)");
    c.option("N", "particle number for the exact factorial rate at --a");
  }
  {
    Command& c = make("oracle", "recursion against brute-force partition enumeration", cmd_oracle);
    c.option("max-n", "largest N, at most 10 (default 8)");
    c.option("trials", "random weight sequences (default 5)");
    c.option("tol", "relative tolerance (default 1e-10)");
    c.option("seed", "64-bit seed (default 1)");
  }
  {
    Command& c = make("wavefn", "cycle wave function profile", cmd_wavefn);
    c.option("d", "dimension, 1..3 (default 1)");
    c.option("n", "cycle length");
    c.option("L", "box side");
    add_thermal(c);
    c.option("y", "centre, d comma-separated values (default 0)");
    c.option("xbar", "momentum shift, d comma-separated values (default 0)");
    c.option("axis", "profile axis (default 0)");
    c.option("points", "profile points over [0, L) (default 200)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (Command& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      for (const std::string& f : c.flags)
        if (c.options[f]->count() > 0) c.raw[f] = "true";
      apply_config(c);
      return c.run(Args(c.name, c.raw), out, err);
    } catch (const NumericError& e) {
      err << c.name << ": numeric failure: " << e.what() << '\n';
      return kExitNumeric;
    } catch (const ArgumentError& e) {
      err << c.name << ": " << e.what() << '\n';
      return kExitUsage;
    } catch (const DomainError& e) {
      err << c.name << ": " << e.what() << '\n';
      return kExitUsage;
    } catch (const UnsupportedError& e) {
      err << c.name << ": unsupported: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      err << c.name << ": error: " << e.what() << '\n';
      return kExitNumeric;
    }
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("bosecycles");
  for (const auto& s : args) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bosecycles
