#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bosecycles/cli.hpp"

using namespace bosecycles;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "bosecycles_test_cli";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string config_value(const std::string& csv, const std::string& key) {
  const std::string tag = "# " + key + " = ";
  const auto pos = csv.find(tag);
  if (pos == std::string::npos) return {};
  const auto end = csv.find('\n', pos);
  return csv.substr(pos + tag.size(), end - pos - tag.size());
}

std::size_t data_lines(const std::string& csv) {
  std::size_t n = 0;
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n > 0 ? n - 1 : 0;
}

}  // namespace

TEST_CASE("documented invocations") {
  const Run mu = run({"mu", "--d", "3", "--rho-lambda3", "2.6123753"});
  REQUIRE(mu.code == kExitOk);
  const auto j = run({"mu", "--d", "3", "--rho-lambda3", "2.6123753", "--format", "json"});
  const auto row = nlohmann::json::parse(j.out)["rows"][0];
  CHECK(std::abs(row["beta_mu"].get<double>()) < 1e-6);

  const Run oracle = run({"oracle", "--max-n", "8"});
  CHECK(oracle.code == kExitOk);
  CHECK(config_value(oracle.out, "summary.pass") == "true");

  const Run one = run({"spectrum", "--N", "1", "--rho", "1"});
  CHECK(one.code == kExitOk);
  CHECK(one.out.find("\n1,1,1\n") != std::string::npos);

  const Run b = run({"bounds", "--potential", "gaussian:1,1", "--rho", "1", "--beta", "1"});
  CHECK(b.code == kExitOk);
  CHECK(config_value(b.out, "summary.lower_le_upper") == "true");
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"nonsense"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"spectrum", "--help"}).code == kExitOk);
  CHECK(run({"spectrum", "--rho", "1"}).code == kExitUsage);
  CHECK(run({"spectrum", "--N", "4", "--rho", "1", "--L", "2"}).code == kExitUsage);
  CHECK(run({"spectrum", "--N", "4", "--rho", "abc"}).code == kExitUsage);
  CHECK(run({"spectrum", "--N", "4", "--rho", "-1"}).code == kExitUsage);
  CHECK(run({"mu", "--rho", "1", "--beta", "1", "--lambda", "2"}).code == kExitUsage);
  CHECK(run({"mu", "--rho", "1", "--d", "2"}).code == kExitUsage);
  CHECK(run({"oracle", "--max-n", "11"}).code == kExitUsage);
  CHECK(run({"merger", "--vertices", "6"}).code != kExitOk);
  CHECK(run({"spectrum", "--N", "4", "--rho", "1", "--format", "xml"}).code == kExitUsage);
  CHECK(run({"bounds", "--potential", (scratch() / "none.pot").string(), "--rho", "1"}).code == kExitUsage);
  // Recursion agrees with enumeration to ~1e-15, never to 1e-300.
  const Run strict = run({"oracle", "--max-n", "6", "--tol", "1e-300"});
  CHECK(strict.code == kExitNumeric);
  CHECK(strict.err.find("exceeds") != std::string::npos);
  CHECK(run({"gain", "--rho", "1", "--c", "1.5"}).code == kExitUsage);
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> sample = {"sample", "--N", "30", "--rho-lambda3", "3", "--samples", "20", "--seed", "77"};
  const Run a = run(sample);
  const Run b = run(sample);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  auto other = sample;
  other.back() = "78";
  CHECK(run(other).out != a.out);

  const std::vector<std::string> scan = {"scan", "--rho-lambda3", "4", "--N-list", "50,100,200"};
  auto serial = scan;
  serial.push_back("--serial");
  const Run p = run(scan);
  const Run s = run(serial);
  REQUIRE(p.code == kExitOk);
  CHECK(p.out.substr(p.out.find("N,L")) == s.out.substr(s.out.find("N,L")));
}

TEST_CASE("config files and precedence") {
  const std::string cfg = write_file("spectrum.cfg", "# run\nN = 6\nrho_lambda3 = 2\nband_eps = 0.5\n");
  const Run from_file = run({"spectrum", "--config", cfg});
  REQUIRE(from_file.code == kExitOk);
  CHECK(config_value(from_file.out, "N") == "6");
  CHECK(config_value(from_file.out, "band_eps") == "0.5");
  CHECK(data_lines(from_file.out) == 6);

  const Run override = run({"spectrum", "--config", cfg, "--N", "4"});
  REQUIRE(override.code == kExitOk);
  CHECK(config_value(override.out, "N") == "4");
  CHECK(data_lines(override.out) == 4);

  const std::string bad = write_file("bad.cfg", "N = 6\nrho = 1\nbogus = 3\n");
  const Run r = run({"spectrum", "--config", bad});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("bogus") != std::string::npos);

  const std::string flag = write_file("flag.cfg", "vertices = 2\nall = true\n");
  const Run m = run({"merger", "--config", flag});
  REQUIRE(m.code == kExitOk);
  CHECK(data_lines(m.out) == 4);
}

TEST_CASE("output routing") {
  const fs::path out = scratch() / "sub" / "mu.json";
  fs::remove(out);
  const Run r = run({"mu", "--rho", "0.1", "--format", "json", "--out", out.string()});
  REQUIRE(r.code == kExitOk);
  REQUIRE(fs::exists(out));
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  CHECK(j["config"]["command"] == "mu");
  CHECK(j["rows"].size() == 1);
  CHECK(r.out.find("wrote") != std::string::npos);

  const fs::path dir = scratch() / "env";
  fs::remove_all(dir);
  ::setenv("BOSECYCLES_OUT_DIR", dir.string().c_str(), 1);
  const Run e = run({"merger", "--vertices", "2"});
  ::unsetenv("BOSECYCLES_OUT_DIR");
  REQUIRE(e.code == kExitOk);
  CHECK(fs::exists(dir / "merger.csv"));
}

TEST_CASE("subcommand smoke") {
  const Run m = run({"merger", "--vertices", "3", "--all"});
  REQUIRE(m.code == kExitOk);
  CHECK(data_lines(m.out) == 64);
  CHECK(config_value(m.out, "summary.delta_one") == "16");

  const Run g = run({"gain", "--rho", "1", "--c", "0.5", "--a", "0.2", "--N", "20", "--points", "11"});
  REQUIRE(g.code == kExitOk);
  CHECK(data_lines(g.out) == 11);
  CHECK(!config_value(g.out, "summary.exact_rate_at_a").empty());

  const Run w = run({"wavefn", "--n", "3", "--L", "4", "--d", "2", "--xbar", "0.1,0.2", "--points", "16"});
  REQUIRE(w.code == kExitOk);
  CHECK(data_lines(w.out) == 16);
  CHECK(std::stod(config_value(w.out, "summary.normalization")) == doctest::Approx(1.0).epsilon(1e-8));

  const std::string weights = write_file("w.csv", "n,w\n1,1\n2,0.5\n3,0.25\n");
  const Run c = run({"spectrum", "--N", "3", "--L", "1", "--weights", weights});
  REQUIRE(c.code == kExitOk);
  CHECK(config_value(c.out, "weights").rfind("custom:", 0) == 0);
  CHECK(run({"spectrum", "--N", "4", "--L", "1", "--weights", weights}).code == kExitUsage);

  const Run dcp = run({"mu", "--rho", "0.1", "--dcp", "0.5,1,2.5"});
  CHECK(dcp.code == kExitOk);
  const Run first = run({"sample", "--N", "20", "--rho", "0.2", "--what", "first", "--samples", "5"});
  CHECK(first.code == kExitOk);
  CHECK(data_lines(first.out) == 5);
}
