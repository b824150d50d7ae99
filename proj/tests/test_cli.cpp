#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "rismux/cli_app.hpp"
#include "rismux/io.hpp"

using namespace rismux;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::vector<std::string> argv_storage;
  argv_storage.push_back("rismux");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) {
    argv.push_back(s.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("rismux_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

const std::vector<std::string> kSmallSweep = {
    "sweep",      "--axis",  "snr",  "--values", "0,10",     "--criteria", "er,none",
    "--receivers", "mmse,mf", "-M",   "4",        "-K",       "4",          "-L",
    "8",          "--alpha", "0.5",  "--trials", "4",        "--seed",     "42",
    "--quiet"};

}  // namespace

TEST_CASE("sweep writes a csv with the documented schema and a manifest") {
  const auto dir = temp_dir("schema");
  auto args = kSmallSweep;
  args.insert(args.end(), {"--out", dir.string()});
  const auto r = cli(args);
  REQUIRE(r.status == 0);

  const std::string csv = slurp(dir / "results.csv");
  REQUIRE_FALSE(csv.empty());
  CHECK(csv.rfind("axis,axis_value,criterion,receiver,mean_rate_bpcu,stderr,trials\n", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);  // LF endings only
  // 2 axis values x 2 criteria x 2 receivers = 8 rows + header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.find("snr_db,0,er,mmse,") != std::string::npos);

  const json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["schema_version"] == 1);
  CHECK(manifest["command"] == "sweep");
  CHECK(manifest["config"]["seed"] == 42);
  CHECK(manifest["config"]["trials"] == 4);
  CHECK(manifest["outputs"]["partial"] == false);
  CHECK(manifest["points"].size() == 4);
}

TEST_CASE("results are reproducible from the manifest alone") {
  const auto dir_a = temp_dir("repro_a");
  auto args = kSmallSweep;
  args.insert(args.end(), {"--out", dir_a.string()});
  REQUIRE(cli(args).status == 0);

  const auto dir_b = temp_dir("repro_b");
  const auto r = cli({"sweep", "--config", (dir_a / "manifest.json").string(), "--quiet",
                      "--out", dir_b.string()});
  REQUIRE(r.status == 0);
  CHECK(slurp(dir_a / "results.csv") == slurp(dir_b / "results.csv"));
}

TEST_CASE("thread count does not change the output bytes") {
  const auto dir_1 = temp_dir("thr1");
  const auto dir_8 = temp_dir("thr8");
  auto args_1 = kSmallSweep;
  args_1.insert(args_1.end(), {"--threads", "1", "--out", dir_1.string()});
  auto args_8 = kSmallSweep;
  args_8.insert(args_8.end(), {"--threads", "8", "--out", dir_8.string()});
  REQUIRE(cli(args_1).status == 0);
  REQUIRE(cli(args_8).status == 0);
  CHECK(slurp(dir_1 / "results.csv") == slurp(dir_8 / "results.csv"));
}

TEST_CASE("key=value config files mirror flags and flags override") {
  const auto dir = temp_dir("kv");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "sweep.conf");
    f << "# fig2-style setup, tiny\n"
      << "axis = snr\n"
      << "values = 0,10\n"
      << "criteria = er,none\n"
      << "receivers = mmse,mf\n"
      << "M = 4\nK = 4\nL = 8\nalpha = 0.5\ntrials = 4\nseed = 42\n";
  }
  const auto dir_out = temp_dir("kv_out");
  const auto r = cli({"sweep", "--config", (dir / "sweep.conf").string(), "--quiet", "--out",
                      dir_out.string()});
  REQUIRE(r.status == 0);

  // Must equal the flag-driven run bit for bit.
  const auto dir_ref = temp_dir("kv_ref");
  auto args = kSmallSweep;
  args.insert(args.end(), {"--out", dir_ref.string()});
  REQUIRE(cli(args).status == 0);
  CHECK(slurp(dir_out / "results.csv") == slurp(dir_ref / "results.csv"));

  // A flag on top of the config changes the seed and therefore the rows.
  const auto dir_over = temp_dir("kv_over");
  const auto r2 = cli({"sweep", "--config", (dir / "sweep.conf").string(), "--seed", "43",
                       "--quiet", "--out", dir_over.string()});
  REQUIRE(r2.status == 0);
  CHECK(slurp(dir_out / "results.csv") != slurp(dir_over / "results.csv"));
  const json manifest = json::parse(slurp(dir_over / "manifest.json"));
  CHECK(manifest["config"]["seed"] == 43);
}

TEST_CASE("optimize emits parseable json that round-trips through --config") {
  const auto r = cli({"optimize", "--criterion", "er", "-M", "4", "-K", "4", "-L", "32",
                      "--alpha", "0.5", "--seed", "7"});
  REQUIRE(r.status == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["command"] == "optimize");
  CHECK(doc["result"]["effective_rank"].get<double>() > 3.0);
  CHECK(doc["result"]["lambda"].size() == 4);
  CHECK(doc["result"]["rates"].contains("mmse"));
  CHECK(doc["result"]["objective_trace"].size() ==
        doc["result"]["iterations"].get<std::size_t>() + 1);

  // Feeding the emitted config back reproduces the identical result block
  // (modulo wall time, which is not part of the deterministic output).
  const auto dir = temp_dir("opt_cfg");
  fs::create_directories(dir);
  write_file(dir / "opt.json", r.out);
  const auto r2 = cli({"optimize", "--config", (dir / "opt.json").string()});
  REQUIRE(r2.status == 0);
  json a = doc["result"];
  json b = json::parse(r2.out)["result"];
  a.erase("wall_time_s");
  b.erase("wall_time_s");
  CHECK(a == b);
}

TEST_CASE("optimize with alpha zero makes no progress") {
  const auto r = cli({"optimize", "--criterion", "er", "-L", "16", "--alpha", "0", "--seed",
                      "3"});
  REQUIRE(r.status == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["result"]["iterations"] == 0);
  CHECK(doc["result"]["objective_trace"].size() == 1);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli({"sweep", "--axis", "bogus", "--values", "1", "--quiet"}).status == 2);
  CHECK(cli({"sweep", "--no-such-flag"}).status == 2);
  CHECK(cli({"optimize", "--criterion", "random"}).status == 2);
  CHECK(cli({}).status == 2);
  CHECK(cli({"sweep", "--values", "5,4", "--quiet"}).status == 2);  // not increasing
}

TEST_CASE("help exits 0") {
  const auto r = cli({"--help"});
  CHECK(r.status == 0);
  CHECK(r.out.find("sweep") != std::string::npos);
}

TEST_CASE("selftest passes and the corrupted-gradient hook fails") {
  const auto good = cli({"selftest", "--instances", "6"});
  CHECK(good.status == 0);
  CHECK(good.out.find("FAIL") == std::string::npos);
  CHECK(good.out.find("PASS gradients.effective-rank-fd") != std::string::npos);

  const auto bad = cli({"selftest", "--instances", "6", "--corrupt-gradient"});
  CHECK(bad.status == 1);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("csv floats carry 17 significant digits") {
  CHECK(format_g17(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_g17(0.0) == "0");
  const double v = 12.345678901234567;
  CHECK(std::stod(format_g17(v)) == v);  // lossless round-trip
}
