#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "vqt/cli.hpp"
#include "vqt/experiments.hpp"
#include "vqt/io.hpp"
#include "vqt/states.hpp"

using namespace vqt;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vqt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vqt_cli_tests_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Parses a sweep CSV and checks the header and that every field is finite.
bool valid_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "count,purity,fidelity,trace_distance,entanglement,n_flagged") return false;
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string f;
    int n = 0;
    while (std::getline(fields, f, ',')) {
      if (!std::isfinite(std::stod(f))) return false;
      ++n;
    }
    if (n != 6) return false;
    ++rows;
  }
  return rows > 0;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  const auto r = cli({"simulate", "--no-such-flag"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(cli({"experiment", "fig7"}).code == kExitUsage);
  CHECK(cli({"bases", "gen", "--dim", "6"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("simulate is deterministic") {
  const auto a = cli({"simulate", "--state", "werner", "--beta", "-0.8", "--noise", "0.5", "--seed", "7"});
  const auto b = cli({"simulate", "--state", "werner", "--beta", "-0.8", "--noise", "0.5", "--seed", "7"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("lambda,frequency,epsilon\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 91);
  const auto c = cli({"simulate", "--state", "werner", "--beta", "-0.8", "--noise", "0.5", "--seed", "8"});
  CHECK(c.out != a.out);
}

TEST_CASE("bases, simulate, reconstruct and witness pipeline") {
  const fs::path dir = scratch("pipeline");
  const std::string basis = (dir / "b.json").string();
  const std::string records = (dir / "r.csv").string();
  const std::string est = (dir / "est.json").string();
  const std::string state = (dir / "rho.json").string();
  io::write_text_file(state, io::density_to_json(werner_state(-0.8)).dump());

  REQUIRE(cli({"bases", "gen", "--dim", "9", "--out", basis}).code == 0);
  REQUIRE(cli({"simulate", "--state-file", state, "--basis", basis, "--count", "90", "--out", records}).code == 0);
  const auto r = cli({"reconstruct", "--records", records, "--basis", basis, "--out", est, "--reference", state,
                      "--witness-dims", "3", "3"});
  REQUIRE(r.code == 0);
  const auto j = io::read_json_file(est);
  CHECK(j.at("status") == "Optimal");
  CHECK(j.at("diagnostics").at("trace_distance").get<double>() <= 1e-6);
  CHECK(j.at("diagnostics").at("witnessed_entanglement").get<double>() == doctest::Approx(-0.21).epsilon(0.1));

  const auto w = cli({"witness", "--state", state, "--dims", "3", "3"});
  REQUIRE(w.code == 0);
  CHECK(io::Json::parse(w.out).at("value").get<double>() < -0.19);

  CHECK(cli({"reconstruct", "--records", (dir / "missing.csv").string(), "--basis", basis}).code == kExitUsage);
  CHECK(cli({"witness", "--state", state, "--dims", "2", "3"}).code == kExitUsage);
}

TEST_CASE("experiment fig1 writes panels, summary and manifest") {
  const fs::path dir = scratch("fig1");
  const std::string cfg = (dir / "cfg.json").string();
  io::write_text_file(cfg, R"({"experiment": "fig1", "samples": 2, "counts": [9, 27]})");
  const auto r = cli({"experiment", "fig1", "--config", cfg, "--out", (dir / "runs").string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"fig1_panel1.csv", "fig1_panel2.csv", "fig1_panel3.csv", "fig1_panel2_flags.csv",
                        "summary.json", "manifest.json"}) {
    CHECK(fs::exists(dir / "runs" / f));
  }
  CHECK(valid_sweep_csv(io::read_text_file((dir / "runs" / "fig1_panel1.csv").string())));
  const auto manifest = io::read_json_file((dir / "runs" / "manifest.json").string());
  CHECK(manifest.at("config").at("samples") == 2);
  CHECK(manifest.at("construction").at("field_polynomial").get<std::string>().size() > 0);
}

TEST_CASE("experiment flags override the config") {
  const fs::path dir = scratch("override");
  const std::string cfg = (dir / "cfg.json").string();
  io::write_text_file(cfg, R"({"counts": [9]})");
  REQUIRE(cli({"experiment", "fig1", "--config", cfg, "--out", dir.string(), "--seed", "5", "--noise", "0",
               "--samples", "1", "--threads", "2"})
              .code == 0);
  const auto m = io::read_json_file((dir / "manifest.json").string());
  CHECK(m.at("config").at("seed") == 5);
  CHECK(m.at("config").at("noise").at("kind") == "none");
  CHECK(m.at("config").at("samples") == 1);
}

TEST_CASE("bad configs are usage errors") {
  const fs::path dir = scratch("badcfg");
  const std::string cfg = (dir / "cfg.json").string();
  io::write_text_file(cfg, R"({"experiment": "fig1", "colour": "blue"})");
  CHECK(cli({"experiment", "fig1", "--config", cfg}).code == kExitUsage);
  io::write_text_file(cfg, R"({"experiment": "fig2"})");
  CHECK(cli({"experiment", "fig1", "--config", cfg}).code == kExitUsage);
  io::write_text_file(cfg, R"({"counts": [5, 3]})");
  CHECK(cli({"experiment", "fig1", "--config", cfg}).code == kExitUsage);
  io::write_text_file(cfg, "{not json");
  CHECK(cli({"experiment", "fig1", "--config", cfg}).code == kExitUsage);
}

TEST_CASE("solver failure exits with 2") {
  const fs::path dir = scratch("numerical");
  const std::string basis = (dir / "b.json").string();
  const std::string records = (dir / "r.csv").string();
  REQUIRE(cli({"bases", "gen", "--dim", "3", "--out", basis}).code == 0);
  REQUIRE(cli({"simulate", "--state", "random-density", "--dim", "3", "--out", records}).code == 0);
  CHECK(cli({"reconstruct", "--records", records, "--basis", basis, "--max-iters", "1"}).code == kExitOk);
  // a zero-frequency record on every projector admits no trace-one state
  io::write_text_file(records, "lambda,frequency,epsilon\n0,0,0\n1,0,0\n2,0,0\n");
  CHECK(cli({"reconstruct", "--records", records, "--basis", basis}).code == kExitNumerical);
}

}  // TEST_SUITE
