#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "cli_main.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"stabsens"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return stabsens_cli::cli_main(static_cast<int>(argv.size()), argv.data());
}

class TempDir {
 public:
  TempDir() {
    dir_ = fs::temp_directory_path() /
           ("stabsens_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  ~TempDir() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
  std::string path(const std::string& name) { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

const char* kScalarSystem = R"({"J": [[-1.0]]})";
const char* kSmallModel = R"({
  "J0": [[-1.0, 0.2], [0.1, -1.5]],
  "params": [
    {"name": "Kbp", "M": [[-1.0, 0.0], [0.0, 0.0]], "lo": 0.1, "hi": 2.0},
    {"name": "Kbq", "M": [[0.0, 0.0], [0.0, -1.0]], "lo": 0.1, "hi": 2.0}
  ]
})";

}  // namespace

TEST_CASE("index solves a scalar system") {
  TempDir tmp;
  const std::string sys = tmp.write("sys.json", kScalarSystem);
  const std::string out = tmp.path("cert.json");
  CHECK(run_cli({"index", "--system", sys, "--out", out}) == 0);
  const json cert = read_json(out);
  CHECK(std::abs(cert["eta"].get<double>() + 2.0) <= 1e-6);
  CHECK(cert["status"] == "Optimal");
  CHECK(cert["stable"] == true);
  CHECK(cert["phi_svec"].size() == 1);
  CHECK(cert["upsilon_svec"].size() == 3);
}

TEST_CASE("index accepts descriptor systems") {
  TempDir tmp;
  const std::string sys = tmp.write(
      "desc.json",
      R"({"A": [[-1.0]], "B": [[1.0]], "C": [[1.0]], "D": [[-2.0]]})");
  const std::string out = tmp.path("cert.json");
  CHECK(run_cli({"index", "--system", sys, "--out", out}) == 0);
  const json cert = read_json(out);
  // J reduces to -0.5, so eta = -1.
  CHECK(std::abs(cert["eta"].get<double>() + 1.0) <= 1e-6);
}

TEST_CASE("lyap reports the classical verdict") {
  TempDir tmp;
  const std::string sys = tmp.write("sys.json", kScalarSystem);
  const std::string out = tmp.path("lyap.json");
  CHECK(run_cli({"lyap", "--system", sys, "--out", out}) == 0);
  const json j = read_json(out);
  CHECK(j["positive_definite"] == true);
  CHECK(std::abs(j["phi"][0][0].get<double>() - 0.5) <= 1e-12);
}

TEST_CASE("lyap fails loudly on a degenerate spectrum") {
  TempDir tmp;
  const std::string sys =
      tmp.write("sys.json", R"({"J": [[1.0, 0.0], [0.0, -1.0]]})");
  CHECK(run_cli({"lyap", "--system", sys}) == 2);
}

TEST_CASE("sens analytic on a system file") {
  TempDir tmp;
  const std::string sys = tmp.write("sys.json", kScalarSystem);
  const std::string out = tmp.path("sens.json");
  CHECK(run_cli({"sens", "--system", sys, "--method", "analytic", "--out",
                 out}) == 0);
  const json j = read_json(out);
  CHECK(j["method"] == "analytic");
  CHECK(std::abs(j["d_eta_d_J"][0][0].get<double>() - 2.0) <= 1e-6);
}

TEST_CASE("sens single entry via perturbation") {
  TempDir tmp;
  const std::string sys = tmp.write("sys.json", kScalarSystem);
  const std::string out = tmp.path("sens.json");
  CHECK(run_cli({"sens", "--system", sys, "--method", "central", "--fd-step",
                 "1e-4", "--entry", "0,0", "--out", out}) == 0);
  const json j = read_json(out);
  CHECK(j["method"] == "central_fd");
  CHECK(std::abs(j["d_eta_d_J"][0][0].get<double>() - 2.0) <= 1e-3);
}

TEST_CASE("sens on a parametric model") {
  TempDir tmp;
  const std::string model = tmp.write("model.json", kSmallModel);
  const std::string out = tmp.path("sens.json");
  CHECK(run_cli({"sens", "--model", model, "--at", "0.5,0.5", "--out", out}) ==
        0);
  const json j = read_json(out);
  REQUIRE(j.contains("d_eta_d_params"));
  CHECK(j["d_eta_d_params"].contains("Kbp"));
  CHECK(j["d_eta_d_params"].contains("Kbq"));

  const std::string out_fd = tmp.path("sens_fd.json");
  CHECK(run_cli({"sens", "--model", model, "--at", "0.5,0.5", "--method",
                 "fd", "--fd-step", "1e-3", "--out", out_fd}) == 0);
  const json fd = read_json(out_fd);
  CHECK(fd["method"] == "forward_fd");
  // The two routes agree loosely at this step size.
  CHECK(std::abs(fd["d_eta_d_params"]["Kbp"].get<double>() -
                 j["d_eta_d_params"]["Kbp"].get<double>()) <= 1e-2);
}

TEST_CASE("simulate reports a violation-free decay") {
  TempDir tmp;
  const std::string sys = tmp.write("sys.json", kScalarSystem);
  const std::string x0 = tmp.write("x0.json", "[1.0]");
  const std::string out = tmp.path("traj.json");
  CHECK(run_cli({"simulate", "--system", sys, "--x0", x0, "--t-end", "2.0",
                 "--dt", "0.01", "--out", out}) == 0);
  const json j = read_json(out);
  CHECK(j["bound_violations"] == 0);
  CHECK(j["times"].size() == 201);
  // L(0) = x0^T Phi x0 with Phi solved to solver accuracy.
  CHECK(std::abs(j["lyapunov"][0].get<double>() - 1.0) <= 1e-7);
}

TEST_CASE("check evaluates the constraint both ways") {
  TempDir tmp;
  const std::string sys = tmp.write("sys.json", kScalarSystem);
  const std::string out = tmp.path("check.json");
  CHECK(run_cli({"check", "--system", sys, "--eta-bar", "0.0", "--out", out}) ==
        0);
  CHECK(read_json(out)["satisfied"] == true);

  CHECK(run_cli({"check", "--system", sys, "--eta-bar", "-3.0", "--out",
                 out}) == 0);
  CHECK(read_json(out)["satisfied"] == false);
}

TEST_CASE("bench emits a schema-conforming report") {
  TempDir tmp;
  const std::string model = tmp.write("model.json", kSmallModel);
  const std::string out = tmp.path("bench.json");
  const std::string csv = tmp.path("bench.csv");
  CHECK(run_cli({"bench", "--model", model, "--scenarios", "3", "--seed", "1",
                 "--fd-steps", "1e-1,1e-2", "--out", out, "--csv", csv}) == 0);
  const json j = read_json(out);
  CHECK(j["scenarios"].size() == 3);
  CHECK(j["per_step"].size() == 2);
  CHECK(j["config"]["seed"] == 1);
  CHECK(fs::exists(csv));
}

TEST_CASE("usage errors exit with code 1") {
  TempDir tmp;
  const std::string sys = tmp.write("sys.json", kScalarSystem);
  const std::string model = tmp.write("model.json", kSmallModel);
  CHECK(run_cli({"index"}) == 1);                       // missing --system
  CHECK(run_cli({"index", "--system", "/nope.json"}) == 1);
  CHECK(run_cli({"index", "--system", sys, "--bogus"}) == 1);
  CHECK(run_cli({"nosuchcommand"}) == 1);
  CHECK(run_cli({"sens", "--system", sys, "--model", model}) == 1);
  CHECK(run_cli({"sens", "--model", model, "--entry", "0,0"}) == 1);
  const std::string bad = tmp.write("bad.json", "{not json");
  CHECK(run_cli({"index", "--system", bad}) == 1);
}

TEST_CASE("numerical failures exit with code 2") {
  TempDir tmp;
  const std::string singular = tmp.write(
      "singular.json",
      R"({"A": [[1.0]], "B": [[1.0]], "C": [[1.0]], "D": [[0.0]]})");
  CHECK(run_cli({"index", "--system", singular}) == 2);
}
