#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cvxtau/cli.hpp"
#include "cvxtau/serialize.hpp"

using namespace cvxtau;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "cvxtau_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const auto path = scratch_dir() / name;
  std::ofstream(path) << body;
  return path;
}

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kExp = R"({"kind":"exponential","parameters":{"rate":1}})";
const char* kUniform = R"({"kind":"uniform","parameters":{"r":1}})";

}  // namespace

TEST_CASE("analyze tables") {
  const auto exp_cfg = write_config("exp.json", std::string(R"({"measure":)") + kExp + R"(,"h":1})");
  const auto r = run({"analyze", "--config", exp_cfg.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("0.367879") != std::string::npos);
  CHECK(r.out.find("42.545") != std::string::npos);

  const auto tp = write_config("tp.json", R"({"measure":{"kind":"two_point","parameters":{"a":1}},"h":1.01})");
  const auto t = run({"analyze", "--config", tp.string()});
  CHECK(t.code == cli::kOk);
  CHECK(t.out.find("17.17") != std::string::npos);
}

TEST_CASE("config errors exit 2") {
  const auto typo = write_config("typo.json", std::string(R"({"measure":)") + kExp + R"(,"hh":1})");
  const auto r = run({"analyze", "--config", typo.string()});
  CHECK(r.code == cli::kConfig);
  CHECK(r.err.find("hh") != std::string::npos);

  const auto bad_kind = write_config("kind.json", R"({"measure":{"kind":"cauchy","parameters":{}}})");
  CHECK(run({"analyze", "--config", bad_kind.string()}).code == cli::kConfig);
  const auto broken = write_config("broken.json", "{\"measure\": ");
  CHECK(run({"analyze", "--config", broken.string()}).code == cli::kConfig);
  CHECK(run({"analyze", "--config", (scratch_dir() / "missing.json").string()}).code == cli::kConfig);
  CHECK(run({"frobnicate"}).code == cli::kConfig);

  // Randomized commands refuse to run without a seed.
  const auto no_seed = write_config("noseed.json", std::string(R"({"measure":)") + kUniform + R"(,"trials":1})");
  CHECK(run({"tau", "--config", no_seed.string()}).code == cli::kConfig);

  const auto cone = write_config("cone.json", std::string(R"({"experiment":"corr1","measure":)") + kExp +
                                                  R"(,"dimension":2,"set":{"kind":"cone"},"seed":1})");
  CHECK(run({"concentrate", "--config", cone.string()}).code == cli::kConfig);
}

TEST_CASE("invalid measures exit 3") {
  const auto asym = write_config(
      "asym.json", R"({"measure":{"kind":"mix","atoms":[[1,0.5],[-2,0.5]],"density_pieces":[],"symmetric":true}})");
  CHECK(run({"analyze", "--config", asym.string()}).code == cli::kInvalidMeasure);
  const auto mass = write_config("mass.json", R"({"measure":{"kind":"mix","atoms":[[1,0.3],[-1,0.3]]}})");
  CHECK(run({"analyze", "--config", mass.string()}).code == cli::kInvalidMeasure);
}

TEST_CASE("tau runs") {
  const auto ok = write_config("tau.json", std::string(R"({"measure":)") + kUniform + R"(,"h":1.01,"trials":50})");
  const auto r = run({"--seed", "7", "tau", "--config", ok.string()});
  CHECK(r.code == cli::kOk);

  const auto empty = write_config("tau0.json", std::string(R"({"measure":)") + kUniform + R"(,"h":1.01,"trials":0})");
  CHECK(run({"--seed", "7", "tau", "--config", empty.string()}).code == cli::kOk);

  const auto neg = write_config("neg.json", std::string(R"({"measure":)") + kExp +
                                                R"(,"h":1,"trials":50,"suites":["a_implies_c"],"c_tau_scale":0.001})");
  const auto n = run({"--seed", "7", "--format", "records", "tau", "--config", neg.string()});
  CHECK(n.code == cli::kViolation);
  CHECK(n.out.find("witness") != std::string::npos);

  // h too small for a two-point measure: lambda_star = 1.
  const auto tp = write_config("tpsmall.json", R"({"measure":{"kind":"two_point","parameters":{"a":1}},"h":0.5,"trials":1})");
  CHECK(run({"--seed", "1", "tau", "--config", tp.string()}).code == cli::kDegenerate);
}

TEST_CASE("poincare and concentrate") {
  const auto p = write_config("p.json", std::string(R"({"measure":)") + kExp + R"(,"cp":4,"trials":20})");
  CHECK(run({"--seed", "3", "poincare", "--config", p.string()}).code == cli::kOk);

  const auto c1 = write_config("c1.json", std::string(R"({"experiment":"corr1","measure":)") + kExp +
                                              R"(,"dimension":16,"set":{"kind":"half_space","a":0.25,"c":0},)"
                                              R"("t_grid":[0.5,1,2,4],"samples":20000})");
  CHECK(run({"--seed", "3", "concentrate", "--config", c1.string()}).code == cli::kOk);

  const auto c2 = write_config("c2.json", std::string(R"({"experiment":"corr2","measure":)") + kExp +
                                              R"(,"dimension":16,"function":{"kind":"max_coordinate"},"a":1,"b":1,)"
                                              R"("t_grid":[1,2,4,8],"samples":20000})");
  CHECK(run({"--seed", "3", "concentrate", "--config", c2.string()}).code == cli::kOk);

  const auto eb = write_config("eb.json", std::string(R"({"experiment":"corr1","measure":)") + kUniform +
                                              R"(,"dimension":2,"set":{"kind":"half_space","a":[1,0],"c":-5},)"
                                              R"("samples":1000})");
  const auto e = run({"--seed", "3", "concentrate", "--config", eb.string()});
  CHECK(e.code == cli::kDegenerate);
  CHECK_FALSE(e.err.empty());
}

TEST_CASE("records are deterministic and --out writes a file") {
  const auto cfg = write_config("det.json", std::string(R"({"measure":)") + kExp + R"(,"h":1,"trials":20,"seed":11})");
  const auto a = run({"--format", "records", "tau", "--config", cfg.string()});
  const auto b = run({"--format", "records", "tau", "--config", cfg.string()});
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
  std::istringstream lines(a.out);
  std::string line;
  while (std::getline(lines, line)) {
    const auto j = Json::parse(line);
    CHECK(j.at("schema") == "cvxtau.records/1");
    CHECK(j.contains("type"));
  }

  const auto path = scratch_dir() / "out.jsonl";
  fs::remove(path);
  const auto c = run({"--format", "records", "--out", path.string(), "tau", "--config", cfg.string()});
  CHECK(c.code == cli::kOk);
  CHECK(c.out.empty());
  std::ifstream in(path);
  const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(written == a.out);
}
