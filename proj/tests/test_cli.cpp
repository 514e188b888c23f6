#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = brenier::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("verify examples") {
  const auto g2u = run({"verify", "--scenario", "gaussian_to_uniform_1d", "--D", "1", "--grid", "-4:4:33"});
  CHECK(g2u.code == 0);
  const json j = json::parse(g2u.out);
  CHECK(j["pass"] == true);
  CHECK(j["grid"]["points"] == 33);
  CHECK(j["version"] == BRENIER_VERSION);
  CHECK(j["scenario"]["kind"] == "gaussian_to_uniform_1d");
  CHECK(j["seed"].is_null());
  CHECK(j["tolerance"]["exact"] == 1e-10);

  CHECK(run({"verify", "--scenario", "identity", "--dim", "3"}).code == 0);
  CHECK(run({"verify", "--scenario", "radial", "--dim", "3"}).code == 0);
  CHECK(run({"verify", "--scenario", "product", "--dim", "2"}).code == 0);
  const auto bogus = run({"verify", "--scenario", "bogus"});
  CHECK(bogus.code == 2);
  CHECK(bogus.err.find("bogus") != std::string::npos);
}

TEST_CASE("verify reports failed inequalities with exit 1") {
  // A Gaussian rescaling is not CD(0, 3) in two dimensions.
  const auto r = run({"verify", "--scenario", "gaussian_scale", "--sigma", "4", "--dim", "2", "--N", "3"});
  CHECK(r.code == 1);
  CHECK(json::parse(r.out)["pass"] == false);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"verify", "--scenario", "identity", "--grid", "1:0:3"}).code == 2);
  CHECK(run({"verify", "--scenario", "identity", "--grid", "-1:1"}).code == 2);
  CHECK(run({"verify", "--scenario", "identity", "--grid", "-1:1:2.5"}).code == 2);
  CHECK(run({"verify", "--scenario", "gaussian_to_uniform_1d", "--D", "-1"}).code == 2);
  CHECK(run({"verify", "--scenario", "gaussian_to_uniform_1d", "--D", "abc"}).code == 2);
  CHECK(run({"verify", "--scenario", "identity", "--tol", "0"}).code == 2);
  CHECK(run({"verify", "--scenario-file", "/nonexistent/scenario.json"}).code == 2);
  CHECK(run({"report", "--scenario", "identity", "--dim", "2", "--x", "0"}).code == 2);
  CHECK(run({"report", "--scenario", "identity", "--dim", "2", "--x", "0,a"}).code == 2);
  CHECK(run({"report", "--scenario", "gaussian_to_uniform_1d", "--x", "20"}).code == 2);
  CHECK(run({"experiment"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("seed is required exactly for stochastic commands") {
  CHECK(run({"experiment", "diameter", "--dims", "1,2"}).code == 2);
  CHECK(run({"experiment", "concentration", "--scenario", "radial", "--dim", "3"}).code == 2);
  CHECK(run({"experiment", "bishop-gromov", "--scenario", "gaussian_to_uniform_1d", "--seed", "1"}).code == 2);
  CHECK(run({"verify", "--scenario", "identity", "--seed", "1"}).code == 2);
}

TEST_CASE("report examples") {
  const auto g = run({"report", "--scenario", "gaussian_to_uniform_1d", "--x", "0"});
  CHECK(g.code == 0);
  CHECK(g.out.find("be = 0.5\n") != std::string::npos);
  CHECK(g.out.find("gamma2(x_1) = 3.14159") != std::string::npos);

  const auto id = run({"report", "--scenario", "identity", "--dim", "2", "--x", "0,0"});
  CHECK(id.code == 0);
  CHECK(id.out.find("be =\n    1 0\n    0 1\n") != std::string::npos);

  const auto gs = run({"report", "--scenario", "gaussian_scale", "--sigma", "4", "--dim", "2", "--x", "1,1"});
  CHECK(gs.code == 0);
  CHECK(gs.out.find("Riemann max |R_ijkl| = 0\n") != std::string::npos);
}

TEST_CASE("experiments write csv and json") {
  const auto dir = std::filesystem::temp_directory_path() / "brenier_cli_test";
  std::filesystem::create_directories(dir);
  const std::string prefix = (dir / "diam").string();
  const auto r = run({"experiment", "diameter", "--dims", "1,2,4", "--D", "1", "--samples", "20000", "--seed", "42",
                      "--out", prefix});
  CHECK(r.code == 0);
  const std::string csv = slurp(prefix + ".csv");
  CHECK(csv.rfind("d,estimate\n1,", 0) == 0);
  const json j = json::parse(slurp(prefix + ".json"));
  CHECK(j["seed"] == 42);
  CHECK(j["result"]["dims"] == json({1, 2, 4}));

  const auto again = run({"experiment", "diameter", "--dims", "1,2,4", "--D", "1", "--samples", "20000", "--seed",
                          "42", "--out", (dir / "diam2").string()});
  CHECK(again.code == 0);
  CHECK(slurp(dir / "diam2.csv") == csv);
  CHECK(slurp(dir / "diam2.json") == slurp(prefix + ".json"));

  const auto bg = run({"experiment", "bishop-gromov", "--scenario", "gaussian_to_uniform_1d", "--out",
                       (dir / "bg").string()});
  CHECK(bg.code == 0);
  CHECK(slurp(dir / "bg.csv").rfind("r,profile\n", 0) == 0);

  const auto conc = run({"experiment", "concentration", "--scenario", "radial", "--dim", "3", "--D", "1", "--seed",
                         "7", "--samples", "20000", "--out", (dir / "conc").string()});
  CHECK(conc.code == 0);
  CHECK(slurp(dir / "conc.csv").rfind("h,empirical,bound\n", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("estimates and poincare sweeps") {
  const auto est = run({"experiment", "estimates", "--scenario", "gaussian_to_uniform_1d", "--p", "1,2,4"});
  CHECK(est.code == 0);
  const json j = json::parse(est.out);
  CHECK(j["pass"] == true);
  CHECK(j["result"].size() == 3 * 9);  // per D: lm, three weights, variance, three exponents, vw
  CHECK(run({"experiment", "estimates", "--scenario", "gaussian_to_uniform_1d", "--p", "6"}).code == 2);

  const auto p = run({"experiment", "poincare", "--scenario", "gaussian_to_uniform_1d", "--d-values", "1,3"});
  CHECK(p.code == 0);
  const json q = json::parse(p.out);
  CHECK(q["result"][0]["ratio"].get<double>() == doctest::Approx(q["result"][1]["ratio"].get<double>()).epsilon(1e-8));
}

TEST_CASE("scenario files and catalog") {
  const auto list = run({"scenario", "list"});
  CHECK(list.code == 0);
  for (const char* name : {"identity", "gaussian_scale", "gaussian_to_uniform_1d", "product",
                           "radial_gaussian_to_ball", "custom_1d"})
    CHECK(list.out.find(std::string(name) + "\t{") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "brenier_cli_scenario.json";
  {
    std::ofstream f(path);
    f << R"({"kind": "custom_1d", "dim": 1, "params": {"V": {"type": "gaussian"}, "W": {"type": "quartic", "eps": 0.3}}})";
  }
  const auto r = run({"verify", "--scenario-file", path.string(), "--grid", "-2:2:9"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["scenario"]["params"]["W"]["eps"] == 0.3);
  {
    std::ofstream f(path);
    f << R"({"kind": "custom_1d", "params": {)";
  }
  CHECK(run({"verify", "--scenario-file", path.string()}).code == 2);
  std::filesystem::remove(path);
}
