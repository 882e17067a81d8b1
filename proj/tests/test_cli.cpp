#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lmm_cli.hpp"

using namespace lmm;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "lmm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

std::vector<double> csv_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(std::stod(cell));
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lmm_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("classify emits a JSON verdict", "[cli]") {
  const auto r = run({"classify", "--method", "midpoint"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["verdict"] == "WeaklyStable");
  CHECK(doc["roots"].size() == 2);
  CHECK(json::parse(run({"classify", "--method", "BDF2"}).out)["verdict"] == "StronglyStable");
}

TEST_CASE("witness CSV", "[cli]") {
  const auto r = run({"witness", "--method", "midpoint", "--n-list", "64,128"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "n,ratio,image_norm,u_inf_norm");
  for (int i : {1, 2}) {
    const auto row = csv_row(lines[i]);
    REQUIRE(row.size() == 4);
    CHECK(row[1] == Catch::Approx(row[0]).epsilon(1e-12));
  }
  REQUIRE(lines[3].rfind("# summary ", 0) == 0);
  CHECK(json::parse(lines[3].substr(10))["monotone"] == true);

  const auto j = run({"witness", "--method", "milne", "--n-list", "64,128", "--format", "json"});
  REQUIRE(j.code == 0);
  CHECK(json::parse(j.out)["rows"].size() == 2);
}

TEST_CASE("stability-constant CSV", "[cli]") {
  const auto r = run({"stability-constant", "--method", "AB2", "--pair", "inf-inf", "--n-list", "8,16"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "n,S");
  CHECK(csv_row(lines[1])[0] == 8.0);
  CHECK(csv_row(lines[2])[1] ==
        Catch::Approx(stability_constant(make_bundle(*find_method("AB2"), 16), NormPair::inf_inf())));
}

TEST_CASE("consistency and integrate CSV", "[cli]") {
  const auto c = run({"consistency", "--scheme", "alt-euler", "--norm", "spijker"});
  REQUIRE(c.code == 0);
  const auto lines = lines_of(c.out);
  CHECK(lines[0] == "h,defect_norm");
  const auto summary = json::parse(lines.back().substr(10));
  CHECK(summary["slope"].get<double>() == Catch::Approx(2.0).margin(0.15));

  const auto i = run({"integrate", "--method", "BDF2", "--n", "50"});
  REQUIRE(i.code == 0);
  const auto il = lines_of(i.out);
  CHECK(il[0] == "t,u,exact,error");
  CHECK(il.size() == 1 + 52 + 1);

  const auto d = run({"demo-oscillation", "--method", "midpoint"});
  REQUIRE(d.code == 0);
  const auto dl = lines_of(d.out);
  const auto ds = json::parse(dl.back().substr(10));
  CHECK(ds["h"].get<double>() == Catch::Approx(0.05));
  CHECK(ds["parasitic_amplitude"].get<double>() >= 1e-2);
}

TEST_CASE("usage errors exit with 1", "[cli]") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"witness", "--n-list", "128,64"}).code == 1);
  CHECK(run({"witness", "--n-list", "64,abc"}).code == 1);
  CHECK(run({"classify", "--method", "nope"}).code == 1);
  CHECK(run({"stability-constant", "--pair", "inf-two"}).code == 1);
  CHECK(run({"consistency", "--norm", "l2"}).code == 1);
  CHECK(run({"integrate", "--format", "xml"}).code == 1);
  CHECK(run({"classify", "--method-file", scratch("missing.json").string()}).code == 1);
  const auto r = run({"witness", "--n-list", "128,64"});
  CHECK(r.err.find("--n-list") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("numerical failures exit with 2", "[cli]") {
  const auto r = run({"witness", "--method", "BDF2", "--n-list", "64,128"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(run({"stability-constant", "--method", "euler", "--n-list", "5000"}).code == 2);
}

TEST_CASE("method files", "[cli]") {
  const auto path = scratch("leapfrog.json");
  {
    std::ofstream f(path);
    f << R"({"name": "leapfrog", "alpha": [0.5, 0, -0.5], "beta": [0, 1, 0]})";
  }
  const auto r = run({"classify", "--method-file", path.string()});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["method"] == "leapfrog");
  CHECK(doc["verdict"] == "WeaklyStable");

  const auto bad = scratch("bad.json");
  {
    std::ofstream f(bad);
    f << R"({"name": "bad", "alpha": [0, 1], "beta": [0, 1]})";
  }
  CHECK(run({"classify", "--method-file", bad.string()}).code == 1);
}

TEST_CASE("identical configurations give byte-identical files", "[cli][determinism]") {
  const auto a = scratch("a.json"), b = scratch("b.json");
  REQUIRE(run({"reproduce", "--seed", "3", "--out", a.string()}).code == 0);
  REQUIRE(run({"reproduce", "--seed", "3", "--out", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());

  const auto c = scratch("c.csv"), d = scratch("d.csv");
  REQUIRE(run({"witness", "--method", "milne", "--n-list", "64,128,256", "--out", c.string()}).code == 0);
  REQUIRE(run({"witness", "--method", "milne", "--n-list", "64,128,256", "--out", d.string()}).code == 0);
  CHECK(slurp(c) == slurp(d));
}

TEST_CASE("reproduce report", "[cli][reproduce]") {
  const auto doc = cli::reproduce_report(0);
  CHECK(std::abs(doc["theorem1"]["image_norm"].get<double>() - 0.5) <= 1e-12);
  for (const auto& c : doc["theorem1"]["cases"]) CHECK(c["u_norm"].get<double>() == c["n"].get<double>());
  const auto& methods = doc["theorem2"]["methods"];
  CHECK(methods.size() == 2);
  for (const auto& [name, entry] : methods.items()) {
    INFO(name);
    CHECK(entry["monotone"] == true);
    CHECK(entry["growth_4096_over_64"].get<double>() >= 32.0);
    for (const auto& o : entry["oracle"]) CHECK(o["ratio"].get<double>() <= o["S"].get<double>() + 1e-9);
  }
  CHECK(doc["classification"]["midpoint"] == "WeaklyStable");
  CHECK(doc["factorization"]["max_relative_residual"].get<double>() <= 1e-10);
}

TEST_CASE("dump-matrix writes dense operators", "[cli]") {
  const auto prefix = scratch("euler").string();
  REQUIRE(run({"stability-constant", "--method", "euler", "--n-list", "1", "--dump-matrix", prefix}).code == 0);
  CHECK(slurp(prefix + "_A.csv") == "1,0\n-1,1\n");
  CHECK(slurp(prefix + "_B.csv") == "0,0\n1,0\n");
}

TEST_CASE("LMM_DENSE_CAP limits dense operators", "[cli]") {
  const auto prefix = scratch("capped").string();
  ::setenv("LMM_DENSE_CAP", "10", 1);
  const auto capped = run({"stability-constant", "--method", "euler", "--n-list", "20", "--dump-matrix", prefix});
  ::unsetenv("LMM_DENSE_CAP");
  CHECK(capped.code == 2);
  CHECK(run({"stability-constant", "--method", "euler", "--n-list", "20", "--dump-matrix", prefix}).code == 0);
}
