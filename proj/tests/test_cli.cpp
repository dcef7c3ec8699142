#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string cli = FCCA_CLI_PATH;

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "fcca_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  std::string cmd = "cd " + work_dir().string() + " && " + cli + " " + args;
  int status = std::system(cmd.c_str());
#ifdef _WIN32
  return status;
#else
  return WEXITSTATUS(status);
#endif
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) {
  return nlohmann::json::parse(slurp(p));
}

}  // namespace

TEST_CASE("simulate writes deterministic CSVs") {
  CHECK(run("simulate --model cca-pair --n 4 --seed 1 --out pair > /dev/null 2>&1") ==
        0);
  CHECK(fs::exists(work_dir() / "pair_1.csv"));
  CHECK(fs::exists(work_dir() / "pair_2.csv"));
  std::string first = slurp(work_dir() / "pair_1.csv");
  // 1 header + 4 data rows, LF endings, no CR.
  CHECK(std::count(first.begin(), first.end(), '\n') == 5);
  CHECK(first.find('\r') == std::string::npos);
  CHECK(first.rfind("t,", 0) == 0);
  CHECK(first.find("path_0,") != std::string::npos);

  CHECK(run("simulate --model cca-pair --n 4 --seed 1 --out pair_b > /dev/null 2>&1") ==
        0);
  CHECK(slurp(work_dir() / "pair_b_1.csv") == first);

  CHECK(run("simulate --model pcca-triple --n 4 --seed 1 --out tri > /dev/null 2>&1") ==
        0);
  CHECK(fs::exists(work_dir() / "tri_1.csv"));
  CHECK(fs::exists(work_dir() / "tri_2.csv"));
  CHECK(fs::exists(work_dir() / "tri_3.csv"));
}

TEST_CASE("cca on identical inputs gives correlation one") {
  REQUIRE(run("simulate --model cca-pair --n 40 --seed 3 --grid-points 40 --out s "
              "> /dev/null 2>&1") == 0);
  REQUIRE(run("cca --in1 s_1.csv --in2 s_1.csv --harmonics 4 --mode correlation "
              "--out self.json > /dev/null 2>&1") == 0);
  auto j = read_json(work_dir() / "self.json");
  CHECK(j["schema"] == 1);
  CHECK(std::abs(j["correlations"][0].get<double>() - 1.0) <= 1e-10);
}

TEST_CASE("cca estimates on a simulated pair fall in the expected band") {
  REQUIRE(run("simulate --model cca-pair --n 500 --seed 11 --out big "
              "> /dev/null 2>&1") == 0);
  REQUIRE(run("cca --in1 big_1.csv --in2 big_2.csv --harmonics 9 --mode covariance "
              "--out est.json > /dev/null 2>&1") == 0);
  auto j = read_json(work_dir() / "est.json");
  double d1 = j["correlations"][0].get<double>();
  double d2 = j["correlations"][1].get<double>();
  CHECK(d1 >= 0.55);
  CHECK(d1 <= 0.90);
  CHECK(d2 < 0.15);

  // pcca on the confounded triple lands in the same band.
  REQUIRE(run("simulate --model pcca-triple --n 500 --seed 11 --out ptri "
              "> /dev/null 2>&1") == 0);
  REQUIRE(run("pcca --cond ptri_1.csv --in1 ptri_2.csv --in2 ptri_3.csv "
              "--harmonics 9 --mode covariance --out pest.json > /dev/null 2>&1") ==
          0);
  auto pj = read_json(work_dir() / "pest.json");
  CHECK(pj["correlations"][0].get<double>() >= 0.55);
  CHECK(pj["correlations"][0].get<double>() <= 0.90);
}

TEST_CASE("report commands are byte-deterministic") {
  REQUIRE(run("cca --in1 s_1.csv --in2 s_2.csv --harmonics 4 --out a.json "
              "> /dev/null 2>&1") == 0);
  REQUIRE(run("cca --in1 s_1.csv --in2 s_2.csv --harmonics 4 --out b.json "
              "> /dev/null 2>&1") == 0);
  CHECK(slurp(work_dir() / "a.json") == slurp(work_dir() / "b.json"));

  REQUIRE(run("montecarlo --model cca --n 60 --replications 3 --harmonics 4 "
              "--grid-points 40 --seed 2 --out mc1.json > /dev/null 2>&1") == 0);
  REQUIRE(run("montecarlo --model cca --n 60 --replications 3 --harmonics 4 "
              "--grid-points 40 --seed 2 --out mc2.json > /dev/null 2>&1") == 0);
  CHECK(slurp(work_dir() / "mc1.json") == slurp(work_dir() / "mc2.json"));
  auto mc = read_json(work_dir() / "mc1.json");
  CHECK(mc["schema"] == 1);
  CHECK(mc["d1"].size() == 3);
  CHECK(mc["config"]["mode"] == "covariance");
}

TEST_CASE("fpca report") {
  REQUIRE(run("fpca --in s_1.csv --harmonics 3 --out fp.json > /dev/null 2>&1") == 0);
  auto j = read_json(work_dir() / "fp.json");
  CHECK(j["schema"] == 1);
  CHECK(j["eigenvalues"].size() == 3);
  CHECK(j["eigenfunctions"].size() == 3);
  CHECK(j["grid"].size() == 40);
  double l0 = j["eigenvalues"][0].get<double>();
  double l1 = j["eigenvalues"][1].get<double>();
  CHECK(l0 >= l1);
}

TEST_CASE("verify subcommand and fault injection") {
  CHECK(run("verify --trials 25 --dim 5 --seed 7 --out v.json > /dev/null 2>&1") == 0);
  auto j = read_json(work_dir() / "v.json");
  CHECK(j["all_pass"] == true);
  for (const auto& c : j["checks"]) CHECK(c["pass"] == true);

  CHECK(run("verify --trials 10 --dim 4 --seed 7 --inject-fault --out vf.json "
            "> /dev/null 2>&1") == 1);
  auto jf = read_json(work_dir() / "vf.json");
  CHECK(jf["all_pass"] == false);
  for (const auto& c : jf["checks"]) {
    if (c["name"] == "q2_inverse_identity")
      CHECK(c["pass"] == false);
    else
      CHECK(c["pass"] == true);
  }
}

TEST_CASE("exit codes") {
  CHECK(run("cca --in1 missing.csv --in2 missing.csv > /dev/null 2>&1") == 2);
  CHECK(run("frobnicate > /dev/null 2>&1") == 64);
  CHECK(run("simulate --model bogus > /dev/null 2>&1") == 64);

  std::ofstream bad(work_dir() / "bad.csv", std::ios::binary);
  bad << "t,0.1,0.2\npath_0,1.0\n";
  bad.close();
  CHECK(run("cca --in1 bad.csv --in2 bad.csv > /dev/null 2>&1") == 65);

  std::ofstream noheader(work_dir() / "nh.csv", std::ios::binary);
  noheader << "x,0.1,0.2\npath_0,1.0,2.0\n";
  noheader.close();
  CHECK(run("fpca --in nh.csv > /dev/null 2>&1") == 65);

  // n <= m is a data error.
  CHECK(run("cca --in1 pair_1.csv --in2 pair_2.csv --harmonics 9 "
            "> /dev/null 2>&1") == 65);
}
