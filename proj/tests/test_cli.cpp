// Copyright 2026 The qdev Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"

using namespace qdev;
using Catch::Approx;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qdev");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(QDEV_SAMPLE_DATA) + "/" + name; }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("range and receiver parsing", "[cli]") {
  CHECK(cli::parse_range("3", "x") == std::vector<std::size_t>{3});
  CHECK(cli::parse_range("2..5", "x") == std::vector<std::size_t>{2, 3, 4, 5});
  CHECK(cli::parse_range("1,4,6", "x") == std::vector<std::size_t>{1, 4, 6});
  CHECK(cli::parse_range("2..3,8", "x") == std::vector<std::size_t>{2, 3, 8});
  for (const char* bad : {"", "a", "-1", "5..2", "3x", "1,,2"}) CHECK_THROWS_AS(cli::parse_range(bad, "x"), DomainError);

  const auto items = cli::parse_receivers("inf,+2,7..8");
  REQUIRE(items.size() == 4);
  CHECK(cli::resolve(items[0], 4) == Receivers::unbounded());
  CHECK(cli::resolve(items[1], 4) == Receivers::finite(6));
  CHECK(cli::resolve(items[2], 4) == Receivers::finite(7));
  CHECK(cli::resolve(items[3], 4) == Receivers::finite(8));
  CHECK_THROWS_AS(cli::parse_receivers("+x"), DomainError);
}

TEST_CASE("number formatting", "[cli]") {
  CHECK(cli::fmt(2.0 / 3.0) == "0.666666666667");
  CHECK(cli::fmt(0.4) == "0.4");
  CHECK(cli::fmt(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(cli::csv_quote("a,b") == "\"a,b\"");
  CHECK(cli::csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(cli::csv_quote("plain") == "plain");
}

TEST_CASE("fidelity tables", "[cli]") {
  auto r = invoke({"devices", "fidelity", "--device", "universal-clone", "--d", "2", "--N", "1", "--M", "2"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0].rfind("# ", 0) == 0);
  CHECK(ls[1] == "device,d,N,M,fidelity,exact,error");
  CHECK(ls[2] == "universal-clone,2,1,2,0.666666666667,2/3,");

  r = invoke({"devices", "fidelity", "--device", "phase-not", "--d", "2..5"});
  REQUIRE(r.code == 0);
  for (const char* row : {"phase-not,2,1,1,1,1,", "phase-not,3,1,1,0.666666666667,2/3,", "phase-not,4,1,1,0.5,1/2,",
                          "phase-not,5,1,1,0.4,2/5,"})
    CHECK(contains(r.out, row));

  r = invoke({"devices", "fidelity", "--device", "unot", "--d", "2..5"});
  REQUIRE(r.code == 0);
  for (const char* row : {"unot,2,1,1,0.666666666667,", "unot,3,1,1,0.5,", "unot,4,1,1,0.4,", "unot,5,1,1,0.333333333333,"})
    CHECK(contains(r.out, row));
}

TEST_CASE("cap violations are reported per row", "[cli]") {
  const auto r = invoke({"devices", "fidelity", "--device", "universal-clone", "--d", "2,1000", "--N", "40", "--M", "90"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[2].rfind("universal-clone,2,40,90,0.", 0) == 0);
  CHECK(ls[3].rfind("universal-clone,1000,40,90,,,", 0) == 0);
  CHECK(contains(ls[3], "overflow"));
}

TEST_CASE("device build record", "[cli]") {
  const auto r = invoke({"--format", "json", "devices", "build", "--device", "universal-clone", "--d", "2", "--N", "1", "--M", "2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["result"]["check"]["cp"] == true);
  CHECK(j["result"]["check"]["tp"] == true);
  CHECK(j["result"]["fidelity"].get<double>() == Approx(2.0 / 3.0));
  const auto choi = io::choi_from_json(j["result"]["choi"]);
  CHECK(choi.in_dim() == 2);
  CHECK(choi.out_dim() == 4);
}

TEST_CASE("scaling and thresholds", "[cli]") {
  auto r = invoke({"scaling", "--flavor", "universal", "--N", "10", "--M", "11", "--grid", "100"});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 102);
  CHECK(ls[1] == "flavor,N,M,r,p,superbroadcasts");
  bool crossed_up = false, crossed_down = false;
  for (std::size_t i = 2; i < ls.size(); ++i) {
    crossed_up = crossed_up || contains(ls[i], ",true");
    crossed_down = crossed_down || (crossed_up && contains(ls[i], ",false"));
  }
  CHECK(crossed_up);
  CHECK(crossed_down);

  r = invoke({"rstar", "--flavor", "universal", "--N", "4..8", "--M", "+1"});
  REQUIRE(r.code == 0);
  ls = lines(r.out);
  REQUIRE(ls.size() == 7);
  CHECK(ls[1] == "flavor,N,M,r_star,error");
  for (std::size_t i = 2; i < ls.size(); ++i) CHECK_FALSE(contains(ls[i], ",,"));

  r = invoke({"rstar", "--N", "4", "--M", "8"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "universal,4,8,,"));

  r = invoke({"rstar", "--N", "6", "--M", "inf"});
  CHECK(contains(r.out, "universal,6,inf,0.2514957"));
}

TEST_CASE("POVM commands", "[cli]") {
  auto r = invoke({"povm", "check", data("basis3.json")});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "valid,true"));
  CHECK(contains(r.out, "observable,true"));
  CHECK(contains(r.out, "rank_one,true"));

  r = invoke({"povm", "check", data("redundant3.json")});
  CHECK(contains(r.out, "observable,false"));
  CHECK(contains(r.out, "rank_one,true"));
  CHECK(contains(r.out, "preprocessing_clean,true"));

  r = invoke({"povm", "check", data("invalid3.json")});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "valid,false"));
  CHECK(contains(r.out, "complete,false"));

  r = invoke({"povm", "reach", data("half2.json"), data("basis2.json")});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "reachable,false"));
  CHECK(contains(r.out, "certificate"));

  r = invoke({"--format", "json", "povm", "reach", data("basis3.json"), data("coarse3.json")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["result"]["reachable"] == true);
  CHECK(j["result"]["witness"].size() == 2);

  r = invoke({"povm", "reach", data("basis2.json"), data("basis3.json")});
  CHECK(r.code == 2);
}

TEST_CASE("decoherence commands", "[cli]") {
  auto r = invoke({"deco", "info", "--lambda", "2.0"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "info_bits,0.98674743"));

  r = invoke({"deco", "run", "--lambda", "0.5", "--steps", "3", "--state", data("state2.json")});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  CHECK(ls[1] == "step,k,l,abs");
  // |rho_01| = 0.48 decaying by e^{-0.5} per step.
  CHECK(contains(r.out, "0,0,1,0.48"));
  CHECK(contains(r.out, "3,0,1," + cli::fmt(0.48 * std::exp(-1.5))));

  r = invoke({"--format", "json", "deco", "invert", "--xi", data("xi3.json")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["result"]["dim"] == 3);
  CHECK(j["result"]["recovery_distance"].get<double>() < 1e-12);

  r = invoke({"deco", "info", "--lambda", "-1"});
  CHECK(r.code == 2);
  CHECK(contains(r.err, "lambda"));
}

TEST_CASE("repeatable demo", "[cli]") {
  const auto r = invoke({"demo", "repeatable", "--D", "12", "--p", "0.3", "--reps", "4"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 6);
  CHECK(ls[1] == "rep,outcome,p0,p1,p_repeat,mean_level");
  CHECK(ls[2].rfind("1,", 0) == 0);
  CHECK(contains(ls[2], ",0.3,0.7,,1"));
  for (std::size_t i = 3; i < ls.size(); ++i) CHECK(contains(ls[i], ",1,"));
  CHECK(invoke({"demo", "repeatable", "--D", "8", "--reps", "4"}).code == 2);
}

TEST_CASE("exit codes", "[cli]") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"rstar", "--flavor", "sideways"}).code == 2);
  CHECK(invoke({"rstar", "--bogus", "1"}).code == 2);
  CHECK(invoke({"--format", "xml", "rstar"}).code == 2);
  CHECK(invoke({"scaling", "--N", "3", "--M", "2"}).code == 2);
  CHECK(invoke({"povm", "check", "/nonexistent/file.json"}).code == 2);

  const auto notjson = temp_file("qdev_cli_not.json", "{ nope");
  CHECK(invoke({"povm", "check", notjson.string()}).code == 2);

  // Hermitian with unit diagonal but indefinite: an invariant violation.
  const auto badxi = temp_file("qdev_cli_badxi.json", "[[1, 0.9, -0.9], [0.9, 1, 0.9], [-0.9, 0.9, 1]]");
  const auto r = invoke({"deco", "run", "--xi", badxi.string()});
  CHECK(r.code == 3);
  CHECK(contains(r.err, "invariant"));
}

TEST_CASE("output is deterministic and parses", "[cli]") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"deco", "invert", "--seed", "42"}, std::vector<std::string>{"demo", "repeatable", "--seed", "9"},
        std::vector<std::string>{"scaling", "--flavor", "phase", "--N", "5", "--M", "inf", "--grid", "50"}}) {
    const auto a = invoke(args), b = invoke(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto j = args;
    j.insert(j.begin(), {"--format", "json"});
    const auto ja = invoke(j);
    REQUIRE(ja.code == 0);
    nlohmann::json parsed;
    CHECK_NOTHROW(parsed = nlohmann::json::parse(ja.out));
    CHECK(parsed.contains("config"));
    CHECK(ja.out == invoke(j).out);
  }
  CHECK(invoke({"deco", "invert", "--seed", "1"}).out != invoke({"deco", "invert", "--seed", "2"}).out);
}

TEST_CASE("output file option", "[cli]") {
  const auto p = std::filesystem::temp_directory_path() / "qdev_cli_out.csv";
  std::filesystem::remove(p);
  const auto r = invoke({"--out", p.string(), "deco", "info", "--lambda", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(contains(ss.str(), "info_bits,"));
}
