#include <cstdio>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "algact/cli.hpp"
#include "algact/error.hpp"
#include "algact/report.hpp"

using namespace algact;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  return {code, o.str(), e.str()};
}

Json run_json(std::vector<std::string> args, int expected = cli::kPass) {
  const Run r = run(std::move(args));
  CHECK(r.code == expected);
  return Json::parse(r.out);
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("float formatting") {
    Json j;
    j["a"] = 0.1;
    j["b"] = 2.0;
    j["c"] = std::numeric_limits<double>::quiet_NaN();
    j["d"] = -std::numeric_limits<double>::infinity();
    j["e"] = 3;
    j["f"] = Json::array({1e-300, "x"});
    CHECK(dump_json(j, 0) == R"({"a":0.10000000000000001,"b":2.0,"c":null,"d":null,"e":3,"f":[1e-300,"x"]})"
                             "\n");
    CHECK(Json::parse(dump_json(j))["a"].get<double>() == 0.1);
  }

  TEST_CASE("keys keep insertion order") {
    const Json env = report_envelope("x", 7, Json::object());
    std::vector<std::string> keys;
    for (auto it = env.begin(); it != env.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"tool", "version", "command", "seed", "config"});
  }

  TEST_CASE("csv projection of tables") {
    Json r = report_envelope("x", 1, Json::object());
    r["tables"]["rows"] = Json::array({Json{{"k", 1.5}, {"name", "a,b"}, {"v", Json::array({1, 2})}},
                                       Json{{"k", std::nan("")}, {"name", "q\""}, {"v", Json::array()}}});
    r["tables"]["skip"] = 3;
    CHECK(dump_csv(r) == "# rows\nk,name,v\n1.5,\"a,b\",1;2\n,\"q\"\"\",\n");
    CHECK(dump_csv(Json::object()).empty());
  }

  TEST_CASE("complex and vector helpers") {
    CHECK(complex_json({1.0, -2.0}) == Json::array({1.0, -2.0}));
  }
}

TEST_SUITE("cli") {
  TEST_CASE("number lists") {
    CHECK(cli::parse_number_list("1,2,4,...,16") == std::vector<double>{1, 2, 4, 8, 16});
    CHECK(cli::parse_number_list("2,4,...,16") == std::vector<double>{2, 4, 8, 16});
    CHECK(cli::parse_number_list("2,3,...,6") == std::vector<double>{2, 3, 4, 5, 6});
    CHECK(cli::parse_number_list("1,2,3,...,5") == std::vector<double>{1, 2, 3, 4, 5});
    CHECK(cli::parse_number_list("1,2,...,5") == std::vector<double>{1, 2, 4, 5});
    CHECK(cli::parse_number_list("0.2,0.1,...,0.0125") == std::vector<double>{0.2, 0.1, 0.05, 0.025, 0.0125});
    CHECK_THROWS(cli::parse_number_list("1,2,...,0"));
    CHECK(cli::parse_number_list("0.2,0.1,...,0.025") == std::vector<double>{0.2, 0.1, 0.05, 0.025});
    CHECK(cli::parse_number_list("3, 7") == std::vector<double>{3, 7});
    CHECK(std::isinf(cli::parse_number_list("1,inf").back()));
    CHECK_THROWS(cli::parse_number_list("1,,2"));
    CHECK_THROWS(cli::parse_number_list("a"));
  }

  TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"frobnicate"}).code == cli::kUsage);
    CHECK(run({"approx-inverse"}).code == cli::kUsage);
    CHECK(run({"haar-join", "--group", "S3", "--y1", "(12)", "--y2", "(13)", "--format", "xml"}).code ==
          cli::kUsage);
    CHECK(run({"--help"}).code == cli::kPass);
  }

  TEST_CASE("malformed expressions show a caret") {
    const Run r = run({"approx-inverse", "--f", "2 -- u1"});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("2 -- u1\n   ^") != std::string::npos);
    CHECK(r.out.empty());
  }

  TEST_CASE("haar-join report") {
    const Json j = run_json({"haar-join", "--group", "S3", "--y1", "(12)", "--y2", "(13)"});
    CHECK(j["command"] == "haar-join");
    CHECK(j["status"] == "pass");
    CHECK(j["target"].size() == 6);
    for (const auto& p : j["measure"]) CHECK(std::abs(p.get<double>() - 1.0 / 6) < 1e-9);
    const Run csv = run({"haar-join", "--group", "Z/12", "--y1", "4", "--y2", "6", "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(csv.out.rfind("# measure\nelement,probability,in_target\n", 0) == 0);
    CHECK(run({"haar-join", "--group", "S3", "--y1", "(12)", "--y2", "(13)", "--maxiter", "2"}).code ==
          cli::kCheckFailed);
  }

  TEST_CASE("ideal-test verdicts") {
    const Json in = run_json({"ideal-test", "--f", "2 - u1", "--alpha", "2 - u1|1"});
    CHECK(in["tables"]["rows"][0]["verdict"] == "in-ideal");
    CHECK(in["tables"]["rows"][1]["verdict"] == "off-ideal-l2");
    const Json dv = run_json({"ideal-test", "--f", "1 - u1", "--alpha", "1"});
    CHECK(dv["tables"]["rows"][0]["verdict"] == "off-ideal-divergent");
    const Run inc = run({"ideal-test", "--f", "1 - u1", "--alpha", "1", "--k", "4,8"});
    CHECK(inc.code == cli::kInconclusive);
  }

  TEST_CASE("annihilator, witness and strong-witness") {
    CHECK(run({"annihilator", "--xi", "1/2", "--alpha", "1|2"}).code == cli::kPass);
    CHECK(run({"annihilator", "--xi", "1/2", "--alpha", "1|2", "--exact"}).code == cli::kPass);
    const Json w = run_json({"witness", "--f", "2 - u1", "--alpha", "0|2 - u1|2*u1 - u1^2|1|u1"});
    CHECK(w["status"] == "pass");
    const Json s = run_json({"strong-witness", "--xi", "1/2", "--alpha", "1|2", "--n", "0,1,2,4"});
    CHECK(s["status"] == "pass");
  }

  TEST_CASE("fourier-check battery row") {
    const Json j = run_json({"fourier-check", "--xi", "1/2", "--alpha", "1", "--samples", "20000", "--seed", "4"});
    const auto& row = j["tables"]["rows"][0];
    CHECK(row["analytic"][0].get<double>() == doctest::Approx(-1.0 / 3));
    CHECK(std::abs(row["empirical"][0].get<double>() + 1.0 / 3) < 0.02);
  }

  TEST_CASE("nonextend") {
    const Json j = run_json({"nonextend", "--nu", "uniformint(1)", "--p", "3", "--N", "10"});
    CHECK(j["status"] == "pass");
    const Run d = run({"nonextend", "--nu", "dirac", "--p", "3"});
    CHECK(d.code == cli::kUsage);
    CHECK(d.err.find("no witness") != std::string::npos);
  }

  TEST_CASE("maxmin and support-recovery") {
    const Json m = run_json({"maxmin", "--group", "(Z/2)^3", "--predicate", "supportin:(0,1,0);(0,0,1)&invariant:shift"});
    CHECK(m["status"] == "pass");
    const Json r = run_json({"support-recovery", "--group", "Z/6", "--mu", "1:0.5,3:0.5", "--random", "5"});
    CHECK(r["status"] == "pass");
    CHECK(r["tables"]["rows"].size() == 6);
  }

  TEST_CASE("reports go to a file when --out is given") {
    const std::string path = "cli_test_report.json";
    const Run r = run({"haar-join", "--group", "Z/6", "--y1", "2", "--y2", "3", "--out", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(Json::parse(ss.str())["status"] == "pass");
    std::remove(path.c_str());
  }

  TEST_CASE("reports do not depend on the thread count") {
    const std::vector<std::vector<std::string>> cmds{
        {"fourier-check", "--xi", "inverse:2 - u1", "--alpha", "1|u1", "--samples", "5000", "--seed", "9"},
        {"support-recovery", "--group", "S4", "--random", "50", "--seed", "3"},
        {"maxmin", "--group", "(Z/2)^3", "--predicate", "supportin:(0,1,0);(0,0,1)&invariant:shift", "--seed", "2"},
    };
    for (auto cmd : cmds) {
      auto one = cmd, eight = cmd;
      one.insert(one.end(), {"--threads", "1"});
      eight.insert(eight.end(), {"--threads", "8"});
      CHECK(run(one).out == run(eight).out);
    }
  }
}
