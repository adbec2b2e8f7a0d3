// End-to-end tests of the vclose binary.  CTest exports VCLOSE_CLI with the
// path of the built tool; every case shells out, captures stdout, and checks
// the JSON (or text) payload together with the exit code: 0 decisive,
// 2 unknown/not-found, 1 usage or input errors.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

using json = nlohmann::json;

int run_cli(const std::string& args, const std::string& input, std::string* out) {
  const char* exe = std::getenv("VCLOSE_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "VCLOSE_CLI must point at the vclose binary");

  static int counter = 0;
  std::filesystem::path tmp =
      std::filesystem::temp_directory_path() /
      ("vclose_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".in");
  {
    std::ofstream f(tmp);
    f << input;
  }
  std::string cmd = std::string("\"") + exe + "\" " + args + " < " + tmp.string() +
                    " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string collected;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) collected.append(buf, n);
  int status = ::pclose(pipe);
  std::filesystem::remove(tmp);
  if (out) *out = collected;
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

int run_cli(const std::string& args, std::string* out) { return run_cli(args, "", out); }

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("member prints a single json object") {
  std::string out;
  int code = run_cli("member --rank 2 --gens aa,bb --word abab", &out);
  CHECK(code == 0);
  CHECK(out == "{\"member\":false}\n");

  code = run_cli("member --rank 2 --gens aa,bb --word aabb", &out);
  CHECK(code == 0);
  CHECK(json::parse(out)["member"] == true);
}

TEST_CASE("generators can arrive on stdin") {
  std::string out;
  int code = run_cli("member --rank 2 --gens - --word aa", "aa bb\n", &out);
  CHECK(code == 0);
  CHECK(json::parse(out)["member"] == true);
}

TEST_CASE("fold formats") {
  std::string out;
  CHECK(run_cli("fold --rank 2 --gens aa --format text", &out) == 0);
  CHECK(out.find("vertices=2 rank=1") != std::string::npos);
  CHECK(out.find("aa") != std::string::npos);

  CHECK(run_cli("fold --rank 2 --gens aa --format dot", &out) == 0);
  CHECK(out.find("digraph") != std::string::npos);

  CHECK(run_cli("fold --rank 2 --gens ab,ba --format json", &out) == 0);
  json j = json::parse(out);
  CHECK(j["rank"] == 2);            // the ambient alphabet
  CHECK(j["subgroup_rank"] == 2);   // the subgroup itself
  CHECK(j["vertices"] == 3);
  CHECK(j["basis"] == json::array({"ab", "ba"}));
}

TEST_CASE("basis reports the reduced free basis") {
  std::string out;
  CHECK(run_cli("basis --rank 2 --gens ab,ba,abba", &out) == 0);
  json j = json::parse(out);
  CHECK(j["rank"] == 2);
  CHECK(j["basis"].size() == 2);
}

TEST_CASE("intersect computes the pullback") {
  std::string out;
  CHECK(run_cli("intersect --rank 2 --gens a,b --gens2 ab", &out) == 0);
  json j = json::parse(out);
  CHECK(j["subgroup_rank"] == 1);
  CHECK(j["basis"] == json::array({"ab"}));
}

TEST_CASE("fringe lists the folded quotients") {
  std::string out;
  CHECK(run_cli("fringe --rank 2 --gens aa", &out) == 0);
  json j = json::parse(out);
  CHECK(j["count"] == 2);
  CHECK(j["subgroups"].size() == 2);
}

TEST_CASE("abelianize verdicts") {
  std::string out;
  CHECK(run_cli("abelianize --rank 2 --gens aab,abb", &out) == 0);
  CHECK(json::parse(out)["verdict"] == "obstructed");
  CHECK(run_cli("abelianize --rank 2 --gens a,b", &out) == 0);
  CHECK(json::parse(out)["verdict"] == "passes");
}

TEST_CASE("is-retract golden verdicts") {
  std::string out;
  int code = run_cli("is-retract --rank 2 --gens abAB", &out);
  CHECK(code == 0);
  json no = json::parse(out);
  CHECK(no["verdict"] == "no");
  CHECK(no["certificate"]["type"] == "cyclic-non-primitive");
  CHECK(no["certificate"]["vector"] == json::array({0, 0}));

  code = run_cli("is-retract --rank 2 --gens ab", &out);
  CHECK(code == 0);
  json yes = json::parse(out);
  CHECK(yes["verdict"] == "yes");
  CHECK(yes["retraction"]["images"].size() == 2);

  code = run_cli("is-retract --rank 2 --gens ab,bbaa", &out);
  CHECK(code == 2);
  json unknown = json::parse(out);
  CHECK(unknown["verdict"] == "unknown");
  CHECK(unknown["bound"] == 4);
}

TEST_CASE("is-verbally-closed emits the falsifying equation") {
  std::string out;
  int code = run_cli("is-verbally-closed --rank 2 --gens aa", &out);
  CHECK(code == 0);
  json j = json::parse(out);
  CHECK(j["verdict"] == "no");
  CHECK(j["equation"]["lhs"] == "x1 x1");
  CHECK(j["equation"]["rhs"] == "aa");
  CHECK(j["equation"]["bound"] == 4);
}

TEST_CASE("vcl golden outputs") {
  std::string out;
  int code = run_cli("vcl --rank 2 --gens aa", &out);
  CHECK(code == 0);
  json j = json::parse(out);
  CHECK(j["closure"] == json::array({"a"}));
  CHECK(j["status"] == "exact");
  CHECK(j["rank"] == 1);
  CHECK(j["undecided"] == 0);

  code = run_cli("vcl --rank 2 --gens ab,bbaa", &out);
  CHECK(code == 2);
  json cond = json::parse(out);
  CHECK(cond["status"] == "conditional");
  CHECK(cond["undecided"].get<int>() >= 1);
  CHECK(cond["rank"].get<int>() <= 2);
}

TEST_CASE("solve statuses and exit codes") {
  std::string found_sys = R"({"vars":1,"eqs":[{"lhs":"x1 x1","rhs":"aa"}]})";
  std::string out;
  int code = run_cli("solve --rank 2 --system - --bound 2", found_sys, &out);
  CHECK(code == 0);
  json found = json::parse(out);
  CHECK(found["status"] == "found");
  CHECK(found["assignment"] == json::array({"a"}));

  code = run_cli("solve --rank 2 --system - --gens aa --bound 6", found_sys, &out);
  CHECK(code == 2);
  CHECK(json::parse(out)["status"] == "not-found-up-to-bound");

  std::string hard_sys = R"({"vars":1,"eqs":[{"lhs":"x1 x1","rhs":"ab"}]})";
  code = run_cli("solve --rank 2 --system - --bound 8 --budget 10", hard_sys, &out);
  CHECK(code == 2);
  json capped = json::parse(out);
  CHECK(capped["status"] == "budget-exceeded");
  CHECK(capped["states"].get<long long>() == 11);
}

TEST_CASE("nilpotent collect golden output") {
  std::string out;
  int code = run_cli("nilpotent collect --rank 2 --class 2 --word abAB", &out);
  CHECK(code == 0);
  json j = json::parse(out);
  CHECK(j["basis"] == "N(2,2)");
  CHECK(j["exps"] == json::array({0, 0, -1}));
  CHECK(j["names"] == json::array({"a", "b", "[b,a]"}));
}

TEST_CASE("nilpotent width exits") {
  std::string out;
  int code =
      run_cli("nilpotent width --rank 2 --class 2 --exps 0,0,5 --k 1 --coord-bound 5", &out);
  CHECK(code == 0);
  json j = json::parse(out);
  CHECK(j["representable"] == true);
  CHECK(j["witness"].size() == 1);

  code =
      run_cli("nilpotent width --rank 2 --class 2 --exps 0,0,5 --k 1 --coord-bound 1", &out);
  CHECK(code == 2);
  CHECK(json::parse(out)["representable"] == false);
}

TEST_CASE("bad input exits with code one and no output") {
  std::string out;
  CHECK(run_cli("member --rank 2 --gens a --word az", &out) == 1);
  CHECK(out.empty());
  CHECK(run_cli("fold --rank 2", &out) == 1);       // missing --gens
  CHECK(run_cli("no-such-command", &out) == 1);
  CHECK(run_cli("solve --rank 2 --system @/no/such/file.json", &out) == 1);
}

TEST_CASE("help exits cleanly") {
  std::string out;
  CHECK(run_cli("--help", &out) == 0);
  CHECK(out.find("fold") != std::string::npos);
  CHECK(out.find("vcl") != std::string::npos);
}

TEST_CASE("output bytes are stable across runs") {
  std::string a, b;
  CHECK(run_cli("vcl --rank 2 --gens aa", &a) == 0);
  CHECK(run_cli("vcl --rank 2 --gens aa", &b) == 0);
  CHECK(a == b);
  CHECK(run_cli("fold --rank 2 --gens ab,ba --format json", &a) == 0);
  CHECK(run_cli("fold --rank 2 --gens ab,ba --format json", &b) == 0);
  CHECK(a == b);
}

TEST_SUITE_END();
