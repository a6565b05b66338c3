#include "symta/cli.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using symta::testing::data_path;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "symta");
  std::vector<const char *> argv;
  for (const std::string &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = symta::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string &name) { return data_path("fixtures/" + name); }

std::string temp_file(const std::string &name, const std::string &text) {
  auto path = std::filesystem::temp_directory_path() / ("symta_cli_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

} // namespace

TEST_CASE("analyze prints symbolic times") {
  Run r = run({"analyze", fixture("nor_walk.ckt"), fixture("nor_walk.sched")});
  CHECK(r.code == 0);
  CHECK(r.out.find("o1:1 falling -> d_a + t0") != std::string::npos);
  CHECK(r.out.find("d_eg") != std::string::npos);

  Run json = run({"analyze", fixture("nor_walk.ckt"), fixture("nor_walk.sched"), "--format", "json"});
  CHECK(json.code == 0);
  CHECK(json.out.find("\"events\"") != std::string::npos);

  Run explain =
      run({"analyze", fixture("nor_walk.ckt"), fixture("nor_walk.sched"), "--explain", "o1:1"});
  CHECK(explain.code == 0);
  CHECK(explain.out.find("cold case a: t_o1 = d_a + t0") != std::string::npos);
  CHECK(explain.out.find("cause: a1:1") != std::string::npos);

  Run wave =
      run({"analyze", fixture("nor_walk.ckt"), fixture("nor_walk.sched"), "--text-waveform"});
  CHECK(wave.code == 0);
  CHECK(wave.out.find("o1") != std::string::npos);
}

TEST_CASE("check exit codes") {
  Run ok = run({"check", fixture("nor_walk.ckt"), fixture("nor_walk.sched"), "--binding",
                fixture("nor_walk.bind")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("consistent") != std::string::npos);
  CHECK(ok.err.find("-3/2") != std::string::npos);

  std::string bind = temp_file("swapped.bind", "C1=1\nC2=1\nR_nA=1\nR_nB=1\nd_min=1\nd_a=1\n"
                                               "d_eg=1\nt0=0\nt1=6\nt2=5\nt3=7\n");
  Run bad = run({"check", fixture("nor_walk.ckt"), fixture("nor_walk.sched"), "--binding", bind});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("violated: a3:1") != std::string::npos);

  Run missing = run({"check", fixture("nor_walk.ckt"), "/no/such/file.sched", "--binding",
                     fixture("nor_walk.bind")});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("/no/such/file.sched") != std::string::npos);

  CHECK(run({"check", fixture("nor_walk.ckt"), fixture("nor_walk.sched")}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("sens, sweep and export-smt") {
  Run sens = run({"sens", fixture("nor_walk.ckt"), fixture("nor_walk.sched"), "--event", "o1:1",
                  "--wrt", "t0"});
  CHECK(sens.code == 0);
  CHECK(sens.out == "1\n");

  Run unknown = run({"sens", fixture("nor_walk.ckt"), fixture("nor_walk.sched"), "--event", "o1:1",
                     "--wrt", "nope"});
  CHECK(unknown.code == 2);

  Run sweep = run({"sweep", fixture("nor_walk.ckt"), fixture("nor_walk.sched"), "--event", "a3:1",
                   "--wrt", "T", "--grid", "0,1/2,1", "--quantity", "delay", "--binding",
                   fixture("nor_walk.bind")});
  CHECK(sweep.code == 0);
  CHECK(sweep.out == "value,time\n0,1/2\n1/2,1/4\n1,0\n");

  Run smt = run({"export-smt", fixture("nor_walk.ckt"), fixture("nor_walk.sched")});
  CHECK(smt.code == 0);
  CHECK(smt.out.rfind("(set-logic QF_NRA)", 0) == 0);
  CHECK(smt.out.find("(check-sat)") != std::string::npos);
}
