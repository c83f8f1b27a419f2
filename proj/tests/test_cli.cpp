#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dhsys/cli.hpp"
#include "dhsys/io.hpp"

using namespace dhsys;

namespace {

const std::string data_dir = DHSYS_DATA_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dhsys_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("validate the shipped P1 instance") {
  Run r = cli({"validate", data_dir + "/p1.dsys"});
  CHECK(r.code == 0);
  CHECK(r.out.find("result: PASS") != std::string::npos);
}

TEST_CASE("non-nilpotent operator fails axiom (a)") {
  Run r = cli({"validate", data_dir + "/non-nilpotent.dsys"});
  CHECK(r.code == 1);
  CHECK(r.out.find("(a) FAIL") != std::string::npos);
  CHECK(r.out.find("not nilpotent") != std::string::npos);
}

TEST_CASE("tau of P1 starts with the scalar weight-1 grading") {
  Run r = cli({"compute", "tau", data_dir + "/p1.dsys"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("tau(0) 1: (1, 0) (0, 1)\n", 0) == 0);
}

TEST_CASE("malformed inputs exit 2") {
  for (const auto& entry : std::filesystem::directory_iterator(data_dir + "/malformed")) {
    INFO(entry.path().string());
    for (const char* cmd : {"validate", "verify"}) {
      std::vector<std::string> args{cmd};
      if (std::string(cmd) == "verify") args.push_back("deligne");
      args.push_back(entry.path().string());
      Run r = cli(args);
      CHECK(r.code == 2);
      CHECK(r.err.find(entry.path().string()) != std::string::npos);
    }
  }
  CHECK(cli({"validate", data_dir + "/missing.dsys"}).code == 2);
  CHECK(cli({"compute", "everything", data_dir + "/p1.dsys"}).code == 2);
  CHECK(cli({"verify", "nope", data_dir + "/p1.dsys"}).code == 2);
  CHECK(cli({"campaign", "rmf", "--t-grid", "2,x"}).code == 2);
  CHECK(cli({"validate", data_dir + "/p1.dsys", "--zeta-provider", "magic"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("reports are byte-identical across runs") {
  for (const auto& entry : std::filesystem::directory_iterator(data_dir)) {
    if (entry.path().extension() != ".dsys") continue;
    Run a = cli({"validate", entry.path().string(), "--zeta-provider", "domain"});
    Run b = cli({"validate", entry.path().string(), "--zeta-provider", "domain"});
    CHECK(a.out == b.out);
    CHECK(a.code == b.code);
  }
}

TEST_CASE("generate, write and validate") {
  const std::string path = temp_path("gen.dsys");
  for (const char* kind : {"deligne", "dh"}) {
    for (const char* mode : {"none", "transport", "recombine"}) {
      Run g = cli({"generate", "--kind", kind, "--n", "2", "--max-dim", "6", "--seed", "3", "--mode", mode, "-o", path});
      REQUIRE(g.code == 0);
      Run v = cli({"validate", path, "--zeta-provider", "domain"});
      INFO(slurp(path));
      CHECK(v.code == 0);
      Run again = cli({"generate", "--kind", kind, "--n", "2", "--max-dim", "6", "--seed", "3", "--mode", mode});
      CHECK(again.out == slurp(path));
    }
  }
  Run m = cli({"generate", "--kind", "dh", "--morphism", "--seed", "2", "--max-dim", "6", "-o", path});
  REQUIRE(m.code == 0);
  CHECK(cli({"validate", path}).code == 0);
  Run t = cli({"verify", "abelian", path});
  CHECK(t.code == 0);
  CHECK(t.out.find("result: PASS") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("compute artifacts") {
  const std::string path = temp_path("orbit.dsys");
  REQUIRE(cli({"compute", "orbit", data_dir + "/p1.dsys", "-o", path}).code == 0);
  InstanceFile orbit = read_instance(path);
  InstanceFile p1 = read_instance(data_dir + "/p1.dsys");
  CHECK(orbit.dh.f == p1.dh.f);
  CHECK(orbit.dh.n[0] == p1.dh.n[0]);
  std::filesystem::remove(path);

  for (const char* what : {"tower", "tau", "nhat", "fhat", "decompose"}) CHECK(cli({"compute", what, data_dir + "/p1.dsys"}).code == 0);
  CHECK(cli({"compute", "fhat", data_dir + "/p1-deligne.dsys"}).code == 2);
  CHECK(cli({"compute", "tau", data_dir + "/non-nilpotent.dsys"}).code == 1);
  CHECK(cli({"compute", "tau", data_dir + "/hodge-tate.dsys"}).code == 1);
  CHECK(cli({"compute", "tau", data_dir + "/hodge-tate.dsys", "--zeta-provider", "table:" + data_dir + "/domain.zeta"}).code == 0);
}

TEST_CASE("verify on the shipped instances") {
  for (const char* thm : {"rmf", "deligne", "collapse", "recombination", "imhm", "convergence", "fhat", "splitting", "classification", "sl2"}) {
    INFO(thm);
    Run r = cli({"verify", thm, data_dir + "/p1.dsys"});
    CHECK(r.code == 0);
    CHECK(r.out.find("result: PASS") != std::string::npos);
  }
  CHECK(cli({"verify", "deligne", data_dir + "/non-nilpotent.dsys"}).code == 1);
  CHECK(cli({"verify", "abelian", data_dir + "/p1.dsys"}).code == 2);
}

TEST_CASE("campaign writes a report and a CSV") {
  const std::string report = temp_path("report.txt"), csv = temp_path("traces.csv");
  Run r = cli({"campaign", "convergence", "--count", "3", "--max-dim", "4", "--zeta-provider", "domain", "-o", report, "--csv", csv});
  CHECK(r.code == 0);
  CHECK(slurp(report).find("result: PASS") != std::string::npos);
  CHECK(slurp(csv).rfind("seed,quantity,t,squared_distance\n", 0) == 0);
  Run again = cli({"campaign", "convergence", "--count", "3", "--max-dim", "4", "--zeta-provider", "domain", "--jobs", "2"});
  CHECK(again.out == slurp(report));
  std::filesystem::remove(report);
  std::filesystem::remove(csv);
}
