#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stubborn/cli.hpp"

using namespace stubborn;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::main_entry(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("stubborn_lab_test_" + name);
}

}  // namespace

TEST_CASE("eval prints closed-form values") {
  const auto r = invoke({"eval", "--strategy", "efsm", "--q", "0.3", "--gamma", "0.5"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("q_tilde=0.311281313\n") != std::string::npos);
  CHECK(r.out.find("delta=1.42857143\n") != std::string::npos);
  const auto lsm = invoke({"eval", "--strategy", "LSM", "--q", "0.3", "--gamma", "0.5"});
  CHECK(lsm.out.find("q_tilde=0.320293732\n") != std::string::npos);
  const auto hm = invoke({"eval", "--strategy", "hm", "--q", "0.3"});
  CHECK(hm.code == cli::kExitOk);
  CHECK(hm.out.find("q_tilde=0.3\n") != std::string::npos);
}

TEST_CASE("gamma = 0 needs the explicit limit flag") {
  CHECK(invoke({"eval", "--strategy", "efsm", "--q", "0.3", "--gamma", "0"}).code ==
        cli::kExitUsage);
  const auto r =
      invoke({"eval", "--strategy", "efsm", "--q", "0.3", "--gamma", "0", "--gamma-limit"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("q_tilde=0\n") != std::string::npos);
}

TEST_CASE("usage errors exit with 2 and a message on stderr") {
  const std::vector<std::vector<std::string>> bad = {
      {},
      {"frobnicate"},
      {"eval", "--strategy", "efsm", "--q", "0.6", "--gamma", "0.5"},
      {"eval", "--strategy", "efsm", "--q", "0.3"},
      {"eval", "--strategy", "xyz", "--q", "0.3", "--gamma", "0.5"},
      {"eval", "--strategy", "efsm", "--q", "abc", "--gamma", "0.5"},
      {"eval", "--strategy", "efsm", "--q", "0.3", "--gamma", "0.5", "--bogus"},
      {"simulate", "--strategy", "lsm", "--q", "0.3", "--gamma", "0.5", "--cycles", "10"},
      {"dist", "--kind", "second", "--p", "0.4"},
      {"map", "--q-steps", "0", "--output", "x.csv"},
      {"map", "--q-max", "0.7", "--output", "x.csv"},
  };
  for (const auto& args : bad) {
    const auto r = invoke(args);
    CAPTURE(args.size());
    CHECK(r.code == cli::kExitUsage);
    CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("help lists the parameter glossary") {
  const auto r = invoke({"--help"});
  CHECK(r.code == cli::kExitOk);
  for (const char* word : {"eval", "simulate", "validate", "dist", "map", "gamma", "tau0",
                           "STUBBORN_LAB_THREADS"}) {
    CHECK(r.out.find(word) != std::string::npos);
  }
}

TEST_CASE("validate passes at 4 sigma and fails at an absurd tolerance") {
  const auto ok = invoke({"validate", "--strategy", "lsm", "--q", "0.3", "--gamma", "0.5",
                          "--cycles", "200000", "--seed", "42", "--sigmas", "4"});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out.find("result=pass\n") != std::string::npos);
  const auto bad = invoke({"validate", "--strategy", "lsm", "--q", "0.3", "--gamma", "0.5",
                           "--cycles", "20000", "--seed", "42", "--sigmas", "0.0001"});
  CHECK(bad.code == cli::kExitValidationFailed);
  CHECK(bad.out.find("result=fail\n") != std::string::npos);
}

TEST_CASE("simulate output is byte-identical across runs and worker counts") {
  const std::vector<std::string> args = {"simulate", "--strategy", "efsm", "--q", "0.45",
                                         "--gamma", "0.25", "--cycles", "30000", "--seed", "77"};
  const auto parsed = cli::parse(args);
  REQUIRE(parsed.command.has_value());
  std::ostringstream a, b, c;
  cli::run(*parsed.command, a, {.workers = 1});
  cli::run(*parsed.command, b, {.workers = 1});
  cli::run(*parsed.command, c, {.workers = 4});
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());
  CHECK(a.str().find("max_events_per_cycle=") != std::string::npos);
}

TEST_CASE("dist prints the pmf table") {
  const auto r = invoke({"dist", "--kind", "second", "--p", "0.7", "--n-max", "3", "--cycles",
                         "10000", "--seed", "3"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("n,pmf,race_freq,race_std_error,sampled_freq\n0,0.7,") != std::string::npos);
  CHECK(r.out.find("\n2,0.0441,") != std::string::npos);
  CHECK(r.out.find("\n>3,") != std::string::npos);
}

TEST_CASE("map writes CSV and PPM files") {
  const auto csv = temp_path("map.csv");
  const auto r = invoke({"map", "--q-steps", "5", "--gamma-steps", "4", "--output", csv.string()});
  CHECK(r.code == cli::kExitOk);
  const std::string text = read_file(csv);
  CHECK(text.find("q,gamma,best,score_hm,score_sm,score_lsm,score_efsm\n") != std::string::npos);
  CHECK(r.out.find("cells=20\n") != std::string::npos);

  const auto ppm = temp_path("map.ppm");
  CHECK(invoke({"map", "--q-steps", "5", "--gamma-steps", "4", "--format", "ppm", "--output",
                ppm.string()})
            .code == cli::kExitOk);
  CHECK(read_file(ppm).size() == std::string("P6\n5 4\n255\n").size() + 60);

  const auto table = temp_path("sm_table.csv");
  {
    // A previous map's score_sm column serves as the table.
    const GridSpec grid{.q_steps = 5, .gamma_steps = 4};
    std::ofstream out(table);
    write_csv(compute_map(grid, SmTable{.scores = std::vector<double>(20, 2.0)}, 1), out);
  }
  const auto t = invoke({"map", "--q-steps", "5", "--gamma-steps", "4", "--sm-table",
                         table.string(), "--output", csv.string()});
  CHECK(t.code == cli::kExitOk);
  CHECK(t.out.find("region_sm=20\n") != std::string::npos);

  const auto mismatch = invoke({"map", "--q-steps", "4", "--gamma-steps", "4", "--sm-table",
                                table.string(), "--output", csv.string()});
  CHECK(mismatch.code == cli::kExitUsage);

  std::filesystem::remove(csv);
  std::filesystem::remove(ppm);
  std::filesystem::remove(table);
}

TEST_CASE("I/O failures exit with 4") {
  CHECK(invoke({"map", "--q-steps", "3", "--gamma-steps", "3", "--output",
                "/nonexistent-dir/map.csv"})
            .code == cli::kExitIo);
  CHECK(invoke({"map", "--q-steps", "3", "--gamma-steps", "3", "--sm-table",
                "/nonexistent-dir/table.csv", "--output", "x.csv"})
            .code == cli::kExitIo);
}
