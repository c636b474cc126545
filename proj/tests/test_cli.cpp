#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "nanolab/energy.hpp"
#include "nanolab/io.hpp"

using namespace nanolab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

fs::path scratch() {
  const auto d = fs::temp_directory_path() / ("nanolab_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

Run run(const std::string& args, const std::string& env = "") {
  const auto d = scratch();
  const auto out = d / "stdout", err = d / "stderr";
  const std::string cmd = env + " " NANOLAB_CLI " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out.string());
  r.err = read_file(err.string());
  return r;
}

}  // namespace

TEST(Cli, GenerateThenEnergyMatchesFamilyEnergy) {
  const auto d = scratch();
  const auto t = (d / "t.pxyz").string();
  ASSERT_EQ(run("generate --ell 8 --m 2 --mu 3 --lambda1 1 --lambda2 1 -o " + t).code, 0);
  const auto e = run("energy --in " + t + " --pots soft");
  ASSERT_EQ(e.code, 0) << e.err;
  const auto j = nlohmann::json::parse(e.out);
  const double want = family_energy(solve_family(8, 3.0, 1.0, 1.0), 2, default_soft());
  EXPECT_NEAR(j["energy"].get<double>(), want, 1e-9 * 64);
  EXPECT_EQ(j["schema_version"].get<int>(), 1);
  EXPECT_EQ(j["max_degree"].get<int>(), 3);
}

TEST(Cli, MalformedPxyzReportsLine) {
  const auto d = scratch();
  const auto bad = (d / "bad.pxyz").string();
  atomic_write(bad, "2 3.0\n1 2 3\n1 2\n");
  const auto r = run("energy --in " + bad);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
  const auto r = run("frobnicate");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Subcommands"), std::string::npos) << r.err;
  EXPECT_EQ(run("generate --ell 8").code, 1);
  EXPECT_EQ(run("generate --ell 8 --m 2 --mu 5 --lambda1 1 --lambda2 1").code, 1);
}

TEST(Cli, VerifyAllQuickIsByteIdentical) {
  const auto d = scratch();
  const auto a = (d / "a.json").string(), b = (d / "b.json").string(), c = (d / "c.json").string();
  const auto ra = run("verify-all --quick --seed 7 -o " + a, "NANOLAB_THREADS=1");
  EXPECT_EQ(ra.code, 0) << ra.err;
  EXPECT_EQ(run("verify-all --quick --seed 7 -o " + b, "NANOLAB_THREADS=1").code, 0);
  EXPECT_EQ(run("verify-all --quick --seed 7 -o " + c, "NANOLAB_THREADS=4").code, 0);
  EXPECT_EQ(read_file(a), read_file(b));
  EXPECT_EQ(read_file(a), read_file(c));
  EXPECT_NE(read_file(a).find("\"schema_version\": 1"), std::string::npos);
}

TEST(Cli, StabilityOutputIndependentOfThreads) {
  const std::string args = "stability --ell 8 --m 2 --count 64 --seed 3 --eta 1e-3";
  const auto one = run(args, "NANOLAB_THREADS=1"), four = run(args, "NANOLAB_THREADS=4");
  EXPECT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
}
