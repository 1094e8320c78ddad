#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(PONCELET_LAB_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("poncelet_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerationValidatesInput) {
  EXPECT_EQ(run("gen --a2 4 --b2 1 --n 7 --winding 1 --out " + path("h.json")), 0);
  const auto doc = nlohmann::json::parse(slurp(path("h.json")));
  EXPECT_EQ(doc.at("metadata").at("n").get<int>(), 7);
  EXPECT_LT(doc.at("metadata").at("closure_error").get<double>(), 1e-10);
  EXPECT_EQ(run("gen --n 4"), 2);
  EXPECT_EQ(run("gen --a2 1 --b2 4"), 2);
  EXPECT_EQ(run("gen --bogus"), 2);
  EXPECT_EQ(run(""), 2);
}

TEST_F(Cli, VerifyExitCodes) {
  EXPECT_EQ(run("verify kasner --n 7 --k 3"), 0);
  EXPECT_EQ(run("verify kasner --n 7 --k 4"), 2);
  EXPECT_EQ(run("verify grid --n 9 --json " + path("grid.json")), 0);
  const auto rep = nlohmann::json::parse(slurp(path("grid.json")));
  EXPECT_EQ(rep.at("concentric").size(), 5u);
  EXPECT_EQ(rep.at("radial").size(), 9u);
  EXPECT_TRUE(rep.at("passed").get<bool>());
  for (const char* what : {"porism", "pencil", "incircles", "transport"}) {
    EXPECT_EQ(run(std::string("verify ") + what + " --n 9 --k 3"), 0) << what;
  }
  // a tolerance below the floating-point floor is a numerical failure, not an input error
  EXPECT_EQ(run("verify kasner --n 7 --k 3 --tol 1e-18"), 1);
}

TEST_F(Cli, VerifyReadsDocuments) {
  ASSERT_EQ(run("gen --kind pentagon --seed 4 --out " + path("p.json")), 0);
  EXPECT_EQ(run("verify kasner --in " + path("p.json")), 0);
  ASSERT_EQ(run("gen --n 9 --out " + path("g.json")), 0);
  EXPECT_EQ(run("verify grid --in " + path("g.json")), 0);
  EXPECT_EQ(run("verify grid --in " + path("missing.json")), 2);
}

TEST_F(Cli, RenderIsDeterministic) {
  ASSERT_EQ(run("gen --n 9 --out " + path("g.json")), 0);
  ASSERT_EQ(run("render --in " + path("g.json") + " --figure grid --out " + path("a.svg")), 0);
  ASSERT_EQ(run("render --in " + path("g.json") + " --figure grid --out " + path("b.svg")), 0);
  EXPECT_EQ(slurp(path("a.svg")), slurp(path("b.svg")));
  EXPECT_FALSE(slurp(path("a.svg")).empty());
  EXPECT_EQ(run("render --in " + path("g.json") + " --figure pentagon --out " + path("c.svg")), 2);
  EXPECT_EQ(run("render --in " + path("g.json") + " --figure nope"), 2);
}

TEST_F(Cli, GenRoundTripThroughFiles) {
  ASSERT_EQ(run("gen --n 7 --out " + path("a.json")), 0);
  ASSERT_EQ(run("gen --n 7 --out " + path("b.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, SelftestTooTightTolerance) { EXPECT_EQ(run("selftest --tol 1e-15"), 1); }

TEST_F(Cli, SelftestSeedDoesNotChangeOutcome) {
  EXPECT_EQ(run("selftest --seed 1"), 0);
  EXPECT_EQ(run("selftest --seed 2024"), 0);
}
