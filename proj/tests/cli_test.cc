#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

namespace phasekit {
namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string temp_file(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + "cli_" + name;
  std::ofstream(path) << text;
  return path;
}

CliResult run(const std::string& args) {
  const std::string out = ::testing::TempDir() + "cli_stdout.txt";
  const std::string err = ::testing::TempDir() + "cli_stderr.txt";
  const std::string cmd = std::string(PHASEKIT_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

const std::string kFirstOrder = R"({"num":[1],"den":[1,1]})";
const std::string kAllPassSquared = R"({"num":[1,-2,1],"den":[1,2,1]})";

TEST(CliTest, ClassifyExample) {
  const CliResult r = run("matrix-classify " + temp_file("e1.json", R"({"re":[[1,2],[0,1]],"im":[[0,0],[0,0]]})"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["class"], "semi-sectorial");
  EXPECT_EQ(j["zero_location"], "boundary");
  ASSERT_EQ(j["phases"].size(), 2u);
  EXPECT_NEAR(j["phases"][0].get<double>(), kPi / 2, 1e-10);
  EXPECT_NEAR(j["phases"][1].get<double>(), -kPi / 2, 1e-10);
}

TEST(CliTest, Takagi) {
  const CliResult r = run("takagi " + temp_file("d.json", R"({"re":[[1,0],[0,4]]})"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["sigma"][0].get<double>(), 4.0, 1e-12);
  EXPECT_NEAR(j["sigma"][1].get<double>(), 1.0, 1e-12);
}

TEST(CliTest, ErrorsGoToStderrWithExitOne) {
  const CliResult a = run("real-congruence " + temp_file("ns.json", R"({"re":[[1,2],[3,4]]})"));
  EXPECT_EQ(a.code, 1);
  EXPECT_TRUE(a.out.empty());
  EXPECT_EQ(json::parse(a.err)["error"], "NotSymmetric");

  const CliResult b = run("matrix-classify " + temp_file("bad.json", R"({"re":[[1)"));
  EXPECT_EQ(b.code, 1);
  EXPECT_EQ(json::parse(b.err)["error"], "ParseError");

  const CliResult c = run("decompose " + temp_file("k3.json", "[[1,4],[0,1]]"));
  EXPECT_EQ(c.code, 1);
  EXPECT_EQ(json::parse(c.err)["error"], "NotSemiSectorial");

  EXPECT_EQ(run("hinf /nonexistent/g.json").code, 1);
  EXPECT_EQ(run("no-such-command").code, 1);
}

TEST(CliTest, CertifyExitCodes) {
  const std::string g = temp_file("g.json", kFirstOrder);
  const CliResult ok = run("certify-phase " + g + " " + g);
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(json::parse(ok.out)["verdict"], "CertifiedStable");

  const std::string one = temp_file("one.json", R"({"num":[1],"den":[1]})");
  const CliResult bad = run("certify-phase " + temp_file("ap.json", kAllPassSquared) + " " + one);
  EXPECT_EQ(bad.code, 2) << bad.err;
  EXPECT_EQ(json::parse(bad.out)["verdict"], "ConditionViolated");

  const CliResult na = run("certify-phase " + temp_file("u.json", R"({"num":[1],"den":[1,-1]})") + " " + one);
  EXPECT_EQ(na.code, 3) << na.err;

  EXPECT_EQ(run("certify-gain " + g + " " + temp_file("half.json", R"({"num":[0.5],"den":[1]})")).code, 0);
}

TEST(CliTest, SynthesizeAllPassSquared) {
  const std::string env = temp_file("env.json", R"({"alpha":0,"beta":0})");
  const CliResult r = run("synthesize " + temp_file("ap.json", kAllPassSquared) + " --envelope " + env);
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["omega0"].get<double>(), 1.0, 1e-6);
  EXPECT_LE(j["sigma_min"].get<double>(), 1e-8);
}

TEST(CliTest, OutputFileAndDeterminism) {
  const std::string g = temp_file("g.json", kFirstOrder);
  const std::string o1 = ::testing::TempDir() + "cli_o1.json";
  const std::string o2 = ::testing::TempDir() + "cli_o2.json";
  ASSERT_EQ(run("-o " + o1 + " phase-response " + g).code, 0);
  ASSERT_EQ(run("-o " + o2 + " phase-response " + g).code, 0);
  EXPECT_FALSE(slurp(o1).empty());
  EXPECT_EQ(slurp(o1), slurp(o2));
}

}  // namespace
}  // namespace phasekit
