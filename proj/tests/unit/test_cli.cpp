#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sinrflow/cli.hpp"

using namespace sinrflow;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "sinrflow");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sinrflow_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

const char* kOneLink = R"({
  "params": {"alpha": 2, "beta": 1, "noise": 1e-6, "epsilon": 0.5},
  "power_mode": "given",
  "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 0}],
  "links": [{"id": 0, "tx": 0, "rx": 1, "power": 1}],
  "requests": [{"source": 0, "sink": 1, "demand": 1}]
})";

const char* kChain = R"({
  "params": {"alpha": 2, "beta": 1, "noise": 1e-6, "epsilon": 0.5},
  "power_mode": "uniform",
  "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 0}, {"id": 2, "x": 2, "y": 0}],
  "links": [{"id": 0, "tx": 0, "rx": 1}, {"id": 1, "tx": 1, "rx": 2}],
  "requests": [{"source": 0, "sink": 2, "demand": 1}]
})";

}  // namespace

TEST_F(CliTest, SolveThenVerifyOneLink) {
  const std::string in = write("one.json", kOneLink);
  const CliRun solve = run({"solve", "--in", in, "--out", path("r.json")});
  ASSERT_EQ(solve.code, 0) << solve.err;
  const ResultFile r = parse_result(read_file(path("r.json")));
  EXPECT_DOUBLE_EQ(r.throughput, 1.0);
  EXPECT_FALSE(r.diagnostics.runtime_seconds.has_value());

  const CliRun verify = run({"verify", "--instance", in, "--result", path("r.json")});
  EXPECT_EQ(verify.code, 0);
  EXPECT_NE(verify.out.find("\nPASS\n"), std::string::npos) << verify.out;
}

TEST_F(CliTest, SolveOptions) {
  const std::string in = write("one.json", kOneLink);
  const CliRun r = run({"solve", "--in", in, "--out", path("r.json"), "--timing", "--dump-lp", path("lp.txt"),
                     "--objective", "maxmin"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(parse_result(read_file(path("r.json"))).diagnostics.runtime_seconds.has_value());
  EXPECT_EQ(read_file(path("lp.txt")).rfind("maximize: 1 rho\n", 0), 0u);
  EXPECT_EQ(run({"solve", "--in", in, "--out", path("r.json"), "--objective", "best"}).code, 1);
}

TEST_F(CliTest, SolveErrors) {
  const CliRun malformed = run({"solve", "--in", write("bad.json", "{\n  \"params\": [\n"), "--out", path("r.json")});
  EXPECT_EQ(malformed.code, 1);
  EXPECT_NE(malformed.err.find("line 3, column"), std::string::npos) << malformed.err;
  EXPECT_EQ(run({"solve", "--in", path("missing.json"), "--out", path("r.json")}).code, 1);

  std::string backwards = kOneLink;
  backwards.replace(backwards.find(R"("source": 0, "sink": 1)"), 22, R"("source": 1, "sink": 0)");
  EXPECT_EQ(run({"solve", "--in", write("back.json", backwards), "--out", path("r.json")}).code, 2);
  EXPECT_FALSE(fs::exists(path("r.json")));

  const std::string far = R"({
  "params": {"alpha": 2, "beta": 1, "noise": 1e-6, "epsilon": 0.5},
  "power_mode": "limited", "power_range": {"min": 1, "max": 2},
  "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1000, "y": 0}],
  "links": [{"id": 0, "tx": 0, "rx": 1}],
  "requests": [{"source": 0, "sink": 1, "demand": 1}]
})";
  EXPECT_EQ(run({"solve", "--in", write("far.json", far), "--out", path("r.json")}).code, 2);
}

TEST_F(CliTest, VerifyNamesCorruptedSlot) {
  const std::string in = write("chain.json", kChain);
  ASSERT_EQ(run({"solve", "--in", in, "--out", path("r.json")}).code, 0);
  ResultFile r = parse_result(read_file(path("r.json")));
  ASSERT_GT(r.period, 1u);
  // Slot 1 gets both links; the relay then transmits into its own receiver.
  r.slots[1] = {0, 1};
  write("bad.json", serialize(r));
  const CliRun v = run({"verify", "--instance", in, "--result", path("bad.json")});
  EXPECT_EQ(v.code, 3);
  EXPECT_NE(v.out.find("sinr_feasible   FAIL"), std::string::npos) << v.out;
  EXPECT_NE(v.out.find("slot 1"), std::string::npos) << v.out;
  EXPECT_NE(v.out.find("\nFAIL\n"), std::string::npos);
}

TEST_F(CliTest, VerifyRejectsInflatedFlow) {
  const std::string in = write("chain.json", kChain);
  ASSERT_EQ(run({"solve", "--in", in, "--out", path("r.json")}).code, 0);
  ResultFile r = parse_result(read_file(path("r.json")));
  for (auto& values : r.flow)
    for (auto& [id, v] : values) v *= 10.0;
  r.throughput *= 10.0;
  write("big.json", serialize(r));
  const CliRun v = run({"verify", "--instance", in, "--result", path("big.json")});
  EXPECT_EQ(v.code, 3);
  EXPECT_NE(v.out.find("support         FAIL"), std::string::npos) << v.out;
  EXPECT_EQ(run({"verify", "--instance", in, "--result", path("none.json")}).code, 1);
}

TEST_F(CliTest, OracleExamplesAndCompare) {
  const std::string one = write("one.json", kOneLink);
  const CliRun o = run({"oracle", "--in", one});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, "optimum 1\nfeasible_sets 2\n");

  const std::string chain = write("chain.json", kChain);
  ASSERT_EQ(run({"solve", "--in", chain, "--out", path("r.json")}).code, 0);
  const CliRun cmp = run({"oracle", "--in", chain, "--compare", path("r.json")});
  ASSERT_EQ(cmp.code, 0) << cmp.err;
  const double ratio = std::stod(cmp.out.substr(cmp.out.find("ratio ") + 6));
  EXPECT_GT(ratio, 0.0);
  EXPECT_LE(ratio, 1.0 + 1e-9);
  EXPECT_EQ(run({"oracle", "--in", chain, "--compare", path("r.json"), "--objective", "maxmin"}).code, 1);
}

TEST_F(CliTest, OracleTooLarge) {
  ASSERT_EQ(run({"generate", "--nodes", "10", "--links", "17", "--requests", "1", "--out", path("big.json")}).code, 0);
  EXPECT_EQ(run({"oracle", "--in", path("big.json")}).code, 4);
}

TEST_F(CliTest, GenerateIsDeterministic) {
  for (const char* name : {"a.json", "b.json"})
    ASSERT_EQ(run({"generate", "--nodes", "2", "--links", "1", "--requests", "1", "--seed", "7", "--out", path(name)})
                  .code,
              0);
  EXPECT_EQ(read_file(path("a.json")), read_file(path("b.json")));
  const InstanceFile f = parse_instance(read_file(path("a.json")));
  EXPECT_EQ(f.nodes.size(), 2u);

  ASSERT_EQ(run({"generate", "--nodes", "6", "--links", "8", "--requests", "2", "--mode", "limited", "--power-min",
                 "1", "--power-max", "8", "--out", path("lim.json")})
                .code,
            0);
  EXPECT_EQ(*parse_instance(read_file(path("lim.json"))).power_range, (PowerRange{1.0, 8.0}));
  EXPECT_EQ(run({"generate", "--nodes", "6", "--links", "8", "--out", path("x.json")}).code, 1);
  EXPECT_EQ(run({"generate", "--nodes", "6", "--links", "8", "--requests", "1", "--mode", "odd", "--out",
                 path("x.json")})
                .code,
            1);
}

TEST_F(CliTest, ReportRows) {
  const CliRun empty = run({"report", "--results", path("*.json")});
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(empty.out, std::string(kReportHeader) + "\n");

  const std::string in = write("one.json", kOneLink);
  fs::create_directories(path("res"));
  ASSERT_EQ(run({"solve", "--in", in, "--out", path("res/a.json")}).code, 0);
  ASSERT_EQ(run({"solve", "--in", in, "--out", path("res/b.json"), "--objective", "maxmin"}).code, 0);
  const CliRun csv = run({"report", "--results", path("res/*.json")});
  ASSERT_EQ(csv.code, 0);
  std::istringstream lines(csv.out);
  std::vector<std::string> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], path("res/a.json") + ",maxth,2,1,1,1,1,1,1,4,");
  EXPECT_NE(rows[2].find(",maxmin,"), std::string::npos);

  ASSERT_EQ(run({"report", "--results", path("res/*.json"), "--format", "table", "--out", path("t.txt")}).code, 0);
  EXPECT_EQ(read_file(path("t.txt")).rfind("file", 0), 0u);
  EXPECT_EQ(run({"report", "--results", path("res/*.json"), "--format", "xml"}).code, 1);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"solve"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  const CliRun help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("solve"), std::string::npos);
}

TEST_F(CliTest, BinaryRoundTripOnSamples) {
  std::size_t samples = 0;
  for (const auto& entry : fs::directory_iterator(SINRFLOW_SAMPLES_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++samples;
    const std::string out = path(entry.path().stem().string() + ".result.json");
    const std::string cli = SINRFLOW_CLI_PATH;
    const std::string quiet = " > /dev/null 2>&1";
    ASSERT_EQ(std::system((cli + " solve --in " + entry.path().string() + " --out " + out + quiet).c_str()), 0)
        << entry.path();
    EXPECT_EQ(std::system((cli + " verify --instance " + entry.path().string() + " --result " + out + quiet).c_str()),
              0)
        << entry.path();
  }
  EXPECT_GE(samples, 3u);
}
