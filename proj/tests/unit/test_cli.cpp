#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>

#include "aim/attribution.hpp"
#include "aim/dataset.hpp"
#include "aim/report_io.hpp"
#include "commands.hpp"

namespace aim {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "aim");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("aim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { io::write_file_atomic(dir_ / name, text); }

  std::string synth(const std::string& kind, int seed = 1) {
    const auto out = path(kind + std::to_string(seed));
    const auto r = run_cli({"synth", "--out", out, "--kind", kind, "--seed", std::to_string(seed)});
    EXPECT_EQ(r.code, 0) << r.err;
    return out;
  }

  fs::path dir_;
};

const char* kLineSchema = "numerical = x\nlabel = y\ngroup = s\n";

TEST_F(CliTest, HelpAndUsage) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({}).code, cli::kInputError);
  EXPECT_EQ(run_cli({"attribute"}).code, cli::kInputError);
  EXPECT_EQ(run_cli({"mitigate", "--input", "a", "--schema", "b", "--out", "c", "--strategy", "zap"}).code,
            cli::kInputError);
}

TEST_F(CliTest, SynthWritesThreeFiles) {
  const auto out = synth("group");
  EXPECT_TRUE(fs::exists(fs::path(out) / "data.csv"));
  EXPECT_TRUE(fs::exists(fs::path(out) / "schema.txt"));
  EXPECT_TRUE(fs::exists(fs::path(out) / "truth.txt"));
  const auto again = path("again");
  run_cli({"synth", "--out", again, "--kind", "group", "--seed", "1"});
  EXPECT_EQ(io::read_file(fs::path(out) / "data.csv"), io::read_file(fs::path(again) / "data.csv"));
}

TEST_F(CliTest, AttributeDetectsSyntheticBias) {
  const auto data = synth("group");
  const auto out = path("report");
  const auto r = run_cli({"attribute", "--input", data + "/data.csv", "--schema", data + "/schema.txt", "--out", out,
                          "--truth", data + "/truth.txt"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find("detection_accuracy ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GE(std::stod(r.out.substr(pos + 19)), 0.95);
  const auto report = io::parse_bias_report(io::read_file(fs::path(out) / "bias_report.jsonl"));
  EXPECT_EQ(report.records.size(), 1000u);
}

TEST_F(CliTest, AttributeDisconnectedWarns) {
  write("d.csv", "x,y,s\n0.0,0,0\n0.05,1,0\n0.9,1,1\n1.0,0,1\n");
  write("schema.txt", kLineSchema);
  const auto r = run_cli({"attribute", "--input", path("d.csv"), "--schema", path("schema.txt"), "--out", path("o")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning:"), std::string::npos);
  const auto report = io::parse_bias_report(io::read_file(path("o") + "/bias_report.jsonl"));
  for (const auto& rec : report.records) EXPECT_FALSE(rec.bias.has_value());
}

TEST_F(CliTest, BadSchemaPathCreatesNothing) {
  write("d.csv", "x,y,s\n0.0,0,0\n");
  const auto r = run_cli({"attribute", "--input", path("d.csv"), "--schema", path("missing.txt"), "--out", path("o")});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_FALSE(fs::exists(path("o")));
  write("schema.txt", "numerical = nope\nlabel = y\ngroup = s\n");
  EXPECT_EQ(run_cli({"attribute", "--input", path("d.csv"), "--schema", path("schema.txt"), "--out", path("o")}).code,
            cli::kInputError);
  EXPECT_FALSE(fs::exists(path("o")));
}

TEST_F(CliTest, AttributeNonConvergenceExitsTwo) {
  write("d.csv", "x,y,s\n0.0,0,0\n0.05,1,1\n0.1,1,0\n");
  write("schema.txt", kLineSchema);
  const auto r = run_cli({"attribute", "--input", path("d.csv"), "--schema", path("schema.txt"), "--out", path("o"),
                          "--tr", "0.5", "--damping", "0.9999", "--solver", "iterative"});
  EXPECT_EQ(r.code, cli::kNotConverged) << r.err;
  EXPECT_FALSE(fs::exists(path("o") + "/bias_report.jsonl"));
}

// Query 0 (s=0, y=0) at x=0.5; four comparable group-1 rows, three approved.
const char* kExplainCsv =
    "x,y,s\n"
    "0.50,0,0\n"
    "0.48,1,1\n"
    "0.52,1,1\n"
    "0.55,1,1\n"
    "0.45,0,1\n"
    "0.00,1,0\n"
    "1.00,1,1\n";

std::vector<std::string> table_rows(const std::string& out) {
  std::vector<std::string> rows;
  std::stringstream ss(out);
  std::string line;
  while (std::getline(ss, line)) rows.push_back(line);
  return rows;
}

TEST_F(CliTest, ExplainPrintsContributionsInOrder) {
  write("d.csv", kExplainCsv);
  write("schema.txt", kLineSchema);
  const auto r = run_cli({"explain", "--input", path("d.csv"), "--schema", path("schema.txt"), "--index", "0",
                          "--topk", "10", "--tr", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;

  // Recompute the contributions directly from Q and c.
  const auto schema = parse_schema(kLineSchema);
  const auto raw = parse_dataset(kExplainCsv, schema);
  const auto d = apply_normalization(raw, fit_normalization(raw));
  AttributionOptions opts;
  const auto q = compute_similarity(d, opts);
  const auto c = estimate_credibility(d, q);
  double denom = 0.0;
  std::vector<std::pair<double, std::size_t>> expected;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d.group(j) != d.group(0)) denom += c.weight(j) * q(0, j);
  }
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d.group(j) == d.group(0) || c.weight(j) * q(0, j) <= 0.0) continue;
    const double num = d.label(j) != d.label(0) ? c.weight(j) * q(0, j) : 0.0;
    expected.emplace_back(num / denom, j);
  }
  std::stable_sort(expected.begin(), expected.end(), [](auto a, auto b) { return a.first > b.first; });

  const auto rows = table_rows(r.out);
  ASSERT_EQ(rows.size(), 2 + expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    std::stringstream ss(rows[2 + k]);
    std::size_t rank = 0, index = 0;
    std::string contribution;
    ss >> rank >> index >> contribution;
    EXPECT_EQ(rank, k + 1);
    EXPECT_EQ(index, expected[k].second);
    EXPECT_EQ(contribution, io::decimal(expected[k].first));
  }
  EXPECT_EQ(expected.back().first, 0.0);
}

TEST_F(CliTest, ExplainZeroKAndUndefined) {
  write("d.csv", kExplainCsv);
  write("schema.txt", kLineSchema);
  const std::vector<std::string> base{"explain", "--input", path("d.csv"), "--schema", path("schema.txt")};
  auto args = base;
  args.insert(args.end(), {"--index", "0", "--topk", "0"});
  const auto header = run_cli(args);
  EXPECT_EQ(header.code, 0);
  EXPECT_EQ(table_rows(header.out).size(), 2u);

  args = base;
  args.insert(args.end(), {"--index", "5"});
  const auto undefined = run_cli(args);
  EXPECT_EQ(undefined.code, cli::kUndefinedBias);
  EXPECT_NE(undefined.err.find("no comparable other-group evidence"), std::string::npos);

  args = base;
  args.insert(args.end(), {"--index", "70"});
  EXPECT_EQ(run_cli(args).code, cli::kInputError);
}

TEST_F(CliTest, MitigateZeroBudgetIsIdentity) {
  const auto data = synth("group", 2);
  const auto out = path("m");
  const auto r = run_cli({"mitigate", "--input", data + "/data.csv", "--schema", data + "/schema.txt", "--out", out,
                          "--budget", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_file(out + "/edited.csv"), io::read_file(data + "/data.csv"));
  const auto lines = table_rows(io::read_file(out + "/evaluation.jsonl"));
  ASSERT_EQ(lines.size(), 2u);
  const auto strip = [](const std::string& s) { return s.substr(s.find(',')); };
  EXPECT_EQ(strip(lines[0]), strip(lines[1]));
}

TEST_F(CliTest, MitigateRemovalBeatsRandomControl) {
  const auto data = synth("group", 3);
  const auto out = path("m");
  const auto r = run_cli({"mitigate", "--input", data + "/data.csv", "--schema", data + "/schema.txt", "--out", out,
                          "--budget", "100", "--control", "random", "--truth", data + "/truth.txt", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::map<std::string, std::pair<double, double>> dp_eo;
  for (const auto& row : table_rows(r.out)) {
    std::stringstream ss(row);
    std::string stage, acc, roc, ap;
    double dp = 0, eo = 0;
    if (ss >> stage >> acc >> roc >> ap >> dp >> eo) dp_eo[stage] = {dp, eo};
  }
  ASSERT_TRUE(dp_eo.count("after") && dp_eo.count("control_random"));
  EXPECT_LT(dp_eo["after"].first, dp_eo["control_random"].first);
  EXPECT_LT(dp_eo["after"].second, dp_eo["control_random"].second);
  const auto plan = io::read_file(out + "/removal_plan.txt");
  EXPECT_EQ(std::count(plan.begin(), plan.end(), '\n'), 101);
}

TEST_F(CliTest, MitigateAugmentationDeterministic) {
  const auto data = synth("individual", 4);
  std::string first;
  for (const auto* name : {"a", "b"}) {
    const auto out = path(name);
    const auto r = run_cli({"mitigate", "--input", data + "/data.csv", "--schema", data + "/schema.txt", "--out", out,
                            "--budget", "40", "--strategy", "aug", "--seed", "9"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto plan = io::read_file(out + "/augmentation_plan.csv");
    EXPECT_EQ(std::count(plan.begin(), plan.end(), '\n'), 41);
    if (first.empty()) first = plan;
    else EXPECT_EQ(plan, first);
    const auto edited = io::read_file(out + "/edited.csv");
    EXPECT_EQ(std::count(edited.begin(), edited.end(), '\n'), 1 + 1000 + 40);
  }
  EXPECT_EQ(run_cli({"mitigate", "--input", data + "/data.csv", "--schema", data + "/schema.txt", "--out",
                     path("c"), "--strategy", "aug", "--control", "random"})
                .code,
            cli::kInputError);
}

// Twenty rows, five in every (label, group) cell.
std::string fmt_row(int i) {
  return std::to_string(i / 20.0) + "," + std::to_string(i % 2) + "," + std::to_string((i / 2) % 2) + "\n";
}

TEST_F(CliTest, MitigateClassTieExitsFour) {
  std::string csv = "x,y,s\n";
  for (int i = 0; i < 20; ++i) csv += fmt_row(i);
  write("d.csv", csv);
  write("schema.txt", kLineSchema);
  const std::vector<std::string> args{"mitigate", "--input", path("d.csv"), "--schema", path("schema.txt"),
                                      "--out", path("o"), "--budget", "2"};
  // The training split of a balanced file stays balanced under stratification.
  EXPECT_EQ(run_cli(args).code, cli::kClassTie);
  auto with_override = args;
  with_override.insert(with_override.end(), {"--tie-majority", "1"});
  EXPECT_EQ(run_cli(with_override).code, 0);
}

}  // namespace
}  // namespace aim
