#include <gtest/gtest.h>

#include <fstream>

#include "argutopo/io.hpp"
#include "support/cli.hpp"

namespace argutopo {
namespace {

using testing::run_cli;
using testing::scratch_dir;
using testing::source_dir;

std::string data(const std::string& rel) { return "'" + (source_dir() / "data" / rel).string() + "'"; }

std::string texts() {
  return data("texts/valid_argument.txt") + " " + data("texts/circular_argument.txt") + " " +
         data("texts/random_text.txt");
}

void write(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream(path) << contents;
}

TEST(Cli, AnalyzeWritesReportDiagramsAndPlots) {
  const auto dir = scratch_dir("cli_analyze");
  const auto r = run_cli("analyze --model " + data("toy_model.txt") +
                             " --lowercase --mode both --seed 3 --plot --images --noise-threshold 0 0.1 --out out " +
                             texts(),
                         dir);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto report = Json::parse(read_file(dir / "out" / "report.json"));
  ASSERT_EQ(report.at("texts").size(), 3u);
  EXPECT_EQ(report.at("config").at("seed"), 3);
  for (const char* stem : {"valid_argument", "circular_argument", "random_text"}) {
    for (const char* suffix : {".wde.json", ".baseline.json", ".wde.svg", ".baseline.svg", ".wde.image.csv",
                               ".wde.image.json"}) {
      EXPECT_TRUE(std::filesystem::exists(dir / "out" / (std::string(stem) + suffix))) << stem << suffix;
    }
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir / "out")) {
    EXPECT_NE(entry.path().extension(), ".tmp") << entry.path();
  }
}

TEST(Cli, AnalyzeReportsAreByteIdenticalAcrossRuns) {
  const auto dir = scratch_dir("cli_repro");
  const std::string args = "analyze --model " + data("toy_model.txt") + " --lowercase --seed 11 --out ";
  ASSERT_EQ(run_cli(args + "a " + texts(), dir).exit_code, 0);
  ASSERT_EQ(run_cli(args + "b " + texts(), dir).exit_code, 0);
  EXPECT_EQ(read_file(dir / "a" / "report.json"), read_file(dir / "b" / "report.json"));
}

TEST(Cli, ModelDirectoryEnvironmentFallback) {
  const auto dir = scratch_dir("cli_modeldir");
  const auto r = run_cli("analyze --model toy_model.txt --lowercase --out out " + texts(), dir);
  EXPECT_EQ(r.exit_code, 2) << r.err;
  const auto env = "ARGUTOPO_MODEL_DIR='" + (source_dir() / "data").string() + "' ";
  const auto cmd = "cd '" + dir.string() + "' && " + env + "'" + ARGUTOPO_CLI_PATH +
                   "' analyze --model toy_model.txt --lowercase --out out " + texts() + " > /dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir("cli_exit");
  EXPECT_EQ(run_cli("", dir).exit_code, 1);
  EXPECT_EQ(run_cli("analyze --out out", dir).exit_code, 1);
  EXPECT_EQ(run_cli("analyze --model " + data("toy_model.txt") + " --tau 0 --out out " + texts(), dir).exit_code, 1);
  EXPECT_EQ(run_cli("analyze --model missing.txt --out out " + texts(), dir).exit_code, 2);

  write(dir / "bad_model.txt", "cat 1 2 3\ndog 1\n");
  const auto parse = run_cli("analyze --model bad_model.txt --out out " + texts(), dir);
  EXPECT_EQ(parse.exit_code, 2);
  EXPECT_NE(parse.err.find("line 2"), std::string::npos) << parse.err;

  write(dir / "short.txt", "support win");
  const auto numerical =
      run_cli("analyze --model " + data("toy_model.txt") + " --lowercase --tau 2 --dim 3 --out out short.txt", dir);
  EXPECT_EQ(numerical.exit_code, 3) << numerical.err;

  EXPECT_EQ(run_cli("analyze --model " + data("toy_model.txt") + " --oov fail --out out " + texts(), dir).exit_code,
            2);
}

TEST(Cli, PersistenceDelayParamsAndImage) {
  const auto dir = scratch_dir("cli_subcommands");
  write(dir / "square.csv", "0,0\n1,0\n1,1\n0,1\n");
  auto r = run_cli("persistence square.csv --out square.json --plot square.svg", dir);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto diagram = Json::parse(read_file(dir / "square.json"));
  std::size_t h1 = 0;
  for (const auto& p : diagram.at("points")) {
    if (p.at("dim") == 1) {
      ++h1;
      EXPECT_DOUBLE_EQ(p.at("birth").get<double>(), 1.0);
      EXPECT_NEAR(p.at("death").get<double>(), std::sqrt(2.0), 1e-12);
    }
  }
  EXPECT_EQ(h1, 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "square.svg"));

  std::string series;
  for (int n = 1; n <= 400; ++n) series += std::to_string(std::sin(2.0 * M_PI * n / 40.0)) + "\n";
  write(dir / "sine.csv", series);
  r = run_cli("delay-params sine.csv", dir);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto params = Json::parse(r.out);
  EXPECT_EQ(params.at("tau"), 8);
  EXPECT_EQ(params.at("dimension"), 2);

  r = run_cli("image square.json --dim 1 --resolution 4 5 --out img.csv", dir);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto csv = read_file(dir / "img.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(Json::parse(read_file(dir / "img.json")).at("cols"), 5);

  write(dir / "ragged.csv", "0,0\n1\n");
  EXPECT_EQ(run_cli("persistence ragged.csv", dir).exit_code, 2);
  write(dir / "flat.csv", "1\n1\n1\n1\n1\n1\n");
  EXPECT_EQ(run_cli("delay-params flat.csv", dir).exit_code, 3);
}

}  // namespace
}  // namespace argutopo
