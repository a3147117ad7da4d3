#include "cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "stparse/model_io.h"
#include "stparse/treebank.h"

namespace stparse {
namespace {

namespace fs = std::filesystem;

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteAll(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("stparse_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    // Shared corpus: synthetic treebanks plus supertags in one tag space.
    ASSERT_EQ(Call({"--seed", "3", "synth-treebank", "--sentences", "60", "--max-length", "15",
                    "--out", P("train.conll")}),
              0);
    ASSERT_EQ(Call({"--seed", "4", "synth-treebank", "--sentences", "20", "--max-length", "15",
                    "--out", P("dev.conll")}),
              0);
    ASSERT_EQ(Call({"synth-supertags", "--treebank", P("train.conll"), "--treebank",
                    P("dev.conll"), "--out", P("train.st"), "--out", P("dev.st"),
                    "--inventory-size", "120", "--inventory-out", P("inv.txt")}),
              0);
  }

  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string P(const std::string& name) { return (dir_ / name).string(); }

  static int Call(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return cli::Run(args, out_, err_);
  }

  static std::string Out() { return out_.str(); }
  static std::string Err() { return err_.str(); }

  static fs::path dir_;
  static std::ostringstream out_;
  static std::ostringstream err_;
};

fs::path CliTest::dir_;
std::ostringstream CliTest::out_;
std::ostringstream CliTest::err_;

TEST_F(CliTest, TrainWritesModel) {
  EXPECT_EQ(Call({"train", "--treebank", P("train.conll"), "--epochs", "2", "--out",
                  P("bl.model")}),
            0)
      << Err();
  EXPECT_TRUE(fs::exists(P("bl.model")));
  EXPECT_NE(Out().find("epoch\t2\ttraining_accuracy\t"), std::string::npos) << Out();
  EXPECT_NE(Out().find("filtered_sentences\t0"), std::string::npos);
}

TEST_F(CliTest, SupertagModelsNeedAnnotations) {
  EXPECT_EQ(Call({"train", "--treebank", P("train.conll"), "--features", "BL+BS", "--out",
                  P("x.model")}),
            2);
  EXPECT_EQ(Call({"train", "--treebank", P("train.conll"), "--features", "BL+SD", "--supertags",
                  P("train.st"), "--out", P("x.model")}),
            2);
  EXPECT_EQ(Call({"train", "--treebank", P("train.conll"), "--features", "BL+XY", "--out",
                  P("x.model")}),
            2);
  EXPECT_FALSE(fs::exists(P("x.model")));
}

TEST_F(CliTest, UnreadableInputIsDataError) {
  EXPECT_EQ(Call({"train", "--treebank", P("missing.conll"), "--out", P("y.model")}), 1);
  EXPECT_NE(Err().find("error:"), std::string::npos);
  WriteAll(P("bad.conll"), "1\tThe\t_\tDT\tDT\t_\t7\tdet\t_\t_\n\n");
  EXPECT_EQ(Call({"train", "--treebank", P("bad.conll"), "--out", P("y.model")}), 1);
}

TEST_F(CliTest, MissingRequiredFlagIsUsageError) {
  EXPECT_EQ(Call({"train", "--treebank", P("train.conll")}), 2);
  EXPECT_EQ(Call({"no-such-command"}), 2);
}

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(Call({"--help"}), 0);
  EXPECT_NE(Out().find("ablate"), std::string::npos);
  EXPECT_EQ(Call({"train", "--help"}), 0);
  EXPECT_NE(Out().find("--treebank"), std::string::npos);
}

TEST_F(CliTest, TrainParseEvalRoundTrip) {
  ASSERT_EQ(Call({"train", "--treebank", P("train.conll"), "--supertags", P("train.st"),
                  "--inventory", P("inv.txt"), "--features", "BL+BS+SD", "--k", "8", "--epochs",
                  "3", "--out", P("sd.model")}),
            0)
      << Err();
  ASSERT_EQ(Call({"parse", "--model", P("sd.model"), "--input", P("dev.conll"), "--supertags",
                  P("dev.st"), "--out", P("dev.pred")}),
            0)
      << Err();
  const std::vector<Sentence> pred = ParseConll(ReadAll(P("dev.pred")));
  const std::vector<Sentence> gold = ParseConll(ReadAll(P("dev.conll")));
  ASSERT_EQ(pred.size(), gold.size());

  // Parsing to standard output gives the same text.
  ASSERT_EQ(Call({"parse", "--model", P("sd.model"), "--input", P("dev.conll"), "--supertags",
                  P("dev.st")}),
            0);
  EXPECT_EQ(Out(), ReadAll(P("dev.pred")));

  // Without annotations the parse still runs, with a warning.
  ASSERT_EQ(Call({"parse", "--model", P("sd.model"), "--input", P("dev.conll")}), 0);
  EXPECT_NE(Err().find("warning"), std::string::npos);

  ASSERT_EQ(Call({"eval", "--gold", P("dev.conll"), "--pred", P("dev.pred")}), 0) << Err();
  EXPECT_NE(Out().find("UAS\t"), std::string::npos);
  EXPECT_NE(Out().find("punctuation\tincluded"), std::string::npos);
}

TEST_F(CliTest, EvalSelfIsPerfect) {
  ASSERT_EQ(Call({"eval", "--gold", P("dev.conll"), "--pred", P("dev.conll")}), 0);
  EXPECT_NE(Out().find("UAS\t100.00"), std::string::npos) << Out();
  EXPECT_NE(Out().find("LAS\t100.00"), std::string::npos);
  ASSERT_EQ(Call({"eval", "--gold", P("dev.conll"), "--pred", P("dev.conll"),
                  "--exclude-punct"}),
            0);
  EXPECT_NE(Out().find("punctuation\texcluded"), std::string::npos);
}

TEST_F(CliTest, EvalMisalignedIsDataError) {
  EXPECT_EQ(Call({"eval", "--gold", P("dev.conll"), "--pred", P("train.conll")}), 1);
}

TEST_F(CliTest, VersionMismatchedModelIsRejected) {
  ASSERT_EQ(Call({"train", "--treebank", P("train.conll"), "--epochs", "1", "--out",
                  P("v.model")}),
            0);
  std::string bytes = ReadAll(P("v.model"));
  bytes[8] = static_cast<char>(kModelVersion + 7);
  WriteAll(P("v.model"), bytes);
  EXPECT_EQ(Call({"parse", "--model", P("v.model"), "--input", P("dev.conll")}), 1);
  EXPECT_NE(Err().find("version"), std::string::npos) << Err();
}

TEST_F(CliTest, PcaFitReport) {
  ASSERT_EQ(Call({"pca-fit", "--supertags", P("train.st"), "--inventory", P("inv.txt"), "--k",
                  "32", "--out", P("pca.txt"), "--report", P("pca_report.tsv")}),
            0)
      << Err();
  const std::string report = ReadAll(P("pca_report.tsv"));
  EXPECT_EQ(report, Out());
  std::istringstream lines(report);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "component\tvariance\tcumulative_fraction");
  int rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  EXPECT_EQ(rows, 32);
  EXPECT_EQ(PcaModel::Parse(ReadAll(P("pca.txt"))).k(), 32);

  // A k beyond the inventory cannot be fitted.
  EXPECT_EQ(Call({"pca-fit", "--supertags", P("train.st"), "--inventory", P("inv.txt"), "--k",
                  "500", "--out", P("pca2.txt")}),
            1);
}

TEST_F(CliTest, PreFittedPcaModelIsUsed) {
  ASSERT_EQ(Call({"pca-fit", "--supertags", P("train.st"), "--inventory", P("inv.txt"), "--k",
                  "5", "--out", P("pca5.txt")}),
            0);
  ASSERT_EQ(Call({"train", "--treebank", P("train.conll"), "--supertags", P("train.st"),
                  "--inventory", P("inv.txt"), "--features", "BL+SD", "--pca-model",
                  P("pca5.txt"), "--epochs", "1", "--out", P("pre.model")}),
            0)
      << Err();
  ParserModel m = LoadModel(P("pre.model"));
  ASSERT_TRUE(m.pca.has_value());
  EXPECT_EQ(*m.pca, PcaModel::Parse(ReadAll(P("pca5.txt"))));
}

TEST_F(CliTest, SynthIsDeterministic) {
  ASSERT_EQ(Call({"--seed", "9", "synth-treebank", "--sentences", "15", "--out", P("a.conll")}),
            0);
  ASSERT_EQ(Call({"--seed", "9", "synth-treebank", "--sentences", "15", "--out", P("b.conll")}),
            0);
  EXPECT_EQ(ReadAll(P("a.conll")), ReadAll(P("b.conll")));
  ASSERT_EQ(Call({"--seed", "9", "synth-supertags", "--treebank", P("a.conll"), "--out",
                  P("a.st"), "--inventory-size", "100"}),
            0);
  ASSERT_EQ(Call({"--seed", "9", "synth-supertags", "--treebank", P("b.conll"), "--out",
                  P("b.st"), "--inventory-size", "100"}),
            0);
  EXPECT_EQ(ReadAll(P("a.st")), ReadAll(P("b.st")));
}

TEST_F(CliTest, AblateGridOneRowPerConfig) {
  WriteAll(P("grid.txt"), "# grid\nBL\nBL+BS\nBL+SD 4,8\n");
  ASSERT_EQ(Call({"ablate", "--train", P("train.conll"), "--dev", P("dev.conll"),
                  "--train-supertags", P("train.st"), "--dev-supertags", P("dev.st"),
                  "--inventory", P("inv.txt"), "--grid", P("grid.txt"), "--epochs", "2",
                  "--out", P("table.tsv")}),
            0)
      << Err();
  const std::string table = ReadAll(P("table.tsv"));
  std::istringstream lines(table);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u) << table;
  EXPECT_EQ(rows[0].rfind("config\tk\tUAS\tLAS", 0), 0u);
  EXPECT_EQ(rows[1].rfind("BL\t", 0), 0u);
  EXPECT_EQ(rows[2].rfind("BL+BS\t", 0), 0u);
  EXPECT_EQ(rows[3].rfind("BL+SD\t4\t", 0), 0u);
  EXPECT_EQ(rows[4].rfind("BL+SD\t8\t", 0), 0u);

  // Same seed, same table.
  ASSERT_EQ(Call({"ablate", "--train", P("train.conll"), "--dev", P("dev.conll"),
                  "--train-supertags", P("train.st"), "--dev-supertags", P("dev.st"),
                  "--inventory", P("inv.txt"), "--grid", P("grid.txt"), "--epochs", "2"}),
            0);
  EXPECT_EQ(Out(), table);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  WriteAll(P("run.toml"), "[synth-treebank]\nsentences = 4\nmax-length = 8\n");
  ASSERT_EQ(Call({"--config", P("run.toml"), "synth-treebank", "--out", P("c1.conll")}), 0)
      << Err();
  EXPECT_EQ(ParseConll(ReadAll(P("c1.conll"))).size(), 4u);
  ASSERT_EQ(Call({"--config", P("run.toml"), "synth-treebank", "--sentences", "6", "--out",
                  P("c2.conll")}),
            0);
  EXPECT_EQ(ParseConll(ReadAll(P("c2.conll"))).size(), 6u);
}

}  // namespace
}  // namespace stparse
