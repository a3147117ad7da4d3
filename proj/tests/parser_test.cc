#include "stparse/parser.h"

#include <gtest/gtest.h>

#include <set>

#include "stparse/errors.h"
#include "stparse/supertags.h"
#include "stparse/synthetic.h"
#include "test_util.h"

namespace stparse {
namespace {

using testing::MakeSentence;
using testing::TokenSpec;

std::vector<Sentence> ToyTreebank() {
  return {
      MakeSentence({{"the", "DT", 2, "det"},
                    {"cat", "NN", 3, "nsubj"},
                    {"sat", "VBD", 0, "root"},
                    {"on", "IN", 3, "prep"},
                    {"mats", "NNS", 4, "pobj"}}),
      MakeSentence({{"dogs", "NNS", 2, "nsubj"},
                    {"bark", "VBZ", 0, "root"},
                    {"loudly", "RB", 2, "advmod"}}),
  };
}

// Synthetic train/dev splits sharing one supertag space.
struct Corpus {
  std::vector<Sentence> train;
  std::vector<Sentence> dev;
  SupertagInventory inventory;
};

Corpus SyntheticCorpus(int train_size, int dev_size, double noise) {
  std::vector<Sentence> all =
      GenerateTreebank({.sentences = train_size + dev_size, .seed = 17, .max_length = 25});
  SynthOptions options{.inventory_size = 200, .noise = noise, .seed = 5};
  all = AttachSupertags(all, SynthSupertags(all, options));
  Corpus c;
  c.train.assign(all.begin(), all.begin() + train_size);
  c.dev.assign(all.begin() + train_size, all.end());
  c.inventory = SupertagInventory::Synthetic(options.inventory_size);
  return c;
}

void ExpectTree(const Sentence& s, const ParsedSentence& parsed) {
  const int n = s.size();
  ASSERT_EQ(static_cast<int>(parsed.transitions.size()), 2 * n);
  int shifts = 0;
  for (const Transition& t : parsed.transitions) shifts += t.kind == TransitionKind::kShift;
  EXPECT_EQ(shifts, n);
  ASSERT_EQ(static_cast<int>(parsed.arcs.size()), n);
  std::vector<int> heads(n, -1);
  int root_dependents = 0;
  for (int i = 0; i < n; ++i) {
    EXPECT_EQ(parsed.arcs[i].dependent, i + 1);
    heads[i] = parsed.arcs[i].head;
    root_dependents += parsed.arcs[i].head == 0;
  }
  EXPECT_EQ(root_dependents, 1);
  EXPECT_NO_THROW(ValidateTree(heads, "parse"));
  EXPECT_TRUE(IsProjective(heads));
}

TEST(TrainPipeline, MemorizesToyTreebank) {
  std::vector<Sentence> toy = ToyTreebank();
  TrainSummary summary;
  ParserModel model = TrainPipeline(toy, nullptr, {}, &summary);
  EXPECT_EQ(summary.sentences_used, 2);
  EXPECT_EQ(summary.instances, 16);
  EXPECT_EQ(summary.epochs.back().accuracy, 1.0);
  for (const Sentence& s : toy) EXPECT_EQ(ParseSentence(model, s).arcs, GoldArcs(s));
  EXPECT_EQ(model.classifier.num_dense(), 0);
  EXPECT_TRUE(model.dictionary.frozen());
}

TEST(TrainPipeline, FiltersNonProjectiveWithWarning) {
  std::vector<Sentence> toy = ToyTreebank();
  toy.insert(toy.begin() + 1,
             MakeSentence({{"a", "NN", 3, "x"}, {"b", "VB", 0, "root"}, {"c", "NN", 2, "y"}}));
  std::vector<std::string> log;
  TrainOptions options;
  options.log = [&](const std::string& m) { log.push_back(m); };
  TrainSummary summary;
  TrainPipeline(toy, nullptr, options, &summary);
  EXPECT_EQ(summary.filtered, std::vector<int>({2}));
  bool warned = false;
  for (const std::string& m : log) {
    warned |= m.find("warning") != std::string::npos && m.find("sentence 2") != std::string::npos;
  }
  EXPECT_TRUE(warned);
}

TEST(TrainPipeline, AllFilteredIsAnError) {
  std::vector<Sentence> bad = {
      MakeSentence({{"a", "NN", 3, "x"}, {"b", "VB", 0, "root"}, {"c", "NN", 2, "y"}})};
  EXPECT_THROW(TrainPipeline(bad, nullptr, {}), DataError);
}

TEST(TrainPipeline, MissingAnnotations) {
  TrainOptions options;
  options.features = FeatureModel::FromName("BL+BS");
  EXPECT_THROW(TrainPipeline(ToyTreebank(), nullptr, options), DataError);
}

TEST(TrainPipeline, KLargerThanInventory) {
  Corpus c = SyntheticCorpus(30, 0, 0.2);
  TrainOptions options;
  options.features = FeatureModel::FromName("BL+SD");
  options.k = c.inventory.size() + 1;
  EXPECT_THROW(TrainPipeline(c.train, &c.inventory, options), PreconditionError);
}

TEST(TrainPipeline, SdModelCarriesPca) {
  Corpus c = SyntheticCorpus(60, 0, 0.2);
  TrainOptions options;
  options.features = FeatureModel::FromName("BL+BS+SD");
  options.k = 8;
  ParserModel model = TrainPipeline(c.train, &c.inventory, options);
  ASSERT_TRUE(model.pca.has_value());
  EXPECT_EQ(model.pca->k(), 8);
  EXPECT_EQ(model.pca->n(), c.inventory.size());
  EXPECT_EQ(model.classifier.num_dense(), 16);
  EXPECT_TRUE(model.inventory.has_value());
}

TEST(TrainPipeline, TypeSamplingAndSubsampling) {
  Corpus c = SyntheticCorpus(60, 0, 0.2);
  TrainOptions options;
  options.features = FeatureModel::FromName("SD");
  options.k = 4;
  options.sampling = PcaSampling::kTypes;
  ParserModel types = TrainPipeline(c.train, &c.inventory, options);
  options.sampling = PcaSampling::kTokens;
  options.pca_sample_fraction = 0.5;
  ParserModel sampled = TrainPipeline(c.train, &c.inventory, options);
  int64_t tokens = 0;
  std::set<std::string> forms;
  for (const Sentence& s : c.train) {
    tokens += s.size();
    for (const Token& t : s.tokens) forms.insert(t.form);
  }
  EXPECT_EQ(types.pca->samples(), static_cast<int64_t>(forms.size()));
  EXPECT_GT(sampled.pca->samples(), tokens / 3);
  EXPECT_LT(sampled.pca->samples(), 2 * tokens / 3);
}

TEST(ParseSentence, SingleToken) {
  ParserModel model = TrainPipeline(ToyTreebank(), nullptr, {});
  Sentence one = MakeSentence({{"hello", "UH", 0, "root"}});
  ParsedSentence parsed = ParseSentence(model, one);
  ASSERT_EQ(parsed.transitions.size(), 2u);
  EXPECT_EQ(parsed.transitions[0], Transition::Shift());
  EXPECT_EQ(parsed.transitions[1].kind, TransitionKind::kRightArc);
  ASSERT_EQ(parsed.arcs.size(), 1u);
  EXPECT_EQ(parsed.arcs[0].head, 0);
  EXPECT_EQ(parsed.arcs[0].dependent, 1);
}

TEST(ParseSentence, AlwaysATreeInTwoNSteps) {
  Corpus c = SyntheticCorpus(80, 60, 0.2);
  ParserModel model = TrainPipeline(c.train, nullptr, {});
  for (const Sentence& s : c.dev) {
    SCOPED_TRACE(EmitConll(std::vector<Sentence>{s}));
    ExpectTree(s, ParseSentence(model, s));
  }
  // Random trees with unseen words and tags go through the same loop.
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(UniformIndex(rng, 15));
    Sentence s = testing::SentenceFromHeads(testing::RandomTreeHeads(n, rng), rng);
    ExpectTree(s, ParseSentence(model, s));
  }
}

TEST(ParseSentence, OraclePolicyReproducesGold) {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(UniformIndex(rng, 12));
    Sentence s = testing::SentenceFromHeads(testing::RandomProjectiveHeads(n, rng), rng);
    ParsedSentence parsed = ParseWithPolicy(s, [&](const Configuration& c) {
      Transition t = Oracle(c, s);
      EXPECT_TRUE(ParserLegal(c).Contains(t.kind));
      return t;
    });
    ASSERT_EQ(parsed.arcs, GoldArcs(s));
  }
}

TEST(ParserLegal, NeverDeadEnds) {
  // Every non-terminal configuration reachable under ParserLegal keeps a move.
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(UniformIndex(rng, 8));
    Configuration c = Configuration::Initial(n);
    while (!IsTerminal(c)) {
      KindSet legal = ParserLegal(c);
      ASSERT_FALSE(legal.empty());
      std::vector<TransitionKind> kinds;
      for (TransitionKind k :
           {TransitionKind::kShift, TransitionKind::kLeftArc, TransitionKind::kRightArc}) {
        if (legal.Contains(k)) kinds.push_back(k);
      }
      const TransitionKind k = kinds[UniformIndex(rng, kinds.size())];
      c = Apply(c, k == TransitionKind::kShift ? Transition::Shift() : Transition{k, "x"});
    }
    int root_dependents = 0;
    for (const Arc& a : c.arcs()) root_dependents += a.head == 0;
    EXPECT_EQ(root_dependents, 1);
  }
}

TEST(Evaluate, Identical) {
  std::vector<Sentence> gold = ToyTreebank();
  std::vector<std::vector<Arc>> pred;
  for (const Sentence& s : gold) pred.push_back(GoldArcs(s));
  EvalReport r = Evaluate(gold, pred);
  EXPECT_EQ(r.uas, 1.0);
  EXPECT_EQ(r.las, 1.0);
  EXPECT_EQ(r.tokens, 8);
  EXPECT_EQ(r.sentences, 2);
  EXPECT_EQ(r.PunctConvention(), "punct-included");
}

TEST(Evaluate, AllLabelsWrong) {
  std::vector<Sentence> gold = ToyTreebank();
  std::vector<std::vector<Arc>> pred;
  for (const Sentence& s : gold) {
    std::vector<Arc> arcs = GoldArcs(s);
    for (Arc& a : arcs) a.label = "wrong";
    pred.push_back(arcs);
  }
  EvalReport r = Evaluate(gold, pred);
  EXPECT_EQ(r.uas, 1.0);
  EXPECT_EQ(r.las, 0.0);
}

TEST(Evaluate, Counting) {
  std::vector<TokenSpec> specs;
  specs.push_back({"w1", "VB", 0, "root"});
  for (int i = 2; i <= 10; ++i) specs.push_back({"w" + std::to_string(i), "NN", 1, "dep"});
  std::vector<Sentence> gold = {MakeSentence(specs)};
  std::vector<Arc> arcs = GoldArcs(gold[0]);
  arcs[9].head = 2;         // wrong head
  arcs[8].label = "other";  // right head, wrong label
  EvalReport r = Evaluate(gold, std::vector<std::vector<Arc>>{arcs});
  EXPECT_DOUBLE_EQ(r.uas, 0.9);
  EXPECT_DOUBLE_EQ(r.las, 0.8);
  EXPECT_LE(r.las, r.uas);
}

TEST(Evaluate, ExcludePunct) {
  std::vector<Sentence> gold = {MakeSentence(
      {{"ok", "UH", 0, "root"}, {".", ".", 1, "punct"}})};
  std::vector<Arc> arcs = {{0, 1, "root"}, {0, 2, "punct"}};
  EvalReport with = Evaluate(gold, std::vector<std::vector<Arc>>{arcs});
  EXPECT_DOUBLE_EQ(with.uas, 0.5);
  EvalReport without = Evaluate(gold, std::vector<std::vector<Arc>>{arcs}, {.exclude_punct = true});
  EXPECT_EQ(without.tokens, 1);
  EXPECT_DOUBLE_EQ(without.uas, 1.0);
  EXPECT_EQ(without.PunctConvention(), "punct-excluded");
  EXPECT_NE(FormatReport(without).find("punctuation\texcluded"), std::string::npos);
}

TEST(Evaluate, Misalignment) {
  std::vector<Sentence> gold = ToyTreebank();
  EXPECT_THROW(Evaluate(gold, std::vector<std::vector<Arc>>{}), DataError);
  std::vector<std::vector<Arc>> pred = {GoldArcs(gold[0]), {}};
  EXPECT_THROW(Evaluate(gold, pred), DataError);
  std::vector<Sentence> other = {gold[0], gold[0]};
  EXPECT_THROW(Evaluate(gold, std::span<const Sentence>(other)), DataError);
}

TEST(WithPredictions, CopiesArcs) {
  std::vector<Sentence> gold = ToyTreebank();
  std::vector<std::vector<Arc>> pred;
  for (const Sentence& s : gold) pred.push_back(GoldArcs(s));
  pred[1][0].head = 3;
  std::vector<Sentence> out = WithPredictions(gold, pred);
  EXPECT_EQ(out[1].at(1).pred_head, 3);
  EXPECT_EQ(out[0].at(1).pred_label, "det");
  EvalReport r = Evaluate(gold, std::span<const Sentence>(
                                    ParseConll(EmitConll(out, /*use_predicted=*/true))));
  EXPECT_EQ(r.correct_heads, 7);
}

TEST(AblationGrid, Parse) {
  std::vector<AblationConfig> grid =
      ParseAblationGrid("# comment\nBL\n\nBL+SD 8, 32,128\nSD\t4\n");
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_EQ(grid[0].name, "BL");
  EXPECT_TRUE(grid[0].ks.empty());
  EXPECT_EQ(grid[1].ks, std::vector<int>({8, 32, 128}));
  EXPECT_EQ(grid[2].ks, std::vector<int>({4}));
  EXPECT_THROW(ParseAblationGrid("BL+ZZ\n"), DataError);
  EXPECT_THROW(ParseAblationGrid("SD 0\n"), DataError);
}

TEST(AblationRun, DeterministicTable) {
  Corpus c = SyntheticCorpus(120, 40, 0.2);
  std::vector<AblationConfig> configs = {{"BL", {}}, {"BL+BS", {}}};
  TrainOptions base;
  base.trainer.epochs = 3;
  std::vector<AblationRow> a = AblationRun(c.train, c.dev, &c.inventory, configs, base, {});
  std::vector<AblationRow> b = AblationRun(c.train, c.dev, &c.inventory, configs, base, {});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(FormatResultsTable(a), FormatResultsTable(b));
  EXPECT_EQ(a[0].k, 0);
  EXPECT_FALSE(a[0].captured_fraction.has_value());
}

TEST(AblationRun, KSweepCapturedVarianceMonotone) {
  Corpus c = SyntheticCorpus(120, 30, 0.2);
  std::vector<AblationConfig> configs = {{"SD", {4, 8, 16}}};
  TrainOptions base;
  base.trainer.epochs = 2;
  std::vector<AblationRow> rows = AblationRun(c.train, c.dev, &c.inventory, configs, base, {});
  ASSERT_EQ(rows.size(), 3u);
  for (const AblationRow& row : rows) ASSERT_TRUE(row.captured_fraction.has_value());
  for (size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(*rows[i].captured_fraction, *rows[i - 1].captured_fraction);
  }
}

TEST(AblationRun, RestrictedModelsTagged) {
  Corpus c = SyntheticCorpus(60, 20, 0.2);
  std::vector<AblationConfig> configs = {
      {"FORM", {}}, {"POS", {}}, {"SUPERTAG", {}}, {"SD", {8}}};
  TrainOptions base;
  base.trainer.epochs = 2;
  std::vector<AblationRow> rows = AblationRun(c.train, c.dev, &c.inventory, configs, base, {});
  const std::string table = FormatResultsTable(rows);
  EXPECT_EQ(table.substr(0, table.find('\n')),
            "config\tk\tUAS\tLAS\ttokens\tpunct\tseed\tcaptured_variance");
  std::vector<std::string> names;
  for (const AblationRow& r : rows) names.push_back(r.config);
  EXPECT_EQ(names, std::vector<std::string>({"FORM", "POS", "SUPERTAG", "SD"}));
}

}  // namespace
}  // namespace stparse
