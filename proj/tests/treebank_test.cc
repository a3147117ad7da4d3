#include "stparse/treebank.h"

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "stparse/errors.h"
#include "stparse/supertags.h"
#include "test_util.h"

namespace stparse {
namespace {

using testing::MakeSentence;

constexpr char kTwoTokens[] =
    "1\tEconomic\t_\tJJ\tJJ\t_\t2\tamod\t_\t_\n"
    "2\tnews\t_\tNN\tNN\t_\t0\troot\t_\t_\n";

TEST(ParseConll, TwoTokenBlock) {
  std::vector<Sentence> s = ParseConll(kTwoTokens);
  ASSERT_EQ(s.size(), 1u);
  ASSERT_EQ(s[0].size(), 2);
  EXPECT_EQ(s[0].at(1).form, "Economic");
  EXPECT_EQ(s[0].at(1).pos, "JJ");
  std::vector<Arc> expected = {{2, 1, "amod"}, {0, 2, "root"}};
  EXPECT_EQ(GoldArcs(s[0]), expected);
}

TEST(ParseConll, EmptyInput) {
  EXPECT_TRUE(ParseConll("").empty());
  EXPECT_TRUE(ParseConll("\n\n").empty());
}

TEST(ParseConll, SelfLoopRejected) {
  const std::string text =
      "1\ta\t_\tDT\tDT\t_\t1\tdet\t_\t_\n"
      "2\tb\t_\tNN\tNN\t_\t0\troot\t_\t_\n";
  try {
    ParseConll(text);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos) << e.what();
  }
}

TEST(ParseConll, MalformedLineNamesLine) {
  const std::string text = std::string(kTwoTokens) + "\n1\tonly\tthree\n";
  try {
    ParseConll(text);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(ParseConll, HeadOutOfRange) {
  EXPECT_THROW(ParseConll("1\ta\t_\tNN\tNN\t_\t5\troot\t_\t_\n"), DataError);
}

TEST(ParseConll, CycleRejected) {
  const std::string text =
      "1\ta\t_\tNN\tNN\t_\t2\tx\t_\t_\n"
      "2\tb\t_\tNN\tNN\t_\t1\tx\t_\t_\n"
      "3\tc\t_\tVB\tVB\t_\t0\troot\t_\t_\n";
  EXPECT_THROW(ParseConll(text), DataError);
}

TEST(ParseConll, MultiwordTokensRejected) {
  const std::string text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n" + std::string(kTwoTokens);
  EXPECT_THROW(ParseConll(text), DataError);
}

TEST(ParseConll, CrlfAndTrailingBlankLines) {
  std::string text = kTwoTokens;
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  EXPECT_EQ(ParseConll(crlf + "\r\n\r\n"), ParseConll(text));
}

TEST(EmitConll, RoundTripIsByteIdentical) {
  const std::string text =
      "1\tThe\tthe\tDT\tDT\tdef\t2\tdet\t2\tdet\n"
      "2\tcat\tcat\tNN\tNN\t_\t3\tnsubj\t_\t_\n"
      "3\tsat\tsit\tVB\tVBD\t_\t0\troot\t_\t_\n"
      "\n" +
      std::string(kTwoTokens) + "\n";
  EXPECT_EQ(EmitConll(ParseConll(text)), text);
}

TEST(EmitConll, EmptyList) { EXPECT_EQ(EmitConll({}), ""); }

TEST(EmitConll, PredictedColumns) {
  std::vector<Sentence> s = ParseConll(kTwoTokens);
  s[0].at(1).pred_head = 0;
  s[0].at(1).pred_label = "root";
  s[0].at(2).pred_head = 1;
  s[0].at(2).pred_label = "dep";
  const std::string out = EmitConll(s, /*use_predicted=*/true);
  EXPECT_NE(out.find("1\tEconomic\t_\tJJ\tJJ\t_\t0\troot\t_\t_\n"), std::string::npos) << out;
  EXPECT_NE(out.find("2\tnews\t_\tNN\tNN\t_\t1\tdep\t_\t_\n"), std::string::npos) << out;
}

TEST(EmitConll, MissingPredictionsRejected) {
  std::vector<Sentence> s = ParseConll(kTwoTokens);
  EXPECT_THROW(EmitConll(s, /*use_predicted=*/true), PreconditionError);
}

TEST(EmitConll, RandomTreesRoundTrip) {
  Rng rng(7);
  std::vector<Sentence> sentences;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(UniformIndex(rng, 12));
    sentences.push_back(testing::SentenceFromHeads(testing::RandomTreeHeads(n, rng), rng));
  }
  EXPECT_EQ(ParseConll(EmitConll(sentences)), sentences);
}

TEST(IsProjective, Chain) {
  EXPECT_TRUE(IsProjective(std::vector<int>{0, 1, 2}));
}

TEST(IsProjective, CrossingArcs) {
  // heads[i] is the head of token i + 1. 2->4 and 3->5 cross.
  EXPECT_FALSE(IsProjective(std::vector<int>{0, 1, 1, 2, 3}));
}

TEST(IsProjective, RootArcCounts) {
  // Root attaches to 2 while 1->3 spans over it.
  EXPECT_FALSE(IsProjective(std::vector<int>{3, 0, 2}));
}

TEST(IsProjective, SingleToken) { EXPECT_TRUE(IsProjective(std::vector<int>{0})); }

TEST(IsProjective, AgreesWithDominanceDefinition) {
  Rng rng(11);
  int nonprojective = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = 1 + static_cast<int>(UniformIndex(rng, 8));
    const std::vector<int> heads = testing::RandomTreeHeads(n, rng);
    const bool expected = testing::ProjectiveByDominance(heads);
    nonprojective += !expected;
    // Oracle heads carry an unused slot 0.
    ASSERT_EQ(IsProjective(std::span<const int>(heads).subspan(1)), expected) << "trial " << trial;
  }
  EXPECT_GT(nonprojective, 100);
}

TEST(ValidateTree, RequiresSingleRootDependent) {
  EXPECT_THROW(ValidateTree(std::vector<int>{0, 0}, "s"), DataError);
  EXPECT_NO_THROW(ValidateTree(std::vector<int>{0, 1}, "s"));
}

TEST(SupertagDistribution, RenormalizesWithinBand) {
  SupertagDistribution d = SupertagDistribution::FromEntries({{1, 0.45}, {0, 0.45}}, 4);
  ASSERT_EQ(d.entries().size(), 2u);
  EXPECT_EQ(d.entries()[0].tag, 0);
  EXPECT_NEAR(d.Mass(), 1.0, 1e-12);
  EXPECT_NEAR(d.Probability(1), 0.5, 1e-12);
  EXPECT_EQ(d.Probability(3), 0.0);
}

TEST(SupertagDistribution, RejectsOutsideBand) {
  EXPECT_THROW(SupertagDistribution::FromEntries({{0, 0.5}}, 4), DataError);
  EXPECT_THROW(SupertagDistribution::FromEntries({{0, 0.6}, {1, 0.6}}, 4), DataError);
  EXPECT_THROW(SupertagDistribution::FromEntries({{4, 1.0}}, 4), DataError);
  EXPECT_THROW(SupertagDistribution::FromEntries({{0, 0.5}, {0, 0.5}}, 4), DataError);
  EXPECT_THROW(SupertagDistribution::FromEntries({{0, 1.5}}, 4), DataError);
}

TEST(SupertagDistribution, ArgmaxTiesGoToLowestId) {
  SupertagDistribution d = SupertagDistribution::FromEntries({{5, 0.5}, {2, 0.5}}, 8);
  EXPECT_EQ(d.Argmax(), 2);
}

TEST(SupertagInventory, ParseAndSerialize) {
  SupertagInventory inv = SupertagInventory::Parse("alpha\nbeta\ngamma\n");
  EXPECT_EQ(inv.size(), 3);
  EXPECT_EQ(inv.Find("beta"), 1);
  EXPECT_FALSE(inv.Find("delta").has_value());
  EXPECT_EQ(SupertagInventory::Parse(inv.Serialize()), inv);
  EXPECT_THROW(SupertagInventory::Parse("a\na\n"), DataError);
}

TEST(SupertagFile, SparseLine) {
  SupertagInventory inv = SupertagInventory::Synthetic(30);
  std::vector<SentenceAnnotations> a = ParseSupertagFile("1\tt27\tt27:0.9,t3:0.1\n", inv);
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(a[0].size(), 1u);
  EXPECT_EQ(a[0][0].best, 27);
  std::vector<SupertagEntry> expected = {{3, 0.1}, {27, 0.9}};
  EXPECT_EQ(std::vector<SupertagEntry>(a[0][0].dist.entries().begin(),
                                       a[0][0].dist.entries().end()),
            expected);
}

TEST(SupertagFile, LowMassRejected) {
  SupertagInventory inv = SupertagInventory::Synthetic(30);
  EXPECT_THROW(ParseSupertagFile("1\tt3\tt3:0.25,t4:0.25\n", inv), DataError);
}

TEST(SupertagFile, OneHot) {
  SupertagInventory inv = SupertagInventory::Synthetic(30);
  std::vector<SentenceAnnotations> a = ParseSupertagFile("1\tt3\tt3:1.0\n", inv);
  ASSERT_EQ(a[0][0].dist.entries().size(), 1u);
  EXPECT_EQ(a[0][0].dist.Probability(3), 1.0);
}

TEST(SupertagFile, UnknownTagAndBadProbability) {
  SupertagInventory inv = SupertagInventory::Synthetic(30);
  EXPECT_THROW(ParseSupertagFile("1\tt99\tt99:1.0\n", inv), DataError);
  EXPECT_THROW(ParseSupertagFile("1\tt3\tt3:1.5\n", inv), DataError);
  EXPECT_THROW(ParseSupertagFile("1\tt3\tt3:-0.1,t4:1.1\n", inv), DataError);
  EXPECT_THROW(ParseSupertagFile("1\tt3\tt3\n", inv), DataError);
}

TEST(SupertagFile, EmitRoundTrip) {
  SupertagInventory inv = SupertagInventory::Synthetic(30);
  const std::string text =
      "1\tt27\tt3:0.1,t27:0.9\n2\tt3\tt3:1\n\n1\tt0\tt0:0.75,t1:0.25\n\n";
  std::vector<SentenceAnnotations> a = ParseSupertagFile(text, inv);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(ParseSupertagFile(EmitSupertagFile(a, inv), inv), a);
}

TEST(AttachSupertags, AttachesPerToken) {
  SupertagInventory inv = SupertagInventory::Synthetic(30);
  std::vector<Sentence> s = ParseConll(kTwoTokens);
  std::vector<SentenceAnnotations> a =
      ParseSupertagFile("1\tt27\tt27:0.9,t3:0.1\n2\tt3\tt3:1.0\n", inv);
  std::vector<Sentence> out = AttachSupertags(s, a);
  EXPECT_TRUE(out[0].HasSupertags());
  EXPECT_EQ(out[0].at(1).best_supertag, 27);
  EXPECT_EQ(out[0].at(2).supertag_dist->Probability(3), 1.0);
}

TEST(AttachSupertags, TokenCountMismatchNamesSentence) {
  SupertagInventory inv = SupertagInventory::Synthetic(30);
  std::vector<Sentence> s = ParseConll(std::string(kTwoTokens) + "\n" + kTwoTokens);
  std::vector<SentenceAnnotations> a =
      ParseSupertagFile("1\tt1\tt1:1\n2\tt1\tt1:1\n\n1\tt1\tt1:1\n", inv);
  try {
    AttachSupertags(s, a);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("sentence 2"), std::string::npos) << e.what();
  }
}

TEST(AttachSupertags, SentenceCountMismatch) {
  SupertagInventory inv = SupertagInventory::Synthetic(30);
  std::vector<Sentence> s = ParseConll(kTwoTokens);
  EXPECT_THROW(AttachSupertags(s, {}), DataError);
}

std::vector<Sentence> SmallCorpus() {
  Rng rng(3);
  std::vector<Sentence> out;
  for (int i = 0; i < 30; ++i) {
    const int n = 2 + static_cast<int>(UniformIndex(rng, 8));
    out.push_back(testing::SentenceFromHeads(testing::RandomProjectiveHeads(n, rng), rng));
  }
  return out;
}

TEST(SynthSupertags, NoiseFreeIsOneHotOnSignature) {
  std::vector<Sentence> corpus = SmallCorpus();
  std::vector<SentenceAnnotations> a = SynthSupertags(corpus, {500, 0.0, 1});
  std::map<std::string, int> tag_of;
  for (size_t s = 0; s < corpus.size(); ++s) {
    for (int i = 1; i <= corpus[s].size(); ++i) {
      const SupertagAnnotation& ann = a[s][i - 1];
      ASSERT_EQ(ann.dist.entries().size(), 1u);
      EXPECT_EQ(ann.dist.entries()[0].prob, 1.0);
      EXPECT_EQ(ann.dist.entries()[0].tag, ann.best);
      // Same signature, same tag; different signature, different tag.
      auto [it, inserted] = tag_of.emplace(SupertagSignature(corpus[s], i), ann.best);
      EXPECT_EQ(it->second, ann.best);
    }
  }
  std::set<int> distinct;
  for (const auto& [sig, tag] : tag_of) distinct.insert(tag);
  EXPECT_EQ(distinct.size(), tag_of.size());
}

TEST(SynthSupertags, Deterministic) {
  std::vector<Sentence> corpus = SmallCorpus();
  EXPECT_EQ(SynthSupertags(corpus, {500, 0.2, 9}), SynthSupertags(corpus, {500, 0.2, 9}));
  EXPECT_NE(SynthSupertags(corpus, {500, 0.2, 9}), SynthSupertags(corpus, {500, 0.2, 10}));
}

TEST(SynthSupertags, NoiseMassSplit) {
  std::vector<Sentence> corpus = SmallCorpus();
  std::vector<SentenceAnnotations> a = SynthSupertags(corpus, {500, 0.2, 4});
  for (const SentenceAnnotations& sa : a) {
    for (const SupertagAnnotation& ann : sa) {
      ASSERT_EQ(ann.dist.entries().size(), 1u + kSynthNoiseTags);
      double rest = 0.0;
      for (const SupertagEntry& e : ann.dist.entries()) {
        if (e.tag != ann.best) rest += e.prob;
      }
      EXPECT_NEAR(ann.dist.Probability(ann.best), 0.8, 1e-12);
      EXPECT_NEAR(rest, 0.2, 1e-12);
    }
  }
}

TEST(SynthSupertags, InventoryTooSmall) {
  std::vector<Sentence> corpus = SmallCorpus();
  EXPECT_THROW(SynthSupertags(corpus, {3, 0.0, 1}), PreconditionError);
}

TEST(SynthSupertags, EmittedFileParsesBack) {
  std::vector<Sentence> corpus = SmallCorpus();
  SupertagInventory inv = SupertagInventory::Synthetic(500);
  std::vector<SentenceAnnotations> a = SynthSupertags(corpus, {500, 0.2, 4});
  std::vector<SentenceAnnotations> back = ParseSupertagFile(EmitSupertagFile(a, inv), inv);
  EXPECT_EQ(back, a);
  for (const SentenceAnnotations& sa : back) {
    for (const SupertagAnnotation& ann : sa) EXPECT_NEAR(ann.dist.Mass(), 1.0, 1e-6);
  }
}

}  // namespace
}  // namespace stparse
