#include "stparse/synthetic.h"

#include <algorithm>
#include <map>
#include <string>

#include "stparse/errors.h"
#include "stparse/random.h"

namespace stparse {

namespace {

struct Node {
  std::string pos;
  std::string form;
  std::string label;
  std::vector<Node> left;   // closest first
  std::vector<Node> right;  // closest first
};

struct Vocabulary {
  std::string prefix;
  std::vector<double> cumulative;
};

struct WeightedWord {
  const char* form;
  double weight;
};

// Prepositions with their weights when attached to a noun / to a verb.
constexpr WeightedWord kNounPreps[] = {{"of", 45}, {"in", 14}, {"for", 10}, {"with", 9},
                                       {"on", 8},  {"from", 5}, {"about", 5}, {"at", 4}};
constexpr WeightedWord kVerbPreps[] = {{"in", 20}, {"on", 14}, {"with", 12}, {"to", 14},
                                       {"at", 10}, {"for", 10}, {"from", 10}, {"by", 8},
                                       {"about", 2}};

class Generator {
 public:
  explicit Generator(uint64_t seed) : rng_(seed) {
    AddVocabulary("NN", "n", 400);
    AddVocabulary("NNS", "ns", 200);
    AddVocabulary("NNP", "np", 150);
    AddVocabulary("VBD", "vd", 150);
    AddVocabulary("VBZ", "vz", 100);
    AddVocabulary("JJ", "j", 150);
    AddVocabulary("RB", "r", 40);
    AddVocabulary("DT", "d", 6);
    AddVocabulary("CD", "c", 20);
    AddVocabulary("MD", "m", 5);
    AddVocabulary("CC", "cc", 3);
    AddVocabulary("PRP", "p", 8);
  }

  Node Root() {
    Node root = Verb(0);
    root.label = "root";
    if (Chance(0.9)) root.right.push_back(Leaf(".", ".", "punct"));
    return root;
  }

  bool Chance(double p) { return UniformUnit(rng_) < p; }
  Rng& rng() { return rng_; }

 private:
  void AddVocabulary(const std::string& pos, std::string prefix, int size) {
    Vocabulary v{std::move(prefix), {}};
    double total = 0.0;
    for (int i = 1; i <= size; ++i) {
      total += 1.0 / i;
      v.cumulative.push_back(total);
    }
    vocab_[pos] = std::move(v);
  }

  std::string Word(const std::string& pos) {
    const Vocabulary& v = vocab_.at(pos);
    const double u = UniformUnit(rng_) * v.cumulative.back();
    const size_t i = std::upper_bound(v.cumulative.begin(), v.cumulative.end(), u) -
                     v.cumulative.begin();
    return v.prefix + std::to_string(std::min(i, v.cumulative.size() - 1));
  }

  template <size_t N>
  const char* Pick(const WeightedWord (&words)[N]) {
    double total = 0.0;
    for (const WeightedWord& w : words) total += w.weight;
    double u = UniformUnit(rng_) * total;
    for (const WeightedWord& w : words) {
      if (u < w.weight) return w.form;
      u -= w.weight;
    }
    return words[N - 1].form;
  }

  Node Leaf(const std::string& pos, std::string form, std::string label) {
    Node n;
    n.pos = pos;
    n.form = std::move(form);
    n.label = std::move(label);
    return n;
  }

  Node Leaf(const std::string& pos, std::string label) {
    return Leaf(pos, Word(pos), std::move(label));
  }

  std::string NounPos() {
    const double u = UniformUnit(rng_);
    if (u < 0.5) return "NN";
    if (u < 0.75) return "NNS";
    return "NNP";
  }

  Node Verb(int depth) {
    Node v = Leaf(Chance(0.7) ? "VBD" : "VBZ", "");
    // Left dependents, closest first.
    if (Chance(0.12)) v.left.push_back(Leaf("MD", "aux"));
    if (Chance(0.05)) v.left.push_back(Leaf("RB", "not", "neg"));
    if (Chance(0.93)) {
      v.left.push_back(Chance(0.15) ? Leaf("PRP", "nsubj") : Noun(NounPos(), depth + 1, "nsubj"));
    }
    if (Chance(0.08)) v.left.push_back(Leaf("RB", "advmod"));
    if (depth < 3 && Chance(0.06)) v.left.push_back(Prep(depth + 1, false));

    // Right dependents, closest first.
    if (Chance(0.6)) {
      v.right.push_back(Chance(0.08) ? Leaf("PRP", "dobj") : Noun(NounPos(), depth + 1, "dobj"));
    }
    if (depth < 4) {
      double p = 0.4;
      while (Chance(p)) {
        v.right.push_back(Prep(depth + 1, false));
        p = 0.2;
      }
    }
    if (Chance(0.12)) v.right.push_back(Leaf("RB", "advmod"));
    if (depth < 3 && Chance(0.07)) {
      Node clause = Verb(depth + 1);
      clause.label = "ccomp";
      if (Chance(0.6)) clause.left.push_back(Leaf("IN", "that", "mark"));
      v.right.push_back(std::move(clause));
    }
    if (depth < 3 && Chance(0.05)) {
      v.right.push_back(Leaf("CC", "cc"));
      Node conj = Verb(depth + 1);
      conj.label = "conj";
      v.right.push_back(std::move(conj));
    }
    return v;
  }

  Node Noun(const std::string& pos, int depth, std::string label) {
    Node n = Leaf(pos, std::move(label));
    // Left dependents, closest first.
    if (Chance(0.12)) n.left.push_back(Leaf("NN", "nn"));
    double p = 0.3;
    while (Chance(p)) {
      Node adj = Leaf("JJ", "amod");
      if (Chance(0.1)) adj.left.push_back(Leaf("RB", "advmod"));
      n.left.push_back(std::move(adj));
      p = 0.15;
    }
    if (pos == "NNS" && Chance(0.15)) n.left.push_back(Leaf("CD", "num"));
    const double det = pos == "NN" ? 0.7 : pos == "NNS" ? 0.3 : 0.05;
    if (Chance(det)) n.left.push_back(Leaf("DT", "det"));

    // Right dependents, closest first.
    if (depth < 5) {
      p = 0.25;
      while (Chance(p)) {
        n.right.push_back(Prep(depth + 1, true));
        p = 0.1;
      }
    }
    if (depth < 3 && Chance(0.04)) {
      Node clause = Verb(depth + 1);
      clause.label = "rcmod";
      // The relative pronoun replaces an overt subject.
      std::erase_if(clause.left, [](const Node& d) { return d.label == "nsubj"; });
      clause.left.push_back(Leaf("WDT", "that", "nsubj"));
      n.right.push_back(std::move(clause));
    }
    if (depth < 4 && Chance(0.05)) {
      n.right.push_back(Leaf("CC", "cc"));
      n.right.push_back(Noun(NounPos(), depth + 1, "conj"));
    }
    return n;
  }

  Node Prep(int depth, bool noun_attached) {
    Node p = Leaf("IN", noun_attached ? Pick(kNounPreps) : Pick(kVerbPreps), "prep");
    p.right.push_back(Chance(0.05) ? Leaf("PRP", "pobj") : Noun(NounPos(), depth + 1, "pobj"));
    return p;
  }

  Rng rng_;
  std::map<std::string, Vocabulary> vocab_;
};

int CountNodes(const Node& n) {
  int count = 1;
  for (const Node& d : n.left) count += CountNodes(d);
  for (const Node& d : n.right) count += CountNodes(d);
  return count;
}

// Appends the subtree in surface order; returns the head's index.
int Flatten(const Node& n, int head, std::vector<Token>& tokens) {
  std::vector<int> pending;
  for (auto it = n.left.rbegin(); it != n.left.rend(); ++it) {
    pending.push_back(Flatten(*it, -1, tokens));
  }
  Token t;
  t.index = static_cast<int>(tokens.size()) + 1;
  t.form = n.form;
  t.cpos = n.pos;
  t.pos = n.pos;
  t.gold_head = head;
  t.gold_label = n.label;
  tokens.push_back(std::move(t));
  const int self = static_cast<int>(tokens.size());
  for (int dep : pending) tokens[dep - 1].gold_head = self;
  for (const Node& d : n.right) Flatten(d, self, tokens);
  return self;
}

const std::map<std::string, std::vector<std::string>>& Confusions() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"NN", {"NNS", "NNP", "JJ"}}, {"NNS", {"NN", "VBZ"}},  {"NNP", {"NN"}},
      {"VBD", {"VBZ", "JJ"}},       {"VBZ", {"VBD", "NNS"}}, {"JJ", {"NN", "RB"}},
      {"RB", {"JJ", "IN"}},         {"IN", {"RB"}},          {"DT", {"PRP"}},
  };
  return table;
}

}  // namespace

std::vector<Sentence> GenerateTreebank(const SyntheticTreebankOptions& options) {
  if (options.sentences < 0 || options.min_length < 1 ||
      options.max_length < options.min_length) {
    throw PreconditionError("invalid synthetic treebank options");
  }
  Generator gen(options.seed);
  std::vector<Sentence> out;
  out.reserve(options.sentences);
  while (static_cast<int>(out.size()) < options.sentences) {
    Node root = gen.Root();
    const int length = CountNodes(root);
    if (length < options.min_length || length > options.max_length) continue;
    Sentence s;
    s.tokens.reserve(length);
    Flatten(root, kRootIndex, s.tokens);
    if (options.pos_noise > 0.0) {
      for (Token& t : s.tokens) {
        auto it = Confusions().find(t.pos);
        if (it == Confusions().end() || !gen.Chance(options.pos_noise)) continue;
        t.pos = it->second[UniformIndex(gen.rng(), it->second.size())];
        t.cpos = t.pos;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace stparse
