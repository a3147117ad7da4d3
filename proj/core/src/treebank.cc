#include "stparse/treebank.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "stparse/errors.h"
#include "text_util.h"

namespace stparse {

SupertagDistribution SupertagDistribution::FromEntries(
    std::vector<SupertagEntry> entries, int dimension) {
  if (dimension <= 0) {
    throw DataError("supertag distribution needs a positive inventory size");
  }
  std::sort(entries.begin(), entries.end(),
            [](const SupertagEntry& a, const SupertagEntry& b) {
              return a.tag < b.tag;
            });
  SupertagDistribution dist;
  dist.dimension_ = dimension;
  double mass = 0.0;
  for (size_t i = 0; i < entries.size(); ++i) {
    const SupertagEntry& e = entries[i];
    if (e.tag < 0 || e.tag >= dimension) {
      throw DataError("supertag id " + std::to_string(e.tag) +
                      " outside inventory of size " +
                      std::to_string(dimension));
    }
    if (i > 0 && entries[i - 1].tag == e.tag) {
      throw DataError("duplicate supertag id " + std::to_string(e.tag));
    }
    if (!(e.prob >= 0.0 && e.prob <= 1.0)) {
      throw DataError("supertag probability " + FormatDouble(e.prob) +
                      " outside [0,1]");
    }
    if (e.prob > 0.0) {
      dist.entries_.push_back(e);
      mass += e.prob;
    }
  }
  if (mass < kMinMass || mass > kMaxMass) {
    throw DataError("supertag distribution mass " + FormatDouble(mass) +
                    " outside [0.9,1.1]");
  }
  // Rounding noise from summation is left alone so values round-trip as written.
  if (std::abs(mass - 1.0) > 1e-12) {
    for (SupertagEntry& e : dist.entries_) e.prob /= mass;
  }
  return dist;
}

int SupertagDistribution::Argmax() const {
  int best = -1;
  double best_prob = -1.0;
  for (const SupertagEntry& e : entries_) {
    if (e.prob > best_prob) {
      best = e.tag;
      best_prob = e.prob;
    }
  }
  return best;
}

double SupertagDistribution::Probability(int tag) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), tag,
      [](const SupertagEntry& e, int t) { return e.tag < t; });
  return (it != entries_.end() && it->tag == tag) ? it->prob : 0.0;
}

double SupertagDistribution::Mass() const {
  double mass = 0.0;
  for (const SupertagEntry& e : entries_) mass += e.prob;
  return mass;
}

SupertagInventory::SupertagInventory(std::vector<std::string> names)
    : names_(std::move(names)) {
  ids_.reserve(names_.size());
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      throw DataError("empty supertag name at inventory line " +
                      std::to_string(i + 1));
    }
    if (!ids_.emplace(names_[i], static_cast<int>(i)).second) {
      throw DataError("duplicate supertag name '" + names_[i] +
                      "' at inventory line " + std::to_string(i + 1));
    }
  }
}

SupertagInventory SupertagInventory::Parse(std::string_view text) {
  std::vector<std::string> names;
  for (std::string_view line : SplitLines(text)) {
    names.emplace_back(StripCr(line));
  }
  while (!names.empty() && names.back().empty()) names.pop_back();
  return SupertagInventory(std::move(names));
}

SupertagInventory SupertagInventory::Synthetic(int size) {
  std::vector<std::string> names;
  names.reserve(size);
  for (int i = 0; i < size; ++i) names.push_back("t" + std::to_string(i));
  return SupertagInventory(std::move(names));
}

std::string SupertagInventory::Serialize() const {
  std::string out;
  for (const std::string& name : names_) {
    out += name;
    out += '\n';
  }
  return out;
}

std::optional<int> SupertagInventory::Find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

bool Sentence::HasSupertags() const {
  return !tokens.empty() &&
         std::all_of(tokens.begin(), tokens.end(), [](const Token& t) {
           return t.best_supertag.has_value() && t.supertag_dist.has_value();
         });
}

std::vector<Arc> GoldArcs(const Sentence& sentence) {
  std::vector<Arc> arcs;
  arcs.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) {
    arcs.push_back({t.gold_head, t.index, t.gold_label});
  }
  return arcs;
}

namespace {

Sentence FinishSentence(std::vector<Token> tokens, int sentence_number) {
  Sentence sentence{std::move(tokens)};
  std::vector<int> heads;
  heads.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) heads.push_back(t.gold_head);
  ValidateTree(heads, "sentence " + std::to_string(sentence_number));
  return sentence;
}

}  // namespace

std::vector<Sentence> ParseConll(std::string_view text) {
  std::vector<Sentence> sentences;
  std::vector<Token> current;
  int line_number = 0;
  auto flush = [&]() {
    if (!current.empty()) {
      sentences.push_back(FinishSentence(
          std::move(current), static_cast<int>(sentences.size()) + 1));
      current.clear();
    }
  };
  std::vector<std::string_view> lines = SplitLines(text);
  // Pending head checks need the sentence length, so range checks are done
  // per block once it is complete.
  std::vector<int> block_lines;
  auto check_block = [&]() {
    const int n = static_cast<int>(current.size());
    for (int i = 0; i < n; ++i) {
      if (current[i].gold_head > n) {
        throw DataError("line " + std::to_string(block_lines[i]) + ": HEAD " +
                        std::to_string(current[i].gold_head) +
                        " out of range for a sentence of " +
                        std::to_string(n) + " tokens");
      }
    }
    block_lines.clear();
  };
  for (std::string_view raw : lines) {
    ++line_number;
    std::string_view line = StripCr(raw);
    if (line.empty()) {
      check_block();
      flush();
      continue;
    }
    std::vector<std::string_view> cols = Split(line, '\t');
    const std::string where = "line " + std::to_string(line_number);
    if (cols.size() != 10) {
      throw DataError(where + ": expected 10 tab-separated columns, found " +
                      std::to_string(cols.size()));
    }
    if (cols[0].find_first_of("-.") != std::string_view::npos) {
      throw DataError(where + ": multiword or empty token id '" +
                      std::string(cols[0]) + "' is not supported");
    }
    Token token;
    if (!ParseInt(cols[0], token.index)) {
      throw DataError(where + ": bad token id '" + std::string(cols[0]) + "'");
    }
    if (token.index != static_cast<int>(current.size()) + 1) {
      throw DataError(where + ": token id " + std::to_string(token.index) +
                      " out of sequence");
    }
    if (!ParseInt(cols[6], token.gold_head) || token.gold_head < 0) {
      throw DataError(where + ": bad HEAD '" + std::string(cols[6]) + "'");
    }
    if (token.gold_head == token.index) {
      throw DataError(where + ": token " + std::to_string(token.index) +
                      " is its own head (self loop)");
    }
    for (int c : {1, 4, 7}) {
      if (cols[c].empty()) {
        throw DataError(where + ": empty column " + std::to_string(c + 1));
      }
    }
    token.form = cols[1];
    token.lemma = cols[2];
    token.cpos = cols[3];
    token.pos = cols[4];
    token.feats = cols[5];
    token.gold_label = cols[7];
    token.phead = cols[8];
    token.pdeprel = cols[9];
    current.push_back(std::move(token));
    block_lines.push_back(line_number);
  }
  check_block();
  flush();
  return sentences;
}

std::string EmitConll(std::span<const Sentence> sentences, bool use_predicted) {
  std::string out;
  for (size_t s = 0; s < sentences.size(); ++s) {
    for (const Token& t : sentences[s].tokens) {
      int head = t.gold_head;
      const std::string* label = &t.gold_label;
      if (use_predicted) {
        if (!t.pred_head || !t.pred_label) {
          throw PreconditionError("sentence " + std::to_string(s + 1) +
                                  " token " + std::to_string(t.index) +
                                  " has no predicted head/label");
        }
        head = *t.pred_head;
        label = &*t.pred_label;
      }
      out += std::to_string(t.index);
      for (const std::string* col :
           {&t.form, &t.lemma, &t.cpos, &t.pos, &t.feats}) {
        out += '\t';
        out += *col;
      }
      out += '\t';
      out += std::to_string(head);
      out += '\t';
      out += *label;
      out += '\t';
      out += t.phead;
      out += '\t';
      out += t.pdeprel;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

void ValidateTree(std::span<const int> heads, std::string_view what) {
  const int n = static_cast<int>(heads.size());
  int root_children = 0;
  for (int i = 0; i < n; ++i) {
    if (heads[i] < 0 || heads[i] > n) {
      throw DataError(std::string(what) + ": head of token " +
                      std::to_string(i + 1) + " out of range");
    }
    if (heads[i] == i + 1) {
      throw DataError(std::string(what) + ": token " + std::to_string(i + 1) +
                      " is its own head (self loop)");
    }
    if (heads[i] == kRootIndex) ++root_children;
  }
  // Walk up from every token; a path longer than n must revisit a node.
  std::vector<char> state(n + 1, 0);  // 0 unknown, 1 on path, 2 reaches root
  state[0] = 2;
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int node = start;
    while (state[node] == 0) {
      state[node] = 1;
      path.push_back(node);
      node = heads[node - 1];
    }
    if (state[node] == 1) {
      throw DataError(std::string(what) + ": gold heads contain a cycle through token " +
                      std::to_string(node));
    }
    for (int p : path) state[p] = 2;
  }
  if (n > 0 && root_children != 1) {
    throw DataError(std::string(what) + ": expected exactly one root dependent, found " +
                    std::to_string(root_children));
  }
}

bool IsProjective(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  // Arcs as spans (lo, hi); two spans cross iff exactly one endpoint of one
  // lies strictly inside the other.
  for (int i = 1; i <= n; ++i) {
    const int lo1 = std::min(i, heads[i - 1]);
    const int hi1 = std::max(i, heads[i - 1]);
    for (int j = i + 1; j <= n; ++j) {
      const int lo2 = std::min(j, heads[j - 1]);
      const int hi2 = std::max(j, heads[j - 1]);
      if ((lo1 < lo2 && lo2 < hi1 && hi1 < hi2) ||
          (lo2 < lo1 && lo1 < hi2 && hi2 < hi1)) {
        return false;
      }
    }
  }
  return true;
}

bool IsProjective(const Sentence& sentence) {
  std::vector<int> heads;
  heads.reserve(sentence.tokens.size());
  for (const Token& t : sentence.tokens) heads.push_back(t.gold_head);
  return IsProjective(heads);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw DataError("error reading file '" + path + "'");
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("error writing file '" + path + "'");
}

}  // namespace stparse
