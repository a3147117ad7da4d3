#ifndef STPARSE_TREEBANK_H_
#define STPARSE_TREEBANK_H_

// Sentences, gold dependency trees and CoNLL-X I/O.
//
// Token indices are 1-based; index 0 is the artificial root. A CoNLL-X line
// has ten tab-separated columns:
//   ID FORM LEMMA CPOSTAG POSTAG FEATS HEAD DEPREL PHEAD PDEPREL
// Columns the parser does not use are kept verbatim so that a file can be
// written back unchanged.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stparse {

inline constexpr int kRootIndex = 0;

struct SupertagEntry {
  int tag = 0;
  double prob = 0.0;

  bool operator==(const SupertagEntry&) const = default;
};

// Sparse probability vector over a supertag inventory of `dimension` tags.
// Entries are sorted by tag id, strictly positive, and sum to 1 within 1e-6.
class SupertagDistribution {
 public:
  // Masses inside this band are renormalized on construction; anything else is
  // rejected.
  static constexpr double kMinMass = 0.9;
  static constexpr double kMaxMass = 1.1;

  SupertagDistribution() = default;

  // Validates, sorts, drops zero entries and renormalizes. Throws DataError on
  // duplicate or out-of-range tags, probabilities outside [0, 1], or a total
  // mass outside [kMinMass, kMaxMass].
  static SupertagDistribution FromEntries(std::vector<SupertagEntry> entries,
                                          int dimension);

  std::span<const SupertagEntry> entries() const { return entries_; }
  int dimension() const { return dimension_; }
  bool empty() const { return entries_.empty(); }

  // Most probable tag; ties go to the lowest tag id.
  int Argmax() const;
  double Probability(int tag) const;
  double Mass() const;

  bool operator==(const SupertagDistribution&) const = default;

 private:
  std::vector<SupertagEntry> entries_;
  int dimension_ = 0;
};

// Ordered list of supertag names; a tag's id is its position.
class SupertagInventory {
 public:
  SupertagInventory() = default;
  explicit SupertagInventory(std::vector<std::string> names);

  // One name per line, line number - 1 = tag id.
  static SupertagInventory Parse(std::string_view text);
  // Names "t0" .. "t{size-1}".
  static SupertagInventory Synthetic(int size);

  std::string Serialize() const;

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& Name(int id) const { return names_.at(id); }
  std::optional<int> Find(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const SupertagInventory& other) const {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

struct Token {
  int index = 0;
  std::string form;
  std::string lemma = "_";
  std::string cpos = "_";
  std::string pos;
  std::string feats = "_";
  int gold_head = 0;
  std::string gold_label;
  std::string phead = "_";
  std::string pdeprel = "_";

  std::optional<int> best_supertag;
  std::optional<SupertagDistribution> supertag_dist;

  std::optional<int> pred_head;
  std::optional<std::string> pred_label;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  bool empty() const { return tokens.empty(); }
  // 1-based access.
  const Token& at(int index) const { return tokens.at(index - 1); }
  Token& at(int index) { return tokens.at(index - 1); }

  bool HasSupertags() const;

  bool operator==(const Sentence&) const = default;
};

struct Arc {
  int head = 0;
  int dependent = 0;
  std::string label;

  bool operator==(const Arc&) const = default;
  auto operator<=>(const Arc&) const = default;
};

// Gold arcs of a sentence, sorted by dependent.
std::vector<Arc> GoldArcs(const Sentence& sentence);

// Parses CoNLL-X text. Throws DataError naming the line for malformed input,
// out-of-range heads, self loops, multiword/empty token ids, and naming the
// sentence for cyclic or multi-rooted gold structures.
std::vector<Sentence> ParseConll(std::string_view text);

// Writes CoNLL-X text. With use_predicted the HEAD and DEPREL columns carry
// pred_head/pred_label; a token without a prediction is a PreconditionError.
std::string EmitConll(std::span<const Sentence> sentences,
                      bool use_predicted = false);

// Throws DataError unless `heads` (heads[i] is the head of token i + 1) forms a
// tree rooted at 0 with exactly one root dependent.
void ValidateTree(std::span<const int> heads, std::string_view what);

// True iff no two arcs cross when drawn above the sentence, counting the arc
// from the root.
bool IsProjective(std::span<const int> heads);
bool IsProjective(const Sentence& sentence);

// File helpers. Throw DataError when the file cannot be read or written.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace stparse

#endif  // STPARSE_TREEBANK_H_
