#ifndef STPARSE_TRANSITION_H_
#define STPARSE_TRANSITION_H_

// Arc-standard transition system.
//
//  - Shift pushes the first buffer word onto the stack.
//  - RightArc makes the stack top a right dependent of the word below it and
//    pops the top.
//  - LeftArc makes the word below the top a left dependent of the top and
//    removes it from the stack.
//
// Parsing starts with the root (index 0) on the stack and every word in the
// buffer, and ends when the buffer is empty and only the root remains.
// Configurations are values: Apply returns a new configuration.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stparse/treebank.h"

namespace stparse {

enum class TransitionKind { kShift = 0, kLeftArc = 1, kRightArc = 2 };

const char* KindName(TransitionKind kind);

struct Transition {
  TransitionKind kind = TransitionKind::kShift;
  std::string label;  // Empty iff kind == kShift.

  static Transition Shift() { return {}; }
  static Transition LeftArc(std::string label) {
    return {TransitionKind::kLeftArc, std::move(label)};
  }
  static Transition RightArc(std::string label) {
    return {TransitionKind::kRightArc, std::move(label)};
  }

  // "SHIFT", "LEFT-ARC:det", "RIGHT-ARC:root".
  std::string ToString() const;

  bool operator==(const Transition&) const = default;
};

// Bit set of transition kinds.
class KindSet {
 public:
  KindSet() = default;
  KindSet(std::initializer_list<TransitionKind> kinds) {
    for (TransitionKind k : kinds) Insert(k);
  }
  void Insert(TransitionKind k) { bits_ |= Bit(k); }
  bool Contains(TransitionKind k) const { return (bits_ & Bit(k)) != 0; }
  bool empty() const { return bits_ == 0; }
  bool operator==(const KindSet&) const = default;

 private:
  static unsigned Bit(TransitionKind k) { return 1u << static_cast<int>(k); }
  unsigned bits_ = 0;
};

class Configuration {
 public:
  // Stack [0], buffer [1..num_tokens], no arcs. Throws PreconditionError for
  // an empty sentence.
  static Configuration Initial(int num_tokens);
  static Configuration Initial(const Sentence& sentence) {
    return Initial(sentence.size());
  }

  // Arbitrary configuration, mainly for tests. `stack` is bottom-first and
  // must start with the root; `buffer` lists indices front-first.
  Configuration(int num_tokens, std::vector<int> stack, std::vector<int> buffer,
                std::span<const Arc> arcs = {});

  int num_tokens() const { return num_tokens_; }
  // Bottom-first.
  const std::vector<int>& stack() const { return stack_; }
  std::vector<int> buffer() const;
  int stack_size() const { return static_cast<int>(stack_.size()); }
  int buffer_size() const { return static_cast<int>(buffer_.size()) - front_; }
  // i-th word from the top of the stack / front of the buffer, if present.
  std::optional<int> StackAt(int i) const;
  std::optional<int> BufferAt(int i) const;

  // Arcs in the order they were added.
  const std::vector<Arc>& arcs() const { return arcs_; }
  // Arcs sorted by dependent.
  std::vector<Arc> SortedArcs() const;

  std::optional<int> HeadOf(int token) const;
  std::optional<std::string> LabelOf(int token) const;
  std::optional<int> LeftmostDependent(int token) const;
  std::optional<int> RightmostDependent(int token) const;
  bool HasHead(int token) const { return heads_[token] >= 0; }

  // Equality compares stack, buffer and the arc set.
  bool operator==(const Configuration& other) const;

 private:
  Configuration() = default;
  void AddArc(int head, int dependent, const std::string& label);

  int num_tokens_ = 0;
  std::vector<int> stack_;
  std::vector<int> buffer_;
  int front_ = 0;
  std::vector<Arc> arcs_;
  // Indexed by token; -1 when absent.
  std::vector<int> heads_;
  std::vector<int> leftmost_;
  std::vector<int> rightmost_;

  friend Configuration Apply(const Configuration&, const Transition&);
};

KindSet Legal(const Configuration& config);

// Throws PreconditionError naming the violated condition if t is illegal.
Configuration Apply(const Configuration& config, const Transition& t);

bool IsTerminal(const Configuration& config);

// Static oracle: LeftArc if s1's gold head is s0; RightArc if s0's gold head is
// s1 and every gold dependent of s0 is already attached; Shift otherwise.
// Throws DataError when no legal gold-consistent transition exists.
Transition Oracle(const Configuration& config, const Sentence& gold);

struct OracleStep {
  Configuration config;
  Transition transition;
};

// Runs the oracle from the initial to a terminal configuration. The result has
// 2N steps for N tokens. Throws DataError for non-projective trees.
std::vector<OracleStep> DeriveSequence(const Sentence& sentence);

}  // namespace stparse

#endif  // STPARSE_TRANSITION_H_
