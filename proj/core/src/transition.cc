#include "stparse/transition.h"

#include <algorithm>

#include "stparse/errors.h"

namespace stparse {

const char* KindName(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::kShift:
      return "SHIFT";
    case TransitionKind::kLeftArc:
      return "LEFT-ARC";
    case TransitionKind::kRightArc:
      return "RIGHT-ARC";
  }
  return "?";
}

std::string Transition::ToString() const {
  std::string s = KindName(kind);
  if (kind != TransitionKind::kShift) {
    s += ':';
    s += label;
  }
  return s;
}

Configuration Configuration::Initial(int num_tokens) {
  if (num_tokens <= 0) {
    throw PreconditionError("cannot build a configuration for an empty sentence");
  }
  Configuration c;
  c.num_tokens_ = num_tokens;
  c.stack_ = {kRootIndex};
  c.buffer_.resize(num_tokens);
  for (int i = 0; i < num_tokens; ++i) c.buffer_[i] = i + 1;
  c.heads_.assign(num_tokens + 1, -1);
  c.leftmost_.assign(num_tokens + 1, -1);
  c.rightmost_.assign(num_tokens + 1, -1);
  return c;
}

Configuration::Configuration(int num_tokens, std::vector<int> stack,
                             std::vector<int> buffer, std::span<const Arc> arcs)
    : num_tokens_(num_tokens), stack_(std::move(stack)), buffer_(std::move(buffer)) {
  if (stack_.empty() || stack_.front() != kRootIndex) {
    throw PreconditionError("stack must start with the root");
  }
  std::vector<char> seen(num_tokens + 1, 0);
  for (int i : stack_) {
    if (i < 0 || i > num_tokens || seen[i]++) {
      throw PreconditionError("invalid or repeated stack index " + std::to_string(i));
    }
  }
  for (int i : buffer_) {
    if (i <= 0 || i > num_tokens || seen[i]++) {
      throw PreconditionError("invalid or repeated buffer index " + std::to_string(i));
    }
  }
  heads_.assign(num_tokens + 1, -1);
  leftmost_.assign(num_tokens + 1, -1);
  rightmost_.assign(num_tokens + 1, -1);
  for (const Arc& a : arcs) {
    if (a.dependent <= 0 || a.dependent > num_tokens || a.head < 0 ||
        a.head > num_tokens || heads_[a.dependent] >= 0) {
      throw PreconditionError("invalid arc " + std::to_string(a.head) + "->" +
                              std::to_string(a.dependent));
    }
    AddArc(a.head, a.dependent, a.label);
  }
}

std::vector<int> Configuration::buffer() const {
  return std::vector<int>(buffer_.begin() + front_, buffer_.end());
}

std::optional<int> Configuration::StackAt(int i) const {
  if (i < 0 || i >= stack_size()) return std::nullopt;
  return stack_[stack_.size() - 1 - i];
}

std::optional<int> Configuration::BufferAt(int i) const {
  if (i < 0 || i >= buffer_size()) return std::nullopt;
  return buffer_[front_ + i];
}

std::vector<Arc> Configuration::SortedArcs() const {
  std::vector<Arc> sorted = arcs_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Arc& a, const Arc& b) { return a.dependent < b.dependent; });
  return sorted;
}

std::optional<int> Configuration::HeadOf(int token) const {
  if (token <= 0 || token > num_tokens_ || heads_[token] < 0) return std::nullopt;
  return heads_[token];
}

std::optional<std::string> Configuration::LabelOf(int token) const {
  if (!HeadOf(token)) return std::nullopt;
  for (const Arc& a : arcs_) {
    if (a.dependent == token) return a.label;
  }
  return std::nullopt;
}

std::optional<int> Configuration::LeftmostDependent(int token) const {
  if (token < 0 || token > num_tokens_ || leftmost_[token] < 0) return std::nullopt;
  return leftmost_[token];
}

std::optional<int> Configuration::RightmostDependent(int token) const {
  if (token < 0 || token > num_tokens_ || rightmost_[token] < 0) return std::nullopt;
  return rightmost_[token];
}

bool Configuration::operator==(const Configuration& other) const {
  return num_tokens_ == other.num_tokens_ && stack_ == other.stack_ &&
         buffer() == other.buffer() && SortedArcs() == other.SortedArcs();
}

void Configuration::AddArc(int head, int dependent, const std::string& label) {
  arcs_.push_back({head, dependent, label});
  heads_[dependent] = head;
  if (leftmost_[head] < 0 || dependent < leftmost_[head]) leftmost_[head] = dependent;
  if (rightmost_[head] < 0 || dependent > rightmost_[head]) rightmost_[head] = dependent;
}

KindSet Legal(const Configuration& config) {
  KindSet legal;
  if (config.buffer_size() > 0) legal.Insert(TransitionKind::kShift);
  if (config.stack_size() >= 2) {
    legal.Insert(TransitionKind::kRightArc);
    if (*config.StackAt(1) != kRootIndex) legal.Insert(TransitionKind::kLeftArc);
  }
  return legal;
}

Configuration Apply(const Configuration& config, const Transition& t) {
  if ((t.kind == TransitionKind::kShift) != t.label.empty()) {
    throw PreconditionError(t.kind == TransitionKind::kShift
                                ? "SHIFT takes no label"
                                : std::string(KindName(t.kind)) + " needs a label");
  }
  Configuration next = config;
  switch (t.kind) {
    case TransitionKind::kShift:
      if (config.buffer_size() == 0) {
        throw PreconditionError("SHIFT requires a non-empty buffer");
      }
      next.stack_.push_back(next.buffer_[next.front_++]);
      break;
    case TransitionKind::kRightArc: {
      if (config.stack_size() < 2) {
        throw PreconditionError("RIGHT-ARC requires at least two stack words");
      }
      const int s0 = next.stack_.back();
      next.stack_.pop_back();
      next.AddArc(next.stack_.back(), s0, t.label);
      break;
    }
    case TransitionKind::kLeftArc: {
      if (config.stack_size() < 2) {
        throw PreconditionError("LEFT-ARC requires at least two stack words");
      }
      const int s0 = next.stack_.back();
      const int s1 = next.stack_[next.stack_.size() - 2];
      if (s1 == kRootIndex) {
        throw PreconditionError("LEFT-ARC cannot make the root a dependent");
      }
      next.stack_.erase(next.stack_.end() - 2);
      next.AddArc(s0, s1, t.label);
      break;
    }
  }
  return next;
}

bool IsTerminal(const Configuration& config) {
  return config.buffer_size() == 0 && config.stack_size() == 1;
}

Transition Oracle(const Configuration& config, const Sentence& gold) {
  if (gold.size() != config.num_tokens()) {
    throw PreconditionError("gold sentence length does not match configuration");
  }
  const KindSet legal = Legal(config);
  if (config.stack_size() >= 2) {
    const int s0 = *config.StackAt(0);
    const int s1 = *config.StackAt(1);
    if (s1 != kRootIndex && gold.at(s1).gold_head == s0 &&
        legal.Contains(TransitionKind::kLeftArc)) {
      return Transition::LeftArc(gold.at(s1).gold_label);
    }
    if (s0 != kRootIndex && gold.at(s0).gold_head == s1) {
      bool complete = true;
      for (const Token& t : gold.tokens) {
        if (t.gold_head == s0 && !config.HasHead(t.index)) {
          complete = false;
          break;
        }
      }
      if (complete) return Transition::RightArc(gold.at(s0).gold_label);
    }
  }
  if (!legal.Contains(TransitionKind::kShift)) {
    throw DataError("oracle found no gold-consistent transition (non-projective "
                    "tree or off-path configuration)");
  }
  return Transition::Shift();
}

std::vector<OracleStep> DeriveSequence(const Sentence& sentence) {
  std::vector<OracleStep> steps;
  steps.reserve(2 * sentence.tokens.size());
  Configuration config = Configuration::Initial(sentence);
  while (!IsTerminal(config)) {
    Transition t = Oracle(config, sentence);
    Configuration next = Apply(config, t);
    steps.push_back({std::move(config), std::move(t)});
    config = std::move(next);
  }
  for (const Token& t : sentence.tokens) {
    if (config.HeadOf(t.index) != t.gold_head ||
        config.LabelOf(t.index) != t.gold_label) {
      throw DataError("oracle derivation does not reproduce the gold tree");
    }
  }
  return steps;
}

}  // namespace stparse
