#ifndef STPARSE_SUPERTAGS_H_
#define STPARSE_SUPERTAGS_H_

// Supertag annotation files.
//
// One token per line, sentences separated by a blank line:
//
//   index <TAB> best_tag <TAB> tag:prob(,tag:prob)*
//
// Tag names are resolved against a SupertagInventory. Distributions whose mass
// lies in [0.9, 1.1] are renormalized; anything else is rejected.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stparse/treebank.h"

namespace stparse {

struct SupertagAnnotation {
  int best = 0;
  SupertagDistribution dist;

  bool operator==(const SupertagAnnotation&) const = default;
};

using SentenceAnnotations = std::vector<SupertagAnnotation>;

// Throws DataError (with line number) on unknown tags, probabilities outside
// [0,1], a rejected mass, or a best tag that is not a most probable tag.
std::vector<SentenceAnnotations> ParseSupertagFile(
    std::string_view text, const SupertagInventory& inventory);

std::string EmitSupertagFile(std::span<const SentenceAnnotations> annotations,
                             const SupertagInventory& inventory);

// Copies annotations onto tokens. Throws DataError naming the first sentence
// whose token count differs, or when the sentence counts differ.
std::vector<Sentence> AttachSupertags(
    std::span<const Sentence> sentences,
    std::span<const SentenceAnnotations> annotations);

struct SynthOptions {
  int inventory_size = 500;
  // Mass taken from the signature tag and split evenly over four other tags.
  double noise = 0.2;
  uint64_t seed = 1;
};

// Number of tags that receive the noise mass.
inline constexpr int kSynthNoiseTags = 4;

// Deterministic stand-in for a supertagger. Each token's signature
// (POS, head direction, has-left-dependent, has-right-dependent) is mapped to
// a tag id; signatures are numbered in sorted order over all input sentences,
// so annotating train and dev in one call gives them a shared tag space.
// Throws PreconditionError when the inventory cannot hold every signature (plus
// the noise tags when noise > 0).
std::vector<SentenceAnnotations> SynthSupertags(
    std::span<const Sentence> sentences, const SynthOptions& options);

// Signature string used by SynthSupertags, e.g. "NN|L|1|0".
std::string SupertagSignature(const Sentence& sentence, int index);

}  // namespace stparse

#endif  // STPARSE_SUPERTAGS_H_
