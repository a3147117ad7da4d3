#ifndef STPARSE_SYNTHETIC_H_
#define STPARSE_SYNTHETIC_H_

// Synthetic English-like treebanks for tests, benchmarks and ablations when no
// licensed treebank is at hand.
//
// Trees are generated head-outward from a small hand-written dependency
// grammar (subjects, objects, prepositional phrases that attach to verbs or
// nouns, coordination, clausal complements), so every tree is projective.
// Words are drawn from Zipf-distributed per-POS vocabularies; prepositions
// carry a lexical attachment preference but remain ambiguous.

#include <cstdint>
#include <vector>

#include "stparse/treebank.h"

namespace stparse {

struct SyntheticTreebankOptions {
  int sentences = 1000;
  uint64_t seed = 1;
  int min_length = 3;
  int max_length = 40;
  // Probability that a token's observed POS is replaced by a confusable tag.
  double pos_noise = 0.0;
};

std::vector<Sentence> GenerateTreebank(const SyntheticTreebankOptions& options);

}  // namespace stparse

#endif  // STPARSE_SYNTHETIC_H_
