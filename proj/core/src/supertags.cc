#include "stparse/supertags.h"

#include <algorithm>
#include <map>

#include "stparse/errors.h"
#include "stparse/random.h"
#include "text_util.h"

namespace stparse {

std::vector<SentenceAnnotations> ParseSupertagFile(
    std::string_view text, const SupertagInventory& inventory) {
  std::vector<SentenceAnnotations> result;
  SentenceAnnotations current;
  int line_number = 0;
  for (std::string_view raw : SplitLines(text)) {
    ++line_number;
    std::string_view line = StripCr(raw);
    const std::string where = "line " + std::to_string(line_number);
    if (line.empty()) {
      if (!current.empty()) result.push_back(std::move(current));
      current.clear();
      continue;
    }
    std::vector<std::string_view> cols = Split(line, '\t');
    if (cols.size() != 3) {
      throw DataError(where + ": expected 3 tab-separated columns, found " +
                      std::to_string(cols.size()));
    }
    int index = 0;
    if (!ParseInt(cols[0], index) ||
        index != static_cast<int>(current.size()) + 1) {
      throw DataError(where + ": bad or out-of-sequence token index '" +
                      std::string(cols[0]) + "'");
    }
    auto resolve = [&](std::string_view name) {
      std::optional<int> id = inventory.Find(name);
      if (!id) {
        throw DataError(where + ": unknown supertag '" + std::string(name) +
                        "'");
      }
      return *id;
    };
    const int best = resolve(cols[1]);
    std::vector<SupertagEntry> entries;
    for (std::string_view item : Split(cols[2], ',')) {
      const size_t colon = item.rfind(':');
      if (colon == std::string_view::npos) {
        throw DataError(where + ": expected tag:prob, found '" +
                        std::string(item) + "'");
      }
      SupertagEntry e;
      e.tag = resolve(item.substr(0, colon));
      if (!ParseDouble(item.substr(colon + 1), e.prob)) {
        throw DataError(where + ": bad probability in '" + std::string(item) +
                        "'");
      }
      if (!(e.prob >= 0.0 && e.prob <= 1.0)) {
        throw DataError(where + ": probability " + FormatDouble(e.prob) +
                        " outside [0,1]");
      }
      entries.push_back(e);
    }
    SupertagAnnotation ann;
    try {
      ann.dist = SupertagDistribution::FromEntries(std::move(entries),
                                                   inventory.size());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    const int argmax = ann.dist.Argmax();
    if (ann.dist.Probability(best) < ann.dist.Probability(argmax)) {
      throw DataError(where + ": best tag '" + std::string(cols[1]) +
                      "' is not a most probable tag");
    }
    ann.best = argmax;
    current.push_back(std::move(ann));
  }
  if (!current.empty()) result.push_back(std::move(current));
  return result;
}

std::string EmitSupertagFile(std::span<const SentenceAnnotations> annotations,
                             const SupertagInventory& inventory) {
  std::string out;
  for (const SentenceAnnotations& sentence : annotations) {
    int index = 0;
    for (const SupertagAnnotation& ann : sentence) {
      out += std::to_string(++index);
      out += '\t';
      out += inventory.Name(ann.best);
      out += '\t';
      bool first = true;
      for (const SupertagEntry& e : ann.dist.entries()) {
        if (!first) out += ',';
        first = false;
        out += inventory.Name(e.tag);
        out += ':';
        out += FormatDouble(e.prob);
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<Sentence> AttachSupertags(
    std::span<const Sentence> sentences,
    std::span<const SentenceAnnotations> annotations) {
  if (sentences.size() != annotations.size()) {
    throw DataError("supertag file has " + std::to_string(annotations.size()) +
                    " sentences, treebank has " +
                    std::to_string(sentences.size()));
  }
  std::vector<Sentence> out(sentences.begin(), sentences.end());
  for (size_t s = 0; s < out.size(); ++s) {
    if (out[s].tokens.size() != annotations[s].size()) {
      throw DataError("sentence " + std::to_string(s + 1) + ": " +
                      std::to_string(annotations[s].size()) +
                      " supertag annotations for " +
                      std::to_string(out[s].tokens.size()) + " tokens");
    }
    for (size_t i = 0; i < out[s].tokens.size(); ++i) {
      out[s].tokens[i].best_supertag = annotations[s][i].best;
      out[s].tokens[i].supertag_dist = annotations[s][i].dist;
    }
  }
  return out;
}

std::string SupertagSignature(const Sentence& sentence, int index) {
  const Token& token = sentence.at(index);
  bool has_left = false;
  bool has_right = false;
  for (const Token& other : sentence.tokens) {
    if (other.gold_head != index) continue;
    if (other.index < index) has_left = true;
    if (other.index > index) has_right = true;
  }
  const char* direction = token.gold_head == kRootIndex ? "ROOT"
                          : token.gold_head < index     ? "L"
                                                        : "R";
  std::string sig = token.pos;
  sig += '|';
  sig += direction;
  sig += has_left ? "|1" : "|0";
  sig += has_right ? "|1" : "|0";
  return sig;
}

std::vector<SentenceAnnotations> SynthSupertags(
    std::span<const Sentence> sentences, const SynthOptions& options) {
  if (!(options.noise >= 0.0 && options.noise <= 1.0)) {
    throw PreconditionError("noise must lie in [0,1]");
  }
  std::vector<std::vector<std::string>> signatures;
  std::map<std::string, int> signature_ids;
  for (const Sentence& sentence : sentences) {
    std::vector<std::string>& sigs = signatures.emplace_back();
    for (const Token& t : sentence.tokens) {
      sigs.push_back(SupertagSignature(sentence, t.index));
      signature_ids.emplace(sigs.back(), 0);
    }
  }
  const int needed = static_cast<int>(signature_ids.size()) +
                     (options.noise > 0.0 ? kSynthNoiseTags : 0);
  if (options.inventory_size < needed ||
      (options.noise > 0.0 && options.inventory_size < kSynthNoiseTags + 1)) {
    throw PreconditionError(
        "inventory size " + std::to_string(options.inventory_size) +
        " too small for " + std::to_string(signature_ids.size()) +
        " observed signatures");
  }
  int next_id = 0;
  for (auto& [sig, id] : signature_ids) id = next_id++;

  Rng rng(options.seed);
  const double share = options.noise / kSynthNoiseTags;
  std::vector<SentenceAnnotations> out;
  out.reserve(sentences.size());
  for (const std::vector<std::string>& sigs : signatures) {
    SentenceAnnotations& annotations = out.emplace_back();
    for (const std::string& sig : sigs) {
      const int true_tag = signature_ids.at(sig);
      std::vector<SupertagEntry> entries;
      if (options.noise < 1.0) entries.push_back({true_tag, 1.0 - options.noise});
      if (options.noise > 0.0) {
        std::vector<int> picked;
        while (static_cast<int>(picked.size()) < kSynthNoiseTags) {
          const int tag =
              static_cast<int>(UniformIndex(rng, options.inventory_size));
          if (tag == true_tag ||
              std::find(picked.begin(), picked.end(), tag) != picked.end()) {
            continue;
          }
          picked.push_back(tag);
          entries.push_back({tag, share});
        }
      }
      SupertagAnnotation ann;
      ann.dist = SupertagDistribution::FromEntries(std::move(entries),
                                                   options.inventory_size);
      ann.best = ann.dist.Argmax();
      annotations.push_back(std::move(ann));
    }
  }
  return out;
}

}  // namespace stparse
