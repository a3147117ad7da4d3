#ifndef STPARSE_FEATURES_H_
#define STPARSE_FEATURES_H_

// Feature models over parser configurations.
//
// Templates are written in a small address language:
//
//   S0.w        form of the stack top
//   B1.t        POS of the second buffer word
//   S0.ld.r     label of the leftmost dependent of the stack top
//   S1.rd.t     POS of the rightmost dependent of the second stack word
//   S0.h.w      form of the (current) head of the stack top
//   S0.bs       best supertag of the stack top
//   S0.t:S1.t   conjunction of two values
//
// An address that does not resolve yields the value "NULL"; the root resolves
// w, t and bs to "ROOT". Dense supertag-distribution (SD) features are the
// PCA projections of two words' supertag vectors, with all-zero blocks for the
// root, absent words and words without a distribution.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stparse/pca.h"
#include "stparse/transition.h"
#include "stparse/treebank.h"

namespace stparse {

inline constexpr std::string_view kNullValue = "NULL";
inline constexpr std::string_view kRootValue = "ROOT";

enum class Attribute { kForm, kPos, kLabel, kSupertag };
enum class Step { kLeftmost, kRightmost, kHead };

struct Address {
  bool on_stack = true;
  int position = 0;
  std::vector<Step> path;
  Attribute attribute = Attribute::kForm;

  bool operator==(const Address&) const = default;
};

// A conjunction of one or more addressed attributes.
class Template {
 public:
  // Throws PreconditionError on syntax errors.
  static Template Parse(std::string_view spec);
  // A template with no address parts, e.g. a bias feature.
  static Template Constant(std::string_view name);

  const std::string& name() const { return name_; }
  const std::vector<Address>& parts() const { return parts_; }

 private:
  std::string name_;
  std::vector<Address> parts_;
};

// One template instantiated on a configuration. Each component is a resolved
// string or nullopt (NULL).
struct AddressedValue {
  const Template* source = nullptr;
  std::vector<std::optional<std::string>> components;

  // Components joined with ':', NULL components written as "NULL".
  std::string Value() const;
  bool AllNull() const;
};

std::vector<AddressedValue> ExtractTemplates(std::span<const Template> templates,
                                             const Configuration& config,
                                             const Sentence& sentence,
                                             const SupertagInventory* inventory = nullptr);

// The 33 baseline templates and the 16 best-supertag templates.
std::span<const Template> BaselineTemplates();
std::span<const Template> BestSupertagTemplates();

std::vector<AddressedValue> ExtractBaseline(const Configuration& config,
                                            const Sentence& sentence);
// `inventory` names the best supertags; without it the decimal tag id is used.
std::vector<AddressedValue> ExtractBs(const Configuration& config,
                                      const Sentence& sentence,
                                      const SupertagInventory* inventory = nullptr);

// Which two words feed the SD block: the two stack tops, or the stack top and
// the first buffer word.
enum class SdAddresses { kS0S1, kS0B0 };

std::string SdAddressesName(SdAddresses a);
SdAddresses ParseSdAddresses(std::string_view name);

// Per-sentence table of projected supertag vectors; row 0 (root) and rows of
// tokens without a distribution are zero. Throws PreconditionError if a
// distribution's dimension differs from the model's.
std::vector<std::vector<double>> ProjectSentence(const PcaModel& pca,
                                                 const Sentence& sentence);

// Dense SD vector of length 2k.
std::vector<double> ExtractSd(const Configuration& config, const Sentence& sentence,
                              const PcaModel& pca,
                              SdAddresses addresses = SdAddresses::kS0S1);
std::vector<double> ExtractSd(const Configuration& config,
                              const std::vector<std::vector<double>>& projected,
                              int k, SdAddresses addresses = SdAddresses::kS0S1);

struct FeatureVector {
  std::vector<uint32_t> sparse;  // strictly increasing
  std::vector<float> dense;

  bool operator==(const FeatureVector&) const = default;
};

// Bijection between (template, value) pairs and feature ids.
class FeatureDictionary {
 public:
  // Allocates an id for unseen keys unless frozen.
  std::optional<uint32_t> Lookup(const AddressedValue& v);
  std::optional<uint32_t> Find(const AddressedValue& v) const;

  void Freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  size_t size() const { return keys_.size(); }
  // Keys in id order, for serialization.
  const std::vector<std::string>& keys() const { return keys_; }
  static FeatureDictionary FromKeys(std::vector<std::string> keys, bool frozen);

  static std::string Key(const AddressedValue& v);

 private:
  std::unordered_map<std::string, uint32_t> ids_;
  std::vector<std::string> keys_;
  bool frozen_ = false;
};

FeatureVector Assemble(std::span<const AddressedValue> values,
                       FeatureDictionary& dict, std::span<const double> dense);
FeatureVector Assemble(std::span<const AddressedValue> values,
                       const FeatureDictionary& dict, std::span<const double> dense);

// A feature model: sparse templates plus an optional SD block. Named by the
// '+'-joined components BL, BS, SD, FORM, POS, SUPERTAG (e.g. "BL+BS+SD").
// FORM, POS and SUPERTAG are the two-stack-word restricted models
// {S0.w, S1.w}, {S0.t, S1.t} and {S0.bs, S1.bs}.
struct FeatureModel {
  std::string name;
  std::vector<Template> templates;
  bool sd = false;
  SdAddresses sd_addresses = SdAddresses::kS0S1;
  bool bias = false;

  // Throws PreconditionError for unknown components.
  static FeatureModel FromName(std::string_view name);
  // Rebuilds a model from explicit template specs (model files).
  static FeatureModel FromTemplates(std::string name,
                                    std::span<const std::string> specs, bool sd);

  bool UsesSupertags() const;
  std::vector<std::string> TemplateSpecs() const;
};

// Extracts feature vectors for one sentence at a time. Holds the sentence's
// projected supertag vectors so each token is projected once.
class SentenceFeaturizer {
 public:
  SentenceFeaturizer(const FeatureModel& model, const PcaModel* pca,
                     const SupertagInventory* inventory, const Sentence& sentence);

  std::vector<AddressedValue> Sparse(const Configuration& config) const;
  std::vector<double> Dense(const Configuration& config) const;
  FeatureVector Extract(const Configuration& config, FeatureDictionary& dict) const;
  FeatureVector Extract(const Configuration& config,
                        const FeatureDictionary& dict) const;

 private:
  const FeatureModel& model_;
  const PcaModel* pca_;
  const SupertagInventory* inventory_;
  const Sentence& sentence_;
  std::vector<std::vector<double>> projected_;
};

}  // namespace stparse

#endif  // STPARSE_FEATURES_H_
