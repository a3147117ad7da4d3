#include "stparse/features.h"

#include <algorithm>

#include "stparse/errors.h"
#include "text_util.h"

namespace stparse {

namespace {

// Separates template name and value components in dictionary keys. CoNLL
// fields cannot contain tabs, so keys are unambiguous.
constexpr char kKeySeparator = '\t';

Address ParseAddress(std::string_view spec, std::string_view whole) {
  auto fail = [&](const std::string& why) -> Address {
    throw PreconditionError("bad feature template '" + std::string(whole) + "': " + why);
  };
  std::vector<std::string_view> steps = Split(spec, '.');
  if (steps.size() < 2) return fail("expected <word>.<attribute>");
  Address address;
  std::string_view base = steps.front();
  if (base.size() < 2 || (base[0] != 'S' && base[0] != 'B')) {
    return fail("word must be S<i> or B<i>");
  }
  address.on_stack = base[0] == 'S';
  if (!ParseInt(base.substr(1), address.position) || address.position < 0) {
    return fail("bad position in '" + std::string(base) + "'");
  }
  for (size_t i = 1; i + 1 < steps.size(); ++i) {
    if (steps[i] == "ld") {
      address.path.push_back(Step::kLeftmost);
    } else if (steps[i] == "rd") {
      address.path.push_back(Step::kRightmost);
    } else if (steps[i] == "h") {
      address.path.push_back(Step::kHead);
    } else {
      return fail("unknown step '" + std::string(steps[i]) + "'");
    }
  }
  std::string_view attr = steps.back();
  if (attr == "w") {
    address.attribute = Attribute::kForm;
  } else if (attr == "t") {
    address.attribute = Attribute::kPos;
  } else if (attr == "r") {
    address.attribute = Attribute::kLabel;
  } else if (attr == "bs") {
    address.attribute = Attribute::kSupertag;
  } else {
    return fail("unknown attribute '" + std::string(attr) + "'");
  }
  return address;
}

std::optional<int> ResolveWord(const Address& address, const Configuration& config) {
  std::optional<int> word = address.on_stack ? config.StackAt(address.position)
                                             : config.BufferAt(address.position);
  for (Step step : address.path) {
    if (!word) return std::nullopt;
    switch (step) {
      case Step::kLeftmost:
        word = config.LeftmostDependent(*word);
        break;
      case Step::kRightmost:
        word = config.RightmostDependent(*word);
        break;
      case Step::kHead:
        word = config.HeadOf(*word);
        break;
    }
  }
  return word;
}

std::optional<std::string> ResolveValue(const Address& address, const Configuration& config,
                                        const Sentence& sentence,
                                        const SupertagInventory* inventory) {
  std::optional<int> word = ResolveWord(address, config);
  if (!word) return std::nullopt;
  if (address.attribute == Attribute::kLabel) return config.LabelOf(*word);
  if (*word == kRootIndex) return std::string(kRootValue);
  const Token& token = sentence.at(*word);
  switch (address.attribute) {
    case Attribute::kForm:
      return token.form;
    case Attribute::kPos:
      return token.pos;
    case Attribute::kSupertag:
      if (!token.best_supertag) return std::nullopt;
      if (inventory && *token.best_supertag < inventory->size()) {
        return inventory->Name(*token.best_supertag);
      }
      return std::to_string(*token.best_supertag);
    case Attribute::kLabel:
      break;
  }
  return std::nullopt;
}

std::vector<Template> ParseAll(std::initializer_list<const char*> specs) {
  std::vector<Template> out;
  for (const char* s : specs) out.push_back(Template::Parse(s));
  return out;
}

const Template& BiasTemplate() {
  static const Template bias = Template::Constant("BIAS");
  return bias;
}

}  // namespace

Template Template::Parse(std::string_view spec) {
  Template t;
  t.name_ = std::string(spec);
  if (spec.empty()) throw PreconditionError("empty feature template");
  for (std::string_view part : Split(spec, ':')) {
    t.parts_.push_back(ParseAddress(part, spec));
  }
  return t;
}

Template Template::Constant(std::string_view name) {
  Template t;
  t.name_ = std::string(name);
  return t;
}

std::string AddressedValue::Value() const {
  std::string out;
  for (size_t i = 0; i < components.size(); ++i) {
    if (i > 0) out += ':';
    out += components[i] ? *components[i] : std::string(kNullValue);
  }
  return out;
}

bool AddressedValue::AllNull() const {
  return std::none_of(components.begin(), components.end(),
                      [](const auto& c) { return c.has_value(); });
}

std::vector<AddressedValue> ExtractTemplates(std::span<const Template> templates,
                                             const Configuration& config,
                                             const Sentence& sentence,
                                             const SupertagInventory* inventory) {
  std::vector<AddressedValue> values;
  values.reserve(templates.size());
  for (const Template& t : templates) {
    AddressedValue v;
    v.source = &t;
    v.components.reserve(t.parts().size());
    for (const Address& a : t.parts()) {
      v.components.push_back(ResolveValue(a, config, sentence, inventory));
    }
    values.push_back(std::move(v));
  }
  return values;
}

std::span<const Template> BaselineTemplates() {
  static const std::vector<Template> templates = ParseAll({
      // single word
      "S0.w", "S1.w", "S2.w", "B0.w", "B1.w", "S0.ld.w", "S0.ld.t", "S0.rd.t",
      "S1.ld.t", "S1.rd.t", "S0.ld.r", "S0.rd.r", "S0.rd.w", "S0.t", "S1.t", "S2.t",
      "S3.t", "B0.t", "B1.t", "B2.t",
      // two words
      "S0.t:S1.t", "S0.w:B0.w", "S0.t:S0.w", "S1.t:S1.w", "B0.t:B0.w",
      "S1.rd.r:S0.ld.r",
      // three words
      "S0.t:S1.t:B0.t", "S0.t:S1.t:S2.t", "S0.t:B0.t:B1.t", "B0.t:B1.t:B2.t",
      "B1.t:B2.t:B3.t", "S1.rd.t:S1.ld.t:S1.t", "S1.t:S1.ld.r:S1.rd.r",
  });
  return templates;
}

std::span<const Template> BestSupertagTemplates() {
  static const std::vector<Template> templates = ParseAll({
      // single word
      "S0.bs", "S1.bs", "S2.bs", "S3.bs", "B0.bs", "B1.bs", "B2.bs", "B3.bs",
      // two words
      "S0.bs:S1.bs", "S0.bs:S0.w", "S1.bs:S1.w", "B0.bs:B0.w",
      // three words (there is no B0.bs:B1.bs:B2.bs)
      "S0.bs:S1.bs:B0.bs", "S0.bs:S1.bs:S2.bs", "S0.bs:B0.bs:B1.bs",
      "B1.bs:B2.bs:B3.bs",
  });
  return templates;
}

std::vector<AddressedValue> ExtractBaseline(const Configuration& config,
                                            const Sentence& sentence) {
  return ExtractTemplates(BaselineTemplates(), config, sentence);
}

std::vector<AddressedValue> ExtractBs(const Configuration& config, const Sentence& sentence,
                                      const SupertagInventory* inventory) {
  return ExtractTemplates(BestSupertagTemplates(), config, sentence, inventory);
}

std::string SdAddressesName(SdAddresses a) {
  return a == SdAddresses::kS0S1 ? "s0s1" : "s0b0";
}

SdAddresses ParseSdAddresses(std::string_view name) {
  if (name == "s0s1") return SdAddresses::kS0S1;
  if (name == "s0b0") return SdAddresses::kS0B0;
  throw PreconditionError("unknown sd-addresses '" + std::string(name) +
                          "' (expected s0s1 or s0b0)");
}

std::vector<std::vector<double>> ProjectSentence(const PcaModel& pca,
                                                 const Sentence& sentence) {
  std::vector<std::vector<double>> table(sentence.tokens.size() + 1);
  table[0].assign(pca.k(), 0.0);
  for (const Token& t : sentence.tokens) {
    if (t.supertag_dist && !t.supertag_dist->empty()) {
      table[t.index] = pca.Project(*t.supertag_dist);
    } else {
      table[t.index].assign(pca.k(), 0.0);
    }
  }
  return table;
}

std::vector<double> ExtractSd(const Configuration& config,
                              const std::vector<std::vector<double>>& projected, int k,
                              SdAddresses addresses) {
  std::vector<double> dense(2 * static_cast<size_t>(k), 0.0);
  const std::optional<int> first = config.StackAt(0);
  const std::optional<int> second =
      addresses == SdAddresses::kS0S1 ? config.StackAt(1) : config.BufferAt(0);
  auto copy_block = [&](std::optional<int> word, size_t offset) {
    if (!word || *word == kRootIndex) return;
    const std::vector<double>& y = projected.at(*word);
    std::copy(y.begin(), y.end(), dense.begin() + offset);
  };
  copy_block(first, 0);
  copy_block(second, k);
  return dense;
}

std::vector<double> ExtractSd(const Configuration& config, const Sentence& sentence,
                              const PcaModel& pca, SdAddresses addresses) {
  return ExtractSd(config, ProjectSentence(pca, sentence), pca.k(), addresses);
}

std::string FeatureDictionary::Key(const AddressedValue& v) {
  std::string key = v.source ? v.source->name() : std::string();
  for (const auto& c : v.components) {
    key += kKeySeparator;
    key += c ? *c : std::string(kNullValue);
  }
  return key;
}

std::optional<uint32_t> FeatureDictionary::Lookup(const AddressedValue& v) {
  std::string key = Key(v);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  if (frozen_) return std::nullopt;
  const uint32_t id = static_cast<uint32_t>(keys_.size());
  ids_.emplace(key, id);
  keys_.push_back(std::move(key));
  return id;
}

std::optional<uint32_t> FeatureDictionary::Find(const AddressedValue& v) const {
  auto it = ids_.find(Key(v));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

FeatureDictionary FeatureDictionary::FromKeys(std::vector<std::string> keys, bool frozen) {
  FeatureDictionary dict;
  dict.ids_.reserve(keys.size());
  for (size_t i = 0; i < keys.size(); ++i) {
    if (!dict.ids_.emplace(keys[i], static_cast<uint32_t>(i)).second) {
      throw DataError("duplicate feature key in dictionary");
    }
  }
  dict.keys_ = std::move(keys);
  dict.frozen_ = frozen;
  return dict;
}

namespace {

template <typename Dict>
FeatureVector AssembleImpl(std::span<const AddressedValue> values, Dict& dict,
                           std::span<const double> dense) {
  FeatureVector fv;
  fv.sparse.reserve(values.size());
  for (const AddressedValue& v : values) {
    std::optional<uint32_t> id;
    if constexpr (std::is_const_v<Dict>) {
      id = dict.Find(v);
    } else {
      id = dict.Lookup(v);
    }
    if (id) fv.sparse.push_back(*id);
  }
  std::sort(fv.sparse.begin(), fv.sparse.end());
  fv.sparse.erase(std::unique(fv.sparse.begin(), fv.sparse.end()), fv.sparse.end());
  fv.dense.assign(dense.begin(), dense.end());
  return fv;
}

}  // namespace

FeatureVector Assemble(std::span<const AddressedValue> values, FeatureDictionary& dict,
                       std::span<const double> dense) {
  return AssembleImpl(values, dict, dense);
}

FeatureVector Assemble(std::span<const AddressedValue> values, const FeatureDictionary& dict,
                       std::span<const double> dense) {
  return AssembleImpl(values, dict, dense);
}

FeatureModel FeatureModel::FromName(std::string_view name) {
  FeatureModel model;
  model.name = std::string(name);
  auto add = [&](std::span<const Template> templates) {
    model.templates.insert(model.templates.end(), templates.begin(), templates.end());
  };
  for (std::string_view part : Split(name, '+')) {
    part = Trim(part);
    if (part == "BL") {
      add(BaselineTemplates());
    } else if (part == "BS") {
      add(BestSupertagTemplates());
    } else if (part == "SD") {
      model.sd = true;
    } else if (part == "FORM") {
      add(ParseAll({"S0.w", "S1.w"}));
    } else if (part == "POS") {
      add(ParseAll({"S0.t", "S1.t"}));
    } else if (part == "SUPERTAG") {
      add(ParseAll({"S0.bs", "S1.bs"}));
    } else {
      throw PreconditionError("unknown feature model component '" + std::string(part) +
                              "' (expected BL, BS, SD, FORM, POS or SUPERTAG)");
    }
  }
  return model;
}

FeatureModel FeatureModel::FromTemplates(std::string name, std::span<const std::string> specs,
                                         bool sd) {
  FeatureModel model;
  model.name = std::move(name);
  for (const std::string& s : specs) model.templates.push_back(Template::Parse(s));
  model.sd = sd;
  return model;
}

bool FeatureModel::UsesSupertags() const {
  if (sd) return true;
  for (const Template& t : templates) {
    for (const Address& a : t.parts()) {
      if (a.attribute == Attribute::kSupertag) return true;
    }
  }
  return false;
}

std::vector<std::string> FeatureModel::TemplateSpecs() const {
  std::vector<std::string> specs;
  for (const Template& t : templates) specs.push_back(t.name());
  return specs;
}

SentenceFeaturizer::SentenceFeaturizer(const FeatureModel& model, const PcaModel* pca,
                                       const SupertagInventory* inventory,
                                       const Sentence& sentence)
    : model_(model), pca_(pca), inventory_(inventory), sentence_(sentence) {
  if (model_.sd) {
    if (!pca_) throw PreconditionError("SD features need a PCA model");
    projected_ = ProjectSentence(*pca_, sentence_);
  }
}

std::vector<AddressedValue> SentenceFeaturizer::Sparse(const Configuration& config) const {
  std::vector<AddressedValue> values =
      ExtractTemplates(model_.templates, config, sentence_, inventory_);
  if (model_.bias) {
    AddressedValue bias;
    bias.source = &BiasTemplate();
    bias.components.push_back(std::string("BIAS"));
    values.push_back(std::move(bias));
  }
  return values;
}

std::vector<double> SentenceFeaturizer::Dense(const Configuration& config) const {
  if (!model_.sd) return {};
  return ExtractSd(config, projected_, pca_->k(), model_.sd_addresses);
}

FeatureVector SentenceFeaturizer::Extract(const Configuration& config,
                                          FeatureDictionary& dict) const {
  return Assemble(Sparse(config), dict, Dense(config));
}

FeatureVector SentenceFeaturizer::Extract(const Configuration& config,
                                          const FeatureDictionary& dict) const {
  return Assemble(Sparse(config), dict, Dense(config));
}

}  // namespace stparse
