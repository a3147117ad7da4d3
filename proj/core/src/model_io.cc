#include "stparse/model_io.h"

#include <bit>
#include <cstring>

#include "stparse/errors.h"

namespace stparse {

static_assert(std::endian::native == std::endian::little,
              "model files are written in host byte order, which must be little-endian");

namespace {

constexpr char kMagic[8] = {'S', 'T', 'P', 'A', 'R', 'S', 'E', '\0'};

class Writer {
 public:
  void Bytes(const void* data, size_t n) {
    out_.append(static_cast<const char*>(data), n);
  }
  template <typename T>
  void Pod(T v) {
    Bytes(&v, sizeof(v));
  }
  void Str(std::string_view s) {
    Pod<uint64_t>(s.size());
    Bytes(s.data(), s.size());
  }
  void Strs(const std::vector<std::string>& v) {
    Pod<uint64_t>(v.size());
    for (const std::string& s : v) Str(s);
  }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  void Bytes(void* data, size_t n) {
    if (n > in_.size() - pos_) throw DataError("model file truncated");
    std::memcpy(data, in_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T Pod() {
    T v;
    Bytes(&v, sizeof(v));
    return v;
  }
  std::string Str() {
    const uint64_t n = Pod<uint64_t>();
    if (n > in_.size() - pos_) throw DataError("model file truncated");
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::vector<std::string> Strs() {
    const uint64_t n = Pod<uint64_t>();
    if (n > in_.size() - pos_) throw DataError("model file truncated");
    std::vector<std::string> v;
    v.reserve(n);
    for (uint64_t i = 0; i < n; ++i) v.push_back(Str());
    return v;
  }
  bool AtEnd() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  size_t pos_ = 0;
};

}  // namespace

std::string SerializeModel(const ParserModel& model) {
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.Pod<uint32_t>(kModelVersion);

  w.Str(model.features.name);
  w.Strs(model.features.TemplateSpecs());
  w.Pod<uint8_t>(model.features.sd);
  w.Str(SdAddressesName(model.features.sd_addresses));
  w.Pod<uint8_t>(model.features.bias);

  w.Str(TrainerName(model.trainer.trainer));
  w.Pod<int32_t>(model.trainer.epochs);
  w.Pod<double>(model.trainer.regularization_c);
  w.Pod<uint64_t>(model.trainer.seed);
  w.Pod<double>(model.trainer.dense_scale);
  w.Pod<uint64_t>(model.seed);

  w.Pod<uint8_t>(model.inventory.has_value());
  if (model.inventory) w.Strs(model.inventory->names());
  w.Pod<uint8_t>(model.pca.has_value());
  if (model.pca) w.Str(model.pca->Serialize());

  const LinearModel& lm = model.classifier;
  w.Strs(lm.actions().labels());
  w.Strs(model.dictionary.keys());
  w.Pod<int32_t>(lm.num_sparse());
  w.Pod<int32_t>(lm.num_dense());
  w.Pod<double>(lm.dense_scale());
  w.Pod<uint64_t>(lm.weights().size());
  w.Bytes(lm.weights().data(), lm.weights().size() * sizeof(float));
  return w.Take();
}

ParserModel DeserializeModel(std::string_view bytes) {
  Reader r(bytes);
  char magic[sizeof(kMagic)];
  r.Bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a stparse model file");
  }
  const uint32_t version = r.Pod<uint32_t>();
  if (version != kModelVersion) {
    throw DataError("model file version " + std::to_string(version) +
                    " is not supported (expected " + std::to_string(kModelVersion) + ")");
  }

  ParserModel model;
  try {
    std::string name = r.Str();
    std::vector<std::string> specs = r.Strs();
    const bool sd = r.Pod<uint8_t>() != 0;
    model.features = FeatureModel::FromTemplates(std::move(name), specs, sd);
    model.features.sd_addresses = ParseSdAddresses(r.Str());
    model.features.bias = r.Pod<uint8_t>() != 0;

    model.trainer.trainer = ParseTrainerName(r.Str());
    model.trainer.epochs = r.Pod<int32_t>();
    model.trainer.regularization_c = r.Pod<double>();
    model.trainer.seed = r.Pod<uint64_t>();
    model.trainer.dense_scale = r.Pod<double>();
    model.seed = r.Pod<uint64_t>();

    if (r.Pod<uint8_t>()) model.inventory = SupertagInventory(r.Strs());
    if (r.Pod<uint8_t>()) model.pca = PcaModel::Parse(r.Str());

    ActionSpace actions(r.Strs());
    model.dictionary = FeatureDictionary::FromKeys(r.Strs(), /*frozen=*/true);
    const int num_sparse = r.Pod<int32_t>();
    const int num_dense = r.Pod<int32_t>();
    const double scale = r.Pod<double>();
    if (num_sparse != static_cast<int>(model.dictionary.size()) || num_dense < 0 ||
        (model.pca ? 2 * model.pca->k() : 0) != (model.features.sd ? num_dense : 0)) {
      throw DataError("model file has inconsistent feature dimensions");
    }
    model.classifier = LinearModel(std::move(actions), num_sparse, num_dense, scale);
    const uint64_t cells = r.Pod<uint64_t>();
    std::vector<float>& weights = model.classifier.mutable_weights();
    if (cells != weights.size()) throw DataError("model file weight table has wrong size");
    r.Bytes(weights.data(), weights.size() * sizeof(float));
  } catch (const PreconditionError& e) {
    throw DataError(std::string("corrupt model file: ") + e.what());
  }
  if (!r.AtEnd()) throw DataError("trailing bytes after model data");
  return model;
}

void SaveModel(const ParserModel& model, const std::string& path) {
  WriteFile(path, SerializeModel(model));
}

ParserModel LoadModel(const std::string& path) { return DeserializeModel(ReadFile(path)); }

}  // namespace stparse
