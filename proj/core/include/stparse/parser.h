#ifndef STPARSE_PARSER_H_
#define STPARSE_PARSER_H_

// Training driver, greedy parsing loop, attachment scoring and the feature
// ablation grid.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "stparse/classifier.h"
#include "stparse/features.h"
#include "stparse/pca.h"
#include "stparse/transition.h"
#include "stparse/treebank.h"

namespace stparse {

using Logger = std::function<void(const std::string&)>;

// Everything needed to parse: feature model, PCA, supertag names, feature
// dictionary and weights. Serialized by SaveModel/LoadModel.
struct ParserModel {
  FeatureModel features;
  std::optional<PcaModel> pca;
  std::optional<SupertagInventory> inventory;
  FeatureDictionary dictionary;
  LinearModel classifier;
  TrainerOptions trainer;
  uint64_t seed = 0;
};

enum class PcaSampling { kTokens, kTypes };

struct TrainOptions {
  FeatureModel features = FeatureModel::FromName("BL");
  // PCA settings, used when features.sd is set and no pre-fitted model is given.
  int k = 320;
  bool center = true;
  PcaSolver solver = PcaSolver::kDense;
  PcaSampling sampling = PcaSampling::kTokens;
  // Fraction of training vectors kept for fitting (uniform, seeded).
  double pca_sample_fraction = 1.0;
  std::optional<PcaModel> pca;

  TrainerOptions trainer;
  // Run seed; PCA, subsampling and trainer seeds are derived from it.
  uint64_t seed = 1;
  Logger log;
};

struct TrainSummary {
  int sentences_used = 0;
  // 1-based positions of sentences dropped as non-projective.
  std::vector<int> filtered;
  int64_t instances = 0;
  int64_t features = 0;
  std::vector<EpochStats> epochs;
};

// Fits PCA (SD models), derives oracle instances from the projective training
// sentences, builds the feature dictionary and trains the classifier. Throws
// DataError when every sentence is filtered or a sentence lacks the supertag
// annotations the feature model needs; PCA precondition failures propagate.
ParserModel TrainPipeline(std::span<const Sentence> treebank,
                          const SupertagInventory* inventory, const TrainOptions& options,
                          TrainSummary* summary = nullptr);

// Fits a PCA model on the supertag distributions of `sentences`.
PcaModel FitSupertagPca(std::span<const Sentence> sentences, int inventory_size,
                        const PcaOptions& options, PcaSampling sampling = PcaSampling::kTokens,
                        double sample_fraction = 1.0, uint64_t sample_seed = 1);

struct ParsedSentence {
  std::vector<Arc> arcs;  // sorted by dependent
  std::vector<Transition> transitions;
};

// Chooses the next transition for a configuration.
using Policy = std::function<Transition(const Configuration&)>;

// Runs the greedy loop from the initial to a terminal configuration.
ParsedSentence ParseWithPolicy(const Sentence& sentence, const Policy& policy);

// Legal() further restricted so that only the last word can attach to the
// root: RightArc onto the root waits for an empty buffer. Every non-terminal
// configuration still has a legal transition.
KindSet ParserLegal(const Configuration& config);

ParsedSentence ParseSentence(const ParserModel& model, const Sentence& sentence);
std::vector<std::vector<Arc>> ParseCorpus(const ParserModel& model,
                                          std::span<const Sentence> sentences);

// Copies predicted arcs into pred_head/pred_label.
std::vector<Sentence> WithPredictions(std::span<const Sentence> sentences,
                                      std::span<const std::vector<Arc>> predicted);

struct EvalOptions {
  bool exclude_punct = false;
  std::set<std::string> punct_tags = DefaultPunctTags();

  static std::set<std::string> DefaultPunctTags();
};

struct EvalReport {
  double uas = 0.0;
  double las = 0.0;
  int64_t tokens = 0;
  int64_t sentences = 0;
  int64_t correct_heads = 0;
  int64_t correct_labeled = 0;
  bool punct_excluded = false;

  std::string PunctConvention() const {
    return punct_excluded ? "punct-excluded" : "punct-included";
  }
};

// Throws DataError when sentence or token counts do not line up.
EvalReport Evaluate(std::span<const Sentence> gold,
                    std::span<const std::vector<Arc>> predicted,
                    const EvalOptions& options = {});
// Gold trees vs the gold columns of a second (predicted) treebank.
EvalReport Evaluate(std::span<const Sentence> gold, std::span<const Sentence> predicted,
                    const EvalOptions& options = {});
std::string FormatReport(const EvalReport& report);

struct AblationConfig {
  std::string name;      // feature model name, e.g. "BL+BS+SD"
  std::vector<int> ks;   // SD models: one run per k
};

// Parses lines "<model> [k1,k2,...]"; blank lines and '#' comments are skipped.
std::vector<AblationConfig> ParseAblationGrid(std::string_view text);

struct AblationRow {
  std::string config;
  int k = 0;  // 0 for models without SD features
  EvalReport report;
  // Fraction of total supertag variance captured by k components (SD only).
  std::optional<double> captured_fraction;
  uint64_t seed = 0;
};

// Trains one model per (config, k) on `train` and scores it on `dev`. Both
// splits must already carry supertag annotations when a config needs them.
std::vector<AblationRow> AblationRun(std::span<const Sentence> train,
                                     std::span<const Sentence> dev,
                                     const SupertagInventory* inventory,
                                     std::span<const AblationConfig> configs,
                                     const TrainOptions& base, const EvalOptions& eval);

// Tab-separated: config, k, UAS, LAS, tokens, punct, seed, captured_variance.
std::string FormatResultsTable(std::span<const AblationRow> rows);

}  // namespace stparse

#endif  // STPARSE_PARSER_H_
