#include "stparse/parser.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "stparse/errors.h"
#include "stparse/random.h"
#include "text_util.h"

namespace stparse {

namespace {

void Log(const Logger& log, const std::string& message) {
  if (log) log(message);
}

std::string Percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

}  // namespace

PcaModel FitSupertagPca(std::span<const Sentence> sentences, int inventory_size,
                        const PcaOptions& options, PcaSampling sampling,
                        double sample_fraction, uint64_t sample_seed) {
  std::vector<SparseVector> vectors;
  if (sampling == PcaSampling::kTokens) {
    for (const Sentence& s : sentences) {
      for (const Token& t : s.tokens) {
        if (t.supertag_dist) vectors.push_back(ToSparse(*t.supertag_dist));
      }
    }
  } else {
    // One vector per word form: the mean of its token distributions.
    std::map<std::string, std::pair<std::map<int, double>, int>> by_form;
    for (const Sentence& s : sentences) {
      for (const Token& t : s.tokens) {
        if (!t.supertag_dist) continue;
        auto& [sum, count] = by_form[t.form];
        for (const SupertagEntry& e : t.supertag_dist->entries()) sum[e.tag] += e.prob;
        ++count;
      }
    }
    for (const auto& [form, entry] : by_form) {
      SparseVector v;
      for (const auto& [tag, sum] : entry.first) v.push_back({tag, sum / entry.second});
      vectors.push_back(std::move(v));
    }
  }
  if (sample_fraction < 1.0) {
    if (!(sample_fraction > 0.0)) {
      throw PreconditionError("PCA sample fraction must lie in (0, 1]");
    }
    Rng rng(sample_seed);
    std::vector<SparseVector> kept;
    for (SparseVector& v : vectors) {
      if (UniformUnit(rng) < sample_fraction) kept.push_back(std::move(v));
    }
    vectors = std::move(kept);
  }
  return FitPca(vectors, inventory_size, options);
}

ParserModel TrainPipeline(std::span<const Sentence> treebank,
                          const SupertagInventory* inventory, const TrainOptions& options,
                          TrainSummary* summary) {
  TrainSummary local;
  TrainSummary& stats = summary ? *summary : local;
  stats = TrainSummary{};

  const FeatureModel& features = options.features;
  const bool needs_supertags = features.UsesSupertags();
  std::vector<const Sentence*> used;
  for (size_t i = 0; i < treebank.size(); ++i) {
    const Sentence& s = treebank[i];
    if (s.empty()) continue;
    if (needs_supertags && !s.HasSupertags()) {
      throw DataError("training sentence " + std::to_string(i + 1) +
                      " lacks the supertag annotations feature model " + features.name +
                      " needs");
    }
    if (!IsProjective(s)) {
      stats.filtered.push_back(static_cast<int>(i + 1));
      Log(options.log,
          "warning: skipping non-projective training sentence " + std::to_string(i + 1));
      continue;
    }
    used.push_back(&s);
  }
  Log(options.log, "filtered " + std::to_string(stats.filtered.size()) +
                       " non-projective sentence(s); training on " +
                       std::to_string(used.size()));
  if (used.empty()) throw DataError("no projective training sentences left");
  stats.sentences_used = static_cast<int>(used.size());

  ParserModel model;
  model.features = features;
  model.seed = options.seed;
  model.trainer = options.trainer;
  model.trainer.seed = DeriveSeed(options.seed, "trainer");
  if (inventory) model.inventory = *inventory;

  if (features.sd) {
    int n = inventory ? inventory->size() : 0;
    if (n == 0) n = used.front()->tokens.front().supertag_dist->dimension();
    if (options.pca) {
      if (options.pca->n() != n) {
        throw PreconditionError("PCA model input dimension " + std::to_string(options.pca->n()) +
                                " does not match inventory size " + std::to_string(n));
      }
      model.pca = *options.pca;
    } else {
      std::vector<Sentence> copies;
      copies.reserve(used.size());
      for (const Sentence* s : used) copies.push_back(*s);
      PcaOptions pca_options;
      pca_options.k = options.k;
      pca_options.center = options.center;
      pca_options.solver = options.solver;
      pca_options.seed = DeriveSeed(options.seed, "pca");
      model.pca = FitSupertagPca(copies, n, pca_options, options.sampling,
                                 options.pca_sample_fraction,
                                 DeriveSeed(options.seed, "pca-sample"));
      Log(options.log, "fitted PCA: n=" + std::to_string(n) + " k=" +
                           std::to_string(model.pca->k()) + " captured " +
                           Percent(model.pca->CapturedVariance(model.pca->k()) /
                                   model.pca->total_variance()) +
                           "% of variance");
    }
  }

  std::vector<std::string> labels;
  for (const Sentence* s : used) {
    for (const Token& t : s->tokens) labels.push_back(t.gold_label);
  }
  ActionSpace actions(std::move(labels));

  const PcaModel* pca = model.pca ? &*model.pca : nullptr;
  const SupertagInventory* names = model.inventory ? &*model.inventory : nullptr;
  std::vector<TrainingInstance> instances;
  for (const Sentence* s : used) {
    SentenceFeaturizer featurizer(model.features, pca, names, *s);
    for (const OracleStep& step : DeriveSequence(*s)) {
      instances.push_back(
          {featurizer.Extract(step.config, model.dictionary), actions.IdOf(step.transition)});
    }
  }
  model.dictionary.Freeze();
  stats.instances = static_cast<int64_t>(instances.size());
  stats.features = static_cast<int64_t>(model.dictionary.size());
  Log(options.log, std::to_string(instances.size()) + " training instances, " +
                       std::to_string(model.dictionary.size()) + " features, " +
                       std::to_string(actions.size()) + " actions");

  const int num_dense = features.sd ? 2 * model.pca->k() : 0;
  model.classifier = Train(instances, actions, static_cast<int>(model.dictionary.size()),
                           num_dense, model.trainer, &stats.epochs,
                           [&](const EpochStats& e) {
                             Log(options.log, "epoch " + std::to_string(e.epoch) +
                                                  ": training accuracy " +
                                                  Percent(e.accuracy) + "%");
                           });
  return model;
}

KindSet ParserLegal(const Configuration& config) {
  KindSet legal = Legal(config);
  if (config.stack_size() == 2 && config.buffer_size() > 0) {
    KindSet restricted;
    for (TransitionKind k : {TransitionKind::kShift, TransitionKind::kLeftArc}) {
      if (legal.Contains(k)) restricted.Insert(k);
    }
    return restricted;
  }
  return legal;
}

ParsedSentence ParseWithPolicy(const Sentence& sentence, const Policy& policy) {
  ParsedSentence out;
  Configuration config = Configuration::Initial(sentence);
  out.transitions.reserve(2 * sentence.tokens.size());
  while (!IsTerminal(config)) {
    Transition t = policy(config);
    config = Apply(config, t);
    out.transitions.push_back(std::move(t));
  }
  out.arcs = config.SortedArcs();
  return out;
}

ParsedSentence ParseSentence(const ParserModel& model, const Sentence& sentence) {
  const PcaModel* pca = model.pca ? &*model.pca : nullptr;
  const SupertagInventory* names = model.inventory ? &*model.inventory : nullptr;
  SentenceFeaturizer featurizer(model.features, pca, names, sentence);
  const FeatureDictionary& dict = model.dictionary;
  return ParseWithPolicy(sentence, [&](const Configuration& config) {
    FeatureVector fv = featurizer.Extract(config, dict);
    const int action = PredictLegal(model.classifier, fv, ParserLegal(config));
    return model.classifier.actions().At(action);
  });
}

std::vector<std::vector<Arc>> ParseCorpus(const ParserModel& model,
                                          std::span<const Sentence> sentences) {
  std::vector<std::vector<Arc>> out;
  out.reserve(sentences.size());
  for (const Sentence& s : sentences) {
    out.push_back(s.empty() ? std::vector<Arc>{} : ParseSentence(model, s).arcs);
  }
  return out;
}

std::vector<Sentence> WithPredictions(std::span<const Sentence> sentences,
                                      std::span<const std::vector<Arc>> predicted) {
  if (sentences.size() != predicted.size()) {
    throw PreconditionError("prediction count does not match sentence count");
  }
  std::vector<Sentence> out(sentences.begin(), sentences.end());
  for (size_t s = 0; s < out.size(); ++s) {
    for (const Arc& a : predicted[s]) {
      Token& t = out[s].at(a.dependent);
      t.pred_head = a.head;
      t.pred_label = a.label;
    }
  }
  return out;
}

std::set<std::string> EvalOptions::DefaultPunctTags() {
  return {"``", "''", ",", ".", ":", "-LRB-", "-RRB-", "#", "$", "PUNCT", "PU"};
}

EvalReport Evaluate(std::span<const Sentence> gold,
                    std::span<const std::vector<Arc>> predicted, const EvalOptions& options) {
  if (gold.size() != predicted.size()) {
    throw DataError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                    std::to_string(predicted.size()));
  }
  EvalReport report;
  report.punct_excluded = options.exclude_punct;
  report.sentences = static_cast<int64_t>(gold.size());
  for (size_t s = 0; s < gold.size(); ++s) {
    const Sentence& g = gold[s];
    std::vector<const Arc*> by_dependent(g.tokens.size() + 1, nullptr);
    for (const Arc& a : predicted[s]) {
      if (a.dependent < 1 || a.dependent > g.size() || by_dependent[a.dependent]) {
        throw DataError("sentence " + std::to_string(s + 1) +
                        ": predicted arcs do not align with the gold tokens");
      }
      by_dependent[a.dependent] = &a;
    }
    if (predicted[s].size() != g.tokens.size()) {
      throw DataError("sentence " + std::to_string(s + 1) + ": " +
                      std::to_string(predicted[s].size()) + " predicted heads for " +
                      std::to_string(g.tokens.size()) + " tokens");
    }
    for (const Token& t : g.tokens) {
      if (options.exclude_punct && options.punct_tags.count(t.pos)) continue;
      ++report.tokens;
      const Arc& a = *by_dependent[t.index];
      if (a.head == t.gold_head) {
        ++report.correct_heads;
        if (a.label == t.gold_label) ++report.correct_labeled;
      }
    }
  }
  if (report.tokens > 0) {
    report.uas = static_cast<double>(report.correct_heads) / static_cast<double>(report.tokens);
    report.las =
        static_cast<double>(report.correct_labeled) / static_cast<double>(report.tokens);
  }
  return report;
}

EvalReport Evaluate(std::span<const Sentence> gold, std::span<const Sentence> predicted,
                    const EvalOptions& options) {
  if (gold.size() != predicted.size()) {
    throw DataError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                    std::to_string(predicted.size()));
  }
  std::vector<std::vector<Arc>> arcs;
  arcs.reserve(predicted.size());
  for (size_t s = 0; s < predicted.size(); ++s) {
    if (predicted[s].tokens.size() != gold[s].tokens.size()) {
      throw DataError("sentence " + std::to_string(s + 1) + ": gold has " +
                      std::to_string(gold[s].tokens.size()) + " tokens, prediction has " +
                      std::to_string(predicted[s].tokens.size()));
    }
    arcs.push_back(GoldArcs(predicted[s]));
  }
  return Evaluate(gold, arcs, options);
}

std::string FormatReport(const EvalReport& report) {
  std::ostringstream out;
  out << "UAS\t" << Percent(report.uas) << "\n"
      << "LAS\t" << Percent(report.las) << "\n"
      << "tokens\t" << report.tokens << "\n"
      << "sentences\t" << report.sentences << "\n"
      << "punctuation\t" << (report.punct_excluded ? "excluded" : "included") << "\n";
  return out.str();
}

std::vector<AblationConfig> ParseAblationGrid(std::string_view text) {
  std::vector<AblationConfig> configs;
  int line_number = 0;
  for (std::string_view raw : SplitLines(text)) {
    ++line_number;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    AblationConfig config;
    const size_t space = line.find_first_of(" \t");
    config.name = std::string(line.substr(0, space));
    if (space != std::string_view::npos) {
      for (std::string_view k : Split(Trim(line.substr(space)), ',')) {
        int value = 0;
        if (!ParseInt(Trim(k), value) || value < 1) {
          throw DataError("grid line " + std::to_string(line_number) + ": bad k '" +
                          std::string(k) + "'");
        }
        config.ks.push_back(value);
      }
    }
    try {
      FeatureModel::FromName(config.name);
    } catch (const PreconditionError& e) {
      throw DataError("grid line " + std::to_string(line_number) + ": " + e.what());
    }
    configs.push_back(std::move(config));
  }
  return configs;
}

std::vector<AblationRow> AblationRun(std::span<const Sentence> train,
                                     std::span<const Sentence> dev,
                                     const SupertagInventory* inventory,
                                     std::span<const AblationConfig> configs,
                                     const TrainOptions& base, const EvalOptions& eval) {
  std::vector<AblationRow> rows;
  for (const AblationConfig& config : configs) {
    FeatureModel features = FeatureModel::FromName(config.name);
    features.bias = base.features.bias;
    features.sd_addresses = base.features.sd_addresses;
    std::vector<int> ks = config.ks;
    if (!features.sd) {
      ks = {0};
    } else if (ks.empty()) {
      ks = {base.k};
    }
    for (int k : ks) {
      TrainOptions options = base;
      options.features = features;
      options.pca.reset();
      if (features.sd) options.k = k;
      Log(base.log, "== " + config.name + (features.sd ? " k=" + std::to_string(k) : ""));
      ParserModel model = TrainPipeline(train, inventory, options);
      AblationRow row;
      row.config = config.name;
      row.k = features.sd ? k : 0;
      row.report = Evaluate(dev, ParseCorpus(model, dev), eval);
      if (model.pca && model.pca->total_variance() > 0.0) {
        row.captured_fraction =
            model.pca->CapturedVariance(model.pca->k()) / model.pca->total_variance();
      }
      row.seed = base.seed;
      Log(base.log, "   UAS " + Percent(row.report.uas) + " LAS " + Percent(row.report.las));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string FormatResultsTable(std::span<const AblationRow> rows) {
  std::ostringstream out;
  out << "config\tk\tUAS\tLAS\ttokens\tpunct\tseed\tcaptured_variance\n";
  for (const AblationRow& row : rows) {
    char captured[32] = "NA";
    if (row.captured_fraction) std::snprintf(captured, sizeof(captured), "%.6f", *row.captured_fraction);
    out << row.config << '\t' << row.k << '\t' << Percent(row.report.uas) << '\t'
        << Percent(row.report.las) << '\t' << row.report.tokens << '\t'
        << row.report.PunctConvention() << '\t' << row.seed << '\t' << captured << '\n';
  }
  return out.str();
}

}  // namespace stparse
