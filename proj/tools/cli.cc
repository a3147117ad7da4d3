#include "cli.h"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>

#include "stparse/errors.h"
#include "stparse/model_io.h"
#include "stparse/parser.h"
#include "stparse/pca.h"
#include "stparse/random.h"
#include "stparse/supertags.h"
#include "stparse/synthetic.h"
#include "stparse/treebank.h"

namespace stparse::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  std::string subcommand;
  uint64_t seed = 1;

  // Inputs and outputs.
  std::string treebank;
  std::vector<std::string> treebanks;
  std::string supertags;
  std::string inventory;
  std::string input;
  std::string model;
  std::string out;
  std::vector<std::string> outs;
  std::string gold;
  std::string pred;
  std::string pca_model;
  std::string inventory_out;
  std::string report;

  // Feature model and PCA.
  std::string features = "BL";
  int k = 320;
  std::string sd_addresses = "s0s1";
  bool no_center = false;
  std::string pca_solver = "dense";
  bool pca_types = false;
  double pca_sample = 1.0;
  bool bias = false;

  // Trainer.
  std::string trainer = "perceptron";
  int epochs = 10;
  double regularization_c = 1.0;
  double dense_scale = 1.0;

  // Evaluation.
  bool exclude_punct = false;
  std::vector<std::string> punct_tags;

  // Synthetic data.
  int inventory_size = 500;
  double noise = 0.2;
  int sentences = 1000;
  double pos_noise = 0.0;
  int min_length = 3;
  int max_length = 40;

  // Ablation.
  std::string train;
  std::string dev;
  std::string train_supertags;
  std::string dev_supertags;
  std::string grid;
  std::vector<std::string> configs;
  std::vector<int> ks;
};

std::string Timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%H:%M:%S", std::localtime(&now));
  return buf;
}

Logger MakeLogger(std::ostream& err) {
  return [&err](const std::string& message) { err << "[" << Timestamp() << "] " << message << "\n"; };
}

SupertagInventory LoadInventory(const std::string& path) {
  return SupertagInventory::Parse(ReadFile(path));
}

std::vector<Sentence> LoadAnnotated(const std::string& treebank, const std::string& supertags,
                                    const SupertagInventory* inventory) {
  std::vector<Sentence> sentences = ParseConll(ReadFile(treebank));
  if (supertags.empty()) return sentences;
  return AttachSupertags(sentences, ParseSupertagFile(ReadFile(supertags), *inventory));
}

EvalOptions MakeEvalOptions(const RunConfig& c) {
  EvalOptions eval;
  eval.exclude_punct = c.exclude_punct;
  if (!c.punct_tags.empty()) eval.punct_tags = {c.punct_tags.begin(), c.punct_tags.end()};
  return eval;
}

TrainOptions MakeTrainOptions(const RunConfig& c, std::ostream& err) {
  TrainOptions options;
  options.features = FeatureModel::FromName(c.features);
  options.features.sd_addresses = ParseSdAddresses(c.sd_addresses);
  options.features.bias = c.bias;
  options.k = c.k;
  options.center = !c.no_center;
  options.solver = c.pca_solver == "power" ? PcaSolver::kPowerIteration : PcaSolver::kDense;
  options.sampling = c.pca_types ? PcaSampling::kTypes : PcaSampling::kTokens;
  options.pca_sample_fraction = c.pca_sample;
  options.trainer.trainer = ParseTrainerName(c.trainer);
  options.trainer.epochs = c.epochs;
  options.trainer.regularization_c = c.regularization_c;
  options.trainer.dense_scale = c.dense_scale;
  options.seed = c.seed;
  options.log = MakeLogger(err);
  return options;
}

// Flag combinations that make the run pointless are rejected before any work.
void ValidateFeatureFlags(const RunConfig& c, bool needs_supertags, bool sd,
                          const std::string& supertag_flag) {
  if (needs_supertags && c.supertags.empty() && supertag_flag == "--supertags") {
    throw UsageError("feature model " + c.features + " needs --supertags");
  }
  if (needs_supertags && c.inventory.empty()) {
    throw UsageError("feature model " + c.features + " needs --inventory");
  }
  if (sd && c.k < 1 && c.pca_model.empty()) throw UsageError("--k must be at least 1");
}

int CmdTrain(const RunConfig& c, std::ostream& out, std::ostream& err) {
  FeatureModel features;
  try {
    features = FeatureModel::FromName(c.features);
    ParseSdAddresses(c.sd_addresses);
    ParseTrainerName(c.trainer);
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  ValidateFeatureFlags(c, features.UsesSupertags(), features.sd, "--supertags");

  std::optional<SupertagInventory> inventory;
  if (!c.inventory.empty()) inventory = LoadInventory(c.inventory);
  std::vector<Sentence> treebank =
      LoadAnnotated(c.treebank, c.supertags, inventory ? &*inventory : nullptr);
  TrainOptions options = MakeTrainOptions(c, err);
  if (!c.pca_model.empty()) options.pca = PcaModel::Parse(ReadFile(c.pca_model));

  TrainSummary summary;
  ParserModel model =
      TrainPipeline(treebank, inventory ? &*inventory : nullptr, options, &summary);
  SaveModel(model, c.out);
  out << "filtered_sentences\t" << summary.filtered.size() << "\n";
  for (const EpochStats& e : summary.epochs) {
    out << "epoch\t" << e.epoch << "\ttraining_accuracy\t" << e.accuracy << "\n";
  }
  out << "model\t" << c.out << "\n";
  return kOk;
}

int CmdParse(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ParserModel model = LoadModel(c.model);
  std::optional<SupertagInventory> inventory;
  if (!c.inventory.empty()) {
    inventory = LoadInventory(c.inventory);
  } else if (model.inventory) {
    inventory = model.inventory;
  }
  if (!c.supertags.empty() && !inventory) {
    throw UsageError("--supertags needs --inventory (the model carries none)");
  }
  std::vector<Sentence> sentences =
      LoadAnnotated(c.input, c.supertags, inventory ? &*inventory : nullptr);
  if (model.features.UsesSupertags() && c.supertags.empty()) {
    err << "warning: model " << model.features.name
        << " uses supertag features but no --supertags were given; using NULL/zero features\n";
  } else if (!model.features.UsesSupertags() && !c.supertags.empty()) {
    err << "warning: model " << model.features.name << " ignores supertag annotations\n";
  }
  if (model.features.sd && model.pca && inventory && inventory->size() != model.pca->n()) {
    throw DataError("inventory size " + std::to_string(inventory->size()) +
                    " does not match the model's PCA input dimension " +
                    std::to_string(model.pca->n()));
  }
  std::vector<std::vector<Arc>> predicted = ParseCorpus(model, sentences);
  std::string conll = EmitConll(WithPredictions(sentences, predicted), /*use_predicted=*/true);
  if (c.out.empty()) {
    out << conll;
  } else {
    WriteFile(c.out, conll);
  }
  return kOk;
}

int CmdEval(const RunConfig& c, std::ostream& out, std::ostream&) {
  std::vector<Sentence> gold = ParseConll(ReadFile(c.gold));
  std::vector<Sentence> pred = ParseConll(ReadFile(c.pred));
  const std::string report = FormatReport(Evaluate(gold, pred, MakeEvalOptions(c)));
  out << report;
  if (!c.out.empty()) WriteFile(c.out, report);
  return kOk;
}

int CmdPcaFit(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.k < 1) throw UsageError("--k must be at least 1");
  if (c.pca_types && c.treebank.empty()) throw UsageError("--types needs --treebank");
  SupertagInventory inventory = LoadInventory(c.inventory);
  std::vector<SentenceAnnotations> annotations =
      ParseSupertagFile(ReadFile(c.supertags), inventory);
  std::vector<Sentence> sentences;
  if (!c.treebank.empty()) {
    sentences = AttachSupertags(ParseConll(ReadFile(c.treebank)), annotations);
  } else {
    // Token identity is irrelevant without --types; wrap the annotations.
    for (const SentenceAnnotations& sa : annotations) {
      Sentence& s = sentences.emplace_back();
      for (const SupertagAnnotation& a : sa) {
        Token t;
        t.index = s.size() + 1;
        t.best_supertag = a.best;
        t.supertag_dist = a.dist;
        s.tokens.push_back(std::move(t));
      }
    }
  }
  PcaOptions options;
  options.k = c.k;
  options.center = !c.no_center;
  options.seed = DeriveSeed(c.seed, "pca");
  options.solver = c.pca_solver == "power" ? PcaSolver::kPowerIteration : PcaSolver::kDense;
  PcaModel model = FitSupertagPca(sentences, inventory.size(), options,
                                  c.pca_types ? PcaSampling::kTypes : PcaSampling::kTokens,
                                  c.pca_sample, DeriveSeed(c.seed, "pca-sample"));
  WriteFile(c.out, model.Serialize());
  const std::string report = FormatVarianceReport(model);
  out << report;
  if (!c.report.empty()) WriteFile(c.report, report);
  return kOk;
}

int CmdSynthSupertags(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.treebanks.size() != c.outs.size()) {
    throw UsageError("give one --out per --treebank");
  }
  std::vector<Sentence> all;
  std::vector<size_t> counts;
  for (const std::string& path : c.treebanks) {
    std::vector<Sentence> part = ParseConll(ReadFile(path));
    counts.push_back(part.size());
    all.insert(all.end(), part.begin(), part.end());
  }
  SynthOptions options;
  options.inventory_size = c.inventory_size;
  options.noise = c.noise;
  options.seed = DeriveSeed(c.seed, "synth-supertags");
  std::vector<SentenceAnnotations> annotations = SynthSupertags(all, options);
  const SupertagInventory inventory = SupertagInventory::Synthetic(c.inventory_size);
  size_t offset = 0;
  for (size_t i = 0; i < c.outs.size(); ++i) {
    std::span<const SentenceAnnotations> part(annotations.data() + offset, counts[i]);
    WriteFile(c.outs[i], EmitSupertagFile(part, inventory));
    offset += counts[i];
    out << "wrote\t" << c.outs[i] << "\t" << counts[i] << " sentences\n";
  }
  if (!c.inventory_out.empty()) WriteFile(c.inventory_out, inventory.Serialize());
  return kOk;
}

int CmdSynthTreebank(const RunConfig& c, std::ostream& out, std::ostream&) {
  SyntheticTreebankOptions options;
  options.sentences = c.sentences;
  options.seed = DeriveSeed(c.seed, "synth-treebank");
  options.pos_noise = c.pos_noise;
  options.min_length = c.min_length;
  options.max_length = c.max_length;
  std::vector<Sentence> sentences = GenerateTreebank(options);
  WriteFile(c.out, EmitConll(sentences));
  out << "wrote\t" << c.out << "\t" << sentences.size() << " sentences\n";
  return kOk;
}

int CmdAblate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::vector<AblationConfig> configs;
  if (!c.grid.empty()) configs = ParseAblationGrid(ReadFile(c.grid));
  for (const std::string& name : c.configs) {
    try {
      FeatureModel::FromName(name);
    } catch (const PreconditionError& e) {
      throw UsageError(e.what());
    }
    configs.push_back({name, {}});
  }
  if (configs.empty()) throw UsageError("ablate needs --grid or --configs");
  for (AblationConfig& config : configs) {
    if (config.ks.empty()) config.ks = c.ks.empty() ? std::vector<int>{c.k} : c.ks;
  }
  bool needs_supertags = false;
  for (const AblationConfig& config : configs) {
    needs_supertags |= FeatureModel::FromName(config.name).UsesSupertags();
  }
  if (needs_supertags && (c.train_supertags.empty() || c.dev_supertags.empty() ||
                          c.inventory.empty())) {
    throw UsageError(
        "supertag feature models need --train-supertags, --dev-supertags and --inventory");
  }
  std::optional<SupertagInventory> inventory;
  if (!c.inventory.empty()) inventory = LoadInventory(c.inventory);
  const SupertagInventory* inv = inventory ? &*inventory : nullptr;
  std::vector<Sentence> train = LoadAnnotated(c.train, c.train_supertags, inv);
  std::vector<Sentence> dev = LoadAnnotated(c.dev, c.dev_supertags, inv);

  RunConfig base_config = c;
  base_config.features = "BL";
  TrainOptions base = MakeTrainOptions(base_config, err);
  std::vector<AblationRow> rows =
      AblationRun(train, dev, inv, configs, base, MakeEvalOptions(c));
  const std::string table = FormatResultsTable(rows);
  if (c.out.empty()) {
    out << table;
  } else {
    WriteFile(c.out, table);
    out << "wrote\t" << c.out << "\t" << rows.size() << " rows\n";
  }
  return kOk;
}

void AddFeatureOptions(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--features", c.features, "Feature model: BL, BS, SD, FORM, POS, SUPERTAG joined by '+'")
      ->capture_default_str();
  cmd->add_option("--k", c.k, "PCA dimension of the SD block")->capture_default_str();
  cmd->add_option("--sd-addresses", c.sd_addresses, "Words feeding the SD block")
      ->check(CLI::IsMember({"s0s1", "s0b0"}))
      ->capture_default_str();
  cmd->add_flag("--no-center", c.no_center, "Do not mean-center before projecting");
  cmd->add_option("--pca-solver", c.pca_solver, "Eigensolver")
      ->check(CLI::IsMember({"dense", "power"}))
      ->capture_default_str();
  cmd->add_flag("--pca-types", c.pca_types, "Fit PCA on word types instead of tokens");
  cmd->add_option("--pca-sample", c.pca_sample, "Fraction of vectors used to fit PCA")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_flag("--bias", c.bias, "Add a constant bias feature");
}

void AddTrainerOptions(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--trainer", c.trainer, "perceptron or hinge-sgd")
      ->check(CLI::IsMember({"perceptron", "hinge-sgd"}))
      ->capture_default_str();
  cmd->add_option("--epochs", c.epochs, "Training epochs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--C", c.regularization_c, "Regularization (hinge-sgd)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--dense-scale", c.dense_scale, "Scale applied to the SD block")
      ->capture_default_str();
}

void AddEvalOptions(CLI::App* cmd, RunConfig& c) {
  cmd->add_flag("--exclude-punct", c.exclude_punct, "Do not score punctuation tokens");
  cmd->add_option("--punct-tags", c.punct_tags, "POS tags treated as punctuation")->delimiter(',');
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"stparse: greedy arc-standard dependency parser with supertag features"};
  app.set_config("--config", "", "Read options from a TOML/INI file; flags win on conflict");
  app.add_option("--seed", c.seed, "Run seed; all component seeds derive from it")
      ->capture_default_str();
  app.require_subcommand(1);

  CLI::App* train = app.add_subcommand("train", "Train a parser model");
  train->add_option("--treebank", c.treebank, "CoNLL-X training treebank")->required();
  train->add_option("--supertags", c.supertags, "Supertag annotation file for the treebank");
  train->add_option("--inventory", c.inventory, "Supertag inventory file");
  train->add_option("--pca-model", c.pca_model, "Use a pre-fitted PCA model");
  train->add_option("--out", c.out, "Model file to write")->required();
  AddFeatureOptions(train, c);
  AddTrainerOptions(train, c);

  CLI::App* parse = app.add_subcommand("parse", "Parse a CoNLL-X file with a trained model");
  parse->add_option("--model", c.model, "Model file")->required();
  parse->add_option("--input", c.input, "CoNLL-X input")->required();
  parse->add_option("--supertags", c.supertags, "Supertag annotation file for the input");
  parse->add_option("--inventory", c.inventory, "Supertag inventory (defaults to the model's)");
  parse->add_option("--out", c.out, "Output file (default: standard output)");

  CLI::App* eval = app.add_subcommand("eval", "Score predicted trees against gold trees");
  eval->add_option("--gold", c.gold, "Gold CoNLL-X file")->required();
  eval->add_option("--pred", c.pred, "Predicted CoNLL-X file")->required();
  eval->add_option("--out", c.out, "Also write the report here");
  AddEvalOptions(eval, c);

  CLI::App* pca = app.add_subcommand("pca-fit", "Fit a PCA model on supertag distributions");
  pca->add_option("--supertags", c.supertags, "Supertag annotation file")->required();
  pca->add_option("--inventory", c.inventory, "Supertag inventory file")->required();
  pca->add_option("--treebank", c.treebank, "Treebank matching the annotations (for --types)");
  pca->add_option("--k", c.k, "Number of components")->capture_default_str();
  pca->add_flag("--no-center", c.no_center, "Do not mean-center");
  pca->add_flag("--types", c.pca_types, "Fit on word types instead of tokens");
  pca->add_option("--sample", c.pca_sample, "Fraction of vectors used")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  pca->add_option("--solver", c.pca_solver, "Eigensolver")
      ->check(CLI::IsMember({"dense", "power"}))
      ->capture_default_str();
  pca->add_option("--out", c.out, "PCA model file to write")->required();
  pca->add_option("--report", c.report, "Also write the explained-variance report here");

  CLI::App* synth =
      app.add_subcommand("synth-supertags", "Write synthetic supertag annotations for treebanks");
  synth->add_option("--treebank", c.treebanks, "Input treebank(s); share one tag space")
      ->required();
  synth->add_option("--out", c.outs, "Annotation file per treebank")->required();
  synth->add_option("--inventory-size", c.inventory_size, "Number of supertags")
      ->capture_default_str();
  synth->add_option("--noise", c.noise, "Probability mass moved off the true tag")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth->add_option("--inventory-out", c.inventory_out, "Write the inventory file here");

  CLI::App* synth_tb = app.add_subcommand("synth-treebank", "Generate a synthetic treebank");
  synth_tb->add_option("--sentences", c.sentences, "Number of sentences")->capture_default_str();
  synth_tb->add_option("--pos-noise", c.pos_noise, "POS confusion rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth_tb->add_option("--min-length", c.min_length)->capture_default_str();
  synth_tb->add_option("--max-length", c.max_length)->capture_default_str();
  synth_tb->add_option("--out", c.out, "CoNLL-X file to write")->required();

  CLI::App* ablate = app.add_subcommand("ablate", "Train and score a grid of feature models");
  ablate->add_option("--train", c.train, "Training treebank")->required();
  ablate->add_option("--dev", c.dev, "Development treebank")->required();
  ablate->add_option("--train-supertags", c.train_supertags, "Supertag annotations for --train");
  ablate->add_option("--dev-supertags", c.dev_supertags, "Supertag annotations for --dev");
  ablate->add_option("--inventory", c.inventory, "Supertag inventory file");
  ablate->add_option("--grid", c.grid, "Grid file: '<model> [k1,k2,...]' per line");
  ablate->add_option("--configs", c.configs, "Feature models, comma-separated")->delimiter(',');
  ablate->add_option("--ks", c.ks, "Default k values for SD models")->delimiter(',');
  ablate->add_option("--k", c.k, "k when no --ks are given")->capture_default_str();
  ablate->add_option("--sd-addresses", c.sd_addresses, "Words feeding the SD block")
      ->check(CLI::IsMember({"s0s1", "s0b0"}))
      ->capture_default_str();
  ablate->add_flag("--no-center", c.no_center, "Do not mean-center before projecting");
  ablate->add_flag("--bias", c.bias, "Add a constant bias feature");
  ablate->add_option("--out", c.out, "Results table (default: standard output)");
  AddTrainerOptions(ablate, c);
  AddEvalOptions(ablate, c);

  std::vector<const char*> argv{"stparse"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    } else {
      err << app.help();
    }
    return kUsageError;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    if (chosen == train) return CmdTrain(c, out, err);
    if (chosen == parse) return CmdParse(c, out, err);
    if (chosen == eval) return CmdEval(c, out, err);
    if (chosen == pca) return CmdPcaFit(c, out, err);
    if (chosen == synth) return CmdSynthSupertags(c, out, err);
    if (chosen == synth_tb) return CmdSynthTreebank(c, out, err);
    if (chosen == ablate) return CmdAblate(c, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    err << app.get_subcommands().front()->help();
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

}  // namespace stparse::cli
