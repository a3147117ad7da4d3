#include "stparse/classifier.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stparse/errors.h"
#include "stparse/random.h"

namespace stparse {

ActionSpace::ActionSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

Transition ActionSpace::At(int id) const {
  const int num_labels = static_cast<int>(labels_.size());
  if (id < 0 || id >= size()) throw PreconditionError("action id out of range");
  if (id == 0) return Transition::Shift();
  if (id <= num_labels) return Transition::LeftArc(labels_[id - 1]);
  return Transition::RightArc(labels_[id - 1 - num_labels]);
}

TransitionKind ActionSpace::KindAt(int id) const {
  if (id == 0) return TransitionKind::kShift;
  return id <= static_cast<int>(labels_.size()) ? TransitionKind::kLeftArc
                                                : TransitionKind::kRightArc;
}

std::optional<int> ActionSpace::FindId(const Transition& t) const {
  if (t.kind == TransitionKind::kShift) return 0;
  auto it = std::lower_bound(labels_.begin(), labels_.end(), t.label);
  if (it == labels_.end() || *it != t.label) return std::nullopt;
  const int offset = static_cast<int>(it - labels_.begin());
  return t.kind == TransitionKind::kLeftArc
             ? 1 + offset
             : 1 + static_cast<int>(labels_.size()) + offset;
}

int ActionSpace::IdOf(const Transition& t) const {
  std::optional<int> id = FindId(t);
  if (!id) throw PreconditionError("transition " + t.ToString() + " not in action space");
  return *id;
}

std::string TrainerName(TrainerKind kind) {
  return kind == TrainerKind::kAveragedPerceptron ? "perceptron" : "hinge-sgd";
}

TrainerKind ParseTrainerName(std::string_view name) {
  if (name == "perceptron") return TrainerKind::kAveragedPerceptron;
  if (name == "hinge-sgd") return TrainerKind::kHingeSgd;
  throw PreconditionError("unknown trainer '" + std::string(name) +
                          "' (expected perceptron or hinge-sgd)");
}

LinearModel::LinearModel(ActionSpace actions, int num_sparse, int num_dense,
                         double dense_scale)
    : actions_(std::move(actions)),
      num_sparse_(num_sparse),
      num_dense_(num_dense),
      dense_scale_(dense_scale),
      weights_(static_cast<size_t>(num_sparse + num_dense) * actions_.size(), 0.0f) {}

namespace {

// Accumulates scores of `fv` against a row-major weight table.
template <typename Weight>
void ScoreInto(const Weight* weights, int num_actions, int num_sparse, double dense_scale,
               const FeatureVector& fv, std::vector<double>& scores) {
  scores.assign(num_actions, 0.0);
  for (uint32_t id : fv.sparse) {
    if (id >= static_cast<uint32_t>(num_sparse)) continue;
    const Weight* row = weights + static_cast<size_t>(id) * num_actions;
    for (int a = 0; a < num_actions; ++a) scores[a] += row[a];
  }
  for (size_t j = 0; j < fv.dense.size(); ++j) {
    const double x = dense_scale * fv.dense[j];
    if (x == 0.0) continue;
    const Weight* row = weights + (static_cast<size_t>(num_sparse) + j) * num_actions;
    for (int a = 0; a < num_actions; ++a) scores[a] += x * row[a];
  }
}

int Argmax(const std::vector<double>& scores) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(scores.size()); ++a) {
    if (scores[a] > scores[best]) best = a;
  }
  return best;
}

void CheckInstances(std::span<const TrainingInstance> instances, const ActionSpace& actions,
                    int num_dense) {
  if (instances.empty()) throw PreconditionError("no training instances");
  for (const TrainingInstance& inst : instances) {
    if (inst.gold_action < 0 || inst.gold_action >= actions.size()) {
      throw PreconditionError("gold action " + std::to_string(inst.gold_action) +
                              " outside the action space");
    }
    if (static_cast<int>(inst.features.dense.size()) != num_dense) {
      throw PreconditionError("training instance has " +
                              std::to_string(inst.features.dense.size()) +
                              " dense values, expected " + std::to_string(num_dense));
    }
  }
}

// Adds `step` times the feature vector to one weight column (and `c * step`
// to the averaging accumulator when present).
void UpdateColumn(std::vector<double>& w, std::vector<double>* u, double c, int num_actions,
                  int num_sparse, double dense_scale, const FeatureVector& fv, int action,
                  double step) {
  for (uint32_t id : fv.sparse) {
    const size_t at = static_cast<size_t>(id) * num_actions + action;
    w[at] += step;
    if (u) (*u)[at] += c * step;
  }
  for (size_t j = 0; j < fv.dense.size(); ++j) {
    const double x = dense_scale * fv.dense[j];
    if (x == 0.0) continue;
    const size_t at = (static_cast<size_t>(num_sparse) + j) * num_actions + action;
    w[at] += step * x;
    if (u) (*u)[at] += c * step * x;
  }
}

}  // namespace

std::vector<double> LinearModel::Score(const FeatureVector& fv) const {
  if (static_cast<int>(fv.dense.size()) != num_dense_) {
    throw PreconditionError("feature vector has " + std::to_string(fv.dense.size()) +
                            " dense values, model expects " + std::to_string(num_dense_));
  }
  std::vector<double> scores;
  ScoreInto(weights_.data(), num_actions(), num_sparse_, dense_scale_, fv, scores);
  return scores;
}

int PredictLegal(std::span<const double> scores, const ActionSpace& actions, KindSet legal) {
  int best = -1;
  for (int a = 0; a < static_cast<int>(scores.size()); ++a) {
    if (!legal.Contains(actions.KindAt(a))) continue;
    if (best < 0 || scores[a] > scores[best]) best = a;
  }
  if (best < 0) throw PreconditionError("no legal action in the action space");
  return best;
}

int PredictLegal(const LinearModel& model, const FeatureVector& fv, KindSet legal) {
  return PredictLegal(model.Score(fv), model.actions(), legal);
}

LinearModel Train(std::span<const TrainingInstance> instances, const ActionSpace& actions,
                  int num_sparse, int num_dense, const TrainerOptions& options,
                  std::vector<EpochStats>* history, const EpochCallback& on_epoch) {
  CheckInstances(instances, actions, num_dense);
  for (const TrainingInstance& inst : instances) {
    if (!inst.features.sparse.empty() &&
        inst.features.sparse.back() >= static_cast<uint32_t>(num_sparse)) {
      throw PreconditionError("sparse feature id outside the declared feature count");
    }
  }
  const int num_actions = actions.size();
  const size_t cells = static_cast<size_t>(num_sparse + num_dense) * num_actions;
  const double scale = options.dense_scale;
  const bool averaged = options.trainer == TrainerKind::kAveragedPerceptron;

  std::vector<double> w(cells, 0.0);
  std::vector<double> u(averaged ? cells : 0, 0.0);
  double c = 1.0;

  // Hinge SGD: weights are sgd_scale * w.
  const double lambda =
      1.0 / (options.regularization_c * static_cast<double>(instances.size()));
  const double eta0 = 0.1;
  double sgd_scale = 1.0;
  int64_t t = 0;

  std::vector<int> order(instances.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(options.seed);
  std::vector<double> scores;

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    Shuffle(order, rng);
    int64_t correct = 0;
    for (int idx : order) {
      const TrainingInstance& inst = instances[idx];
      ScoreInto(w.data(), num_actions, num_sparse, scale, inst.features, scores);
      if (!averaged) {
        for (double& s : scores) s *= sgd_scale;
      }
      const int predicted = Argmax(scores);
      if (predicted == inst.gold_action) ++correct;
      if (averaged) {
        if (predicted != inst.gold_action) {
          UpdateColumn(w, &u, c, num_actions, num_sparse, scale, inst.features,
                       inst.gold_action, 1.0);
          UpdateColumn(w, &u, c, num_actions, num_sparse, scale, inst.features, predicted,
                       -1.0);
        }
        c += 1.0;
        continue;
      }
      // Hinge loss against the best wrong action.
      ++t;
      const double eta = eta0 / (1.0 + lambda * eta0 * static_cast<double>(t));
      int rival = -1;
      for (int a = 0; a < num_actions; ++a) {
        if (a == inst.gold_action) continue;
        if (rival < 0 || scores[a] > scores[rival]) rival = a;
      }
      sgd_scale *= 1.0 - eta * lambda;
      if (rival >= 0 && scores[inst.gold_action] - scores[rival] < 1.0) {
        UpdateColumn(w, nullptr, 0.0, num_actions, num_sparse, scale, inst.features,
                     inst.gold_action, eta / sgd_scale);
        UpdateColumn(w, nullptr, 0.0, num_actions, num_sparse, scale, inst.features, rival,
                     -eta / sgd_scale);
      }
      if (sgd_scale < 1e-6) {
        for (double& x : w) x *= sgd_scale;
        sgd_scale = 1.0;
      }
    }
    EpochStats stats{epoch, static_cast<double>(correct) / static_cast<double>(order.size())};
    if (history) history->push_back(stats);
    if (on_epoch) on_epoch(stats);
  }

  LinearModel model(actions, num_sparse, num_dense, options.dense_scale);
  std::vector<float>& out = model.mutable_weights();
  for (size_t i = 0; i < cells; ++i) {
    out[i] = static_cast<float>(averaged ? w[i] - u[i] / c : w[i] * sgd_scale);
  }
  return model;
}

}  // namespace stparse
