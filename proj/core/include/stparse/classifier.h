#ifndef STPARSE_CLASSIFIER_H_
#define STPARSE_CLASSIFIER_H_

// Multiclass linear classifier over labeled transitions.
//
// Scores are linear in a mixed feature vector:
//   score(a) = sum_{i in sparse} W[i, a] + scale * sum_j dense_j * W[D + j, a]
// where D is the number of sparse features. There is no bias term unless the
// feature model adds a constant feature.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stparse/features.h"
#include "stparse/transition.h"

namespace stparse {

// Labeled transitions: id 0 is Shift, then LeftArc for each label, then
// RightArc for each label, labels in sorted order.
class ActionSpace {
 public:
  ActionSpace() : ActionSpace(std::vector<std::string>{}) {}
  explicit ActionSpace(std::vector<std::string> labels);

  int size() const { return 1 + 2 * static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  Transition At(int id) const;
  TransitionKind KindAt(int id) const;
  // Throws PreconditionError for a label outside the space.
  int IdOf(const Transition& t) const;
  std::optional<int> FindId(const Transition& t) const;

  bool operator==(const ActionSpace&) const = default;

 private:
  std::vector<std::string> labels_;
};

enum class TrainerKind { kAveragedPerceptron, kHingeSgd };

std::string TrainerName(TrainerKind kind);
TrainerKind ParseTrainerName(std::string_view name);

struct TrainerOptions {
  TrainerKind trainer = TrainerKind::kAveragedPerceptron;
  int epochs = 10;
  // Hinge SGD only; the L2 strength is 1 / (C * instances).
  double regularization_c = 1.0;
  uint64_t seed = 1;
  double dense_scale = 1.0;
};

struct TrainingInstance {
  FeatureVector features;
  int gold_action = 0;
};

class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(ActionSpace actions, int num_sparse, int num_dense, double dense_scale);

  const ActionSpace& actions() const { return actions_; }
  int num_actions() const { return actions_.size(); }
  int num_sparse() const { return num_sparse_; }
  int num_dense() const { return num_dense_; }
  double dense_scale() const { return dense_scale_; }

  // Row-major (num_sparse + num_dense) x num_actions.
  const std::vector<float>& weights() const { return weights_; }
  std::vector<float>& mutable_weights() { return weights_; }
  float Weight(int feature, int action) const {
    return weights_[static_cast<size_t>(feature) * num_actions() + action];
  }

  // Throws PreconditionError on a dense-length mismatch. Sparse ids beyond the
  // table (features unseen in training) are ignored.
  std::vector<double> Score(const FeatureVector& fv) const;
  void ScaleDense(double factor) { dense_scale_ *= factor; }

  bool operator==(const LinearModel&) const = default;

 private:
  ActionSpace actions_;
  int num_sparse_ = 0;
  int num_dense_ = 0;
  double dense_scale_ = 1.0;
  std::vector<float> weights_;
};

// Best action among those whose kind is legal; ties go to the lowest id.
// Throws PreconditionError if no action is legal.
int PredictLegal(std::span<const double> scores, const ActionSpace& actions,
                 KindSet legal);
int PredictLegal(const LinearModel& model, const FeatureVector& fv, KindSet legal);

struct EpochStats {
  int epoch = 0;  // 1-based
  double accuracy = 0.0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Trains on `instances`. Instance order is shuffled each epoch with a
// generator seeded from options.seed, so equal inputs give bit-identical
// weights. Throws PreconditionError for an empty instance list or a gold
// action outside the space.
LinearModel Train(std::span<const TrainingInstance> instances, const ActionSpace& actions,
                  int num_sparse, int num_dense, const TrainerOptions& options,
                  std::vector<EpochStats>* history = nullptr,
                  const EpochCallback& on_epoch = nullptr);

}  // namespace stparse

#endif  // STPARSE_CLASSIFIER_H_
