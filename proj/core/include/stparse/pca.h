#ifndef STPARSE_PCA_H_
#define STPARSE_PCA_H_

// Principal component analysis of sparse supertag vectors.
//
// A fitted model maps an n-dimensional vector x to the k-vector
//   y = P^T (x - mean)        (mean = 0 when centering is off)
// where the columns of P are the top-k eigenvectors of the training
// covariance, ordered by decreasing eigenvalue, each signed so that its
// largest-magnitude entry is positive.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stparse/treebank.h"

namespace stparse {

struct SparseEntry {
  int index = 0;
  double value = 0.0;
};

using SparseVector = std::vector<SparseEntry>;

enum class PcaSolver {
  kDense,           // full symmetric eigendecomposition of the covariance
  kPowerIteration,  // deflated power iteration
};

struct PcaOptions {
  int k = 1;
  bool center = true;
  uint64_t seed = 1;
  PcaSolver solver = PcaSolver::kDense;
  // Power iteration only: stop a component once its eigenvalue estimate
  // changes by at most `tolerance` (relative), or after max_iterations.
  double tolerance = 1e-9;
  int max_iterations = 1000;
};

class PcaModel {
 public:
  PcaModel() = default;

  // `components` is row-major n x k. Throws PreconditionError unless
  // 1 <= k <= n and all sizes agree.
  PcaModel(int n, int k, bool centered, std::vector<double> mean,
           std::vector<double> components, std::vector<double> explained_variance,
           double total_variance, int64_t samples);

  int n() const { return n_; }
  int k() const { return k_; }
  bool centered() const { return centered_; }
  int64_t samples() const { return samples_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& explained_variance() const { return explained_variance_; }
  double total_variance() const { return total_variance_; }

  // Loading of input dimension `dim` on component j.
  double Component(int dim, int j) const { return components_[static_cast<size_t>(dim) * k_ + j]; }
  std::vector<double> Column(int j) const;

  // O(nnz(x) * k). Throws PreconditionError on an index >= n.
  std::vector<double> Project(std::span<const SparseEntry> x) const;
  std::vector<double> Project(const SupertagDistribution& dist) const;
  std::vector<double> ProjectDense(std::span<const double> x) const;

  // Sum of the first `count` explained variances.
  double CapturedVariance(int count) const;

  // Text container with hex-float numbers; Parse(Serialize()) is exact.
  std::string Serialize() const;
  // Throws DataError on malformed input or an unsupported version.
  static PcaModel Parse(std::string_view text);

  bool operator==(const PcaModel&) const = default;

 private:
  void ComputeOffset();

  int n_ = 0;
  int k_ = 0;
  bool centered_ = false;
  std::vector<double> mean_;
  std::vector<double> components_;
  std::vector<double> explained_variance_;
  double total_variance_ = 0.0;
  int64_t samples_ = 0;
  // P^T mean, subtracted from every projection when centered.
  std::vector<double> offset_;
};

// Fits on `vectors` (each of dimension n). The covariance is accumulated from
// sparse outer products, so memory is O(active_dims^2) rather than
// O(samples * n). Throws PreconditionError when k < 1, k > n, there are too
// few samples, or the data has fewer than k independent directions (the
// message reports the achieved rank).
PcaModel FitPca(std::span<const SparseVector> vectors, int n, const PcaOptions& options);

SparseVector ToSparse(const SupertagDistribution& dist);

struct VarianceRow {
  int component = 0;  // 1-based
  double variance = 0.0;
  double cumulative_fraction = 0.0;
};

std::vector<VarianceRow> ExplainedVarianceReport(const PcaModel& model);
std::string FormatVarianceReport(const PcaModel& model);

}  // namespace stparse

#endif  // STPARSE_PCA_H_
