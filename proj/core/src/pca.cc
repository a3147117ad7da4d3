#include "stparse/pca.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "stparse/errors.h"
#include "stparse/random.h"
#include "text_util.h"

namespace stparse {

namespace {

constexpr std::string_view kPcaMagic = "stparse-pca";
constexpr int kPcaVersion = 1;

// Eigenvalues at or below this fraction of the largest count as zero when
// measuring rank.
constexpr double kRankTolerance = 1e-10;

struct EigenPairs {
  std::vector<double> values;             // decreasing
  std::vector<Eigen::VectorXd> vectors;
};

EigenPairs DenseTopK(const Eigen::MatrixXd& cov, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw DataError("eigendecomposition of the covariance failed");
  }
  const Eigen::Index a = cov.rows();
  EigenPairs out;
  for (int j = 0; j < k; ++j) {
    out.values.push_back(solver.eigenvalues()(a - 1 - j));
    out.vectors.push_back(solver.eigenvectors().col(a - 1 - j));
  }
  return out;
}

EigenPairs PowerIterationTopK(const Eigen::MatrixXd& cov, int k, const PcaOptions& options) {
  Rng rng(options.seed);
  const Eigen::Index a = cov.rows();
  Eigen::MatrixXd deflated = cov;
  Eigen::MatrixXd basis(a, k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd v(a);
    for (Eigen::Index i = 0; i < a; ++i) v(i) = UniformUnit(rng) - 0.5;
    // Start orthogonal to the components found so far.
    v -= basis.leftCols(j) * (basis.leftCols(j).transpose() * v);
    v.normalize();
    Eigen::VectorXd w = deflated * v;
    double lambda = v.dot(w);
    for (int it = 0; it < options.max_iterations; ++it) {
      w -= basis.leftCols(j) * (basis.leftCols(j).transpose() * w);
      const double norm = w.norm();
      if (norm == 0.0) break;
      v = w / norm;
      w = deflated * v;
      const double next = v.dot(w);
      const bool converged =
          std::abs(next - lambda) <= options.tolerance * std::max(std::abs(next), 1e-300);
      lambda = next;
      if (converged) break;
    }
    basis.col(j) = v;
    deflated -= lambda * v * v.transpose();
  }

  // A converged Rayleigh quotient leaves the vector error near the square root
  // of the tolerance. Rotating within the found subspace (Rayleigh-Ritz) fixes
  // most of it, and all of it when k equals the dimension.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(q.transpose() * cov * q);
  if (small.info() != Eigen::Success) {
    throw DataError("eigendecomposition of the projected covariance failed");
  }
  EigenPairs out;
  for (int j = 0; j < k; ++j) {
    out.values.push_back(small.eigenvalues()(k - 1 - j));
    Eigen::VectorXd v = q * small.eigenvectors().col(k - 1 - j);
    out.vectors.push_back(v.normalized());
  }
  return out;
}

void FixSign(Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  if (v(best) < 0) v = -v;
}

}  // namespace

PcaModel::PcaModel(int n, int k, bool centered, std::vector<double> mean,
                   std::vector<double> components,
                   std::vector<double> explained_variance, double total_variance,
                   int64_t samples)
    : n_(n),
      k_(k),
      centered_(centered),
      mean_(std::move(mean)),
      components_(std::move(components)),
      explained_variance_(std::move(explained_variance)),
      total_variance_(total_variance),
      samples_(samples) {
  if (k_ < 1 || k_ > n_) {
    throw PreconditionError("PCA needs 1 <= k <= n (k=" + std::to_string(k_) +
                            ", n=" + std::to_string(n_) + ")");
  }
  if (mean_.size() != static_cast<size_t>(n_) ||
      components_.size() != static_cast<size_t>(n_) * k_ ||
      explained_variance_.size() != static_cast<size_t>(k_)) {
    throw PreconditionError("PCA model parts have inconsistent sizes");
  }
  ComputeOffset();
}

void PcaModel::ComputeOffset() {
  offset_.assign(k_, 0.0);
  if (!centered_) return;
  for (int d = 0; d < n_; ++d) {
    if (mean_[d] == 0.0) continue;
    for (int j = 0; j < k_; ++j) offset_[j] += Component(d, j) * mean_[d];
  }
}

std::vector<double> PcaModel::Column(int j) const {
  std::vector<double> col(n_);
  for (int d = 0; d < n_; ++d) col[d] = Component(d, j);
  return col;
}

std::vector<double> PcaModel::Project(std::span<const SparseEntry> x) const {
  std::vector<double> y(k_, 0.0);
  for (const SparseEntry& e : x) {
    if (e.index < 0 || e.index >= n_) {
      throw PreconditionError("vector index " + std::to_string(e.index) +
                              " outside PCA input dimension " + std::to_string(n_));
    }
    const double* row = &components_[static_cast<size_t>(e.index) * k_];
    for (int j = 0; j < k_; ++j) y[j] += row[j] * e.value;
  }
  for (int j = 0; j < k_; ++j) y[j] -= offset_[j];
  return y;
}

std::vector<double> PcaModel::Project(const SupertagDistribution& dist) const {
  if (dist.dimension() != n_) {
    throw PreconditionError("supertag inventory size " + std::to_string(dist.dimension()) +
                            " does not match PCA input dimension " + std::to_string(n_));
  }
  return Project(ToSparse(dist));
}

std::vector<double> PcaModel::ProjectDense(std::span<const double> x) const {
  if (x.size() != static_cast<size_t>(n_)) {
    throw PreconditionError("dense vector length does not match PCA input dimension");
  }
  SparseVector sparse;
  for (int d = 0; d < n_; ++d) {
    if (x[d] != 0.0) sparse.push_back({d, x[d]});
  }
  return Project(sparse);
}

double PcaModel::CapturedVariance(int count) const {
  double sum = 0.0;
  for (int j = 0; j < std::min(count, k_); ++j) sum += explained_variance_[j];
  return sum;
}

std::string PcaModel::Serialize() const {
  std::string out;
  out += std::string(kPcaMagic) + " " + std::to_string(kPcaVersion) + "\n";
  out += "n " + std::to_string(n_) + "\n";
  out += "k " + std::to_string(k_) + "\n";
  out += "center " + std::to_string(centered_ ? 1 : 0) + "\n";
  out += "samples " + std::to_string(samples_) + "\n";
  out += "total_variance " + FormatHex(total_variance_) + "\n";
  out += "explained_variance";
  for (double v : explained_variance_) out += " " + FormatHex(v);
  out += "\nmean";
  for (double v : mean_) out += " " + FormatHex(v);
  out += "\ncomponents\n";
  for (int d = 0; d < n_; ++d) {
    for (int j = 0; j < k_; ++j) {
      if (j > 0) out += ' ';
      out += FormatHex(Component(d, j));
    }
    out += '\n';
  }
  return out;
}

PcaModel PcaModel::Parse(std::string_view text) {
  std::vector<std::string_view> lines = SplitLines(text);
  size_t cursor = 0;
  auto next_fields = [&](std::string_view key) {
    if (cursor >= lines.size()) {
      throw DataError("PCA model truncated before '" + std::string(key) + "'");
    }
    std::vector<std::string_view> fields = Split(StripCr(lines[cursor++]), ' ');
    if (fields.empty() || fields[0] != key) {
      throw DataError("PCA model: expected '" + std::string(key) + "' on line " +
                      std::to_string(cursor));
    }
    fields.erase(fields.begin());
    return fields;
  };
  auto to_int = [&](std::string_view s) {
    int64_t v = 0;
    if (!ParseInt(s, v)) {
      throw DataError("PCA model: bad integer '" + std::string(s) + "' on line " +
                      std::to_string(cursor));
    }
    return v;
  };
  auto to_double = [&](std::string_view s) {
    double v = 0;
    if (!ParseDouble(s, v)) {
      throw DataError("PCA model: bad number '" + std::string(s) + "' on line " +
                      std::to_string(cursor));
    }
    return v;
  };
  auto single = [&](std::string_view key) {
    std::vector<std::string_view> f = next_fields(key);
    if (f.size() != 1) throw DataError("PCA model: malformed '" + std::string(key) + "'");
    return f[0];
  };

  std::string_view version = single(kPcaMagic);
  if (to_int(version) != kPcaVersion) {
    throw DataError("unsupported PCA model version " + std::string(version));
  }
  const int n = static_cast<int>(to_int(single("n")));
  const int k = static_cast<int>(to_int(single("k")));
  const bool center = to_int(single("center")) != 0;
  const int64_t samples = to_int(single("samples"));
  const double total = to_double(single("total_variance"));
  if (n < 1 || k < 1 || k > n) throw DataError("PCA model: invalid n/k");
  std::vector<double> variance;
  for (std::string_view f : next_fields("explained_variance")) variance.push_back(to_double(f));
  std::vector<double> mean;
  for (std::string_view f : next_fields("mean")) mean.push_back(to_double(f));
  next_fields("components");
  std::vector<double> components;
  components.reserve(static_cast<size_t>(n) * k);
  for (int d = 0; d < n; ++d) {
    if (cursor >= lines.size()) throw DataError("PCA model: truncated components");
    std::vector<std::string_view> fields = Split(StripCr(lines[cursor++]), ' ');
    if (fields.size() != static_cast<size_t>(k)) {
      throw DataError("PCA model: component row " + std::to_string(d) + " has " +
                      std::to_string(fields.size()) + " values, expected " +
                      std::to_string(k));
    }
    for (std::string_view f : fields) components.push_back(to_double(f));
  }
  try {
    return PcaModel(n, k, center, std::move(mean), std::move(components),
                    std::move(variance), total, samples);
  } catch (const PreconditionError& e) {
    throw DataError(std::string("PCA model: ") + e.what());
  }
}

SparseVector ToSparse(const SupertagDistribution& dist) {
  SparseVector v;
  v.reserve(dist.entries().size());
  for (const SupertagEntry& e : dist.entries()) v.push_back({e.tag, e.prob});
  return v;
}

PcaModel FitPca(std::span<const SparseVector> vectors, int n, const PcaOptions& options) {
  const int k = options.k;
  if (k < 1) throw PreconditionError("PCA needs k >= 1");
  if (k > n) {
    throw PreconditionError("PCA dimension k=" + std::to_string(k) +
                            " exceeds input dimension n=" + std::to_string(n));
  }
  const int64_t m = static_cast<int64_t>(vectors.size());
  if (m < (options.center ? 2 : 1)) {
    throw PreconditionError("PCA needs at least " +
                            std::string(options.center ? "two samples" : "one sample"));
  }

  // Pass 1: mean and the set of dimensions that are ever non-zero.
  std::vector<double> mean(n, 0.0);
  std::vector<int> active_of(n, -1);
  for (const SparseVector& x : vectors) {
    for (const SparseEntry& e : x) {
      if (e.index < 0 || e.index >= n) {
        throw PreconditionError("vector index " + std::to_string(e.index) +
                                " outside dimension " + std::to_string(n));
      }
      mean[e.index] += e.value;
      if (e.value != 0.0) active_of[e.index] = 0;
    }
  }
  for (double& v : mean) v /= static_cast<double>(m);
  std::vector<int> active;
  for (int d = 0; d < n; ++d) {
    if (active_of[d] == 0) {
      active_of[d] = static_cast<int>(active.size());
      active.push_back(d);
    }
  }
  const int a = static_cast<int>(active.size());
  if (a < k) {
    throw PreconditionError("PCA data spans fewer than k=" + std::to_string(k) +
                            " independent directions (achieved rank <= " +
                            std::to_string(a) + ")");
  }

  // Pass 2: scatter over the active dimensions.
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(a, a);
  for (const SparseVector& x : vectors) {
    for (const SparseEntry& ei : x) {
      const int i = active_of[ei.index];
      if (i < 0) continue;
      for (const SparseEntry& ej : x) {
        const int j = active_of[ej.index];
        if (j < 0) continue;
        cov(i, j) += ei.value * ej.value;
      }
    }
  }
  if (options.center) {
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < a; ++j) {
        cov(i, j) -= static_cast<double>(m) * mean[active[i]] * mean[active[j]];
      }
    }
    cov /= static_cast<double>(m - 1);
  } else {
    cov /= static_cast<double>(m);
  }
  cov = 0.5 * (cov + cov.transpose());

  EigenPairs pairs = options.solver == PcaSolver::kDense
                         ? DenseTopK(cov, k)
                         : PowerIterationTopK(cov, k, options);

  const double largest = std::max(pairs.values.front(), 0.0);
  int rank = 0;
  for (double v : pairs.values) {
    if (v > kRankTolerance * largest && v > 0.0) ++rank;
  }
  if (rank < k) {
    throw PreconditionError("PCA data spans fewer than k=" + std::to_string(k) +
                            " independent directions (achieved rank " +
                            std::to_string(rank) + ")");
  }

  std::vector<double> components(static_cast<size_t>(n) * k, 0.0);
  std::vector<double> variance(k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd& v = pairs.vectors[j];
    FixSign(v);
    variance[j] = std::max(pairs.values[j], 0.0);
    for (int i = 0; i < a; ++i) {
      components[static_cast<size_t>(active[i]) * k + j] = v(i);
    }
  }
  return PcaModel(n, k, options.center, std::move(mean), std::move(components),
                  std::move(variance), cov.trace(), m);
}

std::vector<VarianceRow> ExplainedVarianceReport(const PcaModel& model) {
  std::vector<VarianceRow> rows;
  double cumulative = 0.0;
  const double total = model.total_variance();
  for (int j = 0; j < model.k(); ++j) {
    cumulative += model.explained_variance()[j];
    rows.push_back({j + 1, model.explained_variance()[j],
                    total > 0.0 ? cumulative / total : 0.0});
  }
  return rows;
}

std::string FormatVarianceReport(const PcaModel& model) {
  std::ostringstream out;
  out << "component\tvariance\tcumulative_fraction\n";
  for (const VarianceRow& row : ExplainedVarianceReport(model)) {
    out << row.component << '\t' << FormatDouble(row.variance) << '\t'
        << FormatDouble(row.cumulative_fraction) << '\n';
  }
  return out.str();
}

}  // namespace stparse
