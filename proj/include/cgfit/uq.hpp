#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cgfit/basis.hpp"
#include "cgfit/dataset.hpp"
#include "cgfit/errors.hpp"
#include "cgfit/linalg.hpp"
#include "cgfit/parallel.hpp"
#include "cgfit/rng.hpp"
#include "cgfit/types.hpp"

namespace cgfit {

// Standard normal quantile (inverse CDF); absolute error below 1e-8.
double normal_quantile(double p);
// z_{alpha/2}, the two-sided critical value.
double z_critical(double alpha);

// ---------------------------------------------------------------------------
// Information matrices and asymptotic (sandwich) intervals
// ---------------------------------------------------------------------------

// The two information estimates of a fitted family: F1 from the curvature
// (observed information) and F2 from the outer product of scores.  They agree
// in the large-sample limit exactly when the family contains the data law.
struct FisherPair {
  Mat f1;
  Mat f2;
  std::size_t n = 0;
};

// Relative disagreement |F1 - F2|_F / |F1|_F, a model-misfit diagnostic.
double f1_f2_divergence(const FisherPair& pair);

// Per-sample score and curvature of a log-density family at fixed theta; the
// ingredients both information estimates are averaged from.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;
  virtual Vec score(const IidDataset& data, Index i) const = 0;     // d log p / d theta
  virtual Mat hessian(const IidDataset& data, Index i) const = 0;   // d2 log p / d theta2
};

// Equilibrium (Gibbs) family p(x) = exp(-2 U(x; theta)) / Z(theta) over a
// monomial potential.  The curvature -4 Cov(g) is state-independent and
// cached at construction.
class GibbsScoreModel : public ScoreModel {
 public:
  GibbsScoreModel(const BasisSet& basis, const Vec& theta, double half_width = 8.0,
                  Index n_points = 4001);
  Vec score(const IidDataset& data, Index i) const override;
  Mat hessian(const IidDataset& data, Index i) const override;

 private:
  int k_count_;
  Vec model_mean_;  // E_theta[g]
  Mat neg_hess_;    // 4 Cov_theta(g)
};

// Force-matching regression family log p propto -|f - phi(x) . theta|^2.
class FmScoreModel : public ScoreModel {
 public:
  FmScoreModel(const BasisSet& basis, const Vec& theta);
  Vec score(const IidDataset& data, Index i) const override;
  Mat hessian(const IidDataset& data, Index i) const override;

 private:
  const BasisSet basis_;
  Vec theta_;
};

Mat fisher_f1_iid(const ScoreModel& model, const IidDataset& data);  // -(1/N) sum hessian_i
Mat fisher_f2_iid(const ScoreModel& model, const IidDataset& data);  // (1/N) sum score score^T
FisherPair fisher_pair_iid(const ScoreModel& model, const IidDataset& data);

// Parameter covariance F1^{-1} F2 F1^{-1} / n (robust) and F1^{-1} / n (the
// well-specified shortcut; use only when F1 and F2 are known to agree).
Mat sandwich_cov(const FisherPair& pair);
Mat naive_cov(const FisherPair& pair);

// Per-parameter confidence intervals and the pieces they came from.
struct ConfidenceReport {
  Vec estimate;
  Vec variance;
  Vec lower;
  Vec upper;
  std::string method;
  double alpha = 0.05;
};

ConfidenceReport sandwich_ci_iid(const Vec& theta, const FisherPair& pair, double alpha = 0.05);

// ---------------------------------------------------------------------------
// Time-series (path-space) asymptotics
// ---------------------------------------------------------------------------

// Information rate of the transition family: h * mean over transitions of
// phi(x_i) phi(x_i)^T.
Mat fisher_i1_ts(const TimeSeriesDataset& data, const BasisSet& basis, Index slow = 0);

// Long-run covariance of a stationary vector sequence (one row per step) by
// non-overlapping batch means:
//   Sigma = b/(a-1) * sum_j (Ybar_j - Ybar)(Ybar_j - Ybar)^T,
// a = batch count, b = batch length (default floor(sqrt(n))), remainder
// dropped from the tail.  Requires a >= 2.
Mat batch_means_cov(const Mat& rows, std::size_t batch_len = 0);

// Long-run covariance of the transition scores
//   Y_i = phi(x_i) (x_{i+1} - x_i - a(x_i; theta) h)
// on a single stationary path, through batch_means_cov.
Mat batch_means_sigma(const TimeSeriesDataset& data, const BasisSet& basis, const Vec& theta,
                      std::size_t batch_len = 0, Index slow = 0);

// Interval from the path-space sandwich diag(I1^{-1} Sigma I1^{-1}) / n with
// n the number of transitions.
ConfidenceReport sandwich_ci_ts(const Vec& theta, const Mat& i1, const Mat& sigma_bm,
                                std::size_t n_transitions, double alpha = 0.05);

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

// The exchangeable unit each resampler draws: rows for unordered data, whole
// paths for time series.  Further unit types (particle snapshots) overload
// these two functions.
std::size_t unit_count(const IidDataset& data);
std::size_t unit_count(const TimeSeriesDataset& data);
IidDataset select_units(const IidDataset& data, const std::vector<std::size_t>& idx);
TimeSeriesDataset select_units(const TimeSeriesDataset& data, const std::vector<std::size_t>& idx);

struct JackknifeResult {
  Vec variance;
  ConfidenceReport report;
};

struct BootstrapReplicates {
  Mat thetas;                  // successful replicates, one per row, in replicate order
  std::size_t requested = 0;   // B
  std::size_t failed = 0;      // replicates whose refit threw
  std::uint64_t seed = 0;
};

// Linear interpolation of the order statistics at position (B-1) p + 1
// (1-based); `sorted` must be ascending.
double interpolated_quantile(const Vec& sorted, double p);

ConfidenceReport bootstrap_standard_ci(const Vec& theta_hat, const BootstrapReplicates& reps,
                                       double alpha = 0.05);
ConfidenceReport bootstrap_percentile_ci(const Vec& theta_hat, const BootstrapReplicates& reps,
                                         double alpha = 0.05);

// Ratio sigma_k / |theta_k|; entries with |theta_k| < 1e-12 are NaN (relative
// spread of a zero coefficient is undefined).
Vec rstd(const Vec& theta, const Vec& sigma);

// Standard error sqrt(grad^T cov grad) of a smooth scalar g(theta).
double delta_method_se(const Vec& grad, const Mat& cov);

// Pointwise percentile band of a curve-valued g(theta) over a grid, plus the
// pointwise replicate standard deviation.
struct QoiBand {
  Vec grid;
  Vec estimate;
  Vec lower;
  Vec upper;
  Vec std_dev;
};

QoiBand qoi_bootstrap_band(const Vec& grid, const Vec& theta_hat, const BootstrapReplicates& reps,
                           const std::function<Vec(const Vec&)>& g, double alpha = 0.05);

// Leave-one-unit-out variance and interval around the full-data estimate:
//   V = (n-1)/n * sum_i (theta_(i) - mean)^2.
template <class Data>
JackknifeResult jackknife(const Data& data, const std::function<Vec(const Data&)>& estimator,
                          double alpha = 0.05) {
  const std::size_t n = unit_count(data);
  if (n < 2) throw ArgumentError("jackknife needs at least two units");
  const Vec theta_hat = estimator(data);
  const Index k = theta_hat.size();

  Mat leave_out(static_cast<Index>(n), k);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> idx;
    idx.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) idx.push_back(j);
    leave_out.row(static_cast<Index>(i)) = estimator(select_units(data, idx)).transpose();
  });

  const Vec mean = leave_out.colwise().mean();
  Vec variance = Vec::Zero(k);
  for (Index i = 0; i < leave_out.rows(); ++i) {
    const Vec d = leave_out.row(i).transpose() - mean;
    variance += d.cwiseProduct(d);
  }
  variance *= static_cast<double>(n - 1) / static_cast<double>(n);

  JackknifeResult result;
  result.variance = variance;
  result.report.estimate = theta_hat;
  result.report.variance = variance;
  const double z = z_critical(alpha);
  result.report.lower = theta_hat - z * variance.cwiseSqrt();
  result.report.upper = theta_hat + z * variance.cwiseSqrt();
  result.report.method = "jackknife";
  result.report.alpha = alpha;
  return result;
}

// B with-replacement redraws of the units; replicate r refits on the stream
// split_seed(seed, r), so the set of replicates is independent of thread
// count.  Failed refits are dropped; more than 10% of B failing is an error.
template <class Data>
BootstrapReplicates bootstrap(const Data& data, const std::function<Vec(const Data&)>& estimator,
                              std::size_t b_count, std::uint64_t seed) {
  if (b_count < 2) throw ArgumentError("bootstrap needs at least two replicates");
  const std::size_t n = unit_count(data);
  if (n < 2) throw ArgumentError("bootstrap needs at least two units");

  std::vector<Vec> rows(b_count);
  std::vector<char> ok(b_count, 0);
  parallel_for(b_count, [&](std::size_t r) {
    Rng rng(split_seed(seed, r));
    std::vector<std::size_t> idx(n);
    for (std::size_t j = 0; j < n; ++j) idx[j] = rng.index(n);
    try {
      rows[r] = estimator(select_units(data, idx));
      ok[r] = 1;
    } catch (const Error&) {
      ok[r] = 0;  // counted against the failure budget below
    }
  });

  BootstrapReplicates reps;
  reps.requested = b_count;
  reps.seed = seed;
  std::size_t n_ok = 0;
  for (std::size_t r = 0; r < b_count; ++r) n_ok += ok[r];
  reps.failed = b_count - n_ok;
  if (10 * reps.failed > b_count)
    throw ConvergenceError("bootstrap: " + std::to_string(reps.failed) + " of " +
                           std::to_string(b_count) + " replicates failed (over the 10% budget)");
  Index k = 0;
  for (std::size_t r = 0; r < b_count; ++r)
    if (ok[r]) {
      k = rows[r].size();
      break;
    }
  reps.thetas.resize(static_cast<Index>(n_ok), k);
  Index at = 0;
  for (std::size_t r = 0; r < b_count; ++r)
    if (ok[r]) reps.thetas.row(at++) = rows[r].transpose();
  return reps;
}

}  // namespace cgfit
