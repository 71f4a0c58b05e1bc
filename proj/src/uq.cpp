#include "cgfit/uq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cgfit/density.hpp"
#include "cgfit/errors.hpp"

namespace cgfit {

namespace {

// Rational approximation of the standard normal quantile (Acklam), then one
// Halley refinement through erfc; absolute error well below 1e-8.
double normal_quantile_raw(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw ArgumentError("quantile probability must be in (0, 1)");
  double x = normal_quantile_raw(p);
  const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double z_critical(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw ArgumentError("alpha must be in (0, 1)");
  return normal_quantile(1.0 - 0.5 * alpha);
}

double f1_f2_divergence(const FisherPair& pair) {
  const double denom = pair.f1.norm();
  if (!(denom > 0.0)) throw ArgumentError("F1 has zero norm");
  return (pair.f1 - pair.f2).norm() / denom;
}

// ---------------------------------------------------------------------------
// Score models
// ---------------------------------------------------------------------------

GibbsScoreModel::GibbsScoreModel(const BasisSet& basis, const Vec& theta, double half_width,
                                 Index n_points)
    : k_count_(basis.size()) {
  if (theta.size() != basis.size()) throw ArgumentError("theta size does not match basis");
  const DensityGrid grid = cg_invariant_density(basis, theta, half_width, n_points);
  const GibbsMoments mom = gibbs_moments(grid, k_count_);
  model_mean_ = mom.mean;
  neg_hess_ = 4.0 * mom.cov;
}

Vec GibbsScoreModel::score(const IidDataset& data, Index i) const {
  // log p = 2 theta.g(x) - log Z, so the score is 2 (g(x) - E_theta[g]).
  return 2.0 * (gibbs_statistics(data.states(i, 0), k_count_) - model_mean_);
}

Mat GibbsScoreModel::hessian(const IidDataset&, Index) const { return -neg_hess_; }

FmScoreModel::FmScoreModel(const BasisSet& basis, const Vec& theta) : basis_(basis), theta_(theta) {
  if (theta.size() != basis.size()) throw ArgumentError("theta size does not match basis");
}

Vec FmScoreModel::score(const IidDataset& data, Index i) const {
  if (!data.has_forces()) throw ArgumentError("force-matching score needs recorded forces");
  const Vec phi = basis_.eval(data.states(i, 0));
  const double residual = data.cg_forces(i, 0) - phi.dot(theta_);
  return 2.0 * residual * phi;
}

Mat FmScoreModel::hessian(const IidDataset& data, Index i) const {
  const Vec phi = basis_.eval(data.states(i, 0));
  return -2.0 * phi * phi.transpose();
}

Mat fisher_f1_iid(const ScoreModel& model, const IidDataset& data) {
  data.validate();
  const Index n = data.size();
  Mat acc = -model.hessian(data, 0);
  for (Index i = 1; i < n; ++i) acc -= model.hessian(data, i);
  return acc / static_cast<double>(n);
}

Mat fisher_f2_iid(const ScoreModel& model, const IidDataset& data) {
  data.validate();
  const Index n = data.size();
  Mat acc;
  for (Index i = 0; i < n; ++i) {
    const Vec s = model.score(data, i);
    if (i == 0) acc = Mat::Zero(s.size(), s.size());
    acc.selfadjointView<Eigen::Lower>().rankUpdate(s);
  }
  return Mat(acc.selfadjointView<Eigen::Lower>()) / static_cast<double>(n);
}

FisherPair fisher_pair_iid(const ScoreModel& model, const IidDataset& data) {
  FisherPair pair;
  pair.f1 = fisher_f1_iid(model, data);
  pair.f2 = fisher_f2_iid(model, data);
  pair.n = static_cast<std::size_t>(data.size());
  return pair;
}

Mat sandwich_cov(const FisherPair& pair) {
  if (pair.n == 0) throw ArgumentError("sandwich needs a sample count");
  const Mat f1_inv = spd_inverse(pair.f1);
  return f1_inv * pair.f2 * f1_inv / static_cast<double>(pair.n);
}

Mat naive_cov(const FisherPair& pair) {
  if (pair.n == 0) throw ArgumentError("covariance needs a sample count");
  return spd_inverse(pair.f1) / static_cast<double>(pair.n);
}

namespace {

ConfidenceReport report_from_cov(const Vec& theta, const Mat& cov, const std::string& method,
                                 double alpha) {
  ConfidenceReport rep;
  rep.estimate = theta;
  rep.variance = cov.diagonal();
  if (rep.variance.minCoeff() < 0.0)
    throw ConditioningError("negative variance from the covariance assembly");
  const double z = z_critical(alpha);
  rep.lower = theta - z * rep.variance.cwiseSqrt();
  rep.upper = theta + z * rep.variance.cwiseSqrt();
  rep.method = method;
  rep.alpha = alpha;
  return rep;
}

}  // namespace

ConfidenceReport sandwich_ci_iid(const Vec& theta, const FisherPair& pair, double alpha) {
  if (theta.size() != pair.f1.rows()) throw ArgumentError("theta size does not match F1");
  return report_from_cov(theta, sandwich_cov(pair), "asymptotic", alpha);
}

// ---------------------------------------------------------------------------
// Path-space asymptotics
// ---------------------------------------------------------------------------

Mat fisher_i1_ts(const TimeSeriesDataset& data, const BasisSet& basis, Index slow) {
  data.validate();
  if (slow < 0 || slow >= data.dim()) throw ArgumentError("slow column out of range");
  Mat acc = Mat::Zero(basis.size(), basis.size());
  Vec phi;
  std::size_t n = 0;
  for (const auto& path : data.paths) {
    for (Index i = 0; i + 1 < path.rows(); ++i) {
      basis.eval(path(i, slow), phi);
      acc.selfadjointView<Eigen::Lower>().rankUpdate(phi);
      ++n;
    }
  }
  return Mat(acc.selfadjointView<Eigen::Lower>()) * (data.h / static_cast<double>(n));
}

Mat batch_means_cov(const Mat& rows, std::size_t batch_len) {
  const std::size_t n = static_cast<std::size_t>(rows.rows());
  const std::size_t b =
      batch_len > 0 ? batch_len : static_cast<std::size_t>(std::floor(std::sqrt(n)));
  if (b == 0) throw ArgumentError("batch length must be positive");
  const std::size_t a = n / b;
  if (a < 2)
    throw ArgumentError("sequence too short for batch means: " + std::to_string(a) +
                        " batches of length " + std::to_string(b));

  const Index k = rows.cols();
  Mat batch_mean(static_cast<Index>(a), k);
  for (std::size_t j = 0; j < a; ++j)
    batch_mean.row(static_cast<Index>(j)) =
        rows.middleRows(static_cast<Index>(j * b), static_cast<Index>(b)).colwise().mean();
  const Vec grand = batch_mean.colwise().mean();
  Mat sigma = Mat::Zero(k, k);
  for (Index j = 0; j < batch_mean.rows(); ++j) {
    const Vec d = batch_mean.row(j).transpose() - grand;
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(d);
  }
  return Mat(sigma.selfadjointView<Eigen::Lower>()) *
         (static_cast<double>(b) / static_cast<double>(a - 1));
}

Mat batch_means_sigma(const TimeSeriesDataset& data, const BasisSet& basis, const Vec& theta,
                      std::size_t batch_len, Index slow) {
  data.validate();
  if (data.n_paths() != 1)
    throw ArgumentError("batch means is defined on one stationary path");
  if (slow < 0 || slow >= data.dim()) throw ArgumentError("slow column out of range");
  if (theta.size() != basis.size()) throw ArgumentError("theta size does not match basis");

  const Mat& path = data.paths.front();
  const Index n = path.rows() - 1;
  const double h = data.h;
  Mat scores(n, basis.size());
  Vec phi;
  for (Index i = 0; i < n; ++i) {
    basis.eval(path(i, slow), phi);
    const double increment = path(i + 1, slow) - path(i, slow);
    scores.row(i) = (phi * (increment - phi.dot(theta) * h)).transpose();
  }
  return batch_means_cov(scores, batch_len);
}

ConfidenceReport sandwich_ci_ts(const Vec& theta, const Mat& i1, const Mat& sigma_bm,
                                std::size_t n_transitions, double alpha) {
  if (theta.size() != i1.rows() || i1.rows() != sigma_bm.rows())
    throw ArgumentError("shape mismatch in the path-space sandwich");
  if (n_transitions == 0) throw ArgumentError("need a positive transition count");
  const Mat i1_inv = spd_inverse(i1);
  const Mat cov = i1_inv * sigma_bm * i1_inv / static_cast<double>(n_transitions);
  return report_from_cov(theta, cov, "asymptotic", alpha);
}

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

std::size_t unit_count(const IidDataset& data) { return static_cast<std::size_t>(data.size()); }
std::size_t unit_count(const TimeSeriesDataset& data) { return data.n_paths(); }

IidDataset select_units(const IidDataset& data, const std::vector<std::size_t>& idx) {
  IidDataset out;
  out.label = data.label;
  out.states.resize(static_cast<Index>(idx.size()), data.states.cols());
  if (data.has_forces()) out.cg_forces.resize(static_cast<Index>(idx.size()), data.cg_forces.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.states.row(static_cast<Index>(r)) = data.states.row(static_cast<Index>(idx[r]));
    if (data.has_forces())
      out.cg_forces.row(static_cast<Index>(r)) = data.cg_forces.row(static_cast<Index>(idx[r]));
  }
  return out;
}

TimeSeriesDataset select_units(const TimeSeriesDataset& data,
                               const std::vector<std::size_t>& idx) {
  TimeSeriesDataset out;
  out.h = data.h;
  out.stationary = data.stationary;
  out.paths.reserve(idx.size());
  for (std::size_t r : idx) out.paths.push_back(data.paths.at(r));
  return out;
}

double interpolated_quantile(const Vec& sorted, double p) {
  const Index n = sorted.size();
  if (n == 0) throw ArgumentError("quantile of an empty sample");
  if (!(p >= 0.0) || !(p <= 1.0)) throw ArgumentError("quantile probability must be in [0, 1]");
  if (n == 1) return sorted[0];
  const double position = static_cast<double>(n - 1) * p;  // 0-based
  const double floor_pos = std::floor(position);
  const Index lo = std::min(static_cast<Index>(floor_pos), n - 2);
  const double frac = position - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {

Vec column_sorted(const Mat& m, Index col) {
  Vec v = m.col(col);
  std::sort(v.data(), v.data() + v.size());
  return v;
}

// (1/B) sum (theta* - mean)^2 per coefficient.
Vec replicate_variance(const Mat& thetas) {
  const Vec mean = thetas.colwise().mean();
  Vec var = Vec::Zero(thetas.cols());
  for (Index i = 0; i < thetas.rows(); ++i) {
    const Vec d = thetas.row(i).transpose() - mean;
    var += d.cwiseProduct(d);
  }
  return var / static_cast<double>(thetas.rows());
}

void check_replicates(const Vec& theta_hat, const BootstrapReplicates& reps) {
  if (reps.thetas.rows() < 2) throw ArgumentError("need at least two bootstrap replicates");
  if (reps.thetas.cols() != theta_hat.size())
    throw ArgumentError("replicate width does not match the estimate");
}

}  // namespace

ConfidenceReport bootstrap_standard_ci(const Vec& theta_hat, const BootstrapReplicates& reps,
                                       double alpha) {
  check_replicates(theta_hat, reps);
  ConfidenceReport rep;
  rep.estimate = theta_hat;
  rep.variance = replicate_variance(reps.thetas);
  const double z = z_critical(alpha);
  rep.lower = theta_hat - z * rep.variance.cwiseSqrt();
  rep.upper = theta_hat + z * rep.variance.cwiseSqrt();
  rep.method = "bootstrap-standard";
  rep.alpha = alpha;
  return rep;
}

ConfidenceReport bootstrap_percentile_ci(const Vec& theta_hat, const BootstrapReplicates& reps,
                                         double alpha) {
  check_replicates(theta_hat, reps);
  ConfidenceReport rep;
  rep.estimate = theta_hat;
  rep.variance = replicate_variance(reps.thetas);
  rep.lower.resize(theta_hat.size());
  rep.upper.resize(theta_hat.size());
  for (Index k = 0; k < theta_hat.size(); ++k) {
    const Vec sorted = column_sorted(reps.thetas, k);
    rep.lower[k] = interpolated_quantile(sorted, 0.5 * alpha);
    rep.upper[k] = interpolated_quantile(sorted, 1.0 - 0.5 * alpha);
  }
  rep.method = "bootstrap-percentile";
  rep.alpha = alpha;
  return rep;
}

Vec rstd(const Vec& theta, const Vec& sigma) {
  if (theta.size() != sigma.size()) throw ArgumentError("rstd shape mismatch");
  Vec out(theta.size());
  for (Index k = 0; k < theta.size(); ++k)
    out[k] = std::abs(theta[k]) < 1e-12 ? std::numeric_limits<double>::quiet_NaN()
                                        : sigma[k] / std::abs(theta[k]);
  return out;
}

double delta_method_se(const Vec& grad, const Mat& cov) {
  if (grad.size() != cov.rows() || cov.rows() != cov.cols())
    throw ArgumentError("delta method shape mismatch");
  const double var = grad.dot(cov * grad);
  if (var < -1e-12 * std::max(1.0, grad.squaredNorm()))
    throw ArgumentError("covariance is not positive semidefinite");
  return std::sqrt(std::max(var, 0.0));
}

QoiBand qoi_bootstrap_band(const Vec& grid, const Vec& theta_hat, const BootstrapReplicates& reps,
                           const std::function<Vec(const Vec&)>& g, double alpha) {
  check_replicates(theta_hat, reps);
  QoiBand band;
  band.grid = grid;
  band.estimate = g(theta_hat);
  if (band.estimate.size() != grid.size())
    throw ArgumentError("qoi curve length does not match the grid");

  const Index b = reps.thetas.rows();
  Mat curves(b, grid.size());
  for (Index r = 0; r < b; ++r) {
    const Vec curve = g(reps.thetas.row(r).transpose());
    if (curve.size() != grid.size())
      throw ArgumentError("qoi curve length does not match the grid");
    curves.row(r) = curve.transpose();
  }
  band.lower.resize(grid.size());
  band.upper.resize(grid.size());
  band.std_dev.resize(grid.size());
  for (Index j = 0; j < grid.size(); ++j) {
    const Vec sorted = column_sorted(curves, j);
    band.lower[j] = interpolated_quantile(sorted, 0.5 * alpha);
    band.upper[j] = interpolated_quantile(sorted, 1.0 - 0.5 * alpha);
    const double mean = curves.col(j).mean();
    band.std_dev[j] = std::sqrt((curves.col(j).array() - mean).square().sum() /
                                static_cast<double>(curves.rows()));
  }
  return band;
}

}  // namespace cgfit
