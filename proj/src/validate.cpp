#include "cgfit/validate.hpp"

#include <atomic>
#include <chrono>
#include <functional>

#include "cgfit/errors.hpp"
#include "cgfit/estimators.hpp"
#include "cgfit/parallel.hpp"

namespace cgfit {

std::string to_string(FitKind kind) {
  switch (kind) {
    case FitKind::fm_iid: return "fm-iid";
    case FitKind::re_iid: return "re-iid";
    case FitKind::rer: return "rer";
  }
  throw ArgumentError("unknown fit kind");
}

std::string to_string(CiKind kind) {
  switch (kind) {
    case CiKind::asymptotic: return "asymptotic";
    case CiKind::jackknife: return "jackknife";
    case CiKind::bootstrap_standard: return "bootstrap-standard";
    case CiKind::bootstrap_percentile: return "bootstrap-percentile";
  }
  throw ArgumentError("unknown interval kind");
}

FitKind fit_kind_from_string(const std::string& name) {
  if (name == "fm-iid" || name == "fm") return FitKind::fm_iid;
  if (name == "re-iid" || name == "re") return FitKind::re_iid;
  if (name == "rer") return FitKind::rer;
  throw ParseError("unknown fit kind '" + name + "'");
}

CiKind ci_kind_from_string(const std::string& name) {
  if (name == "asymptotic") return CiKind::asymptotic;
  if (name == "jackknife") return CiKind::jackknife;
  if (name == "bootstrap-standard") return CiKind::bootstrap_standard;
  if (name == "bootstrap-percentile") return CiKind::bootstrap_percentile;
  throw ParseError("unknown interval kind '" + name + "'");
}

namespace {

// Fit + interval for one trial's dataset, dispatching on the coverage spec.
ConfidenceReport trial_report(const CoverageSpec& spec, const BasisSet& basis,
                              std::uint64_t trial_seed) {
  if (spec.fit == FitKind::rer) {
    const TimeSeriesDataset path = generate_paths(spec.sde, 1, spec.n, spec.record_h, trial_seed,
                                                  spec.burn_in);
    const ParamEstimate est = fit_rer(path, basis);
    switch (spec.ci) {
      case CiKind::asymptotic: {
        const Mat i1 = fisher_i1_ts(path, basis);
        const Mat sigma = batch_means_sigma(path, basis, est.theta, spec.batch_len);
        return sandwich_ci_ts(est.theta, i1, sigma, path.n_transitions(), spec.alpha);
      }
      case CiKind::jackknife:
        throw ArgumentError("jackknife coverage needs multiple paths per trial");
      case CiKind::bootstrap_standard:
      case CiKind::bootstrap_percentile:
        throw ArgumentError("bootstrap coverage needs multiple paths per trial");
    }
    throw ArgumentError("unknown interval kind");
  }

  const IidDataset data =
      sample_stationary_iid(spec.sde, spec.n, trial_seed, spec.stride_time, spec.burn_in);
  ParamEstimate est;
  if (spec.fit == FitKind::fm_iid)
    est = fit_fm_iid(data, basis);
  else
    est = fit_re_iid(data, basis);

  const std::function<Vec(const IidDataset&)> refit = [&](const IidDataset& d) {
    if (spec.fit == FitKind::fm_iid) return fit_fm_iid(d, basis).theta;
    NewtonOptions warm;
    warm.theta0 = est.theta;  // replicates start from the full-data optimum
    return fit_re_iid(d, basis, warm).theta;
  };

  switch (spec.ci) {
    case CiKind::asymptotic: {
      if (spec.fit == FitKind::fm_iid) {
        const FmScoreModel model(basis, est.theta);
        return sandwich_ci_iid(est.theta, fisher_pair_iid(model, data), spec.alpha);
      }
      const GibbsScoreModel model(basis, est.theta);
      return sandwich_ci_iid(est.theta, fisher_pair_iid(model, data), spec.alpha);
    }
    case CiKind::jackknife:
      return jackknife<IidDataset>(data, refit, spec.alpha).report;
    case CiKind::bootstrap_standard:
      return bootstrap_standard_ci(
          est.theta, bootstrap<IidDataset>(data, refit, spec.bootstrap_b, split_seed(trial_seed, 1)),
          spec.alpha);
    case CiKind::bootstrap_percentile:
      return bootstrap_percentile_ci(
          est.theta, bootstrap<IidDataset>(data, refit, spec.bootstrap_b, split_seed(trial_seed, 1)),
          spec.alpha);
  }
  throw ArgumentError("unknown interval kind");
}

}  // namespace

CoverageResult coverage_experiment(const CoverageSpec& spec, std::uint64_t seed) {
  if (spec.trials < 20)
    throw ArgumentError("coverage fractions need at least 20 trials");
  if (spec.basis_size < 1) throw ArgumentError("basis size must be positive");
  const BasisSet basis = BasisSet::monomial(spec.basis_size);
  Vec theta_star = spec.theta_star;
  if (theta_star.size() == 0) {
    theta_star = Vec::Zero(spec.basis_size);
    if (spec.basis_size >= 2) theta_star[1] = -1.0;
  } else if (theta_star.size() != spec.basis_size) {
    throw ArgumentError("theta_star size does not match the basis");
  }

  Mat contains = Mat::Zero(static_cast<Index>(spec.trials), spec.basis_size);
  std::vector<char> trial_ok(spec.trials, 0);
  parallel_for(spec.trials, [&](std::size_t t) {
    try {
      const ConfidenceReport rep = trial_report(spec, basis, split_seed(seed, t));
      for (Index k = 0; k < theta_star.size(); ++k)
        contains(static_cast<Index>(t), k) =
            (rep.lower[k] <= theta_star[k] && theta_star[k] <= rep.upper[k]) ? 1.0 : 0.0;
      trial_ok[t] = 1;
    } catch (const Error&) {
      trial_ok[t] = 0;
    }
  });

  CoverageResult result;
  result.trials = spec.trials;
  std::size_t ok_count = 0;
  Vec hit_sum = Vec::Zero(spec.basis_size);
  for (std::size_t t = 0; t < spec.trials; ++t) {
    if (!trial_ok[t]) continue;
    ++ok_count;
    hit_sum += contains.row(static_cast<Index>(t)).transpose();
  }
  result.failures = spec.trials - ok_count;
  if (20 * result.failures > spec.trials)
    throw ConvergenceError("coverage experiment: " + std::to_string(result.failures) + " of " +
                           std::to_string(spec.trials) + " trials failed (over the 5% budget)");
  result.coverage = hit_sum / static_cast<double>(ok_count);
  result.mean_coverage = result.coverage.mean();
  return result;
}

std::vector<MethodRow> method_comparison(std::uint64_t seed, std::size_t n_iid,
                                         std::size_t n_records, int basis_size, double alpha,
                                         const TwoScaleParams& sde) {
  const BasisSet basis = BasisSet::monomial(basis_size);
  std::vector<MethodRow> rows;
  using clock = std::chrono::steady_clock;

  const IidDataset iid = sample_stationary_iid(sde, n_iid, split_seed(seed, 0));
  {
    MethodRow row;
    row.method = "fm-iid";
    const auto t0 = clock::now();
    const ParamEstimate est = fit_fm_iid(iid, basis);
    row.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    const FmScoreModel model(basis, est.theta);
    const ConfidenceReport rep = sandwich_ci_iid(est.theta, fisher_pair_iid(model, iid), alpha);
    row.theta = est.theta;
    row.variance = rep.variance;
    row.lower = rep.lower;
    row.upper = rep.upper;
    row.n_samples = est.n_samples;
    rows.push_back(std::move(row));
  }
  {
    MethodRow row;
    row.method = "re-iid";
    const auto t0 = clock::now();
    const ParamEstimate est = fit_re_iid(iid, basis);
    row.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    const GibbsScoreModel model(basis, est.theta);
    const ConfidenceReport rep = sandwich_ci_iid(est.theta, fisher_pair_iid(model, iid), alpha);
    row.theta = est.theta;
    row.variance = rep.variance;
    row.lower = rep.lower;
    row.upper = rep.upper;
    row.n_samples = est.n_samples;
    rows.push_back(std::move(row));
  }
  {
    MethodRow row;
    row.method = "rer";
    const TimeSeriesDataset path = generate_paths(sde, 1, n_records, 0.01, split_seed(seed, 1));
    const auto t0 = clock::now();
    const ParamEstimate est = fit_rer(path, basis);
    row.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    const Mat i1 = fisher_i1_ts(path, basis);
    const Mat sigma = batch_means_sigma(path, basis, est.theta);
    const ConfidenceReport rep =
        sandwich_ci_ts(est.theta, i1, sigma, path.n_transitions(), alpha);
    row.theta = est.theta;
    row.variance = rep.variance;
    row.lower = rep.lower;
    row.upper = rep.upper;
    row.n_samples = est.n_samples;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cgfit
