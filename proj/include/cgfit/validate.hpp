#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cgfit/twoscale.hpp"
#include "cgfit/types.hpp"
#include "cgfit/uq.hpp"

namespace cgfit {

enum class FitKind { fm_iid, re_iid, rer };
enum class CiKind { asymptotic, jackknife, bootstrap_standard, bootstrap_percentile };

std::string to_string(FitKind kind);
std::string to_string(CiKind kind);
FitKind fit_kind_from_string(const std::string& name);
CiKind ci_kind_from_string(const std::string& name);

// One coverage experiment: `trials` independent datasets from the two-scale
// benchmark, each fitted and wrapped in a confidence interval, scored against
// the reference coefficients.
struct CoverageSpec {
  FitKind fit = FitKind::fm_iid;
  CiKind ci = CiKind::asymptotic;
  std::size_t n = 500;         // iid samples, or records per path for rer
  double alpha = 0.05;
  std::size_t trials = 200;
  int basis_size = 5;
  Vec theta_star;              // empty: (0, -1, 0, ...) over the monomial basis
  TwoScaleParams sde{};
  double record_h = 0.01;      // rer recording interval
  double stride_time = 5.0;    // iid decimation stride
  double burn_in = 100.0;
  std::size_t bootstrap_b = 200;
  std::size_t batch_len = 0;   // rer batch means; 0 = floor(sqrt(n-1))
};

struct CoverageResult {
  Vec coverage;        // per-coefficient fraction of trials containing theta_star
  double mean_coverage = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;  // trials whose fit or interval threw
};

// Runs the experiment with per-trial RNG streams split_seed(seed, trial).
// Needs trials >= 20 for the fractions to mean anything; more than 5% failed
// trials is an error.
CoverageResult coverage_experiment(const CoverageSpec& spec, std::uint64_t seed);

// One row of the estimator comparison table: coefficients, interval, and the
// wall time of the fit itself.
struct MethodRow {
  std::string method;
  Vec theta;
  Vec variance;
  Vec lower;
  Vec upper;
  double wall_seconds = 0.0;
  std::size_t n_samples = 0;
};

// Fits the same benchmark with force matching and relative entropy on a
// shared iid draw (n_iid samples) and the path-space estimator on one long
// path (n_records records), each with its asymptotic interval.
std::vector<MethodRow> method_comparison(std::uint64_t seed, std::size_t n_iid = 500,
                                         std::size_t n_records = 50000, int basis_size = 5,
                                         double alpha = 0.05,
                                         const TwoScaleParams& sde = {});

}  // namespace cgfit
