#include "cgfit/estimators.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "cgfit/density.hpp"
#include "cgfit/errors.hpp"
#include "cgfit/linalg.hpp"

namespace cgfit {

namespace {

void require_scalar_states(const IidDataset& data) {
  if (data.states.cols() != 1)
    throw ArgumentError("estimator expects one-dimensional coarse states; project first");
}

Vec data_g_mean(const IidDataset& data, int k_count) {
  Vec mean = Vec::Zero(k_count);
  for (Index i = 0; i < data.states.rows(); ++i)
    mean += gibbs_statistics(data.states(i, 0), k_count);
  return mean / static_cast<double>(data.states.rows());
}

}  // namespace

ParamEstimate fit_fm_iid(const IidDataset& data, const BasisSet& basis) {
  data.validate();
  require_scalar_states(data);
  if (!data.has_forces()) throw ArgumentError("force matching needs recorded forces");
  if (data.cg_forces.cols() != 1) throw ArgumentError("expected one force component per sample");

  LinearSystem sys(basis.size());
  Vec phi;
  for (Index i = 0; i < data.size(); ++i) {
    basis.eval(data.states(i, 0), phi);
    sys.add_row(phi, data.cg_forces(i, 0));
  }
  ParamEstimate est;
  est.theta = solve_normal_equations(sys);
  est.method = "fm-iid";
  est.n_samples = static_cast<std::size_t>(data.size());
  return est;
}

ParamEstimate fit_rer(const TimeSeriesDataset& data, const BasisSet& basis, Index slow) {
  data.validate();
  if (slow < 0 || slow >= data.dim()) throw ArgumentError("slow column out of range");
  const double h = data.h;
  const double n_paths = static_cast<double>(data.n_paths());

  LinearSystem sys(basis.size());
  Vec phi;
  bool short_series = false;
  for (const auto& path : data.paths) {
    const Index nt = path.rows();
    if (static_cast<double>(nt) * h < 50.0) short_series = true;
    const double weight = 1.0 / (n_paths * static_cast<double>(nt - 1));
    for (Index i = 0; i + 1 < nt; ++i) {
      basis.eval(path(i, slow), phi);
      sys.add_row(phi * h, path(i + 1, slow) - path(i, slow), weight);
    }
  }
  ParamEstimate est;
  est.theta = solve_normal_equations(sys);
  est.method = "rer";
  est.n_samples = data.n_transitions();
  if (short_series)
    est.note = "short series: a path spans fewer than 50 time units; "
               "drift estimates may be dominated by noise";
  return est;
}

ParamEstimate fit_fm_ts(const TimeSeriesDataset& data, const BasisSet& basis, Index slow,
                        Index fast) {
  data.validate();
  if (slow < 0 || slow >= data.dim()) throw ArgumentError("slow column out of range");
  if (fast < 0 || fast >= data.dim() || fast == slow)
    throw ArgumentError("fast column out of range");

  const double n_paths = static_cast<double>(data.n_paths());
  LinearSystem sys(basis.size());
  Vec phi;
  std::size_t n_records = 0;
  for (const auto& path : data.paths) {
    const double weight = 1.0 / (n_paths * static_cast<double>(path.rows()));
    for (Index i = 0; i < path.rows(); ++i) {
      basis.eval(path(i, slow), phi);
      sys.add_row(phi, -path(i, fast), weight);
    }
    n_records += static_cast<std::size_t>(path.rows());
  }
  ParamEstimate est;
  est.theta = solve_normal_equations(sys);
  est.method = "fm-ts";
  est.n_samples = n_records;
  return est;
}

double re_objective(const IidDataset& data, const BasisSet& basis, const Vec& theta,
                    double half_width, Index n_points) {
  data.validate();
  require_scalar_states(data);
  if (theta.size() != basis.size()) throw ArgumentError("theta size does not match basis");
  // -(2/N) sum U(x_i) = 2 theta . mean(g); the quadrature supplies log Z.
  const Vec g_bar = data_g_mean(data, basis.size());
  const DensityGrid grid = cg_invariant_density(basis, theta, half_width, n_points);
  return 2.0 * theta.dot(g_bar) - grid.log_z;
}

ParamEstimate fit_re_iid(const IidDataset& data, const BasisSet& basis,
                         const NewtonOptions& options) {
  data.validate();
  require_scalar_states(data);
  if (basis.kind() != BasisKind::monomial)
    throw UnsupportedError("relative entropy fit requires a monomial basis");
  const int k_count = basis.size();

  const Vec g_bar = data_g_mean(data, k_count);
  // Objective with the data part folded in: l(theta) = 2 theta.g_bar - log Z.
  auto objective = [&](const Vec& theta) -> std::optional<double> {
    try {
      const DensityGrid grid =
          cg_invariant_density(basis, theta, options.half_width, options.n_points);
      return 2.0 * theta.dot(g_bar) - grid.log_z;
    } catch (const IntegrabilityError&) {
      return std::nullopt;
    }
  };

  Vec theta;
  if (options.theta0.size() > 0) {
    if (options.theta0.size() != k_count)
      throw ArgumentError("theta0 size does not match basis");
    theta = options.theta0;
  } else {
    // Gaussian moment-matched start: exp(theta_2 x^2) has variance
    // -1/(2 theta_2), so theta_2 = -1/(2 var(x)).
    if (k_count < 2)
      throw ArgumentError("default start needs K >= 2; supply theta0");
    const double mean = data.states.col(0).mean();
    const double var =
        (data.states.col(0).array() - mean).square().sum() / static_cast<double>(data.size());
    if (!(var > 0.0)) throw ArgumentError("data variance is zero; supply theta0");
    theta = Vec::Zero(k_count);
    theta[1] = -1.0 / (2.0 * var);
  }

  ParamEstimate est;
  est.method = "re-iid";
  est.n_samples = static_cast<std::size_t>(data.size());

  auto current = objective(theta);
  if (!current)
    throw IntegrabilityError("starting coefficients are not confining on the quadrature domain");

  bool converged = false;
  int iterations = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    iterations = it;
    const DensityGrid grid =
        cg_invariant_density(basis, theta, options.half_width, options.n_points);
    const GibbsMoments mom = gibbs_moments(grid, k_count);
    const Vec score = 2.0 * (g_bar - mom.mean);  // gradient of the objective
    if (score.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      converged = true;
      iterations = it - 1;
      break;
    }
    // Newton ascent direction from the (PSD) curvature 4 Cov(g); fall back to
    // the raw gradient when the curvature is numerically singular.
    Vec direction;
    try {
      direction = solve_normal_equations(4.0 * mom.cov, score);
    } catch (const ConditioningError&) {
      direction = score;
      if (est.note.find("gradient fallback") == std::string::npos)
        est.note += (est.note.empty() ? "" : "; ") +
                    std::string("gradient fallback: curvature not positive definite at iteration ") +
                    std::to_string(it);
    }
    // Backtracking: reject candidates that leave the confining region or
    // decrease the objective.
    double step = 1.0;
    bool moved = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      const Vec candidate = theta + step * direction;
      const auto value = objective(candidate);
      if (value && *value >= *current - 1e-14 * (1.0 + std::abs(*current))) {
        theta = candidate;
        current = value;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      est.note += (est.note.empty() ? "" : "; ") + std::string("line search exhausted after ") +
                  std::to_string(options.max_halvings) + " halvings";
      break;
    }
  }

  est.theta = theta;
  est.converged = converged;
  est.iterations = iterations;
  if (!converged && est.note.empty())
    est.note = "score tolerance not reached in " + std::to_string(options.max_iter) + " iterations";
  return est;
}

}  // namespace cgfit
