#pragma once

#include <cstdint>
#include <string>

#include "cgfit/basis.hpp"
#include "cgfit/dataset.hpp"
#include "cgfit/types.hpp"

namespace cgfit {

// A fitted coefficient vector with provenance: which estimator produced it,
// how many samples (rows or transitions) backed it, and whether the solver
// reached its tolerance.  `seed` is the data seed when the caller knows it.
struct ParamEstimate {
  Vec theta;
  std::string method;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  bool converged = true;
  int iterations = 0;
  std::string note;
};

// Force matching on unordered samples: least squares of the recorded coarse
// forces on the drift basis, solved through the normal equations.
ParamEstimate fit_fm_iid(const IidDataset& data, const BasisSet& basis);

// Path-space (relative entropy rate) fit on recorded paths: least squares of
// the increments x_{i+1} - x_i on phi(x_i) h.  Transitions are weighted
// 1 / (n_paths * (N_t - 1)) so every path counts equally.  `slow` selects the
// coarse coordinate column.
ParamEstimate fit_rer(const TimeSeriesDataset& data, const BasisSet& basis, Index slow = 0);

// Force matching read off a time series: the fast coordinate supplies the
// force observation -y at every record, regressed on phi(x).  Records are
// weighted 1 / (n_paths * N_t).
ParamEstimate fit_fm_ts(const TimeSeriesDataset& data, const BasisSet& basis, Index slow = 0,
                        Index fast = 1);

// Log-likelihood-per-sample of the equilibrium (Gibbs) family
//   p_theta(x) = exp(-2 U(x; theta)) / Z(theta):
//   (1/N) sum_i log p_theta(x_i) = -(2/N) sum_i U(x_i; theta) - log Z(theta).
// Z is computed by trapezoid quadrature on [-half_width, half_width].
double re_objective(const IidDataset& data, const BasisSet& basis, const Vec& theta,
                    double half_width = 8.0, Index n_points = 4001);

struct NewtonOptions {
  Vec theta0;              // empty: Gaussian moment-matched start
  int max_iter = 50;
  double grad_tol = 1e-8;  // sup-norm of the score
  int max_halvings = 30;
  double half_width = 8.0;
  Index n_points = 4001;
};

// Relative entropy (maximum likelihood) fit of the Gibbs family by damped
// Newton ascent.  Steps that leave the confining region or decrease the
// objective are halved; a non-positive-definite Hessian falls back to a
// gradient step (recorded in the note).  Monomial bases only.
ParamEstimate fit_re_iid(const IidDataset& data, const BasisSet& basis,
                         const NewtonOptions& options = {});

}  // namespace cgfit
