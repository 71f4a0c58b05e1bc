#pragma once

#include <cstdint>

#include "cgfit/dataset.hpp"
#include "cgfit/types.hpp"

namespace cgfit {

// Two-scale benchmark SDE with a slow coordinate x driven by a fast
// Ornstein-Uhlenbeck coordinate y:
//   dx = -y dt + dW1,   dy = -(y - x)/eps dt + eps^{-1/2} dW2.
// Averaging over y gives the effective slow model dx = -x dt + dW, so the
// reference coefficients over monomials 1, x, x^2, ... are (0, -1, 0, ...).
struct TwoScaleParams {
  double eps = 0.005;
  double h_fine = 5e-4;  // explicit Euler-Maruyama step
  double x0 = 0.0;
  double y0 = 0.0;

  void validate() const;  // positivity; finite initial state
};

// n_steps Euler-Maruyama steps from (x0, y0); returns an (n_steps+1) x 2
// trajectory of (x, y).  With zero_noise the Brownian increments are dropped
// (deterministic stepping diagnostic; no stability guard).  The stochastic
// integrator requires h_fine <= eps/2, else ConfigError.
Mat simulate_two_scale(const TwoScaleParams& params, std::size_t n_steps, std::uint64_t seed,
                       bool zero_noise = false);

// Decimates a recorded (x, y) trajectory into approximately independent
// samples: drops burn_in time units, then keeps every stride_time units.
// Output states are the slow coordinate x (one column) and cg_forces carry
// the matched coarse force observation -y.
IidDataset subsample_iid(const Mat& trajectory, const TwoScaleParams& params,
                         double stride_time = 5.0, double burn_in = 100.0);

// Streaming equivalent of simulate_two_scale + subsample_iid with the same
// seed; produces identical samples without materializing the fine trajectory.
IidDataset sample_stationary_iid(const TwoScaleParams& params, std::size_t n, std::uint64_t seed,
                                 double stride_time = 5.0, double burn_in = 100.0);

// n_paths independent stationary paths of (x, y), each with n_records states
// recorded every record_h time units after burn_in.  record_h must be an
// integer multiple of h_fine.  Path p uses the RNG stream split_seed(seed, p),
// so the result is independent of evaluation order and thread count.
TimeSeriesDataset generate_paths(const TwoScaleParams& params, std::size_t n_paths,
                                 std::size_t n_records, double record_h, std::uint64_t seed,
                                 double burn_in = 100.0);

}  // namespace cgfit
