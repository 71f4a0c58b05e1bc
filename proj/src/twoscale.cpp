#include "cgfit/twoscale.hpp"

#include <cmath>
#include <string>

#include "cgfit/errors.hpp"
#include "cgfit/parallel.hpp"
#include "cgfit/rng.hpp"

namespace cgfit {

void TwoScaleParams::validate() const {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(h_fine > 0.0)) throw ConfigError("h_fine must be positive");
  if (!std::isfinite(x0) || !std::isfinite(y0))
    throw ConfigError("initial state must be finite");
}

namespace {

// Number of fine steps in `interval`, which must be a (near-)integer multiple
// of the step size.
std::size_t steps_for(double interval, double h_fine, const char* what) {
  if (interval < 0.0) throw ConfigError(std::string(what) + " must be non-negative");
  const double ratio = interval / h_fine;
  const double rounded = std::llround(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError(std::string(what) + " = " + std::to_string(interval) +
                      " is not an integer multiple of h_fine = " + std::to_string(h_fine));
  return static_cast<std::size_t>(rounded);
}

void check_stability(const TwoScaleParams& p) {
  if (p.h_fine > 0.5 * p.eps)
    throw ConfigError("h_fine = " + std::to_string(p.h_fine) + " exceeds eps/2 = " +
                      std::to_string(0.5 * p.eps) + "; the fast variable is unstable");
}

struct Stepper {
  double x, y;
  double h, eps;
  double noise_x, noise_y;  // sqrt(h), sqrt(h/eps); zero in the deterministic variant

  void step(Rng& rng) {
    const double xi1 = noise_x != 0.0 || noise_y != 0.0 ? rng.normal() : 0.0;
    const double xi2 = noise_x != 0.0 || noise_y != 0.0 ? rng.normal() : 0.0;
    const double x_new = x - y * h + noise_x * xi1;
    const double y_new = y - (y - x) / eps * h + noise_y * xi2;
    x = x_new;
    y = y_new;
  }
};

Stepper make_stepper(const TwoScaleParams& p, bool zero_noise) {
  p.validate();
  if (!zero_noise) check_stability(p);
  Stepper s;
  s.x = p.x0;
  s.y = p.y0;
  s.h = p.h_fine;
  s.eps = p.eps;
  s.noise_x = zero_noise ? 0.0 : std::sqrt(p.h_fine);
  s.noise_y = zero_noise ? 0.0 : std::sqrt(p.h_fine / p.eps);
  return s;
}

}  // namespace

Mat simulate_two_scale(const TwoScaleParams& params, std::size_t n_steps, std::uint64_t seed,
                       bool zero_noise) {
  Stepper s = make_stepper(params, zero_noise);
  Rng rng(seed);
  Mat traj(static_cast<Index>(n_steps) + 1, 2);
  traj(0, 0) = s.x;
  traj(0, 1) = s.y;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    s.step(rng);
    traj(static_cast<Index>(i), 0) = s.x;
    traj(static_cast<Index>(i), 1) = s.y;
  }
  return traj;
}

IidDataset subsample_iid(const Mat& trajectory, const TwoScaleParams& params, double stride_time,
                         double burn_in) {
  if (trajectory.cols() != 2) throw ArgumentError("trajectory must have two columns (x, y)");
  const std::size_t burn_steps = steps_for(burn_in, params.h_fine, "burn_in");
  const std::size_t stride_steps = steps_for(stride_time, params.h_fine, "stride_time");
  if (stride_steps == 0) throw ConfigError("stride_time must cover at least one fine step");
  const std::size_t last = static_cast<std::size_t>(trajectory.rows()) - 1;
  if (burn_steps > last)
    throw ArgumentError("trajectory shorter than the burn-in window");
  const std::size_t n = (last - burn_steps) / stride_steps + 1;

  IidDataset out;
  out.states.resize(static_cast<Index>(n), 1);
  out.cg_forces.resize(static_cast<Index>(n), 1);
  out.label = "two-scale-iid";
  for (std::size_t i = 0; i < n; ++i) {
    const Index row = static_cast<Index>(burn_steps + i * stride_steps);
    out.states(static_cast<Index>(i), 0) = trajectory(row, 0);
    // The coarse force observation paired with x is -y (the slow drift).
    out.cg_forces(static_cast<Index>(i), 0) = -trajectory(row, 1);
  }
  return out;
}

IidDataset sample_stationary_iid(const TwoScaleParams& params, std::size_t n, std::uint64_t seed,
                                 double stride_time, double burn_in) {
  if (n == 0) throw ArgumentError("sample count must be positive");
  const std::size_t burn_steps = steps_for(burn_in, params.h_fine, "burn_in");
  const std::size_t stride_steps = steps_for(stride_time, params.h_fine, "stride_time");
  if (stride_steps == 0) throw ConfigError("stride_time must cover at least one fine step");

  Stepper s = make_stepper(params, false);
  Rng rng(seed);
  IidDataset out;
  out.states.resize(static_cast<Index>(n), 1);
  out.cg_forces.resize(static_cast<Index>(n), 1);
  out.label = "two-scale-iid";
  for (std::size_t i = 0; i < burn_steps; ++i) s.step(rng);
  out.states(0, 0) = s.x;
  out.cg_forces(0, 0) = -s.y;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < stride_steps; ++j) s.step(rng);
    out.states(static_cast<Index>(i), 0) = s.x;
    out.cg_forces(static_cast<Index>(i), 0) = -s.y;
  }
  return out;
}

TimeSeriesDataset generate_paths(const TwoScaleParams& params, std::size_t n_paths,
                                 std::size_t n_records, double record_h, std::uint64_t seed,
                                 double burn_in) {
  if (n_paths == 0) throw ArgumentError("need at least one path");
  if (n_records < 2) throw ArgumentError("each path needs at least two records");
  const std::size_t burn_steps = steps_for(burn_in, params.h_fine, "burn_in");
  const std::size_t record_stride = steps_for(record_h, params.h_fine, "record_h");
  if (record_stride == 0) throw ConfigError("record_h must cover at least one fine step");
  make_stepper(params, false);  // validate + stability before spawning work

  TimeSeriesDataset out;
  out.h = record_h;
  out.stationary = true;
  out.paths.assign(n_paths, Mat());
  parallel_for(n_paths, [&](std::size_t p) {
    Stepper s = make_stepper(params, false);
    Rng rng(split_seed(seed, p));
    Mat path(static_cast<Index>(n_records), 2);
    for (std::size_t i = 0; i < burn_steps; ++i) s.step(rng);
    path(0, 0) = s.x;
    path(0, 1) = s.y;
    for (std::size_t r = 1; r < n_records; ++r) {
      for (std::size_t j = 0; j < record_stride; ++j) s.step(rng);
      path(static_cast<Index>(r), 0) = s.x;
      path(static_cast<Index>(r), 1) = s.y;
    }
    out.paths[p] = std::move(path);
  });
  return out;
}

}  // namespace cgfit
